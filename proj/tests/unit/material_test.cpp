#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace emstress;

TEST(Material, KappaWithoutActivationIsThePrefactorProduct) {
  auto p = MaterialParams::copper(0.0);
  const double expected = p.D0 * p.bulk_modulus * p.Omega / (p.kB * p.T);
  EXPECT_DOUBLE_EQ(compute_kappa(p), expected);
  EXPECT_NEAR(compute_kappa(p), 8.234e-8, 1e-3 * 8.234e-8);
}

TEST(Material, KappaArrheniusFactor) {
  const auto p = support::copper();
  const double base = compute_kappa(MaterialParams::copper(0.0));
  EXPECT_NEAR(compute_kappa(p) / base, std::exp(-p.Ea / (p.kB * p.T)), 1e-12);
}

TEST(Material, KappaHalvesWhenTemperatureDoublesWithoutActivation) {
  auto p = MaterialParams::copper(0.0);
  const double k1 = compute_kappa(p);
  p.T *= 2.0;
  EXPECT_NEAR(compute_kappa(p), 0.5 * k1, 1e-15 * k1);
}

TEST(Material, Beta) {
  const auto p = support::copper();
  EXPECT_NEAR(compute_beta(p), 305.08, 0.01);
  auto zero = p;
  zero.Z_star = 0.0;
  EXPECT_EQ(compute_beta(zero), 0.0);
  auto doubled = p;
  doubled.rho *= 2.0;
  EXPECT_DOUBLE_EQ(compute_beta(doubled), 2.0 * compute_beta(p));
}

TEST(Material, RejectsNonPhysicalValues) {
  auto p = support::copper();
  p.T = 0.0;
  EXPECT_THROW(compute_kappa(p), Error);
  p = support::copper();
  p.Omega = -1.0;
  EXPECT_THROW(compute_beta(p), Error);
  p = support::copper();
  p.Ea = -1e-20;
  EXPECT_THROW(validate_params(p), Error);
  p = support::copper();
  p.D0 = std::nan("");
  try {
    validate_params(p);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_NE(std::string(e.what()).find("D0"), std::string::npos);
  }
}
