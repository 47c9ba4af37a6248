#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace emstress;

namespace {

ReducedSystem seven_reduced(DiscretizedSystem& sys) {
  sys = build_system(gen_seven_segment(support::copper()), 2.5 * kMicron);
  return eliminate_singularity(sys);
}

}  // namespace

TEST(Oracle, ImplicitEulerIsFirstOrder) {
  DiscretizedSystem sys;
  const auto red = seven_reduced(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  const double t = 5 * kSecondsPerYear;
  const Vector ref = oracle::dense_solve(red, zero, t);
  const double e1 = support::rel_max_error(oracle::implicit_step_solve(red, zero, t, 200), ref);
  const double e2 = support::rel_max_error(oracle::implicit_step_solve(red, zero, t, 400), ref);
  EXPECT_NEAR(e1 / e2, 2.0, 0.1);
}

TEST(Oracle, RichardsonAgreesWithDense) {
  DiscretizedSystem sys;
  const auto red = seven_reduced(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  const double t = 10 * kSecondsPerYear;
  const Vector coarse = oracle::implicit_step_solve(red, zero, t, 1000);
  const Vector fine = oracle::implicit_step_solve(red, zero, t, 2000);
  EXPECT_LE(support::rel_max_error(2.0 * fine - coarse, oracle::dense_solve(red, zero, t)), 1e-4);
}

TEST(Oracle, TrivialCases) {
  DiscretizedSystem sys;
  const auto red = seven_reduced(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  EXPECT_EQ(oracle::dense_solve(red, zero, 0.0), zero);
  EXPECT_EQ(oracle::implicit_step_solve(red, zero, 0.0, 10), zero);

  auto tree = gen_seven_segment(support::copper());
  for (auto& s : tree.segments) s.current_density = 0.0;
  const auto quiet = build_system(tree, 2.5 * kMicron);
  const auto red0 = eliminate_singularity(quiet);
  EXPECT_EQ(oracle::dense_solve(red0, zero, kSecondsPerYear).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(oracle::implicit_step_solve(red0, zero, kSecondsPerYear, 5).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Oracle, SteadyStateIsMinusDrift) {
  DiscretizedSystem sys;
  const auto red = seven_reduced(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  const Vector steady = recover_full(-compute_drift(red), red);
  const double t = 1e4 * kSecondsPerYear;
  EXPECT_LE(support::rel_max_error(oracle::dense_solve(red, zero, t), steady), 1e-9);
  EXPECT_LE(support::rel_max_error(oracle::implicit_step_solve(red, zero, t, 200), steady), 5e-3);
}

TEST(Oracle, DenseCapIsEnforced) {
  DiscretizedSystem sys;
  const auto red = seven_reduced(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  EXPECT_THROW(oracle::dense_solve(red, zero, 1.0, 10), Error);
  EXPECT_THROW(oracle::implicit_step_solve(red, zero, 1.0, 0), Error);
}
