#pragma once

#include <cmath>
#include <string>

#include "emstress/error.hpp"

namespace emstress {

inline constexpr double kElectronVolt = 1.602176634e-19;  // J
inline constexpr double kSecondsPerYear = 3.1536e7;

// Activation energy shipped with the bundled configs (0.86 eV, a common
// Cu grain-boundary value). Tool default only; tree files must state Ea.
inline constexpr double kToolDefaultActivationEnergy = 0.86 * kElectronVolt;

/// Physical constants of the Korhonen stress equation. All SI.
struct MaterialParams {
  double Z_star = 0.0;        // effective charge number
  double e_charge = 0.0;      // C
  double rho = 0.0;           // Ohm m
  double Omega = 0.0;         // atomic volume, m^3
  double bulk_modulus = 0.0;  // Pa
  double D0 = 0.0;            // m^2/s
  double Ea = 0.0;            // J
  double kB = 0.0;            // J/K
  double T = 0.0;             // K

  /// Cu dual-damascene constants used for the bundled fixtures, with the
  /// supplied activation energy.
  static MaterialParams copper(double activation_energy) {
    MaterialParams p;
    p.Z_star = 1.0;
    p.e_charge = 1.6e-19;
    p.rho = 2.25e-8;
    p.Omega = 1.18e-29;
    p.bulk_modulus = 28e9;
    p.D0 = 1.3e-9;
    p.Ea = activation_energy;
    p.kB = 1.38e-23;
    p.T = 378.0;
    return p;
  }

  bool operator==(const MaterialParams&) const = default;
};

/// Throws a validation error naming the first offending field.
inline void validate_params(const MaterialParams& p) {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw validation_error(std::string("invalid parameters: ") + name +
                             " must be finite and > 0");
  };
  if (!std::isfinite(p.Z_star) || p.Z_star < 0.0)
    throw validation_error("invalid parameters: Z_star must be finite and >= 0");
  positive(p.e_charge, "e_charge");
  positive(p.rho, "rho");
  positive(p.Omega, "Omega");
  positive(p.bulk_modulus, "bulk_modulus");
  positive(p.D0, "D0");
  positive(p.kB, "kB");
  positive(p.T, "T");
  if (!std::isfinite(p.Ea) || p.Ea < 0.0)
    throw validation_error("invalid parameters: Ea must be finite and >= 0");
}

/// Stress diffusivity kappa = D0 exp(-Ea/kB T) * B * Omega / (kB T), m^2/s.
inline double compute_kappa(const MaterialParams& p) {
  validate_params(p);
  const double kT = p.kB * p.T;
  const double Da = p.D0 * std::exp(-p.Ea / kT);
  const double kappa = Da * p.bulk_modulus * p.Omega / kT;
  if (!std::isfinite(kappa) || !(kappa > 0.0))
    throw validation_error("invalid parameters: diffusivity is not a finite positive number");
  return kappa;
}

/// EM driving-force coefficient beta = Z* e rho / Omega.
inline double compute_beta(const MaterialParams& p) {
  if (!(p.Omega > 0.0) || !std::isfinite(p.Omega))
    throw validation_error("invalid parameters: Omega must be finite and > 0");
  const double beta = p.Z_star * p.e_charge * p.rho / p.Omega;
  if (!std::isfinite(beta))
    throw validation_error("invalid parameters: beta is not finite");
  return beta;
}

}  // namespace emstress
