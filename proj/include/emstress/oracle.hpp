#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "emstress/error.hpp"
#include "emstress/reducer.hpp"

// Reference solvers for cross-checking the Krylov path. They share nothing
// with it beyond the reduced system itself: dense LU for the drift, Eigen's
// own scaling-and-squaring exponential, and a sparse LU for implicit Euler.

namespace emstress::oracle {

inline constexpr std::size_t kDefaultDenseCap = 4000;

/// sigma(t) = e^{tA}(sigma0 + F) - F with dense e^{tA}, for each t.
inline std::vector<Vector> dense_solve(const ReducedSystem& red, const Vector& sigma0,
                                       const std::vector<double>& times,
                                       std::size_t cap = kDefaultDenseCap) {
  if (red.order > cap)
    throw validation_error("reduced order " + std::to_string(red.order) +
                           " exceeds the dense oracle cap of " + std::to_string(cap));
  for (double t : times)
    if (!(t >= 0.0)) throw validation_error("evaluation time must be >= 0");
  const Vector s0 = restrict_state(sigma0, red);

  const DenseMatrix G = DenseMatrix(red.G);
  const DenseMatrix A = red.c.cwiseInverse().asDiagonal() * G;
  const Eigen::PartialPivLU<DenseMatrix> lu(G);
  const Vector F = lu.solve(DenseMatrix(red.B) * red.j);
  if (!F.allFinite()) throw solver_error("dense oracle: reduced stiffness is singular");
  const Vector start = s0 + F;

  std::vector<Vector> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      out.push_back(sigma0);
      continue;
    }
    const DenseMatrix E = (t * A).exp();
    out.push_back(recover_full(E * start - F, red));
  }
  return out;
}

inline Vector dense_solve(const ReducedSystem& red, const Vector& sigma0, double t,
                          std::size_t cap = kDefaultDenseCap) {
  return dense_solve(red, sigma0, std::vector<double>{t}, cap).front();
}

/// Backward Euler on C_r s' = G_r s + B_r j with `steps` uniform steps.
inline Vector implicit_step_solve(const ReducedSystem& red, const Vector& sigma0, double t,
                                  std::size_t steps) {
  if (steps < 1) throw validation_error("implicit stepping needs at least one step");
  if (!(t >= 0.0)) throw validation_error("evaluation time must be >= 0");
  Vector s = restrict_state(sigma0, red);
  if (t == 0.0) return sigma0;

  const double h = t / static_cast<double>(steps);
  SparseMatrix lhs = -h * red.G;
  for (Eigen::Index i = 0; i < lhs.rows(); ++i) lhs.coeffRef(i, i) += red.c(i);
  lhs.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(lhs);
  lu.factorize(lhs);
  if (lu.info() != Eigen::Success) throw solver_error("implicit stepping: factorization failed");

  const Vector forcing = h * red.drive();
  for (std::size_t i = 0; i < steps; ++i) {
    Vector rhs = red.c.cwiseProduct(s) + forcing;
    s = lu.solve(rhs);
  }
  return recover_full(s, red);
}

}  // namespace emstress::oracle
