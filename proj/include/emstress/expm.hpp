#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "emstress/error.hpp"

namespace emstress {

namespace detail {

// Diagonal Pade approximant r_q(X) = (V - U)^{-1} (V + U), U odd and V even in X.
template <std::size_t Q>
void pade_terms(const Eigen::MatrixXd& X, const std::array<double, Q + 1>& b,
                Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  const auto n = X.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd X2 = X * X;
  Eigen::MatrixXd power = I;
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(n, n);
  V = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i <= Q; i += 2) {
    V += b[i] * power;
    if (i + 1 <= Q) odd += b[i + 1] * power;
    power = power * X2;
  }
  U.noalias() = X * odd;
}

inline void pade13_terms(const Eigen::MatrixXd& X, Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const auto n = X.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd X2 = X * X;
  const Eigen::MatrixXd X4 = X2 * X2;
  const Eigen::MatrixXd X6 = X4 * X2;
  Eigen::MatrixXd inner = b[13] * X6 + b[11] * X4 + b[9] * X2;
  Eigen::MatrixXd tmp = X6 * inner;
  tmp += b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * I;
  U.noalias() = X * tmp;
  inner = b[12] * X6 + b[10] * X4 + b[8] * X2;
  V = X6 * inner;
  V += b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * I;
}

}  // namespace detail

/// e^{tM} for a small dense matrix by scaling and squaring with diagonal
/// Pade approximants of degree 3..13, chosen from the 1-norm of tM.
inline Eigen::MatrixXd expm_small(const Eigen::MatrixXd& M, double t = 1.0) {
  if (M.rows() != M.cols()) throw validation_error("matrix exponential needs a square matrix");
  if (!M.allFinite() || !std::isfinite(t))
    throw solver_error("matrix exponential of a non-finite matrix");
  const auto n = M.rows();
  if (t == 0.0 || n == 0) return Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd X = t * M;
  const double norm1 = X.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd U, V;
  int squarings = 0;
  if (norm1 <= 1.495585217958292e-2) {
    detail::pade_terms<3>(X, {120.0, 60.0, 12.0, 1.0}, U, V);
  } else if (norm1 <= 2.539398330063230e-1) {
    detail::pade_terms<5>(X, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0}, U, V);
  } else if (norm1 <= 9.504178996162932e-1) {
    detail::pade_terms<7>(
        X, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0}, U, V);
  } else if (norm1 <= 2.097847961257068) {
    detail::pade_terms<9>(X,
                          {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                           2162160.0, 110880.0, 3960.0, 90.0, 1.0},
                          U, V);
  } else {
    constexpr double theta13 = 5.371920351148152;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    detail::pade13_terms(X / std::ldexp(1.0, squarings), U, V);
  }

  Eigen::MatrixXd E = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) E = E * E;
  if (!E.allFinite()) throw solver_error("matrix exponential overflowed");
  return E;
}

}  // namespace emstress
