#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "emstress/error.hpp"
#include "emstress/expm.hpp"
#include "emstress/reducer.hpp"

namespace emstress {

struct SolverConfig {
  std::size_t m_max = 60;
  double eps = 1e-3;
  std::vector<double> t_eval;  // s, stopping test is applied at each

  void validate() const {
    if (m_max < 2) throw validation_error("m_max must be at least 2");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw validation_error("eps must be > 0");
    if (t_eval.empty()) throw validation_error("at least one evaluation time is required");
    for (double t : t_eval)
      if (!(t >= 0.0) || !std::isfinite(t))
        throw validation_error("evaluation times must be finite and >= 0");
  }
};

/// Applies A = C_r^{-1} G_r and its inverse with a single factorization of
/// G_r, directly or in area-weighted coordinates.
class ReducedOperator {
public:
  explicit ReducedOperator(const ReducedSystem& red)
      : red_(&red), factorization_(red), weighting_(red) {}

  const ReducedSystem& system() const { return *red_; }
  const ReducedFactorization& factorization() const { return factorization_; }
  const AreaWeighting& weighting() const { return weighting_; }

  Vector apply(const Vector& v) const {
    Vector y = red_->grounded * v;
    y += red_->coupling * red_->recovery_weights.dot(v);
    return y.cwiseQuotient(red_->c);
  }

  Vector apply_inverse(const Vector& v) const {
    return factorization_.solve(red_->c.cwiseProduct(v));
  }

  /// W A W^{-1} u, a symmetric operator.
  Vector apply_weighted(const Vector& u) const {
    return weighting_.apply(apply(weighting_.unapply(u)));
  }

  Vector apply_inverse_weighted(const Vector& u) const {
    return weighting_.apply(apply_inverse(weighting_.unapply(u)));
  }

private:
  const ReducedSystem* red_;
  ReducedFactorization factorization_;
  AreaWeighting weighting_;
};

/// F = G_r^{-1} B_r j. Constant because the currents are constant.
inline Vector compute_drift(const ReducedOperator& op) {
  const auto& red = op.system();
  Vector F = op.factorization().solve(red.drive());
  if (!F.allFinite()) throw solver_error("singularity not eliminated: drift is not finite");
  return F;
}

inline Vector compute_drift(const ReducedSystem& red) {
  return compute_drift(ReducedOperator(red));
}

/// Extended Krylov approximation of e^{tA}(sigma0 + F), A = C_r^{-1} G_r,
/// built in area-weighted coordinates u = W sigma_r. Holds everything needed
/// to evaluate the reduced stress at any t >= 0.
struct KrylovApprox {
  DenseMatrix V;          // order x m, orthonormal columns (weighted coordinates)
  DenseMatrix H;          // m x m, V^T (W A W^{-1}) V, symmetric
  double h_next = 0.0;    // norm of the part of (W A W^{-1}) v_m outside span(V)
  double beta_v = 0.0;    // ||W (sigma0 + F)||_2
  std::size_t m = 0;
  Vector F;               // drift, A F = b
  Vector sigma0;          // reduced initial state, returned as is at t = 0
  AreaWeighting weighting;
  bool converged = false;
  bool invariant = false;  // span(V) is invariant, approximation exact up to rounding
  double residual = 0.0;   // largest relative error bound over t_eval at acceptance

  // Spectral form of H = U diag(rates) U^T, prepared once per basis:
  // mode_vectors = beta_v V U scaled column-wise by U^T e_1.
  Vector rates;
  DenseMatrix mode_vectors;
};

namespace detail {

// Modified Gram-Schmidt against the first `count` columns of V, applied twice.
inline double orthogonalize(const DenseMatrix& V, Eigen::Index count, Vector& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < count; ++i) w -= V.col(i).dot(w) * V.col(i);
  }
  return w.norm();
}

}  // namespace detail

/// Residual beta_v |h_{m+1,m}| |e_m^T e^{tH} e_1| of phi_m(t) = beta_v V e^{tH} e_1
/// with respect to phi' = A phi.
inline double residual_norm(const KrylovApprox& k, double t) {
  if (k.m == 0 || k.h_next == 0.0) return 0.0;
  const DenseMatrix E = expm_small(k.H, t);
  return k.beta_v * std::abs(k.h_next) * std::abs(E(static_cast<Eigen::Index>(k.m) - 1, 0));
}

namespace detail {

// 4-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563,
                                                    0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461,
                                                      0.6521451548625461, 0.3478548451374538};
inline constexpr int kResidualPanels = 32;

// Relative error bound of the projected solution at time t.
//
// In weighted coordinates the error obeys e' = A e - r with e(0) = 0, and A is
// symmetric negative semidefinite, so ||e(t)|| <= int_0^t ||r(s)|| ds with
// r(s) = beta R e^{sH} e_1 and R = (I - V V^T) A V, so ||r||^2 = beta^2 y^T Q y
// with Q = R^T R. The bound is divided by the weighted norm of the
// approximate stress beta V y(t) - W F.
struct ResidualBound {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig;
  DenseMatrix Q;
  Vector e1_modal;  // U^T e_1
  Vector vtwf;      // V^T W F
  double beta = 0.0;
  double wf_norm2 = 0.0;

  Vector y(double s) const {
    const Vector d = (s * eig.eigenvalues().array()).exp().matrix();
    return eig.eigenvectors() * d.cwiseProduct(e1_modal);
  }

  double relative(double t) const {
    if (t == 0.0) return 0.0;
    const double h = t / kResidualPanels;
    double integral = 0.0;
    for (int p = 0; p < kResidualPanels; ++p) {
      const double mid = (p + 0.5) * h;
      for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
        const Vector yy = y(mid + 0.5 * h * kGaussNodes[g]);
        integral += kGaussWeights[g] * 0.5 * h * std::sqrt(std::max(0.0, yy.dot(Q * yy)));
      }
    }
    integral *= beta;
    const Vector yt = y(t);
    const double norm2 = beta * beta * yt.squaredNorm() - 2.0 * beta * yt.dot(vtwf) + wf_norm2;
    const double scale = std::sqrt(std::max(0.0, norm2));
    return integral / (scale > 0.0 ? scale : beta);
  }
};

}  // namespace detail

/// Builds the extended Krylov basis of {B_E, A B_E, A^{-1} B_E, A^2 B_E, ...},
/// B_E = sigma0 + F, alternating the two chains. Expansion stops once the
/// a-posteriori bound on the relative (area-weighted) error is at most eps at
/// every requested time, at m_max, or when the subspace becomes invariant.
namespace detail {

inline KrylovApprox build_eks_basis(const ReducedOperator& op, const Vector& sigma0_r, const Vector& F,
                                    const SolverConfig& cfg) {
  cfg.validate();
  const auto& red = op.system();
  const auto N = static_cast<Eigen::Index>(red.order);
  if (sigma0_r.size() != N || F.size() != N)
    throw validation_error("state vectors do not match the reduced order");

  const AreaWeighting& W = op.weighting();
  KrylovApprox k;
  k.F = F;
  k.sigma0 = sigma0_r;
  k.weighting = W;
  const Vector wf = W.apply(F);
  const Vector start = W.apply(sigma0_r + F);
  k.beta_v = start.norm();
  const double scale = std::max(W.apply(sigma0_r).norm(), wf.norm());
  if (k.beta_v == 0.0 || k.beta_v <= 1e-14 * scale) {
    // sigma0 = -F: already at steady state.
    k.V.resize(N, 0);
    k.H.resize(0, 0);
    k.converged = true;
    k.invariant = true;
    return k;
  }

  const auto m_cap = static_cast<Eigen::Index>(std::min<std::size_t>(cfg.m_max, red.order));
  DenseMatrix V(N, m_cap);
  DenseMatrix AV(N, m_cap);
  DenseMatrix H = DenseMatrix::Zero(m_cap, m_cap);
  Vector vtwf = Vector::Zero(m_cap);
  constexpr double breakdown_tol = 1e-12;

  auto append = [&](Eigen::Index col, const Vector& v) {
    V.col(col) = v;
    AV.col(col) = op.apply_weighted(v);
    for (Eigen::Index i = 0; i <= col; ++i) {
      H(i, col) = V.col(i).dot(AV.col(col));
      H(col, i) = V.col(col).dot(AV.col(i));
    }
    vtwf(col) = v.dot(wf);
  };

  auto snapshot = [&](Eigen::Index count) {
    k.m = static_cast<std::size_t>(count);
    k.V = V.leftCols(count);
    k.H = H.topLeftCorner(count, count);
    Vector remainder = AV.col(count - 1);
    k.h_next = detail::orthogonalize(V, count, remainder);
  };

  auto worst_bound = [&](Eigen::Index count) {
    const DenseMatrix Hc = H.topLeftCorner(count, count);
    detail::ResidualBound bound;
    bound.eig.compute(0.5 * (Hc + Hc.transpose()));
    // A maps every basis vector except the newest one or two (the top power
    // of A and whatever the A^{-1} chain appended after it) back into the
    // span, so R has at most two columns above rounding level. They are
    // formed explicitly; Q = (AV)^T AV - H^T H would lose them to cancellation.
    bound.Q = DenseMatrix::Zero(count, count);
    const Eigen::Index tail = std::min<Eigen::Index>(2, count);
    DenseMatrix R(N, tail);
    for (Eigen::Index c = 0; c < tail; ++c) {
      Vector r = AV.col(count - tail + c);
      detail::orthogonalize(V, count, r);
      R.col(c) = r;
    }
    bound.Q.bottomRightCorner(tail, tail) = R.transpose() * R;
    bound.e1_modal = bound.eig.eigenvectors().row(0).transpose();
    bound.vtwf = vtwf.head(count);
    bound.beta = k.beta_v;
    bound.wf_norm2 = wf.squaredNorm();
    double worst = 0.0;
    for (double t : cfg.t_eval) worst = std::max(worst, bound.relative(t));
    return worst;
  };

  auto mark_exact = [&]() {
    k.invariant = true;
    k.converged = true;
    k.residual = 0.0;
    return k;
  };

  append(0, start / k.beta_v);
  Eigen::Index m = 1;
  while (m < m_cap) {
    // 1-based index of the new vector: even extends the A chain from v_{m-1},
    // odd the A^{-1} chain. The first extension is A v_1.
    const Eigen::Index next = m + 1;
    Vector w;
    if (next == 2)
      w = AV.col(0);
    else if (next % 2 == 1)
      w = op.apply_inverse_weighted(V.col(next - 3));
    else
      w = AV.col(next - 3);

    const double before = w.norm();
    const double after = detail::orthogonalize(V, m, w);
    if (!(after > breakdown_tol * before) || !std::isfinite(after)) {
      snapshot(m);
      if (k.h_next <= breakdown_tol * AV.col(m - 1).norm()) return mark_exact();
      // one chain stalled; accept whatever accuracy the basis has
      k.residual = worst_bound(m);
      k.converged = k.residual <= cfg.eps;
      return k;
    }
    append(m, w / after);
    ++m;

    if (m >= 3) {
      snapshot(m);
      if (m == N) return mark_exact();
      k.residual = worst_bound(m);
      if (k.residual <= cfg.eps) {
        k.converged = true;
        return k;
      }
    }
  }

  snapshot(m);
  if (m == N) return mark_exact();
  k.residual = worst_bound(m);
  k.converged = k.residual <= cfg.eps;
  return k;
}

}  // namespace detail

inline KrylovApprox build_eks(const ReducedOperator& op, const Vector& sigma0_r, const Vector& F,
                              const SolverConfig& cfg) {
  KrylovApprox k = detail::build_eks_basis(op, sigma0_r, F, cfg);
  if (k.m > 0) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (k.H + k.H.transpose()));
    if (eig.info() != Eigen::Success) throw solver_error("eigendecomposition of H failed");
    k.rates = eig.eigenvalues();
    const Vector weights = eig.eigenvectors().row(0).transpose();
    k.mode_vectors = k.beta_v * (k.V * eig.eigenvectors()) * weights.asDiagonal();
  }
  return k;
}

/// Reduced stress W^{-1} (beta_v V e^{tH} e_1) - F, evaluated as
/// sigma0 + W^{-1} beta_v V (e^{tH} - I) e_1 because beta_v V e_1 = W (sigma0 + F).
/// H is symmetric in the weighted coordinates, so e^{tH} - I = U diag(expm1(t rates)) U^T
/// from the decomposition stored with the basis. Each call is then O(order * m),
/// and the early-time stress, tiny next to F, keeps its digits.
inline Vector evaluate_stress(const KrylovApprox& k, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("evaluation time must be >= 0");
  if (t == 0.0 || k.m == 0) return t == 0.0 ? k.sigma0 : Vector(-k.F);
  const Vector growth = (t * k.rates.array()).unaryExpr([](double x) { return std::expm1(x); }).matrix();
  return k.sigma0 + k.weighting.unapply(k.mode_vectors * growth);
}

}  // namespace emstress
