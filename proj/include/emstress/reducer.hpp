#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "emstress/discretizer.hpp"
#include "emstress/error.hpp"

namespace emstress {

/// Order n-1 system left after eliminating sigma_k through the mass
/// conservation constraint sum_i a_i sigma_i = 0.
///
/// With r_i = -a_i / a_k the eliminated unknown is sigma_k = r^T sigma_r and
///   C_r = diag(a_i, i != k)
///   G_r = G_kk' + g r^T,  g = G(:, k) without row k
///   B_r = B without row k
/// where G_kk' is G with row and column k removed. C stays diagonal because
/// equation k is the one dropped.
struct ReducedSystem {
  std::size_t order = 0;
  std::size_t eliminated_index = 0;
  Vector c;               // diagonal of C_r
  SparseMatrix G;         // G_r, dense in rows adjacent to k
  SparseMatrix B;         // B_r
  Vector j;
  Vector recovery_weights;  // r, length order
  Vector areas;             // full a_i

  // Structured pieces of G_r for fast solves.
  SparseMatrix grounded;  // G_kk'
  Vector coupling;        // g

  std::size_t full_size() const { return order + 1; }

  std::size_t full_index(std::size_t reduced) const {
    return reduced < eliminated_index ? reduced : reduced + 1;
  }

  Vector drive() const { return B * j; }
};

/// Index of the largest area (first one on ties).
inline std::size_t default_pivot(const DiscretizedSystem& sys) {
  Eigen::Index k = 0;
  sys.areas.maxCoeff(&k);
  return static_cast<std::size_t>(k);
}

inline ReducedSystem eliminate_singularity(const DiscretizedSystem& sys, std::size_t k) {
  const std::size_t n = sys.n;
  if (n < 2) throw validation_error("system too small to reduce");
  if (k >= n) throw validation_error("pivot index out of range");
  const double a_k = sys.areas(static_cast<Eigen::Index>(k));
  if (!(a_k > 0.0)) throw validation_error("pivot area must be > 0");

  ReducedSystem red;
  red.order = n - 1;
  red.eliminated_index = k;
  red.areas = sys.areas;
  red.j = sys.j;

  const auto N = static_cast<Eigen::Index>(n - 1);
  const auto kk = static_cast<Eigen::Index>(k);
  auto to_reduced = [kk](Eigen::Index full) { return full < kk ? full : full - 1; };

  red.c.resize(N);
  red.recovery_weights.resize(N);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    if (i == kk) continue;
    red.c(to_reduced(i)) = sys.areas(i);
    red.recovery_weights(to_reduced(i)) = -sys.areas(i) / a_k;
  }

  red.coupling = Vector::Zero(N);
  std::vector<Eigen::Triplet<double>> grounded;
  grounded.reserve(static_cast<std::size_t>(sys.G.nonZeros()));
  for (Eigen::Index col = 0; col < sys.G.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(sys.G, col); it; ++it) {
      const Eigen::Index row = it.row();
      if (row == kk) continue;
      if (col == kk)
        red.coupling(to_reduced(row)) = it.value();
      else
        grounded.emplace_back(to_reduced(row), to_reduced(col), it.value());
    }
  }
  red.grounded.resize(N, N);
  red.grounded.setFromTriplets(grounded.begin(), grounded.end());

  // G_r = grounded + g r^T: only rows where g is nonzero fill in.
  std::vector<Eigen::Triplet<double>> reduced = grounded;
  for (Eigen::Index row = 0; row < N; ++row) {
    const double g = red.coupling(row);
    if (g == 0.0) continue;
    for (Eigen::Index col = 0; col < N; ++col)
      reduced.emplace_back(row, col, g * red.recovery_weights(col));
  }
  red.G.resize(N, N);
  red.G.setFromTriplets(reduced.begin(), reduced.end());

  std::vector<Eigen::Triplet<double>> b_entries;
  for (Eigen::Index col = 0; col < sys.B.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(sys.B, col); it; ++it) {
      if (it.row() == kk) continue;
      b_entries.emplace_back(to_reduced(it.row()), col, it.value());
    }
  }
  red.B.resize(N, sys.B.cols());
  red.B.setFromTriplets(b_entries.begin(), b_entries.end());
  return red;
}

inline ReducedSystem eliminate_singularity(const DiscretizedSystem& sys) {
  return eliminate_singularity(sys, default_pivot(sys));
}

/// Reinserts sigma_k = r^T sigma_r at position k.
inline Vector recover_full(const Vector& sigma_r, const ReducedSystem& red) {
  if (static_cast<std::size_t>(sigma_r.size()) != red.order)
    throw validation_error("reduced state has the wrong length");
  const auto k = static_cast<Eigen::Index>(red.eliminated_index);
  const auto N = static_cast<Eigen::Index>(red.order);
  Vector full(N + 1);
  full.head(k) = sigma_r.head(k);
  full(k) = red.recovery_weights.dot(sigma_r);
  full.tail(N - k) = sigma_r.tail(N - k);
  return full;
}

/// Relative violation |sum a_i s_i| / sum a_i |s_i| (0 for the zero state).
inline double mass_imbalance(const Vector& full, const Vector& areas) {
  const double scale = areas.dot(full.cwiseAbs());
  if (scale == 0.0) return 0.0;
  return std::abs(areas.dot(full)) / scale;
}

/// Drops entry k of a full state. States that break mass conservation by
/// more than 1e-9 relative are rejected rather than projected.
inline Vector restrict_state(const Vector& full, const ReducedSystem& red) {
  if (static_cast<std::size_t>(full.size()) != red.full_size())
    throw validation_error("initial state has the wrong length");
  if (mass_imbalance(full, red.areas) > 1e-9)
    throw validation_error("initial state violates mass conservation");
  const auto k = static_cast<Eigen::Index>(red.eliminated_index);
  const auto N = static_cast<Eigen::Index>(red.order);
  Vector reduced(N);
  reduced.head(k) = full.head(k);
  reduced.tail(N - k) = full.tail(N - k);
  return reduced;
}

/// Change of coordinates u = W sigma_r with W^T W = C_r + a_r a_r^T / a_k,
/// the full-space C pulled back through the recovery map. Hence
/// ||u||^2 = sum_i a_i sigma_i^2 over all n points, and W C_r^{-1} G_r W^{-1}
/// is symmetric. With D = C_r and d = D^{-1/2} a_r / sqrt(a_k):
///   W      = (I + gamma d d^T) D^{1/2},  gamma = (sqrt(1 + |d|^2) - 1) / |d|^2
///   W^{-1} = D^{-1/2} (I + delta d d^T), delta = (1 / sqrt(1 + |d|^2) - 1) / |d|^2
class AreaWeighting {
public:
  AreaWeighting() = default;

  explicit AreaWeighting(const ReducedSystem& red) {
    sqrt_c_ = red.c.cwiseSqrt();
    const double a_k = red.areas(static_cast<Eigen::Index>(red.eliminated_index));
    // a_r = -a_k r
    d_ = (-std::sqrt(a_k)) * red.recovery_weights.cwiseQuotient(sqrt_c_);
    const double d2 = d_.squaredNorm();
    if (d2 > 0.0) {
      gamma_ = (std::sqrt(1.0 + d2) - 1.0) / d2;
      delta_ = (1.0 / std::sqrt(1.0 + d2) - 1.0) / d2;
    }
  }

  Vector apply(const Vector& sigma_r) const {
    Vector u = sqrt_c_.cwiseProduct(sigma_r);
    u += (gamma_ * d_.dot(u)) * d_;
    return u;
  }

  Vector unapply(const Vector& u) const {
    Vector v = u + (delta_ * d_.dot(u)) * d_;
    return v.cwiseQuotient(sqrt_c_);
  }

private:
  Vector sqrt_c_;
  Vector d_;
  double gamma_ = 0.0;
  double delta_ = 0.0;
};

namespace detail {

// Solves (P + u v^T) x = y for SPD sparse P with one LDL^T and the
// Sherman-Morrison formula.
class SpdPlusRankOne {
public:
  SpdPlusRankOne(const SparseMatrix& P, const Vector& u, const Vector& v, const char* what) : v_(v) {
    ldlt_.compute(P);
    if (ldlt_.info() != Eigen::Success)
      throw solver_error(std::string(what) + ": sparse factorization failed");
    correction_ = ldlt_.solve(u);
    denominator_ = 1.0 + v_.dot(correction_);
    const double scale = 1.0 + std::abs(v_.dot(correction_));
    if (!std::isfinite(denominator_) ||
        std::abs(denominator_) <= 1e3 * std::numeric_limits<double>::epsilon() * scale)
      throw solver_error(std::string(what) + ": matrix is singular");
  }

  Vector solve(const Vector& y) const {
    Vector x = ldlt_.solve(y);
    x -= correction_ * (v_.dot(x) / denominator_);
    return x;
  }

private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  Vector v_;
  Vector correction_;
  double denominator_ = 1.0;
};

}  // namespace detail

/// Direct solver for G_r x = y, factorized once.
///
/// G_kk' is the grounded (Dirichlet at k) weighted graph Laplacian, so -G_kk'
/// is SPD and admits a fill-free sparse LDL^T on trees. The rank-one term
/// g r^T is handled with the Sherman-Morrison formula.
class ReducedFactorization {
public:
  explicit ReducedFactorization(const ReducedSystem& red)
      : solver_(-red.grounded, -red.coupling, red.recovery_weights,
                "singularity not eliminated") {}

  Vector solve(const Vector& y) const { return solver_.solve(-y); }

private:
  detail::SpdPlusRankOne solver_;
};

}  // namespace emstress
