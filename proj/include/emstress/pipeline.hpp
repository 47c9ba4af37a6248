#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "emstress/discretizer.hpp"
#include "emstress/krylov.hpp"
#include "emstress/reducer.hpp"
#include "emstress/tree.hpp"

namespace emstress {

struct AnalysisOptions {
  double dx = 0.0;                                 // target spacing, m
  std::optional<std::size_t> intervals_per_segment;  // overrides dx when set
  std::optional<std::size_t> pivot;                // default: largest area
  SolverConfig solver;
};

/// Wall-clock split of one analysis, seconds.
struct Timings {
  double form = 0.0;      // discretize + assemble + eliminate
  double exp_init = 0.0;  // factorization + drift
  double basis = 0.0;     // Krylov basis construction
};

namespace detail {

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// One tree taken through discretization, reduction and EKS construction.
/// Immutable once built; stress_at may be called from several threads.
class TransientAnalysis {
public:
  TransientAnalysis(const InterconnectTree& tree, const AnalysisOptions& options,
                    std::optional<Vector> sigma0 = std::nullopt) {
    options.solver.validate();
    detail::Stopwatch clock;
    mesh_ = options.intervals_per_segment
                ? discretize_by_intervals(tree, *options.intervals_per_segment)
                : discretize(tree, options.dx);
    system_ = assemble(mesh_, tree);
    const std::size_t pivot = options.pivot.value_or(default_pivot(system_));
    reduced_ = std::make_unique<ReducedSystem>(eliminate_singularity(system_, pivot));
    timings_.form = clock.lap();

    operator_ = std::make_unique<ReducedOperator>(*reduced_);
    drift_ = compute_drift(*operator_);
    timings_.exp_init = clock.lap();

    sigma0_ = sigma0.value_or(Vector::Zero(static_cast<Eigen::Index>(system_.n)));
    approx_ = build_eks(*operator_, restrict_state(sigma0_, *reduced_), drift_, options.solver);
    timings_.basis = clock.lap();
  }

  Vector stress_at(double t) const { return recover_full(evaluate_stress(approx_, t), *reduced_); }

  const Discretization& mesh() const { return mesh_; }
  const DiscretizedSystem& system() const { return system_; }
  const ReducedSystem& reduced() const { return *reduced_; }
  const ReducedOperator& reduced_operator() const { return *operator_; }
  const KrylovApprox& approx() const { return approx_; }
  const Vector& drift() const { return drift_; }
  const Vector& initial_state() const { return sigma0_; }
  const Timings& timings() const { return timings_; }

private:
  Discretization mesh_;
  DiscretizedSystem system_;
  std::unique_ptr<ReducedSystem> reduced_;
  std::unique_ptr<ReducedOperator> operator_;
  Vector drift_;
  Vector sigma0_;
  KrylovApprox approx_;
  Timings timings_;
};

}  // namespace emstress
