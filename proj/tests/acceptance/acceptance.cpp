// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// The exit status is nonzero only if the harness itself breaks; a FAIL is a
// measured result, not a crash.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "emstress/emstress.hpp"
#include "emstress/io.hpp"
#include "test_support.hpp"

using namespace emstress;
namespace sp = emstress::support;

namespace {

constexpr double kYear = kSecondsPerYear;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
double timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return seconds_since(t0);
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

AnalysisOptions seven_options(std::vector<double> years, double eps = 1e-3) {
  AnalysisOptions opt;
  opt.dx = 2.5 * kMicron;
  opt.solver.eps = eps;
  for (double y : years) opt.solver.t_eval.push_back(y * kYear);
  return opt;
}

AnalysisOptions chain_options(std::vector<double> years, double eps = 1e-3) {
  AnalysisOptions opt;
  opt.intervals_per_segment = 19;
  opt.solver.eps = eps;
  for (double y : years) opt.solver.t_eval.push_back(y * kYear);
  return opt;
}

// Every tree the criteria that say "every fixture" run over.
struct Fixture {
  std::string name;
  InterconnectTree tree;
  AnalysisOptions options;
};

std::vector<Fixture> fixtures(std::vector<double> years) {
  std::vector<Fixture> out;
  AnalysisOptions fine;
  fine.dx = 1.0 * kMicron;
  fine.solver.eps = 1e-3;
  for (double y : years) fine.solver.t_eval.push_back(y * kYear);

  out.push_back({"single_segment", io::read_tree_file(sp::fixture_path("single_segment.json")), fine});
  out.push_back({"seven_segment", io::read_tree_file(sp::fixture_path("seven_segment.json")),
                 seven_options(years)});
  out.push_back({"tchain_1", gen_t_junction_chain(1, sp::copper()), chain_options(years)});
  out.push_back({"tchain_10", io::read_tree_file(sp::fixture_path("tchain_10.json")), chain_options(years)});
  const auto trees = decompose_grid(io::read_grid_file(sp::fixture_path("grid_small.json")));
  for (std::size_t i = 0; i < trees.size(); ++i)
    out.push_back({"grid_small/tree" + std::to_string(i), trees[i], fine});
  return out;
}

Verdict criterion1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree = io::read_tree_file(sp::fixture_path("seven_segment.json"));
  const auto opt = seven_options({5, 10, 20});
  const TransientAnalysis run(tree, opt);
  const auto ref = oracle::dense_solve(run.reduced(), run.initial_state(), opt.solver.t_eval);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = sp::rel_max_error(run.stress_at(opt.solver.t_eval[i]), ref[i]);
    v.note(fmt("t = %g y: max |err| / max |sigma_dense| = %.3e", opt.solver.t_eval[i] / kYear, e));
    worst = std::max(worst, e);
  }
  const double elapsed = seconds_since(t0);
  v.check(worst <= 5e-3, fmt("worst relative error %.3e <= 5e-3", worst));
  v.check(elapsed <= 5.0, fmt("runtime %.3f s <= 5 s", elapsed));
  return v;
}

Verdict criterion2() {
  Verdict v;
  const TransientAnalysis seven(io::read_tree_file(sp::fixture_path("seven_segment.json")),
                               seven_options({5, 10, 20}));
  v.check(seven.approx().converged && seven.approx().m <= 8,
          fmt("seven-segment tree: m = %.0f (converged %.0f), need m <= 8", double(seven.approx().m),
              double(seven.approx().converged)));
  for (std::size_t n_t : {10u, 100u, 500u, 1000u}) {
    const TransientAnalysis run(gen_t_junction_chain(n_t, sp::copper()), chain_options({10}));
    const auto& k = run.approx();
    v.check(k.converged && k.m <= 30,
            fmt("T-chain n_t = %.0f (n = %.0f): ", double(n_t), double(run.system().n)) +
                fmt("m = %.0f, converged %.0f, error bound %.2e; need m <= 30", double(k.m),
                    double(k.converged), k.residual));
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto tree = io::read_tree_file(sp::fixture_path("seven_segment.json"));
  std::vector<double> years;
  for (int i = 1; i <= 10; ++i) years.push_back(2.0 * i);
  const double eps = 1e-3;

  const TransientAnalysis shared(tree, seven_options(years, eps));
  double worst = 0.0;
  std::vector<double> build_times;
  for (double y : years) {
    std::optional<TransientAnalysis> fresh;
    build_times.push_back(timed([&] { fresh.emplace(tree, seven_options({y}, eps)); }));
    worst = std::max(worst, sp::rel_max_error(shared.stress_at(y * kYear), fresh->stress_at(y * kYear)));
  }
  v.check(worst <= 2.0 * eps, fmt("shared basis vs per-time builds: %.3e <= %.1e", worst, 2 * eps));

  // Repeat the timing so the comparison is not at the mercy of one cold run.
  std::vector<double> extra, build;
  for (int rep = 0; rep < 21; ++rep) {
    build.push_back(timed([&] { TransientAnalysis(tree, seven_options({years[0]}, eps)); }));
    extra.push_back(timed([&] {
      for (std::size_t i = 1; i < years.size(); ++i) {
        volatile double sink = shared.stress_at(years[i] * kYear)(0);
        (void)sink;
      }
    }));
  }
  const double e = median(extra), b = median(build);
  v.check(e < 0.2 * b, fmt("9 extra evaluations %.3e s vs one build %.3e s (ratio %.3f < 0.2)", e, b, e / b));
  v.note(fmt("shared basis order m = %.0f", double(shared.approx().m)));
  return v;
}

Verdict criterion4() {
  Verdict v;
  const std::vector<double> years{0.0, 0.5, 5, 20, 1e4};
  double worst = 0.0;
  std::size_t evaluations = 0;
  for (const auto& f : fixtures(years)) {
    const TransientAnalysis run(f.tree, f.options);
    for (double t : f.options.solver.t_eval) {
      worst = std::max(worst, mass_imbalance(run.stress_at(t), run.system().areas));
      ++evaluations;
    }
  }
  for (std::size_t n_t : {100u, 1000u}) {
    const TransientAnalysis run(gen_t_junction_chain(n_t, sp::copper()), chain_options({1, 10}));
    for (double t : {1 * kYear, 10 * kYear}) {
      worst = std::max(worst, mass_imbalance(run.stress_at(t), run.system().areas));
      ++evaluations;
    }
  }
  v.check(worst <= 1e-9, fmt("worst |sum a s| / sum a |s| = %.3e over %.0f evaluations", worst,
                             double(evaluations)));
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto tree = io::read_tree_file(sp::fixture_path("single_segment.json"));
  const auto& seg = tree.segments[0];
  const double L = seg.length, j = seg.current_density;
  const double kappa = compute_kappa(tree.params), beta = compute_beta(tree.params);

  auto profile_error = [&](std::size_t intervals, double t, bool transient) {
    AnalysisOptions opt;
    opt.intervals_per_segment = intervals;
    opt.solver.eps = 1e-10;
    opt.solver.m_max = 400;
    opt.solver.t_eval = {t};
    const TransientAnalysis run(tree, opt);
    const Vector s = run.stress_at(t);
    double diff = 0.0, scale = 0.0;
    for (const auto& p : run.mesh().points) {
      const double exact = transient ? sp::single_segment_stress(p.offset, t, L, kappa, beta, j)
                                     : beta * j * (L / 2.0 - p.offset);
      diff = std::max(diff, std::abs(s(static_cast<Eigen::Index>(p.index)) - exact));
      scale = std::max(scale, std::abs(exact));
    }
    return diff / scale;
  };

  const double steady = profile_error(200, 1e4 * kYear, false);
  v.check(steady <= 1e-3, fmt("t = 1e4 y, dx = L/200: max rel error vs beta j (L/2 - x) = %.3e", steady));

  // At 1e4 years every scheme sits on the linear profile, which the grid
  // represents exactly, so the order is measured during the transient.
  const double t = 1.0 * kYear;
  v.note(fmt("order measured at t = %g y (kappa t / L^2 = %.3f) against the Fourier series", t / kYear,
             kappa * t / (L * L)));
  std::vector<double> errs;
  for (std::size_t k : {50u, 100u, 200u}) {
    errs.push_back(profile_error(k, t, true));
    v.note(fmt("dx = L/%.0f: max rel error %.3e", double(k), errs.back()));
  }
  const double p1 = std::log2(errs[0] / errs[1]), p2 = std::log2(errs[1] / errs[2]);
  v.check(std::min(p1, p2) >= 1.8, fmt("observed orders %.3f, %.3f >= 1.8", p1, p2));
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto tree = io::read_tree_file(sp::fixture_path("seven_segment.json"));
  auto opt = seven_options({5, 10, 20});
  const TransientAnalysis base(tree, opt);
  const std::size_t n = base.system().n;
  double worst = 0.0;
  std::vector<Vector> reference;
  for (std::size_t k : {std::size_t{0}, n / 2, n - 1}) {
    opt.pivot = k;
    const TransientAnalysis run(tree, opt);
    for (std::size_t i = 0; i < opt.solver.t_eval.size(); ++i) {
      const Vector s = run.stress_at(opt.solver.t_eval[i]);
      if (reference.size() < opt.solver.t_eval.size())
        reference.push_back(s);
      else
        worst = std::max(worst, sp::rel_max_error(s, reference[i]));
    }
    v.note(fmt("pivot %.0f: m = %.0f", double(k), double(run.approx().m)));
  }
  v.check(worst <= 1e-9, fmt("pivots {0, n/2, n-1} agree to %.3e <= 1e-9", worst));
  return v;
}

Verdict criterion7() {
  Verdict v;
  const std::vector<double> years{1, 10};
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& f : fixtures(years)) {
    const auto mesh = f.options.intervals_per_segment
                          ? discretize_by_intervals(f.tree, *f.options.intervals_per_segment)
                          : discretize(f.tree, f.options.dx);
    const auto sys = assemble(mesh, f.tree);
    const auto red = eliminate_singularity(sys);
    if (red.order > 3000) continue;
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
    const auto dense = oracle::dense_solve(red, zero, f.options.solver.t_eval);
    double here = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
      const double t = f.options.solver.t_eval[i];
      const Vector coarse = oracle::implicit_step_solve(red, zero, t, 2000);
      const Vector fine = oracle::implicit_step_solve(red, zero, t, 4000);
      here = std::max(here, sp::rel_max_error(2.0 * fine - coarse, dense[i]));
    }
    v.note(f.name + fmt(" (order %.0f): %.3e", double(red.order), here));
    worst = std::max(worst, here);
    ++checked;
  }
  v.check(worst <= 1e-4, fmt("dense vs Richardson(2000, 4000 steps): %.3e <= 1e-4 on %.0f trees", worst,
                             double(checked)));
  return v;
}

Verdict criterion8() {
  Verdict v;
  const auto bench_start = std::chrono::steady_clock::now();
  const std::vector<std::size_t> sizes{100, 500, 1000};
  std::map<std::size_t, double> per_eval, pipeline;
  for (std::size_t n_t : sizes) {
    const auto tree = gen_t_junction_chain(n_t, sp::copper());
    const auto opt = chain_options({10});
    std::vector<double> evals, whole;
    for (int rep = 0; rep < 3; ++rep) {
      std::optional<TransientAnalysis> run;
      const double build = timed([&] { run.emplace(tree, opt); });
      const int count = 50;
      const double t_eval = timed([&] {
                              for (int i = 0; i < count; ++i) {
                                volatile double sink = run->stress_at((1.0 + 0.1 * i) * kYear)(0);
                                (void)sink;
                              }
                            }) /
                            count;
      evals.push_back(t_eval);
      whole.push_back(build + t_eval);
    }
    per_eval[n_t] = median(evals);
    pipeline[n_t] = median(whole);
    v.note(fmt("n_t = %.0f: t_exp_sol %.3e s, full pipeline %.3e s", double(n_t), per_eval[n_t],
               pipeline[n_t]));
  }
  const double growth = per_eval[1000] / per_eval[100];
  v.check(growth < 10.0, fmt("t_exp_sol grows %.2fx from n_t = 100 to 1000 (< 10x)", growth));

  // The dense oracle cannot even store e^{tA} at n_t = 1000 (order 38019,
  // 11.6 GB per matrix). Its wall time on a 20x smaller chain is a lower
  // bound for the real one, since dense cost grows monotonically with n.
  const auto small = gen_t_junction_chain(50, sp::copper());
  const auto sys = assemble(discretize_by_intervals(small, 19), small);
  const auto red = eliminate_singularity(sys);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(sys.n));
  const double dense = timed([&] { oracle::dense_solve(red, zero, 10 * kYear); });
  const double speedup = dense / pipeline[1000];
  v.note(fmt("dense_solve on n_t = 50 (order %.0f): %.3f s", double(red.order), dense));
  v.check(speedup >= 10.0,
          fmt("EKS pipeline at n_t = 1000 beats that lower bound by %.1fx (>= 10x)", speedup));
  const double total = seconds_since(bench_start);
  v.check(total <= 600.0, fmt("bench runtime %.1f s <= 600 s", total));
  return v;
}

Verdict criterion9() {
  Verdict v;
  std::mt19937_64 rng(424242);
  constexpr int cases = 40;
  double ortho = 0.0, homog = 0.0, identity = 0.0, additive = 0.0, g1 = 0.0;
  for (int c = 0; c < cases; ++c) {
    const auto tree = sp::random_tree(rng);
    AnalysisOptions opt;
    opt.dx = 1.0 * kMicron;
    opt.solver.eps = 1e-6;
    opt.solver.t_eval = {0.5 * kYear, 5 * kYear};

    const TransientAnalysis run(tree, opt);
    g1 = std::max(g1, (run.system().G * Vector::Ones(static_cast<Eigen::Index>(run.system().n)))
                          .cwiseAbs()
                          .maxCoeff());
    const auto& k = run.approx();
    const auto m = static_cast<Eigen::Index>(k.m);
    ortho = std::max(ortho, (k.V.transpose() * k.V - DenseMatrix::Identity(m, m)).cwiseAbs().maxCoeff());

    std::uniform_real_distribution<double> factor(-4.0, 4.0);
    const double a = factor(rng);
    auto scaled = tree;
    for (auto& s : scaled.segments) s.current_density *= a;
    const TransientAnalysis run_a(scaled, opt);
    for (double t : opt.solver.t_eval)
      homog = std::max(homog, sp::rel_max_error(run_a.stress_at(t), a * run.stress_at(t)));

    const Vector mid = run.stress_at(opt.solver.t_eval[1]);
    const TransientAnalysis restarted(tree, opt, mid);
    identity = std::max(identity, sp::rel_max_error(restarted.stress_at(0.0), mid));

    // Superposition of two current patterns, through the exact dense path.
    auto part = tree, rest = tree;
    std::uniform_real_distribution<double> split(0.0, 1.0);
    for (std::size_t s = 0; s < tree.segments.size(); ++s) {
      const double f = split(rng);
      part.segments[s].current_density *= f;
      rest.segments[s].current_density *= 1.0 - f;
    }
    auto dense = [&](const InterconnectTree& t) {
      const auto sys = build_system(t, opt.dx);
      return oracle::dense_solve(eliminate_singularity(sys), Vector::Zero(static_cast<Eigen::Index>(sys.n)),
                                 2 * kYear);
    };
    additive = std::max(additive, sp::rel_max_error(dense(part) + dense(rest), dense(tree)));
  }
  v.check(ortho <= 1e-10, fmt("orthonormality max |V^T V - I| = %.3e over %.0f random trees", ortho, cases));
  v.check(homog <= 1e-9, fmt("homogeneity sigma(a j) = a sigma(j): %.3e", homog));
  v.check(additive <= 1e-9, fmt("superposition of currents (dense path): %.3e", additive));
  v.check(identity <= 1e-9, fmt("t = 0 returns the initial state: %.3e", identity));
  v.check(g1 == 0.0, fmt("G * 1 = 0 exactly: max |(G 1)_i| = %g", g1));

  std::size_t bad_partition = 0, grids = 0, trees_seen = 0;
  for (int c = 0; c < cases; ++c) {
    const auto grid = sp::random_grid(rng);
    const auto trees = decompose_grid(grid);
    std::map<int, double> wire_len, seg_len;
    for (const auto& w : grid.wires) wire_len[w.layer] += std::abs(w.x1 - w.x0) + std::abs(w.y1 - w.y0);
    std::set<std::string> ids;
    bool ok = true;
    for (const auto& t : trees) {
      ok = ok && validate_tree(t).ok();
      for (const auto& s : t.segments) {
        ok = ok && ids.insert(s.id).second;
        seg_len[std::stoi(s.id.substr(1))] += s.length;
      }
    }
    for (const auto& [layer, len] : wire_len) ok = ok && std::abs(seg_len[layer] - len) <= 1e-9 * len;
    if (!ok) ++bad_partition;
    ++grids;
    trees_seen += trees.size();
  }
  v.check(bad_partition == 0, fmt("decompose_grid partitions %.0f random grids into %.0f valid trees", double(grids),
                                   double(trees_seen)) +
                                  fmt(" (%.0f failures)", double(bad_partition)));
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"accuracy vs dense oracle", criterion1},
      {"reduced order", criterion2},
      {"basis reuse", criterion3},
      {"mass conservation", criterion4},
      {"analytic steady state and spatial order", criterion5},
      {"pivot invariance", criterion6},
      {"oracle cross-check", criterion7},
      {"scalability trend", criterion8},
      {"property suite", criterion9},
  };
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const Verdict v = criteria[i].second();
      std::printf("CRITERION %zu %s: %s (%.1f s)\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL",
                  seconds_since(t0));
      for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
      std::fflush(stdout);
      passed += v.pass;
    } catch (const std::exception& e) {
      std::printf("CRITERION %zu %s: ERROR %s\n", i + 1, criteria[i].first, e.what());
      return 1;
    }
  }
  std::printf("%d of %zu criteria pass\n", passed, criteria.size());
  return 0;
}
