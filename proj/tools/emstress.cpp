// emstress: command-line front end for the EM stress solver.
//
//   emstress simulate  TREE|GRID --time-years 5 10 20 [--dx 2.5] [--out prefix]
//   emstress compare   TREE --time-years 20 --oracle dense|euler [--steps N]
//   emstress generate  --kind tchain|seven|single|grid-small|grid-medium|grid-large
//   emstress decompose GRID [--out-dir dir] [--largest file]
//   emstress bench     --kinds tchain --sizes 100 500 1000
//
// Exit codes: 0 ok, 2 validation, 3 solver (including non-convergence), 4 I/O.
// Errors are reported on stderr as {"schema":1,"error":{"kind":..,"message":..}}.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "emstress/emstress.hpp"
#include "emstress/io.hpp"

namespace {

using namespace emstress;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return kExitValidation;
    case ErrorKind::solver: return kExitSolver;
    case ErrorKind::io: return kExitIo;
  }
  return kExitSolver;
}

void report_error(const std::string& kind, const std::string& message) {
  json j{{"schema", io::kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. Callers write
// into per-index slots so the output order never depends on scheduling.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  io::detail::write_text_file(path, text);
}

std::vector<double> to_seconds(const std::vector<double>& years) {
  std::vector<double> s;
  for (double y : years) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw validation_error("times must be finite and >= 0");
    s.push_back(y * kSecondsPerYear);
  }
  return s;
}

bool is_grid_file(const json& j) { return j.is_object() && j.contains("wires"); }

// --------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string input;
  double dx_um = 1.0;
  std::optional<std::size_t> intervals;
  std::vector<double> years;
  double eps = 1e-3;
  std::size_t m_max = 60;
  std::optional<std::size_t> pivot;
  std::string out;
  std::string unit = "Pa";
  std::string dump;
  unsigned jobs = 1;
};

AnalysisOptions analysis_options(double dx_um, std::optional<std::size_t> intervals,
                                 const std::vector<double>& seconds, double eps, std::size_t m_max) {
  AnalysisOptions opt;
  opt.dx = dx_um * 1e-6;
  opt.intervals_per_segment = intervals;
  opt.solver.eps = eps;
  opt.solver.m_max = m_max;
  opt.solver.t_eval = seconds;
  return opt;
}

struct TreeResult {
  std::string csv;
  json summary;
  bool converged = true;
};

TreeResult simulate_tree(const InterconnectTree& tree, const AnalysisOptions& opt,
                         const std::vector<double>& years, double unit_scale) {
  TransientAnalysis analysis(tree, opt);
  const auto& mesh = analysis.mesh();

  std::vector<Vector> states;
  const auto start = std::chrono::steady_clock::now();
  for (double y : years) states.push_back(analysis.stress_at(y * kSecondsPerYear));
  const double eval_time = seconds_since(start);

  std::ostringstream csv;
  for (std::size_t ti = 0; ti < years.size(); ++ti) {
    const Vector& sigma = states[ti];
    for (std::size_t s = 0; s < mesh.segments.size(); ++s) {
      const auto& grid = mesh.segments[s];
      for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const double offset = static_cast<double>(i) * grid.spacing;
        csv << mesh.segment_ids[s] << ',' << num(io::detail::to_um(offset)) << ','
            << num(sigma(static_cast<Eigen::Index>(grid.points[i])) * unit_scale) << ','
            << num(years[ti]) << '\n';
      }
    }
  }

  const auto& k = analysis.approx();
  const auto& timings = analysis.timings();
  double imbalance = 0.0;
  for (const auto& sigma : states)
    imbalance = std::max(imbalance, mass_imbalance(sigma, analysis.system().areas));

  TreeResult r;
  r.csv = csv.str();
  r.converged = k.converged;
  r.summary = json{{"segments", tree.segments.size()},
                   {"n", analysis.system().n},
                   {"m", k.m},
                   {"converged", k.converged},
                   {"residual", k.residual},
                   {"h_next", k.h_next},
                   {"mass_imbalance", imbalance},
                   {"t_form", timings.form},
                   {"t_exp_init", timings.exp_init},
                   {"t_basis", timings.basis},
                   {"t_exp_sol", years.empty() ? 0.0 : eval_time / static_cast<double>(years.size())}};
  return r;
}

int run_simulate(const SimulateArgs& a) {
  if (a.years.empty()) throw validation_error("at least one --time-years value is required");
  const auto seconds = to_seconds(a.years);
  const double scale = a.unit == "MPa" ? 1e-6 : 1.0;
  auto opt = analysis_options(a.dx_um, a.intervals, seconds, a.eps, a.m_max);
  opt.pivot = a.pivot;

  const json doc = io::detail::read_json_file(a.input);
  std::vector<InterconnectTree> trees;
  const bool grid = is_grid_file(doc);
  if (grid) {
    if (a.pivot) throw validation_error("--pivot applies to a single tree, not a grid");
    trees = decompose_grid(io::grid_from_json(doc));
  } else {
    trees.push_back(io::tree_from_json(doc));
  }

  if (!a.dump.empty()) {
    if (trees.size() != 1) throw validation_error("--dump-matrices needs a single tree input");
    const auto sys = a.intervals ? assemble(discretize_by_intervals(trees[0], *a.intervals), trees[0])
                                 : build_system(trees[0], opt.dx);
    io::dump_system(a.dump, sys);
  }

  std::vector<TreeResult> results(trees.size());
  parallel_for(trees.size(), a.jobs,
               [&](std::size_t i) { results[i] = simulate_tree(trees[i], opt, a.years, scale); });

  std::string csv = "segment_id,offset_um,stress_" + a.unit + ",time_years\n";
  bool converged = true;
  json per_tree = json::array();
  for (const auto& r : results) {
    csv += r.csv;
    converged = converged && r.converged;
    per_tree.push_back(r.summary);
  }

  json summary{{"schema", io::kSchemaVersion},
               {"input", std::filesystem::path(a.input).filename().string()},
               {"unit", a.unit},
               {"time_years", a.years},
               {"eps", a.eps},
               {"m_max", a.m_max},
               {"converged", converged}};
  if (grid) {
    summary["trees"] = per_tree;
  } else {
    for (auto& [key, value] : per_tree[0].items()) summary[key] = value;
  }

  if (a.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump(2) << "\n";
  } else {
    io::detail::write_text_file(a.out + ".csv", csv);
    io::detail::write_text_file(a.out + ".json", summary.dump(2) + "\n");
  }
  if (!converged) {
    report_error("solver", "Krylov basis did not reach eps within m_max");
    return kExitSolver;
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string input;
  double dx_um = 1.0;
  std::optional<std::size_t> intervals;
  std::vector<double> years;
  std::string oracle = "dense";
  std::size_t steps = 1000;
  double eps = 1e-3;
  std::size_t m_max = 60;
  std::size_t cap = oracle::kDefaultDenseCap;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  if (a.years.empty()) throw validation_error("at least one --time-years value is required");
  const auto seconds = to_seconds(a.years);
  const auto tree = io::read_tree_file(a.input);
  const auto opt = analysis_options(a.dx_um, a.intervals, seconds, a.eps, a.m_max);

  auto start = std::chrono::steady_clock::now();
  TransientAnalysis analysis(tree, opt);
  std::vector<Vector> eks;
  for (double t : seconds) eks.push_back(analysis.stress_at(t));
  const double eks_time = seconds_since(start);

  start = std::chrono::steady_clock::now();
  std::vector<Vector> ref;
  if (a.oracle == "dense") {
    ref = oracle::dense_solve(analysis.reduced(), analysis.initial_state(), seconds, a.cap);
  } else {
    for (double t : seconds)
      ref.push_back(oracle::implicit_step_solve(analysis.reduced(), analysis.initial_state(), t, a.steps));
  }
  const double oracle_time = seconds_since(start);

  json rows = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < seconds.size(); ++i) {
    const double scale = ref[i].cwiseAbs().maxCoeff();
    const Vector err = (eks[i] - ref[i]).cwiseAbs() / (scale > 0.0 ? scale : 1.0);
    worst = std::max(worst, err.maxCoeff());
    rows.push_back({{"time_years", a.years[i]},
                    {"max_rel_error", err.maxCoeff()},
                    {"mean_rel_error", err.mean()}});
  }
  json report{{"schema", io::kSchemaVersion},
              {"input", std::filesystem::path(a.input).filename().string()},
              {"oracle", a.oracle},
              {"n", analysis.system().n},
              {"m", analysis.approx().m},
              {"converged", analysis.approx().converged},
              {"residual", analysis.approx().residual},
              {"max_rel_error", worst},
              {"times", rows},
              {"t_eks", eks_time},
              {"t_oracle", oracle_time}};
  if (a.oracle == "euler") report["steps"] = a.steps;
  write_output(a.out, report.dump(2) + "\n");
  return kExitOk;
}

// --------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string kind;
  std::size_t n = 1;
  double ea_ev = 0.86;
  double length_um = 10.0;
  double width_um = 1.0;
  double j = 1e10;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const auto params = MaterialParams::copper(a.ea_ev * kElectronVolt);
  std::string text;
  if (a.kind == "tchain") {
    text = io::tree_to_json(gen_t_junction_chain(a.n, params)).dump(2);
  } else if (a.kind == "seven") {
    text = io::tree_to_json(gen_seven_segment(params)).dump(2);
  } else if (a.kind == "single") {
    text = io::tree_to_json(gen_single_segment(a.length_um * kMicron, a.width_um * kMicron, a.j, params))
               .dump(2);
  } else {
    static const std::map<std::string, SyntheticGridSize> sizes{
        {"grid-small", SyntheticGridSize::small},
        {"grid-medium", SyntheticGridSize::medium},
        {"grid-large", SyntheticGridSize::large}};
    text = io::grid_to_json(make_synthetic_grid(sizes.at(a.kind), params)).dump(2);
  }
  write_output(a.out, text + "\n");
  return kExitOk;
}

// --------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string input;
  std::string out_dir;
  std::string largest;
  std::string out;
};

json tree_stats(const InterconnectTree& tree) {
  return json{{"segments", tree.segments.size()},
              {"vias", tree.via_count()},
              {"t_junctions", tree.t_junction_count()},
              {"nodes", tree.nodes.size()}};
}

int run_decompose(const DecomposeArgs& a) {
  const auto grid = io::read_grid_file(a.input);
  const auto trees = decompose_grid(grid);
  if (!a.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw io_error("cannot create '" + a.out_dir + "': " + ec.message());
    for (std::size_t i = 0; i < trees.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "tree_%05zu.json", i);
      io::write_tree_file((std::filesystem::path(a.out_dir) / name).string(), trees[i]);
    }
  }
  std::size_t segments = 0;
  for (const auto& t : trees) segments += t.segments.size();
  json stats{{"schema", io::kSchemaVersion},
             {"input", std::filesystem::path(a.input).filename().string()},
             {"layers", grid.layers.size()},
             {"wires", grid.wires.size()},
             {"vias", grid.vias.size()},
             {"trees", trees.size()},
             {"segments", segments}};
  if (!trees.empty()) {
    const std::size_t best = largest_tree_index(trees);
    json largest = tree_stats(trees[best]);
    largest["index"] = best;
    stats["largest_tree"] = largest;
    if (!a.largest.empty()) io::write_tree_file(a.largest, trees[best]);
  }
  write_output(a.out, stats.dump(2) + "\n");
  return kExitOk;
}

// --------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::vector<std::string> kinds{"tchain"};
  std::vector<std::size_t> sizes;  // 100 500 1000 unless --sizes is given
  double years = 10.0;
  std::size_t intervals = 19;
  double dx_um = 1.0;
  std::size_t repeats = 3;
  std::size_t evals = 50;
  std::size_t dense_cap = 2000;
  double eps = 1e-3;
  std::size_t m_max = 60;
  unsigned jobs = 1;
  std::string out;
};

struct BenchRow {
  std::string kind;
  std::size_t size = 0;
  std::size_t n = 0;
  std::size_t segments = 0;
  std::size_t m = 0;
  bool converged = false;
  double residual = 0.0;
  double t_form = 0.0, t_exp_init = 0.0, t_basis = 0.0, t_exp_sol = 0.0;
  std::optional<double> t_dense;
};

BenchRow bench_one(const BenchArgs& a, const std::string& kind, std::size_t size) {
  const auto params = MaterialParams::copper(kToolDefaultActivationEnergy);
  const double t = a.years * kSecondsPerYear;
  InterconnectTree tree;
  AnalysisOptions opt = analysis_options(a.dx_um, std::nullopt, {t}, a.eps, a.m_max);
  if (kind == "tchain") {
    tree = gen_t_junction_chain(size, params);
    opt.intervals_per_segment = a.intervals;
  } else if (kind == "grid") {
    tree = largest_tree(decompose_grid(make_synthetic_grid(size, size, params)));
  } else {
    throw validation_error("unknown bench kind '" + kind + "' (tchain, grid)");
  }

  BenchRow row;
  row.kind = kind;
  row.size = size;
  row.segments = tree.segments.size();
  std::vector<double> form, init, basis, per_eval;
  std::optional<TransientAnalysis> last;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, a.repeats); ++r) {
    last.emplace(tree, opt);
    form.push_back(last->timings().form);
    init.push_back(last->timings().exp_init);
    basis.push_back(last->timings().basis);
    const auto start = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (std::size_t e = 0; e < a.evals; ++e) sink += evaluate_stress(last->approx(), t)(0);
    per_eval.push_back(seconds_since(start) / static_cast<double>(std::max<std::size_t>(1, a.evals)));
    if (!std::isfinite(sink)) throw solver_error("non-finite stress in benchmark");
  }
  row.n = last->system().n;
  row.m = last->approx().m;
  row.converged = last->approx().converged;
  row.residual = last->approx().residual;
  row.t_form = median(form);
  row.t_exp_init = median(init);
  row.t_basis = median(basis);
  row.t_exp_sol = median(per_eval);
  if (last->reduced().order <= a.dense_cap) {
    const auto start = std::chrono::steady_clock::now();
    oracle::dense_solve(last->reduced(), last->initial_state(), t, a.dense_cap);
    row.t_dense = seconds_since(start);
  }
  return row;
}

int run_bench(BenchArgs a) {
  std::sort(a.sizes.begin(), a.sizes.end());
  std::vector<std::pair<std::string, std::size_t>> cases;
  for (const auto& kind : a.kinds)
    for (std::size_t s : a.sizes) cases.emplace_back(kind, s);
  std::vector<BenchRow> rows(cases.size());
  parallel_for(cases.size(), a.jobs,
               [&](std::size_t i) { rows[i] = bench_one(a, cases[i].first, cases[i].second); });

  std::string csv =
      "kind,size,n,segments,m,converged,residual,t_form,t_exp_init,t_basis,t_exp_sol,t_dense\n";
  for (const auto& r : rows) {
    csv += r.kind + ',' + std::to_string(r.size) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.segments) + ',' + std::to_string(r.m) + ',' +
           (r.converged ? "true" : "false") + ',' + num(r.residual) + ',' + num(r.t_form) + ',' +
           num(r.t_exp_init) + ',' + num(r.t_basis) + ',' + num(r.t_exp_sol) + ',' +
           (r.t_dense ? num(*r.t_dense) : "") + '\n';
  }
  write_output(a.out, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electromigration stress analysis of multi-segment interconnect trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "emstress 1.0.0");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Transient stress of a tree or every tree of a grid");
  simulate->add_option("input", sim.input, "Tree or grid JSON file")->required();
  simulate->add_option("--dx", sim.dx_um, "Target grid spacing in um")->capture_default_str();
  simulate->add_option("--intervals", sim.intervals, "Fixed number of intervals per segment (overrides --dx)");
  simulate->add_option("--time-years,-t", sim.years, "Evaluation times in years")->required();
  simulate->add_option("--eps", sim.eps, "Relative error budget")->capture_default_str();
  simulate->add_option("--m-max", sim.m_max, "Largest Krylov basis")->capture_default_str();
  simulate->add_option("--pivot", sim.pivot, "Point eliminated by mass conservation");
  simulate->add_option("--out,-o", sim.out, "Write PREFIX.csv and PREFIX.json instead of stdout/stderr");
  simulate->add_option("--unit", sim.unit, "Stress unit")->check(CLI::IsMember({"Pa", "MPa"}))->capture_default_str();
  simulate->add_option("--dump-matrices", sim.dump, "Write C, G, B in Matrix Market form with this prefix");
  simulate->add_option("--jobs,-j", sim.jobs, "Worker threads for grids")->capture_default_str();

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Error of the Krylov solution against a reference solver");
  compare->add_option("input", cmp.input, "Tree JSON file")->required();
  compare->add_option("--dx", cmp.dx_um, "Target grid spacing in um")->capture_default_str();
  compare->add_option("--intervals", cmp.intervals, "Fixed number of intervals per segment");
  compare->add_option("--time-years,-t", cmp.years, "Evaluation times in years")->required();
  compare->add_option("--oracle", cmp.oracle, "Reference solver")->check(CLI::IsMember({"dense", "euler"}))->capture_default_str();
  compare->add_option("--steps", cmp.steps, "Backward Euler steps")->capture_default_str();
  compare->add_option("--eps", cmp.eps, "Relative error budget")->capture_default_str();
  compare->add_option("--m-max", cmp.m_max, "Largest Krylov basis")->capture_default_str();
  compare->add_option("--cap", cmp.cap, "Largest reduced order for the dense oracle")->capture_default_str();
  compare->add_option("--out,-o", cmp.out, "Report path (default stdout)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a fixture tree or grid");
  generate->add_option("--kind", gen.kind, "Fixture kind")
      ->required()
      ->check(CLI::IsMember({"tchain", "seven", "single", "grid-small", "grid-medium", "grid-large"}));
  generate->add_option("--n", gen.n, "T junctions for tchain")->capture_default_str();
  generate->add_option("--ea", gen.ea_ev, "Activation energy in eV")->capture_default_str();
  generate->add_option("--length-um", gen.length_um, "Length for single")->capture_default_str();
  generate->add_option("--width-um", gen.width_um, "Width for single")->capture_default_str();
  generate->add_option("--j", gen.j, "Current density for single, A/m^2")->capture_default_str();
  generate->add_option("--out,-o", gen.out, "Output path (default stdout)");

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "Split a grid into interconnect trees");
  decompose->add_option("input", dec.input, "Grid JSON file")->required();
  decompose->add_option("--out-dir", dec.out_dir, "Write every tree as tree_NNNNN.json here");
  decompose->add_option("--largest", dec.largest, "Write the largest tree to this file");
  decompose->add_option("--out,-o", dec.out, "Statistics path (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Timing table over generated fixtures");
  bench_cmd->add_option("--kinds", bench.kinds, "tchain and/or grid")->capture_default_str();
  // "--sizes" with no values is an empty table, not an error.
  auto* sizes_opt =
      bench_cmd
          ->add_option("--sizes", bench.sizes,
                       "T junctions (tchain) or stripes per layer (grid); default 100 500 1000")
          ->expected(0, CLI::detail::expected_max_vector_size);
  bench_cmd->add_option("--time-years,-t", bench.years, "Evaluation time in years")->capture_default_str();
  bench_cmd->add_option("--intervals", bench.intervals, "Intervals per tchain segment")->capture_default_str();
  bench_cmd->add_option("--dx", bench.dx_um, "Grid spacing for grid trees, um")->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats, "Runs per row; the median is reported")->capture_default_str();
  bench_cmd->add_option("--evals", bench.evals, "Evaluations timed per run")->capture_default_str();
  bench_cmd->add_option("--dense-cap", bench.dense_cap, "Time the dense oracle up to this order")
      ->capture_default_str();
  bench_cmd->add_option("--eps", bench.eps, "Relative error budget")->capture_default_str();
  bench_cmd->add_option("--m-max", bench.m_max, "Largest Krylov basis")->capture_default_str();
  bench_cmd->add_option("--jobs,-j", bench.jobs, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--out,-o", bench.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("validation", e.what());
    return kExitValidation;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*compare) return run_compare(cmp);
    if (*generate) return run_generate(gen);
    if (*decompose) return run_decompose(dec);
    if (*bench_cmd) {
      if (sizes_opt->count() == 0) {
        bench.sizes = {100, 500, 1000};
      } else if (std::all_of(sizes_opt->results().begin(), sizes_opt->results().end(),
                             [](const std::string& r) { return r.empty(); })) {
        bench.sizes.clear();
      }
      return run_bench(bench);
    }
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error("solver", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
