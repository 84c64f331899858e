#include "dcmu/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dcmu/gradcheck.hpp"
#include "dcmu/scenario_io.hpp"

#ifndef DCMU_VERSION
#define DCMU_VERSION "0.0.0"
#endif

namespace dcmu {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void apply_thread_cap() {
  const int cap = threads_from_env();
#ifdef _OPENMP
  if (cap > 0) omp_set_num_threads(cap);
#else
  (void)cap;
#endif
}

json run_json(const RunMetrics& m) {
  json j;
  j["seed"] = m.seed;
  j["success"] = m.success;
  j["min_lambda2_true"] = m.min_lambda2_true;
  j["collision_steps"] = m.collision_steps;
  j["aborted"] = m.aborted;
  if (m.aborted) j["abort_reason"] = m.abort_reason;
  return j;
}

json summary_header(const Scenario& sc, std::uint64_t seed_base) {
  json j;
  j["tool"] = "dcmu";
  j["version"] = DCMU_VERSION;
  j["scenario_hash"] = hex64(scenario_hash(sc));
  j["algorithm"] = to_string(sc.params.algo);
  j["seed_base"] = seed_base;
  return j;
}

struct RunOptions {
  std::string scenario;
  std::uint64_t seed{1};
  std::string algo;
  std::string out{"out"};
};

struct MonteCarloOptions {
  std::string scenario;
  std::size_t runs{100};
  std::uint64_t seed_base{1};
  std::string algo;
  bool sweep{false};
  std::vector<double> q_values;
  std::vector<double> r_values;
  std::string out{"out"};
};

struct GradcheckCliOptions {
  std::size_t trials{1000};
  std::uint64_t seed{1};
};

Scenario load(const std::string& path, const std::string& algo) {
  Scenario sc = parse_scenario(path);
  if (!algo.empty()) sc.params.algo = parse_algorithm(algo);
  return sc;
}

int cmd_run(const RunOptions& o) {
  const Scenario sc = load(o.scenario, o.algo);
  const RunMetrics m = run_episode(sc, o.seed, true);
  const fs::path dir(o.out);
  ensure_dir(dir);
  write_text(dir / "steps.csv", steps_csv(m, sc.robots.size()));
  json summary = summary_header(sc, o.seed);
  summary["runs"] = 1;
  summary["successes"] = m.success ? 1 : 0;
  summary["ratio"] = m.success ? 1.0 : 0.0;
  summary["per_run"] = json::array({run_json(m)});
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "run seed=" << o.seed << " algo=" << to_string(sc.params.algo)
            << " success=" << (m.success ? "yes" : "no")
            << " min_lambda2_true=" << format_number(m.min_lambda2_true) << "\n";
  if (m.aborted) {
    std::cerr << "aborted: " << m.abort_reason << "\n";
    return kExitError;
  }
  return m.success ? kExitOk : kExitMetricFail;
}

int cmd_montecarlo(const MonteCarloOptions& o) {
  if (o.runs == 0) throw std::invalid_argument("--runs must be >= 1");
  const Scenario sc = load(o.scenario, o.algo);
  std::vector<NoiseCell> cells;
  if (o.sweep || !o.q_values.empty() || !o.r_values.empty()) {
    const std::vector<NoiseCell> grid = default_noise_grid();
    std::vector<double> qs = o.q_values;
    std::vector<double> rs = o.r_values;
    if (qs.empty()) {
      for (const NoiseCell& c : grid) qs.push_back(c.q);
    }
    if (rs.empty()) {
      for (const NoiseCell& c : grid) rs.push_back(c.r);
    }
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    for (double q : qs) {
      for (double r : rs) {
        if (q < 0.0 || r < 0.0) throw std::invalid_argument("noise values must be >= 0");
        cells.push_back({q, r});
      }
    }
  } else {
    const Mat2& Q = sc.params.noise.Q;
    const Mat2& R = sc.params.noise.R;
    if (Q != Mat2::scaled_identity(Q.xx) || R != Mat2::scaled_identity(R.xx)) {
      throw std::invalid_argument("montecarlo reports scalar noise; use q, r multiples of I");
    }
    cells.push_back({Q.xx, R.xx});
  }

  apply_thread_cap();
  const std::vector<CellResult> results = monte_carlo_sweep(sc, cells, o.runs, o.seed_base);

  std::ostringstream ratios;
  ratios << "Q,R,algo,runs,successes,ratio\n";
  std::ostringstream runs;
  runs << "Q,R,algo,seed,success,min_lambda2_true,collision_steps,aborted\n";
  json summary = summary_header(sc, o.seed_base);
  summary["runs_per_cell"] = o.runs;
  json jcells = json::array();
  const char* algo = to_string(sc.params.algo);
  for (const CellResult& cr : results) {
    const std::string q = format_number(cr.cell.q);
    const std::string r = format_number(cr.cell.r);
    ratios << q << "," << r << "," << algo << "," << cr.result.runs << ","
           << cr.result.successes << "," << format_number(cr.result.ratio) << "\n";
    json jc;
    jc["Q"] = cr.cell.q;
    jc["R"] = cr.cell.r;
    jc["runs"] = cr.result.runs;
    jc["successes"] = cr.result.successes;
    jc["ratio"] = cr.result.ratio;
    json per = json::array();
    for (const RunMetrics& m : cr.result.per_run) {
      runs << q << "," << r << "," << algo << "," << m.seed << "," << (m.success ? 1 : 0) << ","
           << format_number(m.min_lambda2_true) << "," << m.collision_steps << ","
           << (m.aborted ? 1 : 0) << "\n";
      per.push_back(run_json(m));
    }
    jc["per_run"] = std::move(per);
    jcells.push_back(std::move(jc));
    std::cout << "Q=" << q << " R=" << r << " algo=" << algo << " ratio="
              << format_number(cr.result.ratio) << " (" << cr.result.successes << "/"
              << cr.result.runs << ")\n";
  }
  summary["cells"] = std::move(jcells);

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_text(dir / "ratios.csv", ratios.str());
  write_text(dir / "runs.csv", runs.str());
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_gradcheck(const GradcheckCliOptions& o) {
  if (o.trials == 0) throw std::invalid_argument("--trials must be >= 1");
  apply_thread_cap();
  GradcheckOptions opt;
  opt.trials = o.trials;
  opt.seed = o.seed;
  const GradcheckResult r = run_gradcheck(opt);
  std::size_t resamples = 0;
  for (const GradcheckTrial& t : r.trials) resamples += t.resamples;
  std::cout << "gradcheck trials=" << o.trials << " nonzero=" << r.nonzero_gradients
            << " filtered=" << resamples << " max_rel_error=" << format_number(r.max_rel_error)
            << " tolerance=" << format_number(opt.tolerance) << "\n";
  return r.passed ? kExitOk : kExitMetricFail;
}

}  // namespace

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::string steps_csv(const RunMetrics& run, std::size_t n_robots) {
  std::ostringstream os;
  os << "t,lambda2_true,lambda2_weighted,lambda2_est_min,lambda2_est_max,min_robot_dist,"
        "min_obst_clearance";
  for (std::size_t i = 0; i < n_robots; ++i) {
    os << ",x_true_" << i << ",y_true_" << i << ",x_nom_" << i << ",y_nom_" << i;
  }
  os << "\n";
  for (const StepRecord& r : run.records) {
    os << format_number(r.t) << "," << format_number(r.lambda2_true) << ","
       << format_number(r.lambda2_weighted) << "," << format_number(r.lambda2_est_min) << ","
       << format_number(r.lambda2_est_max) << "," << format_number(r.min_robot_dist) << ","
       << format_number(r.min_obst_clearance);
    for (std::size_t i = 0; i < n_robots; ++i) {
      os << "," << format_number(r.x_true[i].x) << "," << format_number(r.x_true[i].y) << ","
         << format_number(r.x_nom[i].x) << "," << format_number(r.x_nom[i].y);
    }
    os << "\n";
  }
  return os.str();
}

int threads_from_env() {
  const char* v = std::getenv("DCMU_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw std::invalid_argument(std::string("DCMU_THREADS must be a positive integer, got '") +
                                v + "'");
  }
  return static_cast<int>(n);
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Connectivity maintenance under motion and sensing uncertainty", "dcmu"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DCMU_VERSION);

  RunOptions run;
  CLI::App* sub_run = app.add_subcommand("run", "Simulate one episode");
  sub_run->add_option("--scenario", run.scenario, "Scenario file")->required();
  sub_run->add_option("--seed", run.seed, "Episode seed");
  sub_run->add_option("--algo", run.algo, "dcmu or baseline (default: scenario value)")
      ->check(CLI::IsMember({"dcmu", "baseline"}));
  sub_run->add_option("--out", run.out, "Output directory");

  MonteCarloOptions mc;
  CLI::App* sub_mc = app.add_subcommand("montecarlo", "Success ratio over seeded episodes");
  sub_mc->add_option("--scenario", mc.scenario, "Scenario file")->required();
  sub_mc->add_option("--runs", mc.runs, "Episodes per noise cell");
  sub_mc->add_option("--seed-base", mc.seed_base, "Seed of the first episode");
  sub_mc->add_option("--algo", mc.algo, "dcmu or baseline (default: scenario value)")
      ->check(CLI::IsMember({"dcmu", "baseline"}));
  sub_mc->add_flag("--sweep", mc.sweep, "Sweep Q in {0,0.01,0.02} x R in {1..5} (m^2)");
  sub_mc->add_option("--q", mc.q_values, "Q multiples of I to sweep (m^2)")->delimiter(',');
  sub_mc->add_option("--r", mc.r_values, "R multiples of I to sweep (m^2)")->delimiter(',');
  sub_mc->add_option("--out", mc.out, "Output directory");

  GradcheckCliOptions gc;
  CLI::App* sub_gc = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  sub_gc->add_option("--trials", gc.trials, "Random smooth configurations");
  sub_gc->add_option("--seed", gc.seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (sub_run->parsed()) return cmd_run(run);
    if (sub_mc->parsed()) return cmd_montecarlo(mc);
    if (sub_gc->parsed()) return cmd_gradcheck(gc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace dcmu
