// Serial reference vs OpenMP kernels: Monte-Carlo episodes, gradient-check
// trials and consensus rounds. Prints wall time and checks the outputs agree.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dcmu/cli.hpp"
#include "dcmu/gradcheck.hpp"
#include "dcmu/scenario_io.hpp"
#include "dcmu/simulator.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double seconds(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-12s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  identical=%s\n", name,
              serial, parallel, serial / parallel, same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcmu kernel benchmark"};
  std::string scenario_path = "scenarios/two_robot.scn";
  std::size_t runs = 32;
  std::size_t trials = 4000;
  std::size_t robots = 64;
  app.add_option("--scenario", scenario_path, "Scenario for the Monte-Carlo kernel");
  app.add_option("--runs", runs, "Episodes");
  app.add_option("--trials", trials, "Gradient-check trials");
  app.add_option("--robots", robots, "Robots in the consensus benchmark graph");
  CLI11_PARSE(app, argc, argv);

  try {
    const int cap = dcmu::threads_from_env();
#ifdef _OPENMP
    if (cap > 0) omp_set_num_threads(cap);
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    (void)cap;
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    const dcmu::Scenario sc = dcmu::parse_scenario(scenario_path);
    dcmu::MonteCarloResult a, b;
    const double mc_s = seconds([&] { a = dcmu::monte_carlo_serial(sc, runs, 1); });
    const double mc_p = seconds([&] { b = dcmu::monte_carlo(sc, runs, 1); });
    bool same = a.successes == b.successes;
    for (std::size_t k = 0; k < runs; ++k) {
      same = same && a.per_run[k].min_lambda2_true == b.per_run[k].min_lambda2_true;
    }
    report("montecarlo", mc_s, mc_p, same);

    dcmu::GradcheckOptions opt;
    opt.trials = trials;
    dcmu::GradcheckResult ga, gb;
    const double gc_s = seconds([&] { ga = dcmu::run_gradcheck(opt, dcmu::ExecPolicy::serial); });
    const double gc_p =
        seconds([&] { gb = dcmu::run_gradcheck(opt, dcmu::ExecPolicy::parallel); });
    report("gradcheck", gc_s, gc_p, ga.max_rel_error == gb.max_rel_error);

    // Ring with chords; one message per edge per round.
    dcmu::SquareMatrix w(robots);
    for (std::size_t i = 0; i < robots; ++i) {
      for (std::size_t step : {std::size_t{1}, std::size_t{5}}) {
        const std::size_t j = (i + step) % robots;
        if (j != i) w(i, j) = w(j, i) = 0.5;
      }
    }
    dcmu::ConsensusParams cp;
    std::vector<dcmu::ConsensusState> sa, sb;
    for (std::size_t i = 0; i < robots; ++i) sa.push_back(dcmu::make_consensus_state(i, robots, cp));
    sb = sa;
    const int rounds = 2000;
    const double cs_s = seconds(
        [&] { dcmu::run_consensus_epoch(sa, w, rounds, cp, dcmu::ExecPolicy::serial); });
    const double cs_p = seconds(
        [&] { dcmu::run_consensus_epoch(sb, w, rounds, cp, dcmu::ExecPolicy::parallel); });
    bool cs_same = true;
    for (std::size_t i = 0; i < robots; ++i) {
      cs_same = cs_same && sa[i].x_tilde == sb[i].x_tilde &&
                sa[i].lambda2_tilde == sb[i].lambda2_tilde;
    }
    report("consensus", cs_s, cs_p, cs_same);
    return same && cs_same && ga.max_rel_error == gb.max_rel_error ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
