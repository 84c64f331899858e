#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcmu/consensus.hpp"
#include "dcmu/geometry.hpp"
#include "dcmu/robot_model.hpp"
#include "dcmu/weighted_graph.hpp"

namespace dcmu {

enum class Algorithm { dcmu, baseline };

const char* to_string(Algorithm a);
/// Throws std::invalid_argument for anything other than "dcmu" / "baseline".
Algorithm parse_algorithm(const std::string& s);

struct SimParams {
  GraphParams graph;
  NoiseParams noise{Mat2::scaled_identity(0.02), Mat2::scaled_identity(5.0)};
  Mat2 P0{Mat2::scaled_identity(0.1)};
  Mat2 K_fb{Mat2::scaled_identity(0.14)};
  double dt{0.2};
  double v_max{2.0};
  double duration{120.0};
  int consensus_rounds{200};
  double consensus_shift_margin{1.0};
  std::uint64_t consensus_seed{0};
  Algorithm algo{Algorithm::dcmu};
};

struct RobotSpec {
  Role role{Role::follower};
  Vec2 position;
  Vec2 estimate;  // initial x_hat
  double speed{0.0};
  std::vector<Vec2> waypoints;  // leaders only
};

struct Scenario {
  SimParams params;
  std::vector<Obstacle> obstacles;
  std::vector<RobotSpec> robots;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  /// duration / dt, rounded.
  std::size_t steps() const;
  /// Graph parameters used for the weighted graph (s = 0 for the baseline).
  GraphParams effective_graph_params() const;
};

struct LeaderCommand {
  Vec2 u_nom;
  std::size_t next_waypoint{0};
};

/// Constant-speed piecewise-linear tracking. Travels speed * dt along the
/// remaining path starting at x_nom and heading for waypoints[next_waypoint],
/// turning corners inside the step. Holds position after the last waypoint.
LeaderCommand leader_nominal_input(const Vec2& x_nom, std::span<const Vec2> waypoints,
                                   std::size_t next_waypoint, double speed, double dt);

struct StepRecord {
  double t{0.0};
  double lambda2_true{0.0};
  double lambda2_weighted{0.0};
  double lambda2_est_min{0.0};
  double lambda2_est_max{0.0};
  double min_robot_dist{0.0};
  double min_obst_clearance{0.0};
  bool collision{false};
  std::vector<Vec2> x_true;
  std::vector<Vec2> x_nom;
  std::vector<Mat2> sigma;
};

struct WorldState {
  std::size_t step{0};
  double t{0.0};
  std::vector<RobotState> robots;
  std::vector<ConsensusState> consensus;
  std::vector<std::size_t> next_waypoint;
  std::vector<Rng> rngs;
  ConsensusDiagnostics consensus_diag;
};

WorldState make_world(const Scenario& scenario, std::uint64_t seed);

/// Thrown by step_world when any state becomes non-finite.
struct NumericalAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One control step: weighted graph, consensus epoch, nominal inputs, nominal
/// advance, noisy motion / sensing / KF / dispersion, true connectivity.
StepRecord step_world(const Scenario& scenario, WorldState& world);

struct RunMetrics {
  std::uint64_t seed{0};
  bool success{false};
  bool aborted{false};
  std::string abort_reason;
  double min_lambda2_true{0.0};
  bool collision_occurred{false};
  std::size_t collision_steps{0};
  std::size_t steps{0};
  std::vector<StepRecord> records;  // filled only when requested
};

RunMetrics run_episode(const Scenario& scenario, std::uint64_t seed, bool keep_records = false);

struct MonteCarloResult {
  std::size_t runs{0};
  std::size_t successes{0};
  double ratio{0.0};
  std::vector<RunMetrics> per_run;  // ordered by seed
};

/// Episodes seed_base + k for k < n_runs. The result does not depend on the
/// policy or thread count.
MonteCarloResult monte_carlo(const Scenario& scenario, std::size_t n_runs, std::uint64_t seed_base,
                             ExecPolicy policy = ExecPolicy::parallel);

inline MonteCarloResult monte_carlo_serial(const Scenario& scenario, std::size_t n_runs,
                                           std::uint64_t seed_base) {
  return monte_carlo(scenario, n_runs, seed_base, ExecPolicy::serial);
}

/// One noise-grid cell: Q = q I, R = r I (m^2).
struct NoiseCell {
  double q{0.0};
  double r{0.0};
};

/// Q in {0, 0.01, 0.02}, R in {1, 2, 3, 4, 5}, Q-major.
std::vector<NoiseCell> default_noise_grid();

struct CellResult {
  NoiseCell cell;
  MonteCarloResult result;
};

/// monte_carlo for every cell, with all (cell, run) episodes in one parallel
/// loop. Cells keep the given order; runs inside a cell are ordered by seed.
std::vector<CellResult> monte_carlo_sweep(const Scenario& scenario,
                                          std::span<const NoiseCell> cells, std::size_t n_runs,
                                          std::uint64_t seed_base,
                                          ExecPolicy policy = ExecPolicy::parallel);

}  // namespace dcmu
