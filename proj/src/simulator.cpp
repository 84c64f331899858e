#include "dcmu/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcmu/controller.hpp"

namespace dcmu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("Scenario: " + what);
}

bool psd(const Mat2& m) {
  return m.finite() && m.xy == m.yx && m.min_sym_eigenvalue() >= -1e-12;
}

bool state_finite(const RobotState& r) {
  return r.x_true.finite() && r.x_hat.finite() && r.x_nom.finite() && r.P.finite() &&
         r.Lambda.finite() && r.Sigma.finite() && std::isfinite(r.sigma_eig_max) &&
         r.u_nom.finite();
}

}  // namespace

const char* to_string(Algorithm a) { return a == Algorithm::dcmu ? "dcmu" : "baseline"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "dcmu") return Algorithm::dcmu;
  if (s == "baseline") return Algorithm::baseline;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected dcmu or baseline)");
}

void Scenario::validate() const {
  params.graph.validate();
  const SimParams& p = params;
  require(p.dt > 0.0 && std::isfinite(p.dt), "dt must be > 0");
  require(p.v_max > 0.0, "v_max must be > 0");
  require(p.duration > 0.0 && std::isfinite(p.duration), "duration must be > 0");
  const double ratio = p.duration / p.dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio),
          "duration must be an integer multiple of dt");
  require(p.consensus_rounds >= 1, "consensus_rounds must be >= 1");
  require(p.consensus_shift_margin > 0.0, "consensus_shift_margin must be > 0");
  require(psd(p.noise.Q), "Q must be symmetric positive semidefinite");
  require(psd(p.noise.R), "R must be symmetric positive semidefinite");
  require(psd(p.P0), "P0 must be symmetric positive semidefinite");
  require(p.K_fb.finite(), "K_fb must be finite");
  require(!robots.empty(), "at least one robot is required");
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    require(obstacles[k].center.finite() && obstacles[k].radius > 0.0,
            "obstacle " + std::to_string(k) + " needs a finite center and radius > 0");
  }
  for (std::size_t k = 0; k < robots.size(); ++k) {
    const RobotSpec& r = robots[k];
    const std::string tag = "robot " + std::to_string(k);
    require(r.position.finite() && r.estimate.finite(), tag + " has a non-finite position");
    if (r.role == Role::leader) {
      require(!r.waypoints.empty(), tag + ": leaders need at least one waypoint");
      require(r.speed >= 0.0 && r.speed <= p.v_max, tag + ": speed must be in [0, v_max]");
      for (const Vec2& w : r.waypoints) require(w.finite(), tag + " has a non-finite waypoint");
    } else {
      require(r.waypoints.empty(), tag + ": followers take no waypoints");
    }
  }
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(params.duration / params.dt));
}

GraphParams Scenario::effective_graph_params() const {
  GraphParams g = params.graph;
  if (params.algo == Algorithm::baseline) g.s = 0.0;
  return g;
}

LeaderCommand leader_nominal_input(const Vec2& x_nom, std::span<const Vec2> waypoints,
                                   std::size_t next_waypoint, double speed, double dt) {
  constexpr double kReached = 1e-9;
  LeaderCommand cmd{{}, next_waypoint};
  Vec2 at = x_nom;
  double budget = speed * dt;
  while (cmd.next_waypoint < waypoints.size()) {
    const Vec2 target = waypoints[cmd.next_waypoint];
    const double d = distance(at, target);
    if (d <= budget + kReached) {
      at = target;
      budget = std::max(0.0, budget - d);
      ++cmd.next_waypoint;
      continue;
    }
    at = at + (budget / d) * (target - at);
    break;
  }
  cmd.u_nom = (1.0 / dt) * (at - x_nom);
  return cmd;
}

WorldState make_world(const Scenario& scenario, std::uint64_t seed) {
  const SimParams& p = scenario.params;
  const std::size_t n = scenario.robots.size();
  ConsensusParams cp{p.consensus_rounds, p.consensus_shift_margin, p.consensus_seed};

  WorldState w;
  w.robots.resize(n);
  w.next_waypoint.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const RobotSpec& spec = scenario.robots[i];
    RobotState& r = w.robots[i];
    r.role = spec.role;
    r.x_true = spec.position;
    r.x_hat = spec.estimate;
    r.x_nom = spec.position;
    r.P = p.P0;
    r.Lambda = Mat2{};
    r.Sigma = r.P + r.Lambda;
    r.sigma_eig_max = r.Sigma.max_sym_eigenvalue();
    r.K_fb = p.K_fb;
    w.consensus.push_back(make_consensus_state(i, n, cp));
    w.rngs.push_back(make_robot_stream(seed, i));
  }
  return w;
}

StepRecord step_world(const Scenario& scenario, WorldState& world) {
  const SimParams& p = scenario.params;
  const std::size_t n = world.robots.size();
  const GraphParams gp = scenario.effective_graph_params();

  std::vector<Vec2> nominals(n);
  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) {
    nominals[i] = world.robots[i].x_nom;
    eigs[i] = world.robots[i].sigma_eig_max;
  }
  const WorldView view{nominals, eigs, scenario.obstacles, gp};
  const auto edges = all_edges(view);
  SquareMatrix weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) weights(i, j) = i == j ? 0.0 : edges[i][j].a;
  }

  ConsensusParams cp{p.consensus_rounds, p.consensus_shift_margin, p.consensus_seed};
  const ConsensusDiagnostics d =
      run_consensus_epoch(world.consensus, weights, p.consensus_rounds, cp, ExecPolicy::serial);
  world.consensus_diag.dropped_messages += d.dropped_messages;
  world.consensus_diag.restarts += d.restarts;

  // Nominal inputs, all from the same epoch snapshot.
  for (std::size_t i = 0; i < n; ++i) {
    RobotState& r = world.robots[i];
    if (r.role == Role::leader) {
      const RobotSpec& spec = scenario.robots[i];
      const LeaderCommand cmd =
          leader_nominal_input(r.x_nom, spec.waypoints, world.next_waypoint[i], spec.speed, p.dt);
      r.u_nom = cmd.u_nom;
      world.next_waypoint[i] = cmd.next_waypoint;
      continue;
    }
    std::vector<NeighborInput> inputs;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !(edges[i][j].a > 0.0)) continue;
      inputs.push_back({j, edges[i][j].a, edges[i][j].grad_a_wrt_i,
                        world.consensus[j].e2_component});
    }
    const ControlReport rep =
        nominal_control(world.consensus[i].e2_component, world.consensus[i].lambda2_tilde, inputs,
                        p.dt, p.v_max, gp.epsilon);
    r.u_nom = rep.u_nom;
  }

  for (std::size_t i = 0; i < n; ++i) {
    RobotState& r = world.robots[i];
    Rng& rng = world.rngs[i];
    const Vec2 u = total_control(r.u_nom, r.x_hat, r.x_nom, r.K_fb, p.v_max);
    r.x_nom = advance_nominal(r.x_nom, r.u_nom, p.dt);
    r.x_true = step_true_state(r.x_true, u, p.dt, p.noise.Q, rng);
    const Vec2 z = sample_measurement(r.x_true, p.noise.R, rng);
    const Prediction pred = kf_predict(r.x_hat, r.P, u, p.dt, p.noise.Q);
    const Correction corr = kf_correct_or_exact(pred.x_bar, pred.P_bar, z, p.noise.R);
    const Dispersion disp = update_dispersion(r.Lambda, corr.P, pred.P_bar, corr.G, p.dt, r.K_fb);
    r.x_hat = corr.x_hat;
    r.P = corr.P;
    r.Lambda = disp.Lambda;
    r.Sigma = disp.Sigma;
    r.sigma_eig_max = disp.sigma_eig_max;
    if (!state_finite(r)) {
      throw NumericalAbort("non-finite state for robot " + std::to_string(i) + " at step " +
                           std::to_string(world.step + 1));
    }
  }
  ++world.step;
  world.t = static_cast<double>(world.step) * p.dt;

  StepRecord rec;
  rec.t = world.t;
  rec.x_true.resize(n);
  rec.x_nom.resize(n);
  rec.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.x_true[i] = world.robots[i].x_true;
    rec.x_nom[i] = world.robots[i].x_nom;
    rec.sigma[i] = world.robots[i].Sigma;
  }
  const TrueConnectivity truth = true_binary_connectivity(rec.x_true, scenario.obstacles, gp);
  rec.lambda2_true = truth.lambda2;
  rec.collision = truth.any_collision;
  rec.lambda2_weighted = fiedler_oracle(laplacian(weights)).lambda2;
  rec.lambda2_est_min = kInf;
  rec.lambda2_est_max = 0.0;
  for (const ConsensusState& c : world.consensus) {
    rec.lambda2_est_min = std::min(rec.lambda2_est_min, c.lambda2_tilde);
    rec.lambda2_est_max = std::max(rec.lambda2_est_max, c.lambda2_tilde);
  }
  rec.min_robot_dist = kInf;
  rec.min_obst_clearance = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      rec.min_robot_dist = std::min(rec.min_robot_dist, distance(rec.x_true[i], rec.x_true[j]));
    }
    for (const Obstacle& o : scenario.obstacles) {
      rec.min_obst_clearance =
          std::min(rec.min_obst_clearance, distance(rec.x_true[i], o.center) - o.radius);
    }
  }
  if (!std::isfinite(rec.lambda2_true) || !std::isfinite(rec.lambda2_weighted)) {
    throw NumericalAbort("non-finite connectivity at step " + std::to_string(world.step));
  }
  return rec;
}

RunMetrics run_episode(const Scenario& scenario, std::uint64_t seed, bool keep_records) {
  RunMetrics m;
  m.seed = seed;
  m.min_lambda2_true = kInf;
  WorldState world = make_world(scenario, seed);
  const std::size_t steps = scenario.steps();
  const double eps = scenario.params.graph.epsilon;
  bool connected = true;
  try {
    for (std::size_t k = 0; k < steps; ++k) {
      StepRecord rec = step_world(scenario, world);
      ++m.steps;
      m.min_lambda2_true = std::min(m.min_lambda2_true, rec.lambda2_true);
      connected = connected && rec.lambda2_true > eps;
      if (rec.collision) {
        m.collision_occurred = true;
        ++m.collision_steps;
      }
      if (keep_records) m.records.push_back(std::move(rec));
    }
  } catch (const NumericalAbort& e) {
    m.aborted = true;
    m.abort_reason = e.what();
  }
  if (m.steps == 0) m.min_lambda2_true = 0.0;
  m.success = connected && !m.aborted;
  return m;
}

MonteCarloResult monte_carlo(const Scenario& scenario, std::size_t n_runs, std::uint64_t seed_base,
                             ExecPolicy policy) {
  if (n_runs == 0) throw std::invalid_argument("monte_carlo: n_runs must be >= 1");
  MonteCarloResult out;
  out.runs = n_runs;
  out.per_run.resize(n_runs);
  const long long count = static_cast<long long>(n_runs);
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::parallel)
  for (long long k = 0; k < count; ++k) {
    out.per_run[static_cast<std::size_t>(k)] =
        run_episode(scenario, seed_base + static_cast<std::uint64_t>(k));
  }
  for (const RunMetrics& m : out.per_run) out.successes += m.success ? 1 : 0;
  out.ratio = static_cast<double>(out.successes) / static_cast<double>(n_runs);
  return out;
}

std::vector<NoiseCell> default_noise_grid() {
  std::vector<NoiseCell> grid;
  for (const double q : {0.0, 0.01, 0.02}) {
    for (const double r : {1.0, 2.0, 3.0, 4.0, 5.0}) grid.push_back({q, r});
  }
  return grid;
}

std::vector<CellResult> monte_carlo_sweep(const Scenario& scenario,
                                          std::span<const NoiseCell> cells, std::size_t n_runs,
                                          std::uint64_t seed_base, ExecPolicy policy) {
  if (n_runs == 0) throw std::invalid_argument("monte_carlo_sweep: n_runs must be >= 1");
  std::vector<Scenario> variants(cells.size(), scenario);
  std::vector<CellResult> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    variants[c].params.noise = {Mat2::scaled_identity(cells[c].q),
                                Mat2::scaled_identity(cells[c].r)};
    variants[c].validate();
    out[c].cell = cells[c];
    out[c].result.runs = n_runs;
    out[c].result.per_run.resize(n_runs);
  }
  const long long total = static_cast<long long>(cells.size() * n_runs);
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::parallel)
  for (long long job = 0; job < total; ++job) {
    const std::size_t c = static_cast<std::size_t>(job) / n_runs;
    const std::size_t k = static_cast<std::size_t>(job) % n_runs;
    out[c].result.per_run[k] = run_episode(variants[c], seed_base + k);
  }
  for (CellResult& cr : out) {
    for (const RunMetrics& m : cr.result.per_run) cr.result.successes += m.success ? 1 : 0;
    cr.result.ratio = static_cast<double>(cr.result.successes) / static_cast<double>(n_runs);
  }
  return out;
}

}  // namespace dcmu
