#include "dcmu/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dcmu/robot_model.hpp"

namespace dcmu {

namespace {

struct Config {
  std::vector<Vec2> nominals;
  std::vector<double> eigs;
  std::vector<Obstacle> obstacles;
};

// Configurations are drawn in one of four modes so that every factor of a_01
// is exercised inside its taper: range, line of sight, collision, or
// unconstrained.
Config draw_config(Rng& rng, const GraphParams& p) {
  std::uniform_int_distribution<int> mode_dist(0, 3);
  std::uniform_int_distribution<int> n_robots(2, 5);
  std::uniform_int_distribution<int> n_obst(0, 3);
  std::uniform_real_distribution<double> coord(-15.0, 15.0);
  std::uniform_real_distribution<double> eig(0.0, 1.0);
  std::uniform_real_distribution<double> pair_dist(8.0, 22.0);
  std::uniform_real_distribution<double> near_dist(6.0, 12.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> radius(0.5, 2.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Config c;
  const int mode = mode_dist(rng);
  const int n = n_robots(rng);
  for (int k = 0; k < n; ++k) c.eigs.push_back(eig(rng));
  const double b0 = p.s * std::sqrt(c.eigs[0]);
  const double b1 = p.s * std::sqrt(c.eigs[1]);

  double d = mode == 3 ? pair_dist(rng) : near_dist(rng);
  if (mode == 0) {
    const double l = p.rho0 + (p.rho - p.rho0) * unit(rng);
    d = std::max(0.5, l - b0 - b1);
  }
  const double a = angle(rng);
  const Vec2 dir{std::cos(a), std::sin(a)};
  c.nominals.push_back({coord(rng), coord(rng)});
  c.nominals.push_back(c.nominals[0] + d * dir);
  for (int k = 2; k < n; ++k) c.nominals.push_back({coord(rng), coord(rng)});

  const int m = n_obst(rng);
  for (int k = 0; k < m; ++k) c.obstacles.push_back({{coord(rng), coord(rng)}, radius(rng)});
  if (mode == 1) {
    const double clear = p.d_beta_min + (p.d_beta_max - p.d_beta_min) * unit(rng);
    const double r = radius(rng);
    const Vec2 normal{-dir.y, dir.x};
    const Vec2 foot = c.nominals[0] + (0.2 + 0.6 * unit(rng)) * d * dir;
    c.obstacles.push_back({foot + (r + std::max(b0, b1) + clear) * normal, r});
  } else if (mode == 2) {
    const double clear = p.d_gamma_min + (p.d_gamma_max - p.d_gamma_min) * unit(rng);
    const double r = radius(rng);
    const double th = angle(rng);
    c.obstacles.push_back(
        {c.nominals[0] + (clear + b0 + r) * Vec2{std::cos(th), std::sin(th)}, r});
  }
  return c;
}

bool near(double v, double edge, double margin) {
  return std::isfinite(v) && std::abs(v - edge) < margin;
}

// Every measure that feeds a_01 sits at least `margin` away from a taper
// breakpoint, and every nearest-candidate selection wins by at least `margin`.
bool smooth(const Config& c, const GraphParams& p, double margin) {
  const std::size_t n = c.nominals.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(c.nominals[i], c.nominals[j]) < 0.5) return false;
    }
  }
  const double l = conservative_range(c.nominals[0], c.nominals[1], c.eigs[0], c.eigs[1], p.s);
  if (near(l, p.rho0, margin) || near(l, p.rho, margin)) return false;

  const LosClearance los =
      los_clearance(c.nominals[0], c.nominals[1], c.obstacles, c.eigs[0], c.eigs[1], p.s);
  if (near(los.clearance, p.d_beta_min, margin) || near(los.clearance, p.d_beta_max, margin)) {
    return false;
  }
  if (los.has_obstacle && los.runner_up_gap < margin) return false;
  if (los.has_obstacle && distance(los.x_l, los.obstacle_center) < margin) return false;
  // The larger-eigenvalue choice inside the line-of-sight deflation.
  if (std::abs(c.eigs[0] - c.eigs[1]) < margin) return false;

  for (std::size_t k : {std::size_t{0}, std::size_t{1}}) {
    const CollisionClearance cc = collision_clearance(k, c.nominals, c.eigs, p.s, c.obstacles);
    if (near(cc.clearance, p.d_gamma_min, margin) || near(cc.clearance, p.d_gamma_max, margin)) {
      return false;
    }
    if (cc.has_target && cc.target.runner_up_gap < margin) return false;
  }
  return true;
}

}  // namespace

double gradient_rel_error(const Vec2& analytic, const Vec2& fd) {
  return (analytic - fd).norm() / std::max(fd.norm(), 1e-4);
}

Vec2 finite_difference_gradient(std::size_t i, std::size_t j, const WorldView& world, double h) {
  std::vector<Vec2> moved(world.nominals.begin(), world.nominals.end());
  WorldView w = world;
  w.nominals = moved;
  auto a_at = [&](const Vec2& xi) {
    moved[i] = xi;
    return edge_weight(i, j, w).a;
  };
  const Vec2 x = world.nominals[i];
  const double gx = (a_at(x + Vec2{h, 0.0}) - a_at(x - Vec2{h, 0.0})) / (2.0 * h);
  const double gy = (a_at(x + Vec2{0.0, h}) - a_at(x - Vec2{0.0, h})) / (2.0 * h);
  return {gx, gy};
}

GradcheckResult run_gradcheck(const GradcheckOptions& options, ExecPolicy policy) {
  if (options.trials == 0) throw std::invalid_argument("run_gradcheck: trials must be >= 1");
  options.params.validate();
  GradcheckResult out;
  out.trials.resize(options.trials);
  const long long count = static_cast<long long>(options.trials);
#pragma omp parallel for schedule(dynamic, 16) if (policy == ExecPolicy::parallel)
  for (long long t = 0; t < count; ++t) {
    GradcheckTrial& trial = out.trials[static_cast<std::size_t>(t)];
    Rng rng = make_robot_stream(options.seed, static_cast<std::uint64_t>(t));
    Config c = draw_config(rng, options.params);
    while (!smooth(c, options.params, options.edge_margin)) {
      ++trial.resamples;
      c = draw_config(rng, options.params);
    }
    const WorldView w{c.nominals, c.eigs, c.obstacles, options.params};
    const Vec2 analytic = edge_weight_gradient(0, 1, w);
    const Vec2 fd = finite_difference_gradient(0, 1, w, options.h);
    trial.n_robots = c.nominals.size();
    trial.n_obstacles = c.obstacles.size();
    trial.rel_error = gradient_rel_error(analytic, fd);
    trial.fd_norm = fd.norm();
  }
  for (std::size_t k = 0; k < out.trials.size(); ++k) {
    const GradcheckTrial& t = out.trials[k];
    if (t.fd_norm > 1e-6) ++out.nonzero_gradients;
    if (!(t.rel_error <= out.max_rel_error)) {
      out.max_rel_error = t.rel_error;
      out.worst_trial = k;
    }
  }
  out.passed = out.max_rel_error < options.tolerance;
  return out;
}

}  // namespace dcmu
