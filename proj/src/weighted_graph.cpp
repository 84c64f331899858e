#include "dcmu/weighted_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dcmu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kCoincident = 1e-9;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("GraphParams: ") + what);
}

// Per-robot data that every edge touching the robot needs.
struct RobotTerms {
  CollisionClearance collision;
  double gamma{1.0};
  double gamma_slope{0.0};
};

RobotTerms robot_terms(std::size_t i, const WorldView& w, std::span<const double> buffers) {
  RobotTerms t;
  const bool has_candidate = w.nominals.size() > 1 || !w.obstacles.empty();
  if (has_candidate) {
    t.collision.target = nearest_collision_point(i, w.nominals, buffers, w.obstacles);
    t.collision.has_target = true;
    t.collision.clearance = t.collision.target.score - w.params.s * std::sqrt(w.eigs[i]);
  } else {
    t.collision.clearance = kInf;
  }
  t.gamma = collision_factor(t.collision.clearance, w.params.d_gamma_min, w.params.d_gamma_max);
  t.gamma_slope =
      clearance_factor_slope(t.collision.clearance, w.params.d_gamma_min, w.params.d_gamma_max);
  return t;
}

std::vector<double> robot_buffers(const WorldView& w) {
  std::vector<double> b(w.nominals.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = w.params.s * std::sqrt(w.eigs[k]);
  return b;
}

// Edge evaluation with i as the differentiated endpoint. Quantities shared by
// (i, j) and (j, i) are computed in index order so that a_ij == a_ji exactly.
WeightedEdge evaluate_edge(std::size_t i, std::size_t j, const WorldView& w, const RobotTerms& ti,
                           const RobotTerms& tj) {
  const GraphParams& p = w.params;
  const Vec2& xi = w.nominals[i];
  const Vec2& xj = w.nominals[j];
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);

  WeightedEdge e;
  const double l_ij =
      conservative_range(w.nominals[lo], w.nominals[hi], w.eigs[lo], w.eigs[hi], p.s);
  e.alpha = comm_range_factor(l_ij, p.rho0, p.rho);
  const double alpha_slope = comm_range_factor_slope(l_ij, p.rho0, p.rho);

  const LosClearance los =
      los_clearance(w.nominals[lo], w.nominals[hi], w.obstacles, w.eigs[lo], w.eigs[hi], p.s);
  e.beta = los_factor(los.clearance, p.d_beta_min, p.d_beta_max);
  const double beta_slope = clearance_factor_slope(los.clearance, p.d_beta_min, p.d_beta_max);

  e.gamma_i = ti.gamma;
  e.gamma_j = tj.gamma;
  const double gamma_lo = lo == i ? ti.gamma : tj.gamma;
  const double gamma_hi = lo == i ? tj.gamma : ti.gamma;
  e.a = e.alpha * e.beta * (gamma_lo * gamma_hi);

  // Factor gradients with respect to x_i.
  const Vec2 d_alpha = alpha_slope * unit_or_zero(xi - xj, kCoincident);

  Vec2 d_beta;
  if (los.has_obstacle && beta_slope != 0.0) {
    const double zeta_i = lo == i ? los.zeta : 1.0 - los.zeta;
    d_beta = beta_slope * zeta_i * unit_or_zero(los.x_l - los.obstacle_center, 1e-12);
  }

  Vec2 d_gamma_i;
  if (ti.collision.has_target && ti.gamma_slope != 0.0) {
    d_gamma_i = ti.gamma_slope * unit_or_zero(xi - ti.collision.target.point, kCoincident);
  }

  Vec2 d_gamma_j;
  const CollisionTarget& tgt_j = tj.collision.target;
  if (tj.collision.has_target && tj.gamma_slope != 0.0 && tgt_j.kind == CollisionKind::robot &&
      tgt_j.index == i) {
    d_gamma_j = tj.gamma_slope * unit_or_zero(xi - xj, kCoincident);
  }

  e.grad_a_wrt_i = d_alpha * (e.beta * e.gamma_i * e.gamma_j) +
                   d_beta * (e.alpha * e.gamma_i * e.gamma_j) +
                   d_gamma_i * (e.alpha * e.beta * e.gamma_j) +
                   d_gamma_j * (e.alpha * e.beta * e.gamma_i);
  return e;
}

}  // namespace

void GraphParams::validate() const {
  require(std::isfinite(rho) && std::isfinite(rho0), "rho and rho0 must be finite");
  require(rho0 > 0.0, "rho0 must be > 0");
  require(rho0 < rho, "rho0 must be < rho");
  require(d_beta_min > 0.0, "d_beta_min must be > 0");
  require(d_beta_min < d_beta_max, "d_beta_min must be < d_beta_max");
  require(d_gamma_min > 0.0, "d_gamma_min must be > 0");
  require(d_gamma_min < d_gamma_max, "d_gamma_min must be < d_gamma_max");
  require(s >= 0.0 && std::isfinite(s), "s must be >= 0");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(collision_radius >= 0.0, "collision_radius must be >= 0");
}

double conservative_range(const Vec2& x_i, const Vec2& x_j, double eig_i, double eig_j,
                          double s) {
  return distance(x_i, x_j) + (s * std::sqrt(eig_i) + s * std::sqrt(eig_j));
}

double comm_range_factor(double l_ij, double rho0, double rho) {
  if (l_ij <= rho0) return 1.0;
  if (l_ij <= rho) return 0.5 + 0.5 * std::cos(kPi * (l_ij - rho0) / (rho - rho0));
  return 0.0;
}

double comm_range_factor_slope(double l_ij, double rho0, double rho) {
  if (l_ij <= rho0 || l_ij > rho) return 0.0;
  return -kPi / (2.0 * (rho - rho0)) * std::sin(kPi * (l_ij - rho0) / (rho - rho0));
}

double clearance_factor(double l, double d_min, double d_max) {
  if (l > d_max) return 1.0;
  if (l > d_min) return 0.5 + 0.5 * std::cos(kPi * (d_max - l) / (d_max - d_min));
  return 0.0;
}

double clearance_factor_slope(double l, double d_min, double d_max) {
  if (l > d_max || l <= d_min) return 0.0;
  return kPi / (2.0 * (d_max - d_min)) * std::sin(kPi * (d_max - l) / (d_max - d_min));
}

LosClearance los_clearance(const Vec2& x_i, const Vec2& x_j, std::span<const Obstacle> obstacles,
                           double eig_i, double eig_j, double s) {
  LosClearance out;
  if (obstacles.empty()) {
    out.clearance = kInf;
    out.zeta = 1.0;
    out.x_l = x_i;
    out.x_beta = x_i;
    out.runner_up_gap = kInf;
    return out;
  }
  const ObstacleHit hit = nearest_obstacle_to_segment(x_i, x_j, obstacles);
  out.has_obstacle = true;
  out.obstacle = hit.index;
  out.obstacle_center = obstacles[hit.index].center;
  out.zeta = hit.projection.zeta;
  out.x_l = hit.projection.closest_point;
  out.x_beta = hit.x_beta;
  out.clearance = hit.boundary_distance - s * std::sqrt(std::max(eig_i, eig_j));
  double second = kInf;
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    if (k == hit.index) continue;
    const double d =
        project_point_to_segment(obstacles[k].center, x_i, x_j).distance - obstacles[k].radius;
    second = std::min(second, d);
  }
  out.runner_up_gap = second - hit.boundary_distance;
  return out;
}

CollisionClearance collision_clearance(std::size_t i, std::span<const Vec2> nominals,
                                       std::span<const double> eigs, double s,
                                       std::span<const Obstacle> obstacles) {
  CollisionClearance out;
  if (nominals.size() <= 1 && obstacles.empty()) {
    out.clearance = kInf;
    return out;
  }
  std::vector<double> buffers(nominals.size());
  for (std::size_t k = 0; k < nominals.size(); ++k) buffers[k] = s * std::sqrt(eigs[k]);
  out.target = nearest_collision_point(i, nominals, buffers, obstacles);
  out.has_target = true;
  out.clearance = out.target.score - s * std::sqrt(eigs[i]);
  return out;
}

WeightedEdge edge_weight(std::size_t i, std::size_t j, const WorldView& world) {
  if (i == j) throw std::invalid_argument("edge_weight: i == j");
  const std::vector<double> buffers = robot_buffers(world);
  return evaluate_edge(i, j, world, robot_terms(i, world, buffers), robot_terms(j, world, buffers));
}

Vec2 edge_weight_gradient(std::size_t i, std::size_t j, const WorldView& world) {
  return edge_weight(i, j, world).grad_a_wrt_i;
}

std::vector<std::vector<WeightedEdge>> all_edges(const WorldView& world) {
  const std::size_t n = world.nominals.size();
  const std::vector<double> buffers = robot_buffers(world);
  std::vector<RobotTerms> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) terms.push_back(robot_terms(i, world, buffers));
  std::vector<std::vector<WeightedEdge>> edges(n, std::vector<WeightedEdge>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) edges[i][j] = evaluate_edge(i, j, world, terms[i], terms[j]);
    }
  }
  return edges;
}

SquareMatrix weighted_adjacency(const WorldView& world) {
  const std::size_t n = world.nominals.size();
  const std::vector<double> buffers = robot_buffers(world);
  std::vector<RobotTerms> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) terms.push_back(robot_terms(i, world, buffers));
  SquareMatrix A(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = evaluate_edge(i, j, world, terms[i], terms[j]).a;
      A(i, j) = a;
      A(j, i) = a;
    }
  }
  return A;
}

SquareMatrix laplacian(const SquareMatrix& A) {
  const std::size_t n = A.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (A(i, i) != 0.0) throw std::invalid_argument("laplacian: nonzero diagonal");
  }
  if (!A.symmetric(1e-12)) throw std::invalid_argument("laplacian: adjacency is not symmetric");
  SquareMatrix L(n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      degree += A(i, j);
      L(i, j) = -A(i, j);
    }
    L(i, i) = degree;
  }
  return L;
}

FiedlerResult fiedler_oracle(const SquareMatrix& L) {
  const std::size_t n = L.size();
  FiedlerResult out;
  out.vector.assign(n, 0.0);
  if (n < 2) {
    out.eigenvalues.assign(n, 0.0);
    return out;
  }
  const SymmetricEigen eig = jacobi_eigen(L);
  out.eigenvalues = eig.values;
  out.lambda2 = std::max(0.0, eig.values[1]);
  double norm2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    out.vector[r] = eig.vectors(r, 1);
    norm2 += out.vector[r] * out.vector[r];
  }
  const double norm = std::sqrt(norm2);
  double sign = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(out.vector[r]) > 1e-12) {
      sign = out.vector[r] > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& v : out.vector) v = sign * v / norm;
  if (n >= 3) {
    const double gap = eig.values[2] - eig.values[1];
    out.degenerate = gap <= 1e-9 * std::max(1.0, std::abs(eig.values[2]));
  }
  return out;
}

TrueConnectivity true_binary_connectivity(std::span<const Vec2> positions,
                                          std::span<const Obstacle> obstacles,
                                          const GraphParams& params) {
  const std::size_t n = positions.size();
  std::vector<bool> colliding(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Obstacle& o : obstacles) {
      if (distance(positions[i], o.center) - o.radius < params.collision_radius) colliding[i] = true;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && distance(positions[i], positions[j]) < 2.0 * params.collision_radius) {
        colliding[i] = true;
      }
    }
  }
  TrueConnectivity out;
  out.adjacency = SquareMatrix(n);
  out.any_collision = std::any_of(colliding.begin(), colliding.end(), [](bool c) { return c; });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (colliding[i] || colliding[j]) continue;
      if (distance(positions[i], positions[j]) > params.rho) continue;
      const bool blocked = std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) {
        return segment_hits_disk(positions[i], positions[j], o);
      });
      if (blocked) continue;
      out.adjacency(i, j) = 1.0;
      out.adjacency(j, i) = 1.0;
    }
  }
  out.lambda2 = fiedler_oracle(laplacian(out.adjacency)).lambda2;
  return out;
}

}  // namespace dcmu
