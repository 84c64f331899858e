#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcmu/geometry.hpp"
#include "dcmu/linalg.hpp"
#include "dcmu/vec2.hpp"

namespace dcmu {

/// Parameters of the uncertainty-aware weighted graph and of the true
/// binary connectivity test.
struct GraphParams {
  double rho{20.0};          // max communication range, m
  double rho0{18.0};         // range taper start, m
  double d_beta_min{1.0};    // line-of-sight clearance bounds, m
  double d_beta_max{3.0};
  double d_gamma_min{1.0};   // collision clearance bounds, m
  double d_gamma_max{3.0};
  double s{3.494};           // confidence scale on sqrt(max eig of Sigma)
  double epsilon{0.01};      // connectivity floor
  double collision_radius{0.5};  // robot body radius for the true graph, m

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

// ---- conservative measures and factors ------------------------------------

/// |x_i - x_j| + s sqrt(eig_i) + s sqrt(eig_j).
double conservative_range(const Vec2& x_i, const Vec2& x_j, double eig_i, double eig_j, double s);

/// Communication range factor: 1 up to rho0, cosine taper to 0 at rho.
double comm_range_factor(double l_ij, double rho0, double rho);
/// d(alpha)/d(l_ij).
double comm_range_factor_slope(double l_ij, double rho0, double rho);

/// Rising cosine taper shared by the line-of-sight and collision factors:
/// 0 at or below d_min, 1 above d_max.
double clearance_factor(double l, double d_min, double d_max);
/// d(factor)/d(l).
double clearance_factor_slope(double l, double d_min, double d_max);

inline double los_factor(double l_ij_o, double d_beta_min, double d_beta_max) {
  return clearance_factor(l_ij_o, d_beta_min, d_beta_max);
}
inline double collision_factor(double l_i_o, double d_gamma_min, double d_gamma_max) {
  return clearance_factor(l_i_o, d_gamma_min, d_gamma_max);
}

struct LosClearance {
  double clearance{0.0};  // +inf when there are no obstacles
  double zeta{1.0};
  Vec2 x_beta;
  Vec2 x_l;
  Vec2 obstacle_center;
  std::size_t obstacle{0};
  bool has_obstacle{false};
  double runner_up_gap{0.0};  // boundary-distance margin to the next obstacle
};

/// Line-of-sight clearance of the nominal segment x_i -> x_j, deflated by
/// s sqrt(max(eig_i, eig_j)). The raw distance is signed (negative when the
/// segment cuts an obstacle).
LosClearance los_clearance(const Vec2& x_i, const Vec2& x_j, std::span<const Obstacle> obstacles,
                           double eig_i, double eig_j, double s);

struct CollisionClearance {
  double clearance{0.0};  // +inf when there is nothing to collide with
  bool has_target{false};
  CollisionTarget target;
};

/// |x_i - x_gamma| - s sqrt(eig_i) - b_io for robot i's nearest collision point.
CollisionClearance collision_clearance(std::size_t i, std::span<const Vec2> nominals,
                                       std::span<const double> eigs, double s,
                                       std::span<const Obstacle> obstacles);

// ---- edges ----------------------------------------------------------------

/// Everything needed to evaluate edge weights: nominal positions, largest
/// Sigma eigenvalue per robot, obstacles and graph parameters.
struct WorldView {
  std::span<const Vec2> nominals;
  std::span<const double> eigs;
  std::span<const Obstacle> obstacles;
  GraphParams params;
};

struct WeightedEdge {
  double alpha{0.0};
  double beta{0.0};
  double gamma_i{0.0};
  double gamma_j{0.0};
  double a{0.0};
  Vec2 grad_a_wrt_i;
};

/// Edge weight a_ij = alpha * beta * gamma_i * gamma_j and its gradient with
/// respect to robot i's nominal position.
WeightedEdge edge_weight(std::size_t i, std::size_t j, const WorldView& world);

/// d a_ij / d x_nom_i. Eigenvalue derivatives are zero because Sigma does not
/// depend on the nominal position; zeta is held fixed.
Vec2 edge_weight_gradient(std::size_t i, std::size_t j, const WorldView& world);

/// Full weighted adjacency matrix (symmetric, zero diagonal).
SquareMatrix weighted_adjacency(const WorldView& world);

/// All edges incident to every robot: edges[i][j] (edges[i][i] is zero).
std::vector<std::vector<WeightedEdge>> all_edges(const WorldView& world);

// ---- spectra --------------------------------------------------------------

/// L = diag(row sums) - A. Throws std::invalid_argument if A is not
/// symmetric or has a nonzero diagonal.
SquareMatrix laplacian(const SquareMatrix& A);

struct FiedlerResult {
  double lambda2{0.0};
  std::vector<double> vector;  // unit norm, first nonzero component positive
  std::vector<double> eigenvalues;
  bool degenerate{false};  // lambda2 and lambda3 coincide (within 1e-9 relative)
};

/// Algebraic connectivity and Fiedler vector via Jacobi. For n < 2 returns
/// lambda2 = 0 and a zero vector.
FiedlerResult fiedler_oracle(const SquareMatrix& L);

struct TrueConnectivity {
  SquareMatrix adjacency;  // entries in {0, 1}
  double lambda2{0.0};
  bool any_collision{false};
};

/// Ground-truth binary graph on true positions: in range, unobstructed line of
/// sight, and neither endpoint in collision.
TrueConnectivity true_binary_connectivity(std::span<const Vec2> positions,
                                          std::span<const Obstacle> obstacles,
                                          const GraphParams& params);

}  // namespace dcmu
