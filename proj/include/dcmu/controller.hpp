#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcmu/vec2.hpp"

namespace dcmu {

/// |dV/dlambda| cap applied below epsilon + kValueGradClampBand.
inline constexpr double kValueGradMax = 1e6;
inline constexpr double kValueGradClampBand = 1e-3;

/// V = coth(lambda2 - epsilon) above epsilon, 0 otherwise.
double value_function(double lambda2, double epsilon);

/// dV/dlambda2 = -1/sinh^2(lambda2 - epsilon), capped at -kValueGradMax
/// close to epsilon and 0 at or below epsilon.
double value_gradient(double lambda2, double epsilon);

/// What a follower knows about one neighbor: the weight and its gradient it
/// computed itself, plus the neighbor's broadcast Fiedler component.
struct NeighborInput {
  std::size_t neighbor{0};
  double weight{0.0};
  Vec2 grad_a;
  double e2_neighbor{0.0};
};

struct NeighborTerm {
  std::size_t neighbor{0};
  double weight{0.0};
  double e2_gap_sq{0.0};  // (e2_i - e2_j)^2
  Vec2 contribution;      // grad_a * e2_gap_sq
};

struct ControlReport {
  Vec2 u_nom;          // clamped
  Vec2 delta_x_nom;    // dt * unclamped u_nom
  double value_grad{0.0};
  std::vector<NeighborTerm> terms;
};

/// Gradient-descent nominal input for a follower:
/// u = (1/dt) (-dV/dlambda) sum_j grad a_ij (e2_i - e2_j)^2, clamped per
/// component to v_max. Returns zero when lambda2_est <= epsilon. Neighbors
/// with weight <= 0 are skipped.
ControlReport nominal_control(double e2_self, double lambda2_est,
                              std::span<const NeighborInput> neighbors, double dt, double v_max,
                              double epsilon);

}  // namespace dcmu
