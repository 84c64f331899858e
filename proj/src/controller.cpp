#include "dcmu/controller.hpp"

#include <algorithm>
#include <cmath>

namespace dcmu {

double value_function(double lambda2, double epsilon) {
  if (!(lambda2 > epsilon)) return 0.0;
  return 1.0 / std::tanh(lambda2 - epsilon);
}

double value_gradient(double lambda2, double epsilon) {
  if (!(lambda2 > epsilon)) return 0.0;
  if (lambda2 < epsilon + kValueGradClampBand) return -kValueGradMax;
  const double sh = std::sinh(lambda2 - epsilon);
  return std::max(-1.0 / (sh * sh), -kValueGradMax);
}

ControlReport nominal_control(double e2_self, double lambda2_est,
                              std::span<const NeighborInput> neighbors, double dt, double v_max,
                              double epsilon) {
  ControlReport r;
  if (!(lambda2_est > epsilon)) return r;
  r.value_grad = value_gradient(lambda2_est, epsilon);

  Vec2 sum;
  for (const NeighborInput& n : neighbors) {
    if (!(n.weight > 0.0)) continue;
    const double gap = e2_self - n.e2_neighbor;
    NeighborTerm t{n.neighbor, n.weight, gap * gap, n.grad_a * (gap * gap)};
    sum = sum + t.contribution;
    r.terms.push_back(t);
  }
  const Vec2 u_raw = (-r.value_grad / dt) * sum;
  r.delta_x_nom = dt * u_raw;
  r.u_nom = clamp_components(u_raw, v_max);
  return r;
}

}  // namespace dcmu
