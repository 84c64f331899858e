#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dcmu/consensus.hpp"
#include "dcmu/weighted_graph.hpp"

namespace dcmu {

struct GradcheckOptions {
  std::size_t trials{1000};
  std::uint64_t seed{1};
  double h{1e-5};           // central-difference step, m
  double tolerance{1e-4};   // on the relative error
  double edge_margin{1e-3}; // smoothness filter distance to taper breakpoints, m
  GraphParams params;
};

struct GradcheckTrial {
  std::size_t n_robots{0};
  std::size_t n_obstacles{0};
  std::size_t resamples{0};  // configurations rejected by the smoothness filter
  double rel_error{0.0};
  double fd_norm{0.0};
};

struct GradcheckResult {
  std::vector<GradcheckTrial> trials;
  double max_rel_error{0.0};
  std::size_t worst_trial{0};
  std::size_t nonzero_gradients{0};
  bool passed{false};
};

/// Relative error used throughout: |g_a - g_fd| / max(|g_fd|, 1e-4).
double gradient_rel_error(const Vec2& analytic, const Vec2& finite_difference);

/// Central finite difference of a_ij with respect to x_nom_i.
Vec2 finite_difference_gradient(std::size_t i, std::size_t j, const WorldView& world, double h);

/// Each trial draws random configurations (2-5 robots, 0-4 disk obstacles,
/// biased so that each taper of a_01 is hit in a quarter of the draws) from a
/// stream keyed by (seed, trial) until one passes the smoothness
/// filter, then compares edge_weight_gradient(0, 1) against central
/// differences.
GradcheckResult run_gradcheck(const GradcheckOptions& options,
                              ExecPolicy policy = ExecPolicy::parallel);

}  // namespace dcmu
