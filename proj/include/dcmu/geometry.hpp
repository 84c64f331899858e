#pragma once

#include <cstddef>
#include <span>

#include "dcmu/vec2.hpp"

namespace dcmu {

/// Circular obstacle. `radius` plays the role of the obstacle width in the
/// collision buffer.
struct Obstacle {
  Vec2 center;
  double radius{1.0};
};

/// Closest point on a segment [a, b] to a query point.
/// closest_point == zeta * a + (1 - zeta) * b, so zeta == 1 means endpoint a.
struct SegmentProjection {
  Vec2 closest_point;
  double zeta{1.0};
  double distance{0.0};
};

SegmentProjection project_point_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

struct ObstacleHit {
  std::size_t index{0};
  Vec2 x_beta;                  // point on the obstacle boundary nearest the segment
  SegmentProjection projection; // projection of the obstacle center onto the segment
  double boundary_distance{0};  // signed; negative when the segment penetrates the disk
};

/// Obstacle whose boundary is nearest to segment [a, b]. Throws
/// std::invalid_argument on an empty obstacle list. Ties go to the lowest index.
ObstacleHit nearest_obstacle_to_segment(const Vec2& a, const Vec2& b,
                                        std::span<const Obstacle> obstacles);

enum class CollisionKind { robot, obstacle };

struct CollisionTarget {
  Vec2 point;          // x_gamma: neighbor nominal position or obstacle center
  double buffer{0.0};  // b_io
  CollisionKind kind{CollisionKind::robot};
  std::size_t index{0};
  double score{0.0};        // |x_i - point| - buffer
  double runner_up_gap{0};  // score margin to the second-best candidate (inf if none)
};

/// Nearest possible collision point for robot i. Robot candidates use
/// `robot_buffers[j]` (s * sqrt(max eig of Sigma_j)); obstacle candidates use
/// their radius. Lowest score wins; ties prefer robots, then lower index.
/// Throws std::invalid_argument when there is no candidate at all.
CollisionTarget nearest_collision_point(std::size_t i, std::span<const Vec2> nominals,
                                        std::span<const double> robot_buffers,
                                        std::span<const Obstacle> obstacles);

/// True when segment [a, b] intersects the closed disk of `o`.
bool segment_hits_disk(const Vec2& a, const Vec2& b, const Obstacle& o);

}  // namespace dcmu
