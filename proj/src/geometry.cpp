#include "dcmu/geometry.hpp"

#include <limits>
#include <stdexcept>

namespace dcmu {

SegmentProjection project_point_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = a - b;
  const double len2 = ab.squared_norm();
  double zeta = 1.0;
  if (len2 > 0.0) {
    zeta = dot(p - b, ab) / len2;
    if (zeta < 0.0) zeta = 0.0;
    if (zeta > 1.0) zeta = 1.0;
  }
  SegmentProjection out;
  out.zeta = zeta;
  out.closest_point = zeta * a + (1.0 - zeta) * b;
  out.distance = distance(p, out.closest_point);
  return out;
}

ObstacleHit nearest_obstacle_to_segment(const Vec2& a, const Vec2& b,
                                        std::span<const Obstacle> obstacles) {
  if (obstacles.empty()) {
    throw std::invalid_argument("nearest_obstacle_to_segment: no obstacles");
  }
  ObstacleHit best;
  best.boundary_distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const Obstacle& o = obstacles[k];
    const SegmentProjection proj = project_point_to_segment(o.center, a, b);
    const double d = proj.distance - o.radius;
    if (d < best.boundary_distance) {
      best.index = k;
      best.projection = proj;
      best.boundary_distance = d;
    }
  }
  const Obstacle& o = obstacles[best.index];
  const Vec2 dir = best.projection.closest_point - o.center;
  // A segment passing through the center has no preferred direction; any
  // boundary point is equally near.
  const Vec2 u = dir.squared_norm() > 0.0 ? dir / dir.norm() : Vec2{1.0, 0.0};
  best.x_beta = o.center + o.radius * u;
  return best;
}

CollisionTarget nearest_collision_point(std::size_t i, std::span<const Vec2> nominals,
                                        std::span<const double> robot_buffers,
                                        std::span<const Obstacle> obstacles) {
  if (i >= nominals.size() || robot_buffers.size() != nominals.size()) {
    throw std::invalid_argument("nearest_collision_point: index or buffer size mismatch");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  CollisionTarget best;
  best.score = inf;
  double second = inf;
  bool found = false;
  auto consider = [&](const Vec2& point, double buffer, CollisionKind kind, std::size_t idx) {
    const double score = distance(nominals[i], point) - buffer;
    if (!found || score < best.score) {
      second = best.score;
      best = CollisionTarget{point, buffer, kind, idx, score, inf};
      found = true;
    } else if (score < second) {
      second = score;
    }
  };
  for (std::size_t j = 0; j < nominals.size(); ++j) {
    if (j != i) consider(nominals[j], robot_buffers[j], CollisionKind::robot, j);
  }
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    consider(obstacles[k].center, obstacles[k].radius, CollisionKind::obstacle, k);
  }
  if (!found) {
    throw std::invalid_argument("nearest_collision_point: no robots or obstacles to collide with");
  }
  best.runner_up_gap = second - best.score;
  return best;
}

bool segment_hits_disk(const Vec2& a, const Vec2& b, const Obstacle& o) {
  return project_point_to_segment(o.center, a, b).distance <= o.radius;
}

}  // namespace dcmu
