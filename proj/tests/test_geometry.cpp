#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dcmu/geometry.hpp"

using namespace dcmu;

TEST_CASE("projection onto a segment") {
  SUBCASE("interior point") {
    const auto p = project_point_to_segment({5, 3}, {0, 0}, {10, 0});
    CHECK(p.closest_point == Vec2{5, 0});
    CHECK(p.zeta == doctest::Approx(0.5));
    CHECK(p.distance == doctest::Approx(3.0));
  }
  SUBCASE("clamped to endpoint a") {
    const auto p = project_point_to_segment({-2, 0}, {0, 0}, {10, 0});
    CHECK(p.closest_point == Vec2{0, 0});
    CHECK(p.zeta == 1.0);
    CHECK(p.distance == doctest::Approx(2.0));
  }
  SUBCASE("clamped to endpoint b") {
    const auto p = project_point_to_segment({12, 1}, {0, 0}, {10, 0});
    CHECK(p.zeta == 0.0);
    CHECK(p.closest_point == Vec2{10, 0});
  }
  SUBCASE("degenerate segment") {
    const auto p = project_point_to_segment({3, 4}, {0, 0}, {0, 0});
    CHECK(p.closest_point == Vec2{0, 0});
    CHECK(p.zeta == 1.0);
    CHECK(p.distance == doctest::Approx(5.0));
  }
}

TEST_CASE("projection properties on random inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 p{u(rng), u(rng)}, a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const auto proj = project_point_to_segment(p, a, b);
    CHECK(proj.zeta >= 0.0);
    CHECK(proj.zeta <= 1.0);
    const Vec2 composed = proj.zeta * a + (1.0 - proj.zeta) * b;
    CHECK(proj.closest_point == composed);
    CHECK(proj.distance <= std::min(distance(p, a), distance(p, b)) + 1e-12);
    for (int k = 0; k <= 100; ++k) {
      const double z = k / 100.0;
      CHECK(proj.distance <= distance(p, z * a + (1.0 - z) * b) + 1e-12);
    }

    // Rigid motion leaves zeta unchanged.
    const double th = ang(rng);
    const Vec2 t{u(rng), u(rng)};
    auto move = [&](const Vec2& v) {
      return Vec2{std::cos(th) * v.x - std::sin(th) * v.y + t.x,
                  std::sin(th) * v.x + std::cos(th) * v.y + t.y};
    };
    const auto moved = project_point_to_segment(move(p), move(a), move(b));
    CHECK(std::abs(moved.zeta - proj.zeta) <= 1e-9);
  }
}

TEST_CASE("nearest obstacle to a segment") {
  SUBCASE("perpendicular drop minus radius") {
    const std::vector<Obstacle> obs{{{5, 4}, 1}};
    const auto hit = nearest_obstacle_to_segment({0, 0}, {10, 0}, obs);
    CHECK(hit.index == 0);
    CHECK(hit.x_beta.x == doctest::Approx(5.0));
    CHECK(hit.x_beta.y == doctest::Approx(3.0));
    CHECK(hit.projection.closest_point == Vec2{5, 0});
    CHECK(hit.boundary_distance == doctest::Approx(3.0));
  }
  SUBCASE("nearer obstacle wins") {
    const std::vector<Obstacle> obs{{{5, 4}, 1}, {{5, -10}, 1}};
    CHECK(nearest_obstacle_to_segment({0, 0}, {10, 0}, obs).index == 0);
    const std::vector<Obstacle> rev{{{5, -10}, 1}, {{5, 4}, 1}};
    CHECK(nearest_obstacle_to_segment({0, 0}, {10, 0}, rev).index == 1);
  }
  SUBCASE("penetration is negative") {
    const std::vector<Obstacle> obs{{{1, 0.5}, 1}};
    CHECK(nearest_obstacle_to_segment({0, 0}, {2, 0}, obs).boundary_distance ==
          doctest::Approx(-0.5));
  }
  SUBCASE("endpoint inside an obstacle") {
    const std::vector<Obstacle> obs{{{0, 0}, 2}};
    const auto hit = nearest_obstacle_to_segment({0.5, 0}, {10, 0}, obs);
    CHECK(hit.boundary_distance == doctest::Approx(-1.5));
  }
  SUBCASE("empty list is an error") {
    CHECK_THROWS_AS(nearest_obstacle_to_segment({0, 0}, {1, 0}, {}), std::invalid_argument);
  }
}

TEST_CASE("nearest obstacle matches brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::uniform_real_distribution<double> rad(0.2, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Obstacle> obs;
    const int m = 1 + trial % 6;
    for (int k = 0; k < m; ++k) obs.push_back({{u(rng), u(rng)}, rad(rng)});
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    double best = 1e300;
    for (const Obstacle& o : obs) {
      // Dense sampling of the segment as an independent reference.
      double d = 1e300;
      for (int k = 0; k <= 20000; ++k) {
        const double z = k / 20000.0;
        d = std::min(d, distance(o.center, z * a + (1.0 - z) * b));
      }
      best = std::min(best, d - o.radius);
    }
    const auto hit = nearest_obstacle_to_segment(a, b, obs);
    CHECK(hit.boundary_distance == doctest::Approx(best).epsilon(1e-4));
    CHECK(distance(hit.x_beta, obs[hit.index].center) ==
          doctest::Approx(obs[hit.index].radius));
  }
}

TEST_CASE("nearest collision point") {
  SUBCASE("robot closer than obstacle") {
    const std::vector<Vec2> nom{{0, 0}, {3, 0}};
    const std::vector<double> buf{0.0, 0.5};
    const std::vector<Obstacle> obs{{{0, 5}, 1}};
    const auto t = nearest_collision_point(0, nom, buf, obs);
    CHECK(t.kind == CollisionKind::robot);
    CHECK(t.index == 1);
    CHECK(t.buffer == 0.5);
    CHECK(t.score == doctest::Approx(2.5));
    CHECK(t.runner_up_gap == doctest::Approx(1.5));
  }
  SUBCASE("single obstacle") {
    const std::vector<Vec2> nom{{0, 0}};
    const std::vector<double> buf{0.0};
    const std::vector<Obstacle> obs{{{0, 2}, 1}};
    const auto t = nearest_collision_point(0, nom, buf, obs);
    CHECK(t.kind == CollisionKind::obstacle);
    CHECK(t.buffer == 1.0);
    CHECK(t.point == Vec2{0, 2});
  }
  SUBCASE("tie goes to the robot") {
    const std::vector<Vec2> nom{{0, 0}, {4, 0}};
    const std::vector<double> buf{0.0, 1.0};
    const std::vector<Obstacle> obs{{{4, 0}, 1}};
    const auto t = nearest_collision_point(0, nom, buf, obs);
    CHECK(t.kind == CollisionKind::robot);
    CHECK(t.runner_up_gap == 0.0);
  }
  SUBCASE("tie between robots goes to the lower index") {
    const std::vector<Vec2> nom{{0, 0}, {0, 3}, {3, 0}};
    const std::vector<double> buf{0.0, 0.0, 0.0};
    CHECK(nearest_collision_point(0, nom, buf, {}).index == 1);
  }
  SUBCASE("no candidates") {
    const std::vector<Vec2> nom{{0, 0}};
    const std::vector<double> buf{0.0};
    CHECK_THROWS_AS(nearest_collision_point(0, nom, buf, {}), std::invalid_argument);
  }
}

TEST_CASE("segment against disk") {
  CHECK(segment_hits_disk({0, 0}, {10, 0}, {{5, 0.9}, 1}));
  CHECK(segment_hits_disk({0, 0}, {10, 0}, {{5, 1.0}, 1}));
  CHECK_FALSE(segment_hits_disk({0, 0}, {10, 0}, {{5, 1.1}, 1}));
  CHECK_FALSE(segment_hits_disk({0, 0}, {10, 0}, {{12.5, 0}, 2}));
}
