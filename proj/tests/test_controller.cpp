#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dcmu/controller.hpp"
#include "dcmu/weighted_graph.hpp"

using namespace dcmu;

TEST_CASE("value function") {
  CHECK(value_function(1.01, 0.01) == doctest::Approx(1.3130352855));
  CHECK(value_function(0.01, 0.01) == 0.0);
  CHECK(value_function(-2.0, 0.01) == 0.0);
  CHECK(value_function(100.0, 0.01) == doctest::Approx(1.0));
  CHECK(value_function(0.01 + 1e-12, 0.01) > 1e9);
}

TEST_CASE("value gradient") {
  CHECK(value_gradient(1.01, 0.01) == doctest::Approx(-0.7240616609));
  CHECK(std::abs(value_gradient(10.01, 0.01)) < 1e-8);
  CHECK(value_gradient(0.01, 0.01) == 0.0);
  CHECK(value_gradient(0.0, 0.01) == 0.0);
  CHECK(value_gradient(0.01 + 1e-6, 0.01) == -kValueGradMax);
  CHECK(value_gradient(0.01 + 0.5e-3, 0.01) == -kValueGradMax);
  CHECK(std::isfinite(value_gradient(0.01 + 1e-300, 0.01)));

  const double eps = 0.01;
  for (double l = eps + 0.1; l < eps + 5.0; l += 0.07) {
    const double h = 1e-6;
    const double fd = (value_function(l + h, eps) - value_function(l - h, eps)) / (2 * h);
    CHECK(value_gradient(l, eps) == doctest::Approx(fd).epsilon(1e-6));
  }
  double prev = -kValueGradMax;
  for (double l = eps + 1e-3; l < eps + 6.0; l *= 1.05) {
    const double g = value_gradient(l, eps);
    CHECK(g <= 0.0);
    CHECK(g >= prev);
    prev = g;
  }
}

TEST_CASE("nominal control") {
  SUBCASE("no neighbors or no estimate") {
    const std::vector<NeighborInput> none;
    CHECK(nominal_control(0.5, 1.0, none, 0.2, 2.0, 0.01).u_nom == Vec2{0, 0});
    const std::vector<NeighborInput> one{{1, 0.5, {1, 0}, -0.5}};
    const auto r = nominal_control(0.5, 0.005, one, 0.2, 2.0, 0.01);
    CHECK(r.u_nom == Vec2{0, 0});
    CHECK(r.terms.empty());
  }
  SUBCASE("flat weights give zero input") {
    const std::vector<NeighborInput> flat{{1, 1.0, {0, 0}, -0.7}, {2, 1.0, {0, 0}, 0.7}};
    CHECK(nominal_control(0.0, 0.5, flat, 0.2, 2.0, 0.01).u_nom == Vec2{0, 0});
  }
  SUBCASE("worked example") {
    // gap^2 = 1, dV/dlambda at 1.01 = -0.72406, u = 0.72406 / 0.2 * (0.1, -0.05).
    const std::vector<NeighborInput> one{{3, 0.4, {0.1, -0.05}, -0.5}};
    const auto r = nominal_control(0.5, 1.01, one, 0.2, 2.0, 0.01);
    CHECK(r.u_nom.x == doctest::Approx(0.3620308305));
    CHECK(r.u_nom.y == doctest::Approx(-0.1810154152));
    CHECK(r.delta_x_nom.x == doctest::Approx(0.2 * 0.3620308305));
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].neighbor == 3);
    CHECK(r.terms[0].e2_gap_sq == doctest::Approx(1.0));
  }
  SUBCASE("zero-weight neighbors are skipped") {
    const std::vector<NeighborInput> n{{1, 0.0, {5, 5}, -1.0}, {2, 0.3, {0.1, 0}, 0.0}};
    const auto r = nominal_control(1.0, 1.01, n, 0.2, 2.0, 0.01);
    CHECK(r.terms.size() == 1);
    CHECK(r.u_nom.y == 0.0);
  }
  SUBCASE("clamped per component") {
    const std::vector<NeighborInput> one{{1, 0.1, {3, -0.001}, -1.0}};
    const auto r = nominal_control(1.0, 0.0105, one, 0.2, 2.0, 0.01);
    CHECK(r.u_nom.x == 2.0);
    CHECK(r.u_nom.y == -2.0);
    CHECK(r.delta_x_nom.x > 2.0 * 0.2);
  }
  SUBCASE("input points along the weight gradients") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      std::vector<NeighborInput> n;
      Vec2 sum;
      const double e_self = u(rng);
      for (std::size_t k = 0; k < 3; ++k) {
        NeighborInput in{k, 0.5 + 0.5 * u(rng), {u(rng), u(rng)}, u(rng)};
        sum = sum + in.grad_a * ((e_self - in.e2_neighbor) * (e_self - in.e2_neighbor));
        n.push_back(in);
      }
      const auto r = nominal_control(e_self, 0.5 + std::abs(u(rng)), n, 0.2, 1e9, 0.01);
      CHECK(dot(r.u_nom, sum) >= 0.0);
    }
  }
}

TEST_CASE("input magnitude grows as the estimate approaches epsilon") {
  const std::vector<NeighborInput> n{{1, 0.6, {0.02, 0.01}, 0.3}, {2, 0.9, {-0.01, 0.03}, -0.4}};
  double prev = 0.0;
  for (double l = 5.0; l > 0.01; l *= 0.9) {
    const double m = nominal_control(0.1, l, n, 0.2, 2.0, 0.01).u_nom.norm();
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("neighbor terms give the gradient of algebraic connectivity") {
  // With s = 0 and every collision clearance above the taper, moving robot i
  // changes only the weights of its own edges, so the summed neighbor terms
  // equal d lambda2 / d x_i.
  GraphParams p;
  p.s = 0.0;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-12.0, 12.0), ang(0.0, 2 * M_PI);
  int checked = 0, nonzero = 0;
  while (checked < 100) {
    std::vector<Vec2> nom;
    for (int k = 0; k < 4; ++k) nom.push_back({u(rng), u(rng)});
    const std::vector<Obstacle> obs{{{u(rng), u(rng)}, 1.0}};
    const std::vector<double> eig(4, 0.0);
    bool ok = true;
    for (std::size_t a = 0; a < 4 && ok; ++a) {
      ok = distance(nom[a], obs[0].center) > 5.0;
      for (std::size_t b = a + 1; b < 4 && ok; ++b) ok = distance(nom[a], nom[b]) > 4.0;
    }
    if (!ok) continue;
    const WorldView w{nom, eig, obs, p};
    const FiedlerResult f = fiedler_oracle(laplacian(weighted_adjacency(w)));
    if (f.lambda2 < 0.05 || f.degenerate) continue;
    if (f.eigenvalues.size() > 2 && f.eigenvalues[2] - f.lambda2 < 1e-3) continue;

    const std::size_t i = checked % 4;
    std::vector<NeighborInput> n;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i) continue;
      const auto e = edge_weight(i, j, w);
      n.push_back({j, e.a, e.grad_a_wrt_i, f.vector[j]});
    }
    const auto r = nominal_control(f.vector[i], 1.01, n, 1.0, 1e9, 0.01);
    Vec2 sum;
    for (const auto& t : r.terms) sum = sum + t.contribution;

    const double h = 1e-6;
    const double th = ang(rng);
    const Vec2 d{std::cos(th), std::sin(th)};
    auto lambda_at = [&](Vec2 xi) {
      std::vector<Vec2> moved = nom;
      moved[i] = xi;
      return fiedler_oracle(laplacian(weighted_adjacency({moved, eig, obs, p}))).lambda2;
    };
    const double fd = (lambda_at(nom[i] + h * d) - lambda_at(nom[i] - h * d)) / (2 * h);
    CHECK(std::abs(dot(sum, d) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    // The input itself climbs lambda2.
    CHECK(dot(r.u_nom, sum) >= 0.0);
    if (std::abs(fd) > 1e-4) ++nonzero;
    ++checked;
  }
  MESSAGE("nonzero directional derivatives: " << nonzero);
  CHECK(nonzero >= 10);
}
