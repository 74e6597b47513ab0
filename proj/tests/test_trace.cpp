#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "usc/cell_grid.hpp"
#include "usc/errors.hpp"
#include "usc/trace.hpp"

using namespace usc;

TEST_CASE("line semi-norm of constants vanishes") {
  const auto u = sample_dyadic([](double) { return 3.5; }, 3, 6);
  CHECK(besov_line_seminorm(u, 0.7) == 0.0);
}

TEST_CASE("line semi-norm of the identity") {
  // Level j contributes (1/(r k))^j, so with k = 3, r = 2/3 the series sums to 2.
  const double r = 2.0 / 3.0;
  for (int m : {4, 8, 12}) {
    const auto u = sample_dyadic([](double x) { return x; }, 3, m);
    const double v = besov_line_seminorm(u, r);
    const double tail = besov_tail_bound(r, 3, m);
    CHECK(v * v <= 2.0 + 1e-12);
    CHECK(v * v + tail == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(besov_tail_bound(0.3, 3, 4), InputError);
}

TEST_CASE("segment semi-norm scales as a power of the length") {
  const auto u = sample_dyadic([](double x) { return std::sin(3.0 * x); }, 3, 6);
  const double r = 0.8;
  const double a = besov_segment_seminorm(u, r, 1.0);
  const double b = besov_segment_seminorm(u, r, 1.0 / 9.0);
  CHECK(a == doctest::Approx(besov_line_seminorm(u, r)));
  CHECK(b / a == doctest::Approx(std::pow(1.0 / 9.0, std::log(r) / (2.0 * std::log(3.0)))));
}

TEST_CASE("boundary semi-norm at level 0 matches a direct sum") {
  const double r = 0.8;
  const int m = 5;
  const auto f = [](const PointD& p) { return p.x; };
  // Horizontal sides see the identity, vertical sides a constant.
  const auto u = sample_dyadic([](double x) { return x; }, 3, m);
  const double line = besov_line_seminorm(u, r);
  CHECK(besov_boundary_seminorm(f, oracle::standard_carpet(), 0, r, m) ==
        doctest::Approx(std::sqrt(2.0) * line));
}

TEST_CASE("brick base graph") {
  for (int k : {3, 5, 7}) {
    const auto g = brick_base_graph(k);
    CHECK(g.vertices.size() == static_cast<std::size_t>(k + 3));
    CHECK(g.edges.size() == static_cast<std::size_t>(k + 3));
  }
}

TEST_CASE("brick energy of an indicator") {
  const int k = 3, m = 3;
  const double r = 0.75;
  const std::size_t l = 5;  // not a multiple of k, so only the level-M brick sees it
  auto f = sample_brick_function([](double, double) { return 0.0; }, k, m);
  f.rows[m + 1][l] = 1.0;
  CHECK(brick_graph_energy(f, r) == doctest::Approx(2.0 * std::pow(r, -m)));
}

TEST_CASE("brick energy agrees with the explicit edge list") {
  const int k = 3, m = 2;
  const double r = 0.6;
  const auto fn = [](double x, double y) { return std::cos(2.0 * x) + x * y * 5.0; };
  const auto f = sample_brick_function(fn, k, m);
  const auto g = brick_graph(k, m);
  double e = 0.0;
  for (const auto& edge : g.edges) {
    const PointD a = g.vertices[edge.u], b = g.vertices[edge.v];
    const double d = fn(a.x, a.y) - fn(b.x, b.y);
    e += std::pow(r, -edge.level) * d * d;
  }
  CHECK(brick_graph_energy(f, r) == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("brick energy by hand at k = 3, M = 1") {
  const auto f = sample_brick_function([](double x, double y) { return x + 2.0 * y; }, 3, 1);
  // Level 0: top edge 1, verticals (2/9 - 2/3)^2 twice, three bottoms of 1/9.
  const double lev0 = 1.0 + 2.0 * std::pow(2.0 / 9.0 - 2.0 / 3.0, 2) + 3.0 / 9.0;
  // Level 1: three bricks with top 1/9, verticals (2/27 - 2/9)^2, bottoms 1/81.
  const double lev1 = 3.0 * (1.0 / 9.0 + 2.0 * std::pow(2.0 / 27.0 - 2.0 / 9.0, 2) + 3.0 / 81.0);
  const double r = 0.5;
  CHECK(brick_graph_energy(f, r) == doctest::Approx(lev0 + lev1 / r));
}

TEST_CASE("brick energy is invariant under reflection x -> 1 - x") {
  const auto fn = [](double x, double y) { return x * x * x + std::sin(4.0 * y + x); };
  const auto a = sample_brick_function(fn, 5, 2);
  const auto b = sample_brick_function([&](double x, double y) { return fn(1.0 - x, y); }, 5, 2);
  CHECK(brick_graph_energy(a, 0.7) == doctest::Approx(brick_graph_energy(b, 0.7)).epsilon(1e-12));
}

TEST_CASE("line increment of the identity") {
  const auto f = sample_brick_function([](double x, double) { return x; }, 3, 4);
  for (int n = 0; n <= 4; ++n) CHECK(line_increment_norm(f, n) == doctest::Approx(std::pow(3.0, -n / 2.0)));
}

TEST_CASE("restriction inequality on random piecewise-linear functions") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> knots(6), heights(6);
    for (int i = 0; i < 6; ++i) {
      knots[i] = unit(rng);
      heights[i] = normal(rng);
    }
    const double a = normal(rng), b = normal(rng);
    auto fn = [&](double x, double y) {
      double v = a * x + b * y;
      for (int i = 0; i < 6; ++i) v += heights[i] * std::abs(x - knots[i]);
      return v + 2.0 * std::abs(y - 0.1);
    };
    const auto rep = check_restriction(sample_brick_function(fn, 3, 5));
    CHECK(rep.holds);
    CHECK(rep.rows.size() == 6);
  }
}

TEST_CASE("restriction ratio stays in a bounded band") {
  const auto rep = restriction_ratio(oracle::standard_carpet(), {3, 4}, 20, 9);
  CHECK(rep.min_ratio > 0.0);
  CHECK(rep.spread < 50.0);
  CHECK(rep.ratios.size() == 2);
}

TEST_CASE("double-integral semi-norm") {
  const auto g = build_cell_grid(oracle::standard_carpet(), 3);
  const std::vector<double> zero(g.size(), 2.0);
  CHECK(besov_2inf_seminorm(g, zero, 1.0, 1.8) == 0.0);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.center(i).x;
  std::vector<double> f3 = f;
  for (auto& v : f3) v *= 3.0;
  const double a = besov_2inf_seminorm(g, f, 1.0, 1.8);
  CHECK(a > 0.0);
  CHECK(besov_2inf_seminorm(g, f3, 1.0, 1.8) == doctest::Approx(3.0 * a));
  CHECK(besov_2inf_seminorm(g, f, 1.2, 1.8) >= a);
}
