#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "usc/errors.hpp"
#include "usc/family.hpp"
#include "usc/laplacian.hpp"
#include "usc/network.hpp"

using namespace usc;
using oracle::q;

TEST_CASE("series and parallel") {
  const Network path(3, {{0, 1, 1.0}, {1, 2, 0.5}});
  CHECK(effective_resistance(path, {0}, {2}) == doctest::Approx(3.0));
  const Network par(2, {{0, 1, 1.0}, {0, 1, 3.0}});
  CHECK(effective_resistance(par, {0}, {1}) == doctest::Approx(0.25));
}

TEST_CASE("effective resistance matches exact elimination on all 4-vertex graphs") {
  const std::vector<std::pair<int, int>> slots = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  int tested = 0;
  for (int mask = 1; mask < 64; ++mask) {
    std::vector<oracle::RationalEdge> e;
    for (int i = 0; i < 6; ++i) {
      if (mask & (1 << i)) e.push_back({slots[i].first, slots[i].second, mpq_class(i + 1, 2)});
    }
    const Network net = oracle::to_network(4, e);
    if (!net.connected()) continue;
    const double exact = oracle::exact_resistance(4, e, 0, 3).get_d();
    CHECK(std::abs(effective_resistance(net, {0}, {3}) - exact) <= 1e-12 * exact);
    ++tested;
  }
  CHECK(tested == 38);
}

TEST_CASE("effective resistance on random networks") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const int n = 10 + 4 * t;
    const auto e = oracle::random_connected(n, n, rng);
    const Network net = oracle::to_network(n, e);
    const double exact = oracle::exact_resistance(n, e, 0, n - 1).get_d();
    CHECK(std::abs(effective_resistance(net, {0}, {static_cast<std::uint32_t>(n - 1)}) - exact) <= 1e-10 * exact);
  }
}

TEST_CASE("conjugate gradient path agrees with direct factorization") {
  const CellNetwork net = build_cell_network(oracle::standard_carpet(), 3);
  std::vector<char> fixed(net.graph.size(), 0);
  fixed[0] = 1;
  const GroundedSolver direct(net.graph, fixed, 1e-12);
  const GroundedSolver iterative(net.graph, fixed, 1e-12, nullptr, 0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.graph.size() - 1));
  rhs[100] = 1.0;
  rhs[400] = -1.0;
  const Eigen::VectorXd a = direct.solve(rhs), b = iterative.solve(rhs);
  CHECK((a - b).norm() <= 1e-8 * a.norm());
  CHECK(iterative.last_iterations() > 1);
}

TEST_CASE("side resistance at levels 0 and 1 matches exact elimination") {
  const auto sc = oracle::standard_carpet();
  CHECK(side_resistance(build_cell_network(sc, 0)) == doctest::Approx(1.0));
  const CellNetwork net = build_cell_network(sc, 1);
  std::vector<oracle::RationalEdge> e;
  for (const auto& c : net.graph.edges()) e.push_back({static_cast<int>(c.u), static_cast<int>(c.v), mpq_class(1)});
  for (auto v : grid_boundary_cells(net.grid, 4)) e.push_back({static_cast<int>(v), 8, mpq_class(2)});
  for (auto v : grid_boundary_cells(net.grid, 2)) e.push_back({static_cast<int>(v), 9, mpq_class(2)});
  const mpq_class exact = oracle::exact_resistance(10, e, 8, 9);
  CHECK(side_resistance(net) == doctest::Approx(exact.get_d()).epsilon(1e-12));
  CHECK(exact == mpq_class(7, 5));
}

TEST_CASE("renormalization ratios on the standard carpet") {
  const auto e = estimate_renorm(oracle::standard_carpet(), 4, {}, true);
  REQUIRE(e.ratios.size() == 4);
  CHECK(std::isnan(e.ratios[0]));
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(e.ratios[i] >= 2.0 / 3.0);
    CHECK(e.ratios[i] <= 8.0 / 9.0);
  }
  CHECK(std::abs(e.ratios[3] - e.ratios[2]) < std::abs(e.ratios[2] - e.ratios[1]));
  CHECK(e.d_h == doctest::Approx(std::log(8.0) / std::log(3.0)));
  CHECK(e.d_w == doctest::Approx(e.theta + e.d_h));
  CHECK(e.r_extrapolated.has_value());
  CHECK(e.normalization(2) == doctest::Approx(e.resistances[1]));
}

TEST_CASE("uniform and overlap schemes coincide on the standard carpet") {
  ConductanceScheme u;
  u.mode = ConductanceScheme::Mode::uniform;
  const double a = side_resistance(build_cell_network(oracle::standard_carpet(), 2, u));
  const double b = side_resistance(build_cell_network(oracle::standard_carpet(), 2));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("resistance metric properties") {
  CellNetwork net = build_cell_network(oracle::standard_carpet(), 2);
  net.normalization = side_resistance(net);
  const ResistanceMetric r(net);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, net.graph.size() - 1);
  for (int t = 0; t < 30; ++t) {
    const auto x = pick(rng), y = pick(rng), z = pick(rng);
    CHECK(r(x, y) == r(y, x));
    CHECK(r(x, z) <= r(x, y) + r(y, z) + 1e-12);
    if (x != y) {
      CHECK(r(x, y) > 0.0);
      CHECK(r.graph_resistance(x, y) ==
            doctest::Approx(effective_resistance(net.graph, {static_cast<std::uint32_t>(x)},
                                                 {static_cast<std::uint32_t>(y)}))
                .epsilon(1e-9));
    }
  }
  CHECK(r(5, 5) == 0.0);
}

TEST_CASE("harmonic extension reproduces linear data on a path") {
  const Network path(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  const auto s = harmonic_extension(path, {0, 4}, {1.0, 5.0});
  for (int i = 0; i < 5; ++i) CHECK(s.potential[i] == doctest::Approx(1.0 + i));
  CHECK(s.energy == doctest::Approx(4.0));
}

TEST_CASE("disconnected square sets are rejected") {
  const auto bad = oracle::ring_plus(5, {{q(2, 5), q(2, 5)}});
  CHECK_THROWS_AS(build_cell_network(bad, 1), DisconnectedError);
}

TEST_CASE("point contacts only join cells when given conductance") {
  ConductanceScheme with;
  with.point_contact_conductance = 1.0;
  const auto a = build_cell_network(family_kz(q(0)), 1);
  const auto b = build_cell_network(family_kz(q(0)), 1, with);
  CHECK(b.graph.edges().size() > a.graph.edges().size());
  CHECK(side_resistance(b) < side_resistance(a));
}

TEST_CASE("boundary ratio bound at level 2") {
  CellNetwork net = build_cell_network(oracle::standard_carpet(), 2);
  net.normalization = side_resistance(net);
  const auto rep = check_boundary_bound(net, 30, 11);
  CHECK(rep.passed);
  CHECK(rep.bound == doctest::Approx(54.0));
  CHECK(rep.pairs == 30);
}

TEST_CASE("point and word queries agree") {
  const auto sc = oracle::standard_carpet();
  const double a = resistance_metric_est(sc, 2, Word{1, 1}, Word{5, 5});
  const double b = resistance_metric_est(sc, 2, PointD{0.0, 0.0}, PointD{1.0, 1.0});
  CHECK(a == doctest::Approx(b));
}

TEST_CASE("theta fit needs a fine enough skeleton") {
  CHECK_THROWS_AS(fit_theta(oracle::standard_carpet(), 3, 10, 5, 2), InputError);
}

TEST_CASE("annulus resistance is positive") {
  const auto rep = annulus_resistance(oracle::standard_carpet(), 2, Word{2, 2}, 0.3, 0.2, 2);
  CHECK(rep.resistance > 0.0);
  CHECK(rep.complement_size > 0);
}

// The log R vs log d_G slope tracks theta only at much finer levels than a
// unit test can afford; see the decisions ledger.
TEST_CASE("fitted theta matches the renormalization exponent" * doctest::should_fail()) {
  const auto fit = fit_theta(oracle::standard_carpet(), 3, 60, 5, 3);
  CHECK(fit.slope == doctest::Approx(fit.theta_hat).epsilon(0.1));
}

TEST_CASE("level-1 ring between merged sides has resistance one") {
  const auto net = build_cell_network(oracle::standard_carpet(), 1);
  CHECK(effective_resistance(net.graph, grid_boundary_cells(net.grid, 4), grid_boundary_cells(net.grid, 2)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dirichlet solution on a path and the maximum principle") {
  const Network path(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  const auto s = solve_dirichlet(path, {{0}, {3}});
  CHECK(s.potential[1] == doctest::Approx(1.0 / 3.0));
  CHECK(s.potential[2] == doctest::Approx(2.0 / 3.0));
  const auto net = build_cell_network(family_kz(q(1, 28)), 2);
  const auto u = solve_dirichlet(net.graph, {grid_boundary_cells(net.grid, 4), grid_boundary_cells(net.grid, 2)});
  CHECK(*std::min_element(u.potential.begin(), u.potential.end()) >= -1e-12);
  CHECK(*std::max_element(u.potential.begin(), u.potential.end()) <= 1.0 + 1e-12);
}

TEST_CASE("off-grid squares give fractional overlap conductances") {
  const auto net = build_cell_network(family_kz(q(1, 28)), 1);
  bool fractional = false;
  for (const auto& e : net.graph.edges()) {
    CHECK(e.conductance > 0.0);
    CHECK(e.conductance <= 1.0);
    fractional = fractional || e.conductance < 1.0;
  }
  CHECK(fractional);
}

TEST_CASE("Rayleigh monotonicity") {
  std::mt19937_64 rng(31);
  const auto e = oracle::random_connected(20, 15, rng);
  const Network net = oracle::to_network(20, e);
  const double base = effective_resistance(net, {0}, {19});
  for (std::size_t i = 0; i < net.edges().size(); i += 3) {
    CHECK(effective_resistance(net.scaled_edge(i, 2.0), {0}, {19}) <= base + 1e-12);
    CHECK(effective_resistance(net.scaled_edge(i, 0.5), {0}, {19}) >= base - 1e-12);
  }
}
