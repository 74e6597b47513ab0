#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "usc/convergence.hpp"
#include "usc/errors.hpp"
#include "usc/family.hpp"

using namespace usc;
using oracle::q;

TEST_CASE("parameter expressions") {
  const ParameterExpression a("1/28+1/(100n)");
  CHECK(a.evaluate(1) == q(1, 28) + q(1, 100));
  CHECK(a.evaluate(5) == q(1, 28) + q(1, 500));
  CHECK(a.limit() == q(1, 28));
  const ParameterExpression b("1/(10n)");
  CHECK(b.evaluate(3) == q(1, 30));
  CHECK(b.limit() == q(0));
  CHECK(ParameterExpression("2/3 + 1/(3n)").limit() == q(2, 3));
  // Ratios of divergent terms are not resolved symbolically.
  CHECK_THROWS_AS(ParameterExpression("(2n+1)/(3n)").limit(), InputError);
  CHECK_THROWS_AS(ParameterExpression("n").limit(), InputError);
  CHECK_THROWS_AS(ParameterExpression("1/(n"), InputError);
}

TEST_CASE("families mark out-of-range members invalid") {
  const auto fam = make_family("kz", "1/(10n):n=1..4");
  REQUIRE(fam.members.size() == 4);
  CHECK_FALSE(fam.members[0].valid);
  CHECK_FALSE(fam.members[0].note.empty());
  CHECK(fam.members[1].valid);
  CHECK(fam.valid_members().size() == 3);
  CHECK_THROWS_AS(make_family("kz", "1/(10n):m=1..4"), InputError);
  CHECK_THROWS_AS(make_family("other", "1/n:n=1..4"), InputError);
}

TEST_CASE("word transport under the identity matching") {
  const auto g = build_cell_grid(family_kz(q(1, 28)), 2);
  std::vector<int> id(32);
  std::iota(id.begin(), id.end(), 1);
  const auto map = transport_cells(g, id);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(map[i] == i);
  std::vector<int> swap = id;
  std::swap(swap[0], swap[1]);
  const auto m2 = transport_cells(g, swap);
  CHECK(g.word(m2[g.index({1, 5})]) == Word{2, 5});
  CHECK(g.word(m2[g.index({3, 2})]) == Word{3, 1});
}

TEST_CASE("measure discrepancy of constants is zero and the bound holds") {
  const auto fam = make_family("kz", "1/28+1/(100n):n=1..4");
  const auto rep = measure_convergence(fam, 2, builtin_test_functions());
  REQUIRE(rep.functions.front() == "1");
  for (const auto& row : rep.rows) {
    CHECK(row.discrepancy[0] == 0.0);
    for (std::size_t j = 0; j < row.discrepancy.size(); ++j) CHECK(row.discrepancy[j] <= row.bound[j]);
  }
  CHECK(rep.monotone[0]);
  CHECK_THROWS_AS(builtin_test_function("x3"), InputError);
}

TEST_CASE("constant families show no deviation") {
  const auto fam = constant_family(family_kz(q(1, 28)), 3);
  const auto rep = resistance_convergence(fam, 2);
  for (const auto& row : rep.rows) {
    CHECK(row.deviation == 0.0);
    CHECK(row.r_hat == rep.limit_r_hat);
  }
  CHECK(rep.trend == "zero");
  const auto m = measure_convergence(fam, 2, builtin_test_functions());
  for (const auto& row : m.rows) {
    for (double d : row.discrepancy) CHECK(d == 0.0);
  }
}

TEST_CASE("ratio trend") {
  CHECK(ratio_trend(0.1) == "decreasing");
  CHECK(ratio_trend(0.35) == "undecided");
  CHECK(ratio_trend(0.9) == "not decreasing");
  CHECK(ratio_trend(NAN) == "undecided");
}

TEST_CASE("default grid includes point-contact cells") {
  const auto g0 = build_cell_grid(family_kz(q(0)), 2);
  const auto g1 = build_cell_grid(family_kz(q(1, 28)), 2);
  for (const auto* g : {&g0, &g1}) {
    const auto words = default_grid_words(*g);
    CHECK(words.size() > 8);
    CHECK(words.size() <= 16);
    for (const auto& w : words) CHECK(w.size() == 2);
  }
}

TEST_CASE("liminf check on a single member is an equality") {
  const auto fam = constant_family(family_kz(q(1, 28)), 1);
  CellNetwork net = build_cell_network(fam.limit, 2, family_scheme());
  const auto f = harmonic_x1(net);
  const auto rep = gamma_liminf_check(fam, 2, f);
  CHECK(rep.holds);
  CHECK(rep.liminf == doctest::Approx(rep.limit_energy).epsilon(1e-14));
}

TEST_CASE("resistance convergence on a convergent family") {
  const auto rep = resistance_convergence(make_family("kz", "1/28+1/(100n):n=1..4"), 2);
  CHECK(rep.rows.size() == 4);
  CHECK(rep.pairs == rep.points.size() * (rep.points.size() - 1) / 2);
  CHECK(rep.rows.back().deviation < rep.rows.front().deviation);
  for (const auto& r : rep.rows) CHECK(r.hausdorff_lo <= r.hausdorff_hi);
}
