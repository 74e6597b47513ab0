#include <doctest.h>

#include <tuple>

#include "oracles.hpp"
#include "usc/cell_grid.hpp"
#include "usc/errors.hpp"
#include "usc/family.hpp"

using namespace usc;
using oracle::q;

TEST_CASE("word and index round trip") {
  const auto g = build_cell_grid(oracle::standard_carpet(), 3);
  CHECK(g.size() == 512);
  for (std::size_t i = 0; i < g.size(); i += 37) CHECK(g.index(g.word(i)) == i);
  CHECK(g.word(0) == Word{1, 1, 1});
  CHECK(g.side() == doctest::Approx(1.0 / 27.0));
}

TEST_CASE("corners agree with exact cell maps") {
  const auto spec = family_kz(q(1, 28));
  const auto g = build_cell_grid(spec, 2);
  for (std::size_t i = 0; i < g.size(); i += 13) {
    const auto m = cell_map(spec, g.word(i));
    const PointD p = g.lower_left(i);
    CHECK(p.x == doctest::Approx(m.offset.x.to_double()).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(m.offset.y.to_double()).epsilon(1e-14));
  }
}

TEST_CASE("locate returns the lowest containing cell") {
  const auto g = build_cell_grid(oracle::standard_carpet(), 2);
  CHECK(g.locate({0.0, 0.0}) == 0);
  CHECK(g.word(g.locate({1.0, 1.0})) == Word{5, 5});
  CHECK(g.locate({0.5, 0.5}) == g.size());
  const std::size_t c = g.locate({1.0 / 3.0, 0.05});
  CHECK(g.word(c) == Word{1, 3});
}

TEST_CASE("sweep contacts match the all-pairs oracle") {
  for (const auto& spec : {oracle::standard_carpet(), family_kz(q(0)), family_kz(q(1, 28))}) {
    const auto g = build_cell_grid(spec, 2);
    auto fast = grid_contacts(g);
    auto slow = oracle::brute_contacts(g);
    auto key = [](const GridContact& c) { return std::make_tuple(c.a, c.b, c.overlap); };
    std::sort(slow.begin(), slow.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(fast.begin(), fast.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(key(fast[i]) == key(slow[i]));
  }
}

TEST_CASE("boundary cells") {
  const auto g = build_cell_grid(oracle::standard_carpet(), 2);
  for (int side = 1; side <= 4; ++side) CHECK(grid_boundary_cells(g, side).size() == 9);
  CHECK_THROWS_AS(grid_boundary_cells(g, 5), InputError);
}

TEST_CASE("symmetry permutations are bijections that commute with the action") {
  const auto g = build_cell_grid(family_kz(q(1, 28)), 2);
  for (auto sym : kAllSymmetries) {
    const auto p = symmetry_permutation(g, sym);
    std::vector<char> seen(g.size(), 0);
    for (auto v : p) seen[v] = 1;
    CHECK(std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }));
    const PointD c = g.center(5);
    const PointD img = apply_symmetry(sym, c);
    CHECK(g.center(p[5]).x == doctest::Approx(img.x));
    CHECK(g.center(p[5]).y == doctest::Approx(img.y));
  }
}

TEST_CASE("budget is enforced") {
  CHECK_THROWS_AS(build_cell_grid(oracle::standard_carpet(), 7, 100000), BudgetExceeded);
}
