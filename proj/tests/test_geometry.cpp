#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "usc/errors.hpp"
#include "usc/family.hpp"
#include "usc/geometry.hpp"

using namespace usc;
using oracle::q;

TEST_CASE("rational parsing and arithmetic") {
  CHECK(Rational::parse("2/6") == q(1, 3));
  CHECK(Rational::parse(" -3 ") == q(-3));
  CHECK(q(1, 3) + q(1, 6) == q(1, 2));
  CHECK((q(2, 7) * q(7, 4)).to_string() == "1/2");
  CHECK_THROWS_AS(Rational::parse("1/0"), InputError);
  CHECK_THROWS_AS(Rational::parse("a/b"), InputError);
}

TEST_CASE("words") {
  CHECK(parse_word("132") == Word{1, 3, 2});
  CHECK(parse_word("12.3.32") == Word{12, 3, 32});
  CHECK(word_to_string({4, 17}) == "4.17");
}

TEST_CASE("spec parsing") {
  const auto sc = parse_spec(R"(
# carpet
k = 3
n_maps = 8
offsets = [
  ["0","0"], ["1/3","0"], ["2/3","0"], ["2/3","1/3"],
  ["2/3","2/3"], ["1/3","2/3"], ["0","2/3"], ["0","1/3"]
]
)");
  CHECK(sc.k == 3);
  CHECK(sc.n_maps() == 8);
  CHECK(sc.boundary_numbering_canonical);
  CHECK(validate_usc(sc).valid());

  CHECK_THROWS_AS(parse_spec("k = 3\noffsets = [[\"9/10\", \"0\"]]"), InputError);
  CHECK_THROWS_AS(parse_spec("k = 3\nn_maps = 2\noffsets = [[\"0\", \"0\"]]"), InputError);
  CHECK_THROWS_AS(parse_spec("k = 3\noffsets = [[\"1/x\", \"0\"]]"), InputError);

  const auto kz = parse_spec("k = 7\nfamily = \"kz\"\nz = \"1/28\"");
  CHECK(kz.n_maps() == 32);
}

TEST_CASE("validation of the reference carpets") {
  for (const auto& spec : {oracle::standard_carpet(), family_kz(q(0)), family_kz(q(1, 28)), family_kz(q(1, 14))}) {
    const auto r = validate_usc(spec);
    CHECK(r.map_count_in_range);
    CHECK(r.non_overlapping);
    CHECK(r.connected);
    CHECK(r.symmetric);
    CHECK(r.boundary_included);
  }
}

TEST_CASE("each mutation breaks exactly one condition") {
  struct Case {
    USCSpec spec;
    int broken;
  };
  const std::vector<Case> cases = {
      {oracle::kz_unchecked(q(1, 14) + q(1, 100)), 0},
      {oracle::ring_plus(5, {{q(2, 5), q(2, 5)}}), 1},
      {oracle::ring_plus(4, {{q(1, 4), q(1, 4)}}), 2},
      {oracle::ring_plus(5,
                         {{q(1, 5), q(1, 5)}, {q(2, 5), q(1, 5)}, {q(3, 5), q(1, 5)}, {q(1, 5), q(2, 5)},
                          {q(3, 5), q(2, 5)}, {q(1, 5), q(3, 5)}, {q(2, 5), q(3, 5)}, {q(3, 5), q(3, 5)}},
                         {{q(2, 5), q(0)}, {q(4, 5), q(2, 5)}, {q(2, 5), q(4, 5)}, {q(0), q(2, 5)}}),
       3},
  };
  for (const auto& c : cases) {
    const auto r = validate_usc(c.spec);
    const bool flags[4] = {r.non_overlapping, r.connected, r.symmetric, r.boundary_included};
    CHECK(r.map_count_in_range);
    for (int i = 0; i < 4; ++i) CHECK(flags[i] == (i != c.broken));
  }
}

TEST_CASE("dihedral group structure") {
  for (auto g : kAllSymmetries) {
    CHECK(compose(g, inverse(g)) == Symmetry::id);
    for (auto h : kAllSymmetries) {
      const Point p{q(1, 5), q(2, 7)};
      CHECK(apply_symmetry(compose(g, h), p) == apply_symmetry(g, apply_symmetry(h, p)));
    }
  }
  std::set<int> products;
  for (auto g : kAllSymmetries) {
    for (auto h : kAllSymmetries) products.insert(static_cast<int>(compose(g, h)));
  }
  CHECK(products.size() == 8);
}

TEST_CASE("square images under symmetries") {
  const Point c{q(2, 7), q(1, 7)};
  const Rational s = q(1, 7);
  CHECK(symmetry_square_image(Symmetry::h, c, s) == Point{q(4, 7), q(1, 7)});
  CHECK(symmetry_square_image(Symmetry::v, c, s) == Point{q(2, 7), q(5, 7)});
  CHECK(symmetry_square_image(Symmetry::d1, c, s) == Point{q(1, 7), q(2, 7)});
  CHECK(symmetry_square_image(Symmetry::r2, c, s) == Point{q(4, 7), q(5, 7)});
}

TEST_CASE("cell maps compose") {
  const auto sc = oracle::standard_carpet();
  const CellMap m = cell_map(sc, {3, 5});
  CHECK(m.scale == q(1, 9));
  CHECK(m.offset == Point{q(2, 3) + q(2, 9), q(2, 9)});
  const Point p{q(1, 2), q(1, 4)};
  CHECK(m.inverse(m.apply(p)) == p);
}

TEST_CASE("standard carpet adjacency at level 1") {
  const auto adj = cell_adjacency(oracle::standard_carpet(), 1);
  int seg = 0, pt = 0;
  for (const auto& a : adj) (a.kind == ContactKind::segment ? seg : pt)++;
  CHECK(seg == 8);
  // Diagonal ring neighbours meet at the four inner corners.
  CHECK(pt == 4);
  CHECK(boundary_words(oracle::standard_carpet(), 2, 1).size() == 9);
}

TEST_CASE("K(0) has extra point contacts at level 1") {
  auto count_points = [](const USCSpec& s) {
    int pt = 0;
    for (const auto& a : cell_adjacency(s, 1)) pt += a.kind == ContactKind::point;
    return pt;
  };
  CHECK(count_points(family_kz(q(0))) > 4);
  CHECK(count_points(family_kz(q(1, 28))) == 4);
}

TEST_CASE("c0 for the standard carpet") {
  const auto c = estimate_c0(oracle::standard_carpet(), 2);
  CHECK(c.value > 0.0);
  CHECK(c.value <= 2.0);
}

TEST_CASE("Hausdorff interval") {
  const auto a = family_kz(q(1, 28));
  const auto same = hausdorff_distance(a, a, 2);
  CHECK(same.lo <= 1e-15);
  const auto b = family_kz(q(1, 20));
  const auto h = hausdorff_distance(a, b, 2);
  CHECK(h.lo <= h.hi);
  // Offsets differ by at most delta = |z - z'|, so the attractors are within delta / (1 - 1/k).
  CHECK(h.lo <= (q(1, 20) - q(1, 28)).to_double() * 7.0 / 6.0 + 1e-12);
  CHECK(h.hi >= h.lo);
}

TEST_CASE("IFS matching recovers a permutation") {
  auto a = family_kz(q(1, 28));
  USCSpec b = a;
  std::swap(b.offsets[3], b.offsets[29]);
  const auto m = match_ifs(a, b);
  CHECK(m.permutation[3] == 30);
  CHECK(m.permutation[29] == 4);
  CHECK(m.cost == doctest::Approx(0.0));
}

TEST_CASE("symmetry orbit sizes") {
  for (int i = 1; i < 14; ++i) {
    const Rational z = q(i, 196);
    const auto s = family_kz(z);
    CHECK(s.n_maps() == 32);
  }
  CHECK(family_kz(q(1, 14)).n_maps() <= 32);
  CHECK_THROWS_AS(family_kz(q(1, 13)), InputError);
}

TEST_CASE("family generator sweep passes validation") {
  for (int i = 0; i < 50; ++i) {
    const Rational z = q(i, 49 * 14);
    CHECK(validate_usc(family_kz(z)).valid());
  }
}

TEST_CASE("canonicalize restores boundary numbering") {
  auto s = oracle::standard_carpet();
  std::reverse(s.offsets.begin(), s.offsets.end());
  const auto c = canonicalize(s);
  CHECK(c.boundary_numbering_canonical);
  CHECK(c.offsets == boundary_ring_offsets(3));
}

TEST_CASE("render emits one rect per cell") {
  const std::string svg = render_svg(oracle::standard_carpet(), 2);
  std::size_t count = 0;
  for (std::size_t p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++count;
  CHECK(count >= 64);
}
