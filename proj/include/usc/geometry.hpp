#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "usc/rational.hpp"

namespace usc {

/// Default ceiling on cells per level (overridable via CARPET_CELL_BUDGET).
std::size_t default_cell_budget();

/// Letters are 1-based, matching the map numbering Psi_1..Psi_N.
using Word = std::vector<int>;

std::string word_to_string(const Word& w);
Word parse_word(std::string_view text);

struct USCSpec {
  int k = 0;
  std::vector<Point> offsets;
  /// Set by canonicalize(); true when the first 4(k-1) maps follow the
  /// standard counterclockwise boundary numbering.
  bool boundary_numbering_canonical = false;

  int n_maps() const { return static_cast<int>(offsets.size()); }
  Rational scale() const { return Rational(1, k); }
};

/// Checks offsets lie in [0, 1-1/k]^2 and k >= 3. Does not enforce the N range;
/// that is reported by validate_usc.
USCSpec make_spec(int k, std::vector<Point> offsets);

/// Reads the structured text format (k, n_maps, offsets, optional family/z).
USCSpec parse_spec(std::string_view config_text);

struct ValidationReport {
  bool map_count_in_range = false;
  bool non_overlapping = false;
  bool connected = false;
  bool symmetric = false;
  bool boundary_included = false;
  bool boundary_numbering_canonical = false;
  std::vector<std::string> messages;

  bool valid() const { return non_overlapping && connected && symmetric && boundary_included; }
};

ValidationReport validate_usc(const USCSpec& spec);

enum class Symmetry { v, h, d1, d2, id, r1, r2, r3 };

inline constexpr std::array<Symmetry, 8> kAllSymmetries = {
    Symmetry::v, Symmetry::h, Symmetry::d1, Symmetry::d2, Symmetry::id, Symmetry::r1, Symmetry::r2, Symmetry::r3};

/// x' = A x + t with A a signed permutation matrix.
struct SymmetryAction {
  std::array<std::array<int, 2>, 2> a;
  std::array<int, 2> t;
};

SymmetryAction symmetry_action(Symmetry g);
std::string symmetry_name(Symmetry g);
/// g after h, i.e. (g o h)(p) = g(h(p)).
Symmetry compose(Symmetry g, Symmetry h);
Symmetry inverse(Symmetry g);

template <class P>
P apply_symmetry(Symmetry g, const P& p) {
  const SymmetryAction s = symmetry_action(g);
  P out = p;
  out.x = p.x * s.a[0][0] + p.y * s.a[0][1] + s.t[0];
  out.y = p.x * s.a[1][0] + p.y * s.a[1][1] + s.t[1];
  return out;
}

/// Lower-left corner of the image of the axis-parallel square [c, c+side]^2.
Point symmetry_square_image(Symmetry g, const Point& lower_left, const Rational& side);

/// Affine map Psi_w(x) = x * scale + offset and its square Psi_w([0,1]^2).
struct CellMap {
  Rational scale{1};
  Point offset{Rational(0), Rational(0)};

  Point apply(const Point& p) const { return {p.x * scale + offset.x, p.y * scale + offset.y}; }
  Point inverse(const Point& p) const { return {(p.x - offset.x) / scale, (p.y - offset.y) / scale}; }
  Point lower_left() const { return offset; }
  Point upper_right() const { return {offset.x + scale, offset.y + scale}; }
};

CellMap cell_map(const USCSpec& spec, const Word& w);

enum class ContactKind { segment, point };

struct AdjacencyRecord {
  Word a;
  Word b;
  ContactKind kind = ContactKind::segment;
  Rational overlap_length;
};

std::vector<AdjacencyRecord> cell_adjacency(const USCSpec& spec, int n,
                                            std::size_t budget = default_cell_budget());

/// Words w in W_n whose square meets side L_i (1 bottom, 2 right, 3 top, 4 left),
/// in lexicographic order.
std::vector<Word> boundary_words(const USCSpec& spec, int n, int side);

/// k^n times the least distance between level-n cells that have no common
/// neighbour. Exact squared value plus its square root.
struct C0Estimate {
  Rational scaled_distance_squared;
  double value = 0.0;
};

C0Estimate estimate_c0(const USCSpec& spec, int n, std::size_t budget = default_cell_budget());

struct HausdorffInterval {
  double lo = 0.0;
  double hi = 0.0;
};

HausdorffInterval hausdorff_distance(const USCSpec& a, const USCSpec& b, int m,
                                     std::size_t budget = default_cell_budget());

struct IfsMatching {
  /// permutation[i-1] = letter of b matched with letter i of a.
  std::vector<int> permutation;
  double cost = 0.0;
  double max_pair_distance = 0.0;
};

IfsMatching match_ifs(const USCSpec& a, const USCSpec& b);

/// The 4(k-1) boundary offsets in canonical order: Psi_1 at q_1, then
/// counterclockwise along L_1, L_2, L_3, L_4.
std::vector<Point> boundary_ring_offsets(int k);

/// Closes the offsets under the dihedral group (acting on squares), optionally
/// prefixed by the boundary ring. Throws InputError on overlap or N out of range.
USCSpec complete_symmetry_orbit(const std::vector<Point>& partial, int k, bool boundary_ring);

/// Moves the boundary-ring maps to positions 1..4(k-1) in canonical order when
/// all of them are present; otherwise leaves the order and clears the flag.
USCSpec canonicalize(USCSpec spec);

/// Whole SVG document of the level-n square union.
std::string render_svg(const USCSpec& spec, int n, std::size_t budget = default_cell_budget());

}  // namespace usc
