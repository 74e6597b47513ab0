#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "usc/geometry.hpp"

namespace usc {

/// Level-n cells on an integer lattice. With D0 the lcm of the denominators
/// of k times the offsets, the unit square is [0, Q]^2 for Q = D0 * k^n and every
/// level-n square is [X, X+S] x [Y, Y+S] with S = D0. Cell indices are the
/// lexicographic order of words, so the children of cell p are p*N + (i-1).
struct CellGrid {
  int k = 0;
  int n = 0;
  int n_maps = 0;
  std::int64_t d0 = 1;
  std::int64_t q = 1;
  std::int64_t s = 1;
  std::vector<std::array<std::int64_t, 2>> corner;
  /// k times the level-1 offsets, in units of 1/D0.
  std::vector<std::array<std::int64_t, 2>> offset_units;

  std::size_t size() const { return corner.size(); }
  Word word(std::size_t index) const;
  std::size_t index(const Word& w) const;
  PointD lower_left(std::size_t index) const;
  PointD center(std::size_t index) const;
  double side() const { return static_cast<double>(s) / static_cast<double>(q); }
  /// Lowest-index cell whose closed square contains p, or size() if none.
  std::size_t locate(const PointD& p) const;
};

CellGrid build_cell_grid(const USCSpec& spec, int n, std::size_t budget = default_cell_budget());

struct GridContact {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  /// Shared length in lattice units; 0 for a point contact.
  std::int64_t overlap = 0;
};

/// All touching pairs (a < b), sorted by (a, b).
std::vector<GridContact> grid_contacts(const CellGrid& grid);

/// Cells whose square meets side L_i, increasing index.
std::vector<std::uint32_t> grid_boundary_cells(const CellGrid& grid, int side);

/// Cell permutation induced by a symmetry; throws if the spec is not symmetric.
std::vector<std::uint32_t> symmetry_permutation(const CellGrid& grid, Symmetry g);

}  // namespace usc
