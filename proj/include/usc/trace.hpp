#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "usc/geometry.hpp"
#include "usc/network.hpp"

namespace usc {

/// Values u(l / k^M), 0 <= l <= k^M.
struct DyadicFunction {
  int k = 0;
  int m = 0;
  std::vector<double> values;
};

DyadicFunction sample_dyadic(const std::function<double(double)>& u, int k, int m);

/// sqrt(sum_{j<=M} r^{-j} sum_l (u(l/k^j) - u((l+1)/k^j))^2).
double besov_line_seminorm(const DyadicFunction& u, double r);
/// Same on a segment of the given length: the line value times length^{log r / (2 log k)}.
double besov_segment_seminorm(const DyadicFunction& u, double r, double length);
/// Bound on the omitted squared terms beyond level M for a Lipschitz-L input.
double besov_tail_bound(double r, int k, int m, double lipschitz = 1.0);

/// sqrt of the sum over w in W_n and the four sides of squared semi-norms of
/// f o Psi_w on the side, each sampled to depth M.
double besov_boundary_seminorm(const std::function<double(const PointD&)>& f, const USCSpec& spec, int n, double r,
                               int m);

/// Values on the truncated brick vertex set: rows[j][l] = f(l/k^j, k^{-j-1})
/// for j = 0..M+1, and base[l] = f(l/k^M, 0).
struct BrickFunction {
  int k = 0;
  int m = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> base;
};

BrickFunction sample_brick_function(const std::function<double(double, double)>& f, int k, int m);

struct BrickEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  /// Level of the brick contributing the edge.
  int level = 0;
};

/// Bricks at levels 0..M; vertex rows 0..M+1. Edges shared by neighbouring
/// bricks appear once per brick.
struct BrickGraph {
  int k = 0;
  int m = 0;
  std::vector<PointD> vertices;
  std::vector<std::size_t> row_offset;
  std::vector<BrickEdge> edges;

  std::size_t vertex(int row, std::size_t l) const { return row_offset[row] + l; }
};

BrickGraph brick_graph(int k, int m);
/// The single brick (level 0 only): k+3 vertices, k+3 edges.
BrickGraph brick_base_graph(int k);

/// sum over bricks of r^{-level} times the brick's squared edge differences.
double brick_graph_energy(const BrickFunction& f, double r);
/// D~_j(f) for j = 0..M.
std::vector<double> brick_level_norms(const BrickFunction& f);
/// D_n(f on L_1) from the base samples, n <= M.
double line_increment_norm(const BrickFunction& f, int n);

struct RestrictionRow {
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
};

struct RestrictionReport {
  std::vector<RestrictionRow> rows;
  bool holds = false;
};

/// D_n(f|L_1) <= 3 sum_{j=n}^{M} D~_j(f) + slack for each n <= M, where slack
/// covers the tail below row M+1.
RestrictionReport check_restriction(const BrickFunction& f);

struct RestrictionRatioReport {
  double r = 0.0;
  std::vector<int> levels;
  /// ratios[level][sample] = [[h|boundary]]^2 / E(h).
  std::vector<std::vector<double>> ratios;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;
};

/// Random cubic boundary data on the boundary cells, harmonic extension,
/// then the ratio of the boundary semi-norm to the normalized energy.
RestrictionRatioReport restriction_ratio(const USCSpec& spec, const std::vector<int>& levels, std::size_t samples,
                                         std::uint64_t seed, double r = 0.0, const ConductanceScheme& scheme = {});

/// Boundary semi-norm squared of a cell function on the outer boundary
/// (values at l/k^n interpolated from boundary cells).
double boundary_trace_seminorm_sq(const CellGrid& grid, const std::vector<double>& cell_values, double r);

/// sup over rho = k^{-j}, j < n, of rho^{-2 sigma - d_H} times the discrete
/// double integral over cell pairs with centre distance below rho.
double besov_2inf_seminorm(const CellGrid& grid, const std::vector<double>& f, double sigma, double d_h);

struct SigmaScanRow {
  double sigma = 0.0;
  std::vector<double> values;
  double growth = 0.0;
  std::string verdict;
};

struct SigmaScan {
  std::vector<int> levels;
  std::vector<SigmaScanRow> rows;
  double half_walk_dimension = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Tracks the semi-norm of the L_4 -> L_2 harmonic proxy across levels for
/// each sigma. Rows grow when the ratio last/first exceeds growth_threshold.
SigmaScan critical_sigma_scan(const USCSpec& spec, const std::vector<int>& levels, const std::vector<double>& sigmas,
                              double growth_threshold = 1.5, const ConductanceScheme& scheme = {});

}  // namespace usc
