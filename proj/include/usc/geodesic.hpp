#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "usc/geometry.hpp"

namespace usc {

struct FamilySpec;

struct SkeletonOptions {
  /// Subdivision points sit at multiples of h = k^{-m} / subdivision; 0 means k.
  int subdivision = 0;
  /// Adds straight edges between boundary vertices of each level-m square,
  /// turning the skeleton of K into one for the union of squares.
  bool square_crossings = false;
  /// Points inserted as exact vertices; each must lie on a square boundary.
  std::vector<Point> pins;
  std::size_t budget = 0;
};

class SkeletonGraph {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  int level = 0;
  double spacing = 0.0;
  bool square_crossings = false;
  /// Coordinates are integers over this denominator.
  std::int64_t unit = 1;
  std::vector<std::array<std::int64_t, 2>> coords;
  std::vector<PointD> points;
  /// Edge lengths in units of 1/unit, so axis-parallel path sums are exact.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;

  std::size_t size() const { return points.size(); }
  std::size_t edge_count() const;
  std::size_t vertex_at(const Point& p) const;
  /// Nearest vertex; distance written to snap when given.
  std::size_t nearest(const PointD& p, double* snap = nullptr) const;
  /// Whether p lies on an axis-parallel skeleton segment (within tol).
  bool covers(const PointD& p, double tol = 1e-12) const;
  std::vector<double> distances_from(std::size_t source) const;
  double distance(std::size_t a, std::size_t b) const;

  /// Merged coverage per horizontal (y) and vertical (x) line, in units.
  std::unordered_map<std::int64_t, std::vector<std::array<std::int64_t, 2>>> horizontal;
  std::unordered_map<std::int64_t, std::vector<std::array<std::int64_t, 2>>> vertical;

 private:
  friend SkeletonGraph build_skeleton(const USCSpec&, int, const SkeletonOptions&);
  std::vector<std::pair<std::array<std::int64_t, 2>, std::uint32_t>> lookup_;
};

SkeletonGraph build_skeleton(const USCSpec& spec, int m, const SkeletonOptions& options = {});

struct GeodesicEstimate {
  double lower = 0.0;
  double upper = 0.0;
  int level = 0;
  double snap_x = 0.0;
  double snap_y = 0.0;
};

GeodesicEstimate geodesic_estimate(const SkeletonGraph& skel, const PointD& x, const PointD& y);
/// Builds a level-m skeleton with x and y pinned.
GeodesicEstimate geodesic_estimate(const USCSpec& spec, int m, const Point& x, const Point& y);

/// C' = 4N/(k-1) bounds d_G(x, boundary); C = (2C' + 12)/c0.
struct ComparabilityConstant {
  double c_prime = 0.0;
  double c0 = 0.0;
  double c = 0.0;
};

ComparabilityConstant comparability_constant(const USCSpec& spec, int c0_level = 2);

struct ModulusRow {
  double eta = 0.0;
  double value = 0.0;
  std::size_t pairs = 0;
};

/// sup of skeleton distance over sampled vertex pairs with Euclidean distance
/// below each eta.
std::vector<ModulusRow> continuity_modulus(const SkeletonGraph& skel, const std::vector<double>& etas,
                                           std::size_t sources, std::uint64_t seed);

struct ContactSequence {
  int i = 0;
  int j = 0;
  PointD contact;
  PointD x;
  PointD y;
  std::vector<double> values;
  std::string trend;
};

struct EquicontinuityReport {
  int level = 0;
  double threshold = 0.0;
  double spacing = 0.0;
  std::vector<std::string> members;
  std::vector<double> hausdorff_hi;
  std::vector<ContactSequence> sequences;
  bool all_to_zero = false;
  bool any_bounded_below = false;
};

/// Classifies a sequence: "->0", "bounded below" or "undecided".
std::string classify_trend(const std::vector<double>& values, double spacing, double threshold);

EquicontinuityReport equicontinuity_diagnostic(const FamilySpec& family, int m, double threshold = -1.0);

}  // namespace usc
