#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "usc/cell_grid.hpp"
#include "usc/family.hpp"
#include "usc/geometry.hpp"
#include "usc/network.hpp"

namespace usc {

struct TestFunction {
  std::string name;
  std::function<double(double, double)> f;
  /// Lipschitz constant on the unit square.
  double lipschitz = 0.0;
};

/// 1, x1, x1x2, x1^2x2.
std::vector<TestFunction> builtin_test_functions();
/// Looks up one builtin by name.
TestFunction builtin_test_function(const std::string& name);

/// Member cell index of every limit cell, letters mapped by a 1-based
/// permutation (see match_ifs).
std::vector<std::size_t> transport_cells(const CellGrid& limit, const std::vector<int>& permutation);

struct MeasureRow {
  long index = 0;
  Rational parameter;
  std::vector<double> discrepancy;
  /// 2 Lip(f) * displacement + 2 Osc_f(k^-m), per function.
  std::vector<double> bound;
};

struct MeasureReport {
  int m = 0;
  std::vector<std::string> functions;
  /// Upper bound on Osc_f(k^-m) from Lipschitz constants.
  std::vector<double> oscillation;
  std::vector<MeasureRow> rows;
  /// Per function: discrepancy nonincreasing along the family within 1e-12.
  std::vector<bool> monotone;
};

MeasureReport measure_convergence(const FamilySpec& family, int m, const std::vector<TestFunction>& functions);

struct ResistanceRow {
  long index = 0;
  Rational parameter;
  double hausdorff_lo = 0.0;
  double hausdorff_hi = 0.0;
  double r_hat = 0.0;
  double deviation = 0.0;
};

struct ResistanceConvergenceReport {
  int level = 0;
  double limit_r_hat = 0.0;
  std::vector<Word> points;
  std::size_t pairs = 0;
  std::vector<ResistanceRow> rows;
  double ratio = 0.0;
  std::string trend;
  std::string note;
};

/// Last/first ratio classification: "decreasing" below decreasing_ratio,
/// "not decreasing" above 1/2, otherwise "undecided".
std::string ratio_trend(double ratio, double decreasing_ratio = 0.2);

/// Default grid: cells Psi_i Psi_1^{n-1} for 8 spread letters, plus both
/// cells of up to four point contacts between different level-1 squares.
std::vector<Word> default_grid_words(const CellGrid& limit);

ResistanceConvergenceReport resistance_convergence(const FamilySpec& family, int n,
                                                   const std::vector<Word>& points = {});

struct GammaLiminfReport {
  int level = 0;
  double limit_energy = 0.0;
  std::vector<long> indices;
  std::vector<double> member_energies;
  double liminf = 0.0;
  double margin = 0.0;
  bool holds = false;
  std::string note;
};

/// Harmonic function on the network with boundary values x1 at boundary cell centres.
std::vector<double> harmonic_x1(const CellNetwork& net);

/// Normalized energies of f transported to each member; liminf taken as the
/// minimum over the second half of the sequence.
GammaLiminfReport gamma_liminf_check(const FamilySpec& family, int n, const std::vector<double>& f_limit);

/// Scheme used for family comparisons: overlap weights with point contacts at conductance 1.
ConductanceScheme family_scheme();

}  // namespace usc
