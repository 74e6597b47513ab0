#pragma once

#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "usc/family.hpp"
#include "usc/network.hpp"

namespace usc {

class GroundedSolver;

enum class MeasureKind { uniform, weighted };

std::string measure_name(MeasureKind m);
MeasureKind parse_measure(const std::string& name);

/// Vertex measure: 1/V each (uniform) or c_x / sum c (weighted).
std::vector<double> vertex_measure(const Network& net, MeasureKind kind);

struct TransitionOperator {
  int level = 0;
  MeasureKind measure = MeasureKind::weighted;
  Eigen::SparseMatrix<double, Eigen::RowMajor> p;
  std::vector<double> mass;
  double max_row_error = 0.0;
  /// max |m_x P(x,y) - m_y P(y,x)|; only meaningful for the weighted measure.
  double max_reversibility_error = 0.0;
};

TransitionOperator transition_operator(const Network& net, MeasureKind measure, int level = 0);

struct HittingStats {
  std::size_t walks = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t max_steps = 0;
};

/// Walks from uniformly chosen start vertices until they reach the target set.
/// Walk i draws from mt19937_64 seeded with (seed, i); std_error from 20 batch means.
HittingStats simulate_hitting(const Network& net, const std::vector<std::uint32_t>& start,
                              const std::vector<std::uint32_t>& target, std::size_t walks, std::uint64_t seed,
                              std::uint64_t cap = 1000000000ULL);

struct CrossingLevel {
  int level = 0;
  HittingStats stats;
  /// r_hat^n N^-n.
  double time_step = 0.0;
  double scaled_time = 0.0;
};

struct CrossingReport {
  std::uint64_t seed = 0;
  std::size_t walks = 0;
  std::vector<CrossingLevel> levels;
  /// log(T_{n+1} / T_n) / log k for consecutive levels.
  std::vector<double> d_w_steps;
  double d_w_hat = 0.0;
  double d_w_std_error = 0.0;
  double r_hat = 0.0;
  double theta_hat = 0.0;
  double d_h = 0.0;
  double d_w_theta = 0.0;
  double relative_gap = 0.0;
};

/// Crossing steps from W_{n,4} cells to W_{n,2} cells at each level.
CrossingReport simulate_crossings(const USCSpec& spec, const std::vector<int>& levels, std::size_t walks,
                                  std::uint64_t seed, const ConductanceScheme& scheme = {});

/// Factorized (scale * L + alpha * diag(m)).
class Resolvent {
 public:
  Resolvent(const Network& net, std::vector<double> mass, double alpha, double energy_scale = 1.0);
  ~Resolvent();
  Resolvent(const Resolvent&) = delete;
  Resolvent& operator=(const Resolvent&) = delete;

  std::vector<double> kernel(std::size_t x) const;
  double alpha() const { return alpha_; }
  const std::vector<double>& mass() const { return mass_; }

 private:
  Network scaled_;
  std::vector<double> mass_;
  std::vector<double> shift_;
  double alpha_ = 0.0;
  std::unique_ptr<GroundedSolver> solver_;
};

struct ResolventSolution {
  double alpha = 0.0;
  std::size_t x = 0;
  MeasureKind measure = MeasureKind::uniform;
  std::vector<double> u;
  std::vector<double> mass;
  /// |alpha sum_y u(y) m_y - 1|.
  double identity_error = 0.0;
};

/// Energies are normalized by net.normalization.
ResolventSolution resolvent_kernel(const CellNetwork& net, MeasureKind measure, double alpha, std::size_t x);
ResolventSolution resolvent_kernel(const Network& net, const std::vector<double>& mass, double alpha, std::size_t x);

struct ResolventRow {
  long index = 0;
  Rational parameter;
  double deviation = 0.0;
};

struct ResolventConvergenceReport {
  int level = 0;
  double alpha = 0.0;
  std::vector<Word> basepoints;
  std::vector<Word> points;
  std::vector<ResolventRow> rows;
  double ratio = 0.0;
  std::string trend;
};

/// sup over basepoints x and grid points y of |u_n(x_n, y_n) - u(x, y)|,
/// uniform measure, family conductance scheme.
ResolventConvergenceReport resolvent_convergence(const FamilySpec& family, int n, double alpha,
                                                 const std::vector<Word>& basepoints = {},
                                                 const std::vector<Word>& points = {});

struct HeatKernelRow {
  std::size_t t = 0;
  /// Mean over basepoints of P_lazy^t(x, x) / m_x.
  double value = 0.0;
};

struct HeatKernelReport {
  MeasureKind measure = MeasureKind::weighted;
  std::vector<std::size_t> basepoints;
  std::vector<HeatKernelRow> rows;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  std::size_t fit_points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  /// -d_H / slope, when the slope is negative.
  double d_w_return = 0.0;
  std::string note;
};

/// Geometrically spaced times 0, 1, 2, ... up to t_max (about 12 per decade).
std::vector<std::size_t> geometric_times(std::size_t t_max, int per_decade = 12);

/// Lazy walk (P + I)/2 powers applied to indicator rows; fits log value
/// against log t over [fit_lo, fit_hi].
HeatKernelReport heat_kernel_diag(const CellNetwork& net, MeasureKind measure, const std::vector<std::size_t>& times,
                                  const std::vector<std::size_t>& basepoints = {}, double fit_lo = 10.0,
                                  double fit_hi = 1000.0);

/// Eight spread cells used as default basepoints.
std::vector<std::size_t> default_basepoints(const CellGrid& grid);

}  // namespace usc
