#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usc/cell_grid.hpp"
#include "usc/geometry.hpp"

namespace usc {

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double conductance = 1.0;
};

/// Undirected weighted graph with CSR adjacency. Parallel edges are summed.
class Network {
 public:
  Network() = default;
  Network(std::size_t vertices, std::vector<WeightedEdge> edges);

  std::size_t size() const { return n_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  const std::uint32_t* neighbors(std::size_t v) const { return targets_.data() + offsets_[v]; }
  const double* weights(std::size_t v) const { return weights_.data() + offsets_[v]; }
  double weighted_degree(std::size_t v) const { return strength_[v]; }
  /// Component label per vertex, labels 0..count-1 in order of first vertex.
  std::vector<std::uint32_t> components(std::size_t* count = nullptr) const;
  bool connected() const;

  /// Copy with extra vertices appended and extra edges added.
  Network with_extra(std::size_t extra_vertices, const std::vector<WeightedEdge>& extra_edges) const;
  /// Copy with one edge's conductance multiplied by lambda.
  Network scaled_edge(std::size_t edge_index, double lambda) const;

 private:
  std::size_t n_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
  std::vector<double> strength_;
};

struct ConductanceScheme {
  enum class Mode { uniform, overlap_weighted };
  Mode mode = Mode::overlap_weighted;
  double point_contact_conductance = 0.0;
};

std::string scheme_name(const ConductanceScheme& s);
ConductanceScheme parse_scheme(const std::string& name);

struct CellNetwork {
  CellGrid grid;
  Network graph;
  ConductanceScheme scheme;
  /// Divides graph resistances so that R(L_2, L_4) = 1 at this level.
  double normalization = 1.0;

  int level() const { return grid.n; }
};

CellNetwork build_cell_network(const USCSpec& spec, int n, const ConductanceScheme& scheme = {},
                               std::size_t budget = default_cell_budget());

struct DirichletProblem {
  std::vector<std::uint32_t> a;
  std::vector<std::uint32_t> b;
  double value_a = 0.0;
  double value_b = 1.0;
};

struct DirichletSolution {
  std::vector<double> potential;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  /// Free vertices in components touching neither A nor B; set to value_a.
  std::size_t stranded_vertices = 0;
};

DirichletSolution solve_dirichlet(const Network& net, const DirichletProblem& p, double tol = 1e-10);

/// Harmonic extension of arbitrary boundary values (boundary[i] -> values[i]).
DirichletSolution harmonic_extension(const Network& net, const std::vector<std::uint32_t>& boundary,
                                     const std::vector<double>& values, double tol = 1e-10);

/// Sum over edges of c (u_x - u_y)^2.
double edge_energy(const Network& net, const std::vector<double>& u);

double effective_resistance(const Network& net, const std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b, double tol = 1e-10);

/// Graph resistance between sides L_2 and L_4: each side is a terminal node
/// joined to its boundary cells through half-cell conductors.
double side_resistance(const CellNetwork& net, int side_a = 4, int side_b = 2);

struct RenormEstimate {
  int k = 0;
  int n_maps = 0;
  std::vector<int> levels;
  /// Graph resistance R_n(L_2, L_4) per level.
  std::vector<double> resistances;
  /// ratios[i] = R_{n-1} / R_n for levels[i] = n >= 2; ratios[0] is unused (NaN).
  std::vector<double> ratios;
  double r_hat = 0.0;
  double theta = 0.0;
  double d_h = 0.0;
  double d_w = 0.0;
  /// Richardson-extrapolated ratio from the last three levels, when requested.
  std::optional<double> r_extrapolated;

  double normalization(int n) const;
};

RenormEstimate estimate_renorm(const USCSpec& spec, int n_max, const ConductanceScheme& scheme = {},
                               bool extrapolate = false, std::size_t budget = default_cell_budget());

/// Two-point resistances on a fixed network, normalized by net.normalization.
class ResistanceMetric {
 public:
  explicit ResistanceMetric(const CellNetwork& net, double tol = 1e-10);
  ~ResistanceMetric();
  ResistanceMetric(const ResistanceMetric&) = delete;
  ResistanceMetric& operator=(const ResistanceMetric&) = delete;

  double operator()(std::size_t x, std::size_t y) const;
  double graph_resistance(std::size_t x, std::size_t y) const;
  const CellNetwork& network() const { return net_; }

 private:
  struct Impl;
  CellNetwork net_;
  Impl* impl_;
};

/// Builds the level-n network, normalizes by R_n(L_2, L_4) and returns the
/// two-point value. Points resolve to the lowest-index cell containing them.
double resistance_metric_est(const USCSpec& spec, int n, const Word& x, const Word& y,
                             const ConductanceScheme& scheme = {});
double resistance_metric_est(const USCSpec& spec, int n, const PointD& x, const PointD& y,
                             const ConductanceScheme& scheme = {});

struct BoundaryBoundReport {
  double max_ratio = 0.0;
  double bound = 0.0;
  double r_q1q2 = 0.0;
  std::size_t pairs = 0;
  bool passed = false;
};

BoundaryBoundReport check_boundary_bound(const CellNetwork& net, std::size_t samples, std::uint64_t seed);

struct ThetaFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double theta_hat = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t pairs = 0;
};

/// Regresses log R against log d_G over random cell pairs (lower-left
/// corners), with geodesics from a level-m skeleton.
ThetaFit fit_theta(const USCSpec& spec, int n, std::size_t samples, std::uint64_t seed, int geodesic_level,
                   const ConductanceScheme& scheme = {});

struct AnnulusReport {
  double resistance = 0.0;
  double scaled = 0.0;
  std::size_t complement_size = 0;
};

AnnulusReport annulus_resistance(const USCSpec& spec, int n, const Word& x, double rho, double theta_hat,
                                 int geodesic_level, const ConductanceScheme& scheme = {});

}  // namespace usc
