#include "usc/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "usc/errors.hpp"
#include "usc/geodesic.hpp"
#include "usc/laplacian.hpp"
#include "usc/parallel.hpp"

namespace usc {

Network::Network(std::size_t vertices, std::vector<WeightedEdge> edges) : n_(vertices), edges_(std::move(edges)) {
  offsets_.assign(n_ + 1, 0);
  strength_.assign(n_, 0.0);
  for (const auto& e : edges_) {
    if (e.u >= n_ || e.v >= n_) throw InputError("edge endpoint out of range");
    if (e.u == e.v) throw InputError("self-loop in network");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) throw InputError("conductances must be positive");
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  targets_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    targets_[fill[e.u]] = e.v;
    weights_[fill[e.u]++] = e.conductance;
    targets_[fill[e.v]] = e.u;
    weights_[fill[e.v]++] = e.conductance;
    strength_[e.u] += e.conductance;
    strength_[e.v] += e.conductance;
  }
}

std::vector<std::uint32_t> Network::components(std::size_t* count) const {
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(n_, unset);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < n_; ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (std::size_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
        if (label[targets_[i]] == unset) {
          label[targets_[i]] = next;
          stack.push_back(targets_[i]);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

bool Network::connected() const {
  std::size_t c = 0;
  components(&c);
  return c <= 1;
}

Network Network::with_extra(std::size_t extra_vertices, const std::vector<WeightedEdge>& extra_edges) const {
  std::vector<WeightedEdge> all = edges_;
  all.insert(all.end(), extra_edges.begin(), extra_edges.end());
  return Network(n_ + extra_vertices, std::move(all));
}

Network Network::scaled_edge(std::size_t edge_index, double lambda) const {
  std::vector<WeightedEdge> all = edges_;
  all.at(edge_index).conductance *= lambda;
  return Network(n_, std::move(all));
}

std::string scheme_name(const ConductanceScheme& s) {
  return s.mode == ConductanceScheme::Mode::uniform ? "uniform" : "overlap";
}

ConductanceScheme parse_scheme(const std::string& name) {
  ConductanceScheme s;
  if (name == "uniform") {
    s.mode = ConductanceScheme::Mode::uniform;
  } else if (name == "overlap" || name == "overlap-weighted") {
    s.mode = ConductanceScheme::Mode::overlap_weighted;
  } else {
    throw InputError("unknown conductance scheme '" + name + "'");
  }
  return s;
}

CellNetwork build_cell_network(const USCSpec& spec, int n, const ConductanceScheme& scheme, std::size_t budget) {
  if (scheme.point_contact_conductance < 0.0) throw InputError("point contact conductance must be nonnegative");
  CellNetwork net;
  net.grid = build_cell_grid(spec, n, budget);
  net.scheme = scheme;
  std::vector<WeightedEdge> edges;
  for (const auto& c : grid_contacts(net.grid)) {
    double w = 0.0;
    if (c.overlap > 0) {
      w = scheme.mode == ConductanceScheme::Mode::uniform
              ? 1.0
              : static_cast<double>(c.overlap) / static_cast<double>(net.grid.s);
    } else {
      w = scheme.point_contact_conductance;
    }
    if (w > 0.0) edges.push_back({c.a, c.b, w});
  }
  net.graph = Network(net.grid.size(), std::move(edges));
  std::size_t comps = 0;
  net.graph.components(&comps);
  if (comps > 1) {
    throw DisconnectedError("level-" + std::to_string(n) + " cell network has " + std::to_string(comps) +
                            " components under scheme " + scheme_name(scheme) +
                            " (point contacts carry conductance " +
                            std::to_string(scheme.point_contact_conductance) + ")");
  }
  return net;
}

double edge_energy(const Network& net, const std::vector<double>& u) {
  std::vector<double> terms(net.edges().size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& e = net.edges()[i];
    const double d = u[e.u] - u[e.v];
    terms[i] = e.conductance * d * d;
  }
  return pairwise_sum(terms);
}

DirichletSolution harmonic_extension(const Network& net, const std::vector<std::uint32_t>& boundary,
                                     const std::vector<double>& values, double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  if (boundary.empty()) throw InputError("boundary set must be nonempty");
  if (boundary.size() != values.size()) throw InputError("boundary values size mismatch");
  std::vector<char> fixed(net.size(), 0);
  std::vector<double> u(net.size(), 0.0);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto v = boundary[i];
    if (v >= net.size()) throw InputError("boundary vertex out of range");
    if (fixed[v]) throw InputError("boundary vertex listed twice");
    fixed[v] = 1;
    u[v] = values[i];
  }
  DirichletSolution sol;
  std::size_t ncomp = 0;
  const auto label = net.components(&ncomp);
  std::vector<char> anchored(ncomp, 0);
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (fixed[v]) anchored[label[v]] = 1;
  }
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (!anchored[label[v]]) {
      fixed[v] = 1;
      u[v] = values.front();
      ++sol.stranded_vertices;
    }
  }
  const GroundedSolver solver(net, fixed, tol);
  const auto& pos = solver.free_position();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solver.free_vertices().size()));
  for (const auto& e : net.edges()) {
    if (pos[e.u] >= 0 && pos[e.v] < 0) rhs[pos[e.u]] += e.conductance * u[e.v];
    if (pos[e.v] >= 0 && pos[e.u] < 0) rhs[pos[e.v]] += e.conductance * u[e.u];
  }
  const Eigen::VectorXd x = solver.solve(rhs);
  for (std::size_t i = 0; i < solver.free_vertices().size(); ++i) u[solver.free_vertices()[i]] = x[i];
  sol.iterations = solver.last_iterations();
  sol.residual = solver.last_residual();
  sol.energy = edge_energy(net, u);
  sol.potential = std::move(u);
  return sol;
}

DirichletSolution solve_dirichlet(const Network& net, const DirichletProblem& p, double tol) {
  if (p.a.empty() || p.b.empty()) throw InputError("Dirichlet boundary sets must be nonempty");
  std::vector<std::uint32_t> boundary;
  std::vector<double> values;
  std::vector<char> seen(net.size(), 0);
  for (auto v : p.a) {
    if (v >= net.size()) throw InputError("boundary vertex out of range");
    if (seen[v]) continue;
    seen[v] = 1;
    boundary.push_back(v);
    values.push_back(p.value_a);
  }
  for (auto v : p.b) {
    if (v >= net.size()) throw InputError("boundary vertex out of range");
    if (seen[v] == 1) throw InputError("boundary sets A and B intersect");
    if (seen[v]) continue;
    seen[v] = 2;
    boundary.push_back(v);
    values.push_back(p.value_b);
  }
  return harmonic_extension(net, boundary, values, tol);
}

double effective_resistance(const Network& net, const std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b, double tol) {
  const DirichletSolution s = solve_dirichlet(net, {a, b, 0.0, 1.0}, tol);
  if (!(s.energy > 0.0)) throw DisconnectedError("A and B are not connected");
  return 1.0 / s.energy;
}

double side_resistance(const CellNetwork& net, int side_a, int side_b) {
  const auto n = static_cast<std::uint32_t>(net.graph.size());
  std::vector<WeightedEdge> extra;
  for (auto v : grid_boundary_cells(net.grid, side_a)) extra.push_back({v, n, 2.0});
  for (auto v : grid_boundary_cells(net.grid, side_b)) extra.push_back({v, n + 1, 2.0});
  const Network aug = net.graph.with_extra(2, extra);
  return effective_resistance(aug, {n}, {n + 1});
}

double RenormEstimate::normalization(int n) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == n) return resistances[i];
  }
  throw InputError("no renormalization data for level " + std::to_string(n));
}

RenormEstimate estimate_renorm(const USCSpec& spec, int n_max, const ConductanceScheme& scheme, bool extrapolate,
                               std::size_t budget) {
  if (n_max < 2) throw InputError("estimate_renorm needs n_max >= 2");
  RenormEstimate est;
  est.k = spec.k;
  est.n_maps = spec.n_maps();
  for (int n = 1; n <= n_max; ++n) {
    const CellNetwork net = build_cell_network(spec, n, scheme, budget);
    est.levels.push_back(n);
    est.resistances.push_back(side_resistance(net));
    est.ratios.push_back(n == 1 ? std::numeric_limits<double>::quiet_NaN()
                                : est.resistances[n - 2] / est.resistances[n - 1]);
  }
  const double logk = std::log(static_cast<double>(spec.k));
  est.r_hat = est.ratios.back();
  if (extrapolate && est.ratios.size() >= 4) {
    const double a = est.ratios[est.ratios.size() - 3];
    const double b = est.ratios[est.ratios.size() - 2];
    const double c = est.ratios.back();
    const double denom = (c - b) - (b - a);
    est.r_extrapolated = std::abs(denom) > 1e-15 ? c - (c - b) * (c - b) / denom : c;
  }
  est.theta = -std::log(est.r_hat) / logk;
  est.d_h = std::log(static_cast<double>(spec.n_maps())) / logk;
  est.d_w = est.theta + est.d_h;
  return est;
}

struct ResistanceMetric::Impl {
  std::unique_ptr<GroundedSolver> solver;
};

ResistanceMetric::ResistanceMetric(const CellNetwork& net, double tol) : net_(net), impl_(new Impl) {
  std::vector<char> fixed(net_.graph.size(), 0);
  fixed[0] = 1;
  impl_->solver = std::make_unique<GroundedSolver>(net_.graph, fixed, tol);
}

ResistanceMetric::~ResistanceMetric() { delete impl_; }

double ResistanceMetric::graph_resistance(std::size_t x, std::size_t y) const {
  if (x >= net_.graph.size() || y >= net_.graph.size()) throw InputError("vertex out of range");
  if (x == y) return 0.0;
  if (x > y) std::swap(x, y);
  const auto& pos = impl_->solver->free_position();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(impl_->solver->free_vertices().size()));
  if (pos[x] >= 0) rhs[pos[x]] += 1.0;
  if (pos[y] >= 0) rhs[pos[y]] -= 1.0;
  const Eigen::VectorXd v = impl_->solver->solve(rhs);
  const double vx = pos[x] >= 0 ? v[pos[x]] : 0.0;
  const double vy = pos[y] >= 0 ? v[pos[y]] : 0.0;
  return vx - vy;
}

double ResistanceMetric::operator()(std::size_t x, std::size_t y) const {
  return graph_resistance(x, y) / net_.normalization;
}

namespace {

CellNetwork normalized_network(const USCSpec& spec, int n, const ConductanceScheme& scheme) {
  CellNetwork net = build_cell_network(spec, n, scheme);
  net.normalization = side_resistance(net);
  return net;
}

std::size_t locate_or_throw(const CellGrid& g, const PointD& p) {
  const std::size_t v = g.locate(p);
  if (v == g.size()) throw InputError("point is not in any level-" + std::to_string(g.n) + " cell");
  return v;
}

}  // namespace

double resistance_metric_est(const USCSpec& spec, int n, const Word& x, const Word& y,
                             const ConductanceScheme& scheme) {
  const CellNetwork net = normalized_network(spec, n, scheme);
  const ResistanceMetric metric(net);
  return metric(net.grid.index(x), net.grid.index(y));
}

double resistance_metric_est(const USCSpec& spec, int n, const PointD& x, const PointD& y,
                             const ConductanceScheme& scheme) {
  const CellNetwork net = normalized_network(spec, n, scheme);
  const ResistanceMetric metric(net);
  return metric(locate_or_throw(net.grid, x), locate_or_throw(net.grid, y));
}

BoundaryBoundReport check_boundary_bound(const CellNetwork& net, std::size_t samples, std::uint64_t seed) {
  std::vector<std::uint32_t> boundary;
  for (int side = 1; side <= 4; ++side) {
    const auto b = grid_boundary_cells(net.grid, side);
    boundary.insert(boundary.end(), b.begin(), b.end());
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  const ResistanceMetric metric(net);
  const std::size_t q1 = locate_or_throw(net.grid, {0.0, 0.0});
  const std::size_t q2 = locate_or_throw(net.grid, {1.0, 0.0});
  BoundaryBoundReport rep;
  rep.r_q1q2 = metric(q1, q2);
  const double k = net.grid.k;
  rep.bound = 2.0 * k * k * k;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, boundary.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < samples) {
    const std::size_t a = boundary[pick(rng)], b = boundary[pick(rng)];
    if (a != b) pairs.emplace_back(a, b);
  }
  std::vector<double> ratios(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) { ratios[i] = metric(pairs[i].first, pairs[i].second) / rep.r_q1q2; });
  rep.pairs = pairs.size();
  rep.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  rep.passed = rep.max_ratio <= rep.bound;
  return rep;
}

ThetaFit fit_theta(const USCSpec& spec, int n, std::size_t samples, std::uint64_t seed, int geodesic_level,
                   const ConductanceScheme& scheme) {
  if (samples < 2) throw DegenerateError("fit_theta needs at least two pairs");
  if (geodesic_level < n) throw InputError("fit_theta needs geodesic_level >= n so cell corners lie on the skeleton");
  const RenormEstimate renorm = estimate_renorm(spec, n, scheme);
  CellNetwork net = build_cell_network(spec, n, scheme);
  net.normalization = renorm.resistances.back();
  const ResistanceMetric metric(net);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, net.grid.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < samples) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a != b && net.grid.corner[a] != net.grid.corner[b]) pairs.emplace_back(a, b);
  }
  const Rational unit(mpq_class(1, mpz_class(std::to_string(net.grid.q))));
  auto corner_point = [&](std::size_t i) {
    return Point{Rational(net.grid.corner[i][0]) * unit, Rational(net.grid.corner[i][1]) * unit};
  };
  SkeletonOptions opts;
  for (const auto& [a, b] : pairs) {
    opts.pins.push_back(corner_point(a));
    opts.pins.push_back(corner_point(b));
  }
  const SkeletonGraph skel = build_skeleton(spec, geodesic_level, opts);

  std::vector<double> lr(pairs.size()), ld(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [a, b] = pairs[i];
    const double r = metric(a, b);
    const double d = skel.distance(skel.vertex_at(corner_point(a)), skel.vertex_at(corner_point(b)));
    lr[i] = std::log(r);
    ld[i] = std::log(d);
  });
  ThetaFit fit;
  fit.pairs = pairs.size();
  fit.theta_hat = renorm.theta;
  const double mx = std::accumulate(ld.begin(), ld.end(), 0.0) / ld.size();
  const double my = std::accumulate(lr.begin(), lr.end(), 0.0) / lr.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    sxx += (ld[i] - mx) * (ld[i] - mx);
    sxy += (ld[i] - mx) * (lr[i] - my);
  }
  if (!(sxx > 1e-24)) throw DegenerateError("all sampled pairs are equidistant");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  fit.min_ratio = std::numeric_limits<double>::infinity();
  fit.max_ratio = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    const double e = lr[i] - (fit.intercept + fit.slope * ld[i]);
    ss += e * e;
    const double ratio = std::exp(lr[i] - renorm.theta * ld[i]);
    fit.min_ratio = std::min(fit.min_ratio, ratio);
    fit.max_ratio = std::max(fit.max_ratio, ratio);
  }
  fit.residual = std::sqrt(ss / ld.size());
  return fit;
}

AnnulusReport annulus_resistance(const USCSpec& spec, int n, const Word& x, double rho, double theta_hat,
                                 int geodesic_level, const ConductanceScheme& scheme) {
  if (!(rho > 0.0) || rho > 1.0) throw InputError("rho must lie in (0, 1]");
  CellNetwork net = build_cell_network(spec, n, scheme);
  net.normalization = side_resistance(net);
  const std::size_t xi = net.grid.index(x);
  const Rational unit(mpq_class(1, mpz_class(std::to_string(net.grid.q))));
  SkeletonOptions opts;
  std::vector<Point> corners(net.grid.size());
  for (std::size_t i = 0; i < net.grid.size(); ++i) {
    corners[i] = {Rational(net.grid.corner[i][0]) * unit, Rational(net.grid.corner[i][1]) * unit};
  }
  opts.pins = corners;
  const SkeletonGraph skel = build_skeleton(spec, geodesic_level, opts);
  const auto dist = skel.distances_from(skel.vertex_at(corners[xi]));
  std::vector<std::uint32_t> far;
  for (std::size_t i = 0; i < net.grid.size(); ++i) {
    if (i != xi && dist[skel.vertex_at(corners[i])] >= rho) far.push_back(static_cast<std::uint32_t>(i));
  }
  if (far.empty()) throw DegenerateError("no cell lies at geodesic distance >= rho");
  AnnulusReport rep;
  rep.complement_size = far.size();
  rep.resistance = effective_resistance(net.graph, {static_cast<std::uint32_t>(xi)}, far) / net.normalization;
  rep.scaled = rep.resistance / std::pow(rho, theta_hat);
  return rep;
}

}  // namespace usc
