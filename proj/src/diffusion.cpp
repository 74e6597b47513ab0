#include "usc/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "usc/convergence.hpp"
#include "usc/errors.hpp"
#include "usc/laplacian.hpp"
#include "usc/parallel.hpp"

namespace usc {

std::string measure_name(MeasureKind m) { return m == MeasureKind::uniform ? "uniform" : "weighted"; }

MeasureKind parse_measure(const std::string& name) {
  if (name == "uniform") return MeasureKind::uniform;
  if (name == "weighted") return MeasureKind::weighted;
  throw InputError("unknown measure '" + name + "' (expected uniform or weighted)");
}

std::vector<double> vertex_measure(const Network& net, MeasureKind kind) {
  const std::size_t n = net.size();
  if (n == 0) throw InputError("empty network");
  std::vector<double> m(n);
  if (kind == MeasureKind::uniform) {
    std::fill(m.begin(), m.end(), 1.0 / static_cast<double>(n));
    return m;
  }
  for (std::size_t v = 0; v < n; ++v) m[v] = net.weighted_degree(v);
  const double total = pairwise_sum(m);
  if (!(total > 0.0)) throw DegenerateError("network has no edges");
  for (auto& x : m) x /= total;
  return m;
}

TransitionOperator transition_operator(const Network& net, MeasureKind measure, int level) {
  TransitionOperator op;
  op.level = level;
  op.measure = measure;
  op.mass = vertex_measure(net, measure);
  const std::size_t n = net.size();
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t v = 0; v < n; ++v) {
    const double c = net.weighted_degree(v);
    if (!(c > 0.0)) throw DisconnectedError("vertex " + std::to_string(v) + " is isolated");
    for (std::size_t j = 0; j < net.degree(v); ++j) {
      t.emplace_back(static_cast<Eigen::Index>(v), net.neighbors(v)[j], net.weights(v)[j] / c);
    }
  }
  op.p.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  op.p.setFromTriplets(t.begin(), t.end());
  for (Eigen::Index r = 0; r < op.p.outerSize(); ++r) {
    double s = 0.0;
    for (decltype(op.p)::InnerIterator it(op.p, r); it; ++it) {
      s += it.value();
      const double back = op.p.coeff(it.col(), r);
      op.max_reversibility_error =
          std::max(op.max_reversibility_error, std::abs(op.mass[r] * it.value() - op.mass[it.col()] * back));
    }
    op.max_row_error = std::max(op.max_row_error, std::abs(s - 1.0));
  }
  return op;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

HittingStats simulate_hitting(const Network& net, const std::vector<std::uint32_t>& start,
                              const std::vector<std::uint32_t>& target, std::size_t walks, std::uint64_t seed,
                              std::uint64_t cap) {
  if (start.empty() || target.empty() || walks == 0) throw InputError("hitting simulation needs start, target, walks");
  const std::size_t n = net.size();
  std::vector<char> is_target(n, 0);
  for (auto v : target) is_target.at(v) = 1;
  std::vector<double> cumulative;
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::size_t j = 0; j < net.degree(v); ++j) {
      s += net.weights(v)[j];
      cumulative.push_back(s);
    }
    offset[v + 1] = cumulative.size();
  }
  std::vector<double> steps(walks);
  std::vector<std::uint64_t> longest(walks);
  parallel_for(walks, [&](std::size_t i) {
    auto rng = stream(seed, i);
    std::uint32_t x = start[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(start.size()))];
    std::uint64_t count = 0;
    while (!is_target[x]) {
      if (++count > cap) throw DisconnectedError("walk exceeded " + std::to_string(cap) + " steps");
      const std::size_t lo = offset[x], hi = offset[x + 1];
      if (lo == hi) throw DisconnectedError("walk reached an isolated vertex");
      const double u = uniform01(rng) * cumulative[hi - 1];
      std::size_t j = lo;
      while (j + 1 < hi && cumulative[j] <= u) ++j;
      x = net.neighbors(x)[j - lo];
    }
    steps[i] = static_cast<double>(count);
    longest[i] = count;
  });
  HittingStats st;
  st.walks = walks;
  st.mean = pairwise_sum(steps) / static_cast<double>(walks);
  st.max_steps = *std::max_element(longest.begin(), longest.end());
  const std::size_t batches = std::min<std::size_t>(20, walks);
  if (batches >= 2) {
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * walks / batches, hi = (b + 1) * walks / batches;
      means[b] = pairwise_sum(steps.data() + lo, hi - lo) / static_cast<double>(hi - lo);
    }
    const double mu = pairwise_sum(means) / static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(batches - 1);
    st.std_error = std::sqrt(var / static_cast<double>(batches));
  }
  return st;
}

CrossingReport simulate_crossings(const USCSpec& spec, const std::vector<int>& levels, std::size_t walks,
                                  std::uint64_t seed, const ConductanceScheme& scheme) {
  if (levels.empty()) throw InputError("simulate_crossings needs levels");
  CrossingReport rep;
  rep.seed = seed;
  rep.walks = walks;
  const int top = *std::max_element(levels.begin(), levels.end());
  const RenormEstimate renorm = estimate_renorm(spec, std::max(2, top), scheme);
  rep.r_hat = renorm.r_hat;
  rep.theta_hat = renorm.theta;
  rep.d_h = renorm.d_h;
  rep.d_w_theta = renorm.d_w;
  for (int n : levels) {
    const CellNetwork net = build_cell_network(spec, n, scheme);
    CrossingLevel row;
    row.level = n;
    row.stats = simulate_hitting(net.graph, grid_boundary_cells(net.grid, 4), grid_boundary_cells(net.grid, 2), walks,
                                 seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n)));
    row.time_step = std::pow(rep.r_hat, n) * std::pow(static_cast<double>(spec.n_maps()), -n);
    row.scaled_time = row.stats.mean * row.time_step;
    rep.levels.push_back(row);
  }
  const double logk = std::log(static_cast<double>(spec.k));
  for (std::size_t i = 1; i < rep.levels.size(); ++i) {
    const auto& a = rep.levels[i - 1];
    const auto& b = rep.levels[i];
    rep.d_w_steps.push_back(std::log(b.stats.mean / a.stats.mean) / logk / (b.level - a.level));
  }
  if (!rep.d_w_steps.empty()) {
    const auto& a = rep.levels[rep.levels.size() - 2];
    const auto& b = rep.levels.back();
    rep.d_w_hat = rep.d_w_steps.back();
    const double ra = a.stats.std_error / a.stats.mean, rb = b.stats.std_error / b.stats.mean;
    rep.d_w_std_error = std::sqrt(ra * ra + rb * rb) / logk / (b.level - a.level);
    rep.relative_gap = std::abs(rep.d_w_hat - rep.d_w_theta) / rep.d_w_theta;
  }
  return rep;
}

Resolvent::Resolvent(const Network& net, std::vector<double> mass, double alpha, double energy_scale)
    : mass_(std::move(mass)), alpha_(alpha) {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (mass_.size() != net.size()) throw InputError("one mass per vertex expected");
  std::vector<WeightedEdge> edges = net.edges();
  for (auto& e : edges) e.conductance *= energy_scale;
  scaled_ = Network(net.size(), std::move(edges));
  shift_.resize(mass_.size());
  for (std::size_t i = 0; i < mass_.size(); ++i) shift_[i] = alpha * mass_[i];
  solver_ = std::make_unique<GroundedSolver>(scaled_, std::vector<char>(net.size(), 0), 1e-12, &shift_);
}

Resolvent::~Resolvent() = default;

std::vector<double> Resolvent::kernel(std::size_t x) const {
  if (x >= mass_.size()) throw InputError("basepoint out of range");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mass_.size()));
  rhs[static_cast<Eigen::Index>(x)] = 1.0;
  const Eigen::VectorXd u = solver_->solve(rhs);
  return {u.data(), u.data() + u.size()};
}

namespace {

ResolventSolution finish(const Resolvent& r, MeasureKind measure, std::size_t x) {
  ResolventSolution sol;
  sol.alpha = r.alpha();
  sol.x = x;
  sol.measure = measure;
  sol.u = r.kernel(x);
  sol.mass = r.mass();
  std::vector<double> terms(sol.u.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = sol.u[i] * sol.mass[i];
  sol.identity_error = std::abs(r.alpha() * pairwise_sum(terms) - 1.0);
  return sol;
}

}  // namespace

ResolventSolution resolvent_kernel(const CellNetwork& net, MeasureKind measure, double alpha, std::size_t x) {
  const Resolvent r(net.graph, vertex_measure(net.graph, measure), alpha, net.normalization);
  return finish(r, measure, x);
}

ResolventSolution resolvent_kernel(const Network& net, const std::vector<double>& mass, double alpha, std::size_t x) {
  const Resolvent r(net, mass, alpha);
  return finish(r, MeasureKind::uniform, x);
}

namespace {

/// u(x_i, y_j) for each basepoint i and point j on a normalized network.
std::vector<double> kernel_table(const USCSpec& spec, int n, double alpha, const std::vector<std::size_t>& basepoints,
                                 const std::vector<std::size_t>& points) {
  CellNetwork net = build_cell_network(spec, n, family_scheme());
  net.normalization = side_resistance(net);
  const Resolvent r(net.graph, vertex_measure(net.graph, MeasureKind::uniform), alpha, net.normalization);
  std::vector<double> out;
  for (auto x : basepoints) {
    const auto u = r.kernel(x);
    for (auto y : points) out.push_back(u[y]);
  }
  return out;
}

}  // namespace

ResolventConvergenceReport resolvent_convergence(const FamilySpec& family, int n, double alpha,
                                                 const std::vector<Word>& basepoints,
                                                 const std::vector<Word>& points) {
  if (n < 1) throw InputError("resolvent_convergence needs level >= 1");
  const auto members = family.valid_members();
  if (members.empty()) throw InputError("family has no valid members");
  ResolventConvergenceReport rep;
  rep.level = n;
  rep.alpha = alpha;
  const CellGrid grid = build_cell_grid(family.limit, n);
  rep.points = points.empty() ? default_grid_words(grid) : points;
  if (basepoints.empty()) {
    rep.basepoints.assign(rep.points.begin(), rep.points.begin() + std::min<std::size_t>(4, rep.points.size()));
  } else {
    rep.basepoints = basepoints;
  }
  auto indices = [&](const std::vector<Word>& words) {
    std::vector<std::size_t> v;
    for (const auto& w : words) {
      if (static_cast<int>(w.size()) != n) throw InputError("word " + word_to_string(w) + " has the wrong length");
      v.push_back(grid.index(w));
    }
    return v;
  };
  const auto xs = indices(rep.basepoints), ys = indices(rep.points);
  const auto limit = kernel_table(family.limit, n, alpha, xs, ys);
  rep.rows.resize(members.size());
  parallel_for(members.size(), [&](std::size_t i) {
    const FamilyMember& mem = *members[i];
    const auto map = transport_cells(grid, match_ifs(family.limit, mem.spec).permutation);
    std::vector<std::size_t> mx, my;
    for (auto x : xs) mx.push_back(map[x]);
    for (auto y : ys) my.push_back(map[y]);
    const auto table = kernel_table(mem.spec, n, alpha, mx, my);
    double dev = 0.0;
    for (std::size_t j = 0; j < table.size(); ++j) dev = std::max(dev, std::abs(table[j] - limit[j]));
    rep.rows[i] = {mem.index, mem.parameter, dev};
  });
  const double first = rep.rows.front().deviation, last = rep.rows.back().deviation;
  rep.ratio = first > 0.0 ? last / first : (last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.trend = (first == 0.0 && last == 0.0) ? "zero" : ratio_trend(rep.ratio);
  return rep;
}

std::vector<std::size_t> geometric_times(std::size_t t_max, int per_decade) {
  std::vector<std::size_t> t{0};
  for (int i = 0;; ++i) {
    const double v = std::pow(10.0, static_cast<double>(i) / per_decade);
    const auto s = static_cast<std::size_t>(std::llround(v));
    if (s > t_max) break;
    if (s != t.back()) t.push_back(s);
  }
  if (t.back() != t_max) t.push_back(t_max);
  return t;
}

std::vector<std::size_t> default_basepoints(const CellGrid& grid) {
  std::vector<std::size_t> out;
  for (const auto& w : default_grid_words(grid)) {
    if (out.size() == 8) break;
    out.push_back(grid.index(w));
  }
  return out;
}

HeatKernelReport heat_kernel_diag(const CellNetwork& net, MeasureKind measure, const std::vector<std::size_t>& times,
                                  const std::vector<std::size_t>& basepoints, double fit_lo, double fit_hi) {
  if (times.empty()) throw InputError("heat_kernel_diag needs times");
  HeatKernelReport rep;
  rep.measure = measure;
  rep.fit_lo = fit_lo;
  rep.fit_hi = fit_hi;
  rep.basepoints = basepoints.empty() ? default_basepoints(net.grid) : basepoints;
  std::vector<std::size_t> ts = times;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  const TransitionOperator op = transition_operator(net.graph, measure, net.level());
  const Eigen::SparseMatrix<double> pt = op.p.transpose();
  std::vector<std::vector<double>> per(rep.basepoints.size(), std::vector<double>(ts.size()));
  parallel_for(rep.basepoints.size(), [&](std::size_t b) {
    const std::size_t x = rep.basepoints[b];
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.graph.size()));
    v[static_cast<Eigen::Index>(x)] = 1.0;
    std::size_t t = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (; t < ts[i]; ++t) {
        Eigen::VectorXd next = pt * v;
        v = 0.5 * (v + next);
      }
      per[b][i] = v[static_cast<Eigen::Index>(x)] / op.mass[x];
    }
  });
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<double> col(per.size());
    for (std::size_t b = 0; b < per.size(); ++b) col[b] = per[b][i];
    const double value = pairwise_sum(col) / static_cast<double>(col.size());
    rep.rows.push_back({ts[i], value});
    const double t = static_cast<double>(ts[i]);
    if (t >= fit_lo && t <= fit_hi && value > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(value));
    }
  }
  rep.fit_points = lx.size();
  if (lx.size() < 3) {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.intercept = std::numeric_limits<double>::quiet_NaN();
    rep.d_w_return = std::numeric_limits<double>::quiet_NaN();
    rep.note = "scaling window too narrow: fewer than 3 times in [fit_lo, fit_hi]";
    return rep;
  }
  const double n = static_cast<double>(lx.size());
  const double mx = pairwise_sum(lx) / n, my = pairwise_sum(ly) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  const double d_h = std::log(static_cast<double>(net.grid.n_maps)) / std::log(static_cast<double>(net.grid.k));
  rep.d_w_return = rep.slope < 0.0 ? -d_h / rep.slope : std::numeric_limits<double>::quiet_NaN();
  rep.note = "fit window [" + std::to_string(fit_lo) + ", " + std::to_string(fit_hi) + "] lazy steps";
  return rep;
}

}  // namespace usc
