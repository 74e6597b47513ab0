#include "usc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "usc/cell_grid.hpp"
#include "usc/errors.hpp"
#include "usc/parallel.hpp"

namespace usc {

namespace {

std::size_t ipow(int k, int e) {
  std::size_t v = 1;
  for (int i = 0; i < e; ++i) v *= static_cast<std::size_t>(k);
  return v;
}

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw InputError("renormalization factor r must lie in (0, 1)");
}

}  // namespace

DyadicFunction sample_dyadic(const std::function<double(double)>& u, int k, int m) {
  DyadicFunction f;
  f.k = k;
  f.m = m;
  const std::size_t n = ipow(k, m);
  f.values.resize(n + 1);
  for (std::size_t l = 0; l <= n; ++l) f.values[l] = u(static_cast<double>(l) / static_cast<double>(n));
  return f;
}

double besov_line_seminorm(const DyadicFunction& u, double r) {
  check_r(r);
  const std::size_t top = ipow(u.k, u.m);
  if (u.values.size() != top + 1) throw InputError("dyadic function needs k^M + 1 values");
  double total = 0.0;
  for (int j = 0; j <= u.m; ++j) {
    const std::size_t stride = ipow(u.k, u.m - j);
    double level = 0.0;
    for (std::size_t l = 0; l + stride <= top; l += stride) {
      const double d = u.values[l] - u.values[l + stride];
      level += d * d;
    }
    total += std::pow(r, -j) * level;
  }
  return std::sqrt(total);
}

double besov_segment_seminorm(const DyadicFunction& u, double r, double length) {
  if (!(length > 0.0)) throw InputError("segment length must be positive");
  return besov_line_seminorm(u, r) * std::pow(length, std::log(r) / (2.0 * std::log(static_cast<double>(u.k))));
}

double besov_tail_bound(double r, int k, int m, double lipschitz) {
  check_r(r);
  const double q = 1.0 / (r * k);
  if (!(q < 1.0)) throw InputError("tail bound needs r k > 1");
  return lipschitz * lipschitz * std::pow(q, m + 1) / (1.0 - q);
}

double besov_boundary_seminorm(const std::function<double(const PointD&)>& f, const USCSpec& spec, int n, double r,
                               int m) {
  check_r(r);
  const CellGrid g = build_cell_grid(spec, n);
  const double side = g.side();
  const std::size_t top = ipow(spec.k, m);
  std::vector<double> per_cell(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    const PointD c = g.lower_left(i);
    const PointD q[5] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    double acc = 0.0;
    for (int s = 0; s < 4; ++s) {
      DyadicFunction u;
      u.k = spec.k;
      u.m = m;
      u.values.resize(top + 1);
      for (std::size_t l = 0; l <= top; ++l) {
        const double t = static_cast<double>(l) / static_cast<double>(top);
        const double x = q[s].x + t * (q[s + 1].x - q[s].x);
        const double y = q[s].y + t * (q[s + 1].y - q[s].y);
        u.values[l] = f({c.x + side * x, c.y + side * y});
      }
      const double v = besov_line_seminorm(u, r);
      acc += v * v;
    }
    per_cell[i] = acc;
  });
  return std::sqrt(pairwise_sum(per_cell));
}

BrickFunction sample_brick_function(const std::function<double(double, double)>& f, int k, int m) {
  BrickFunction b;
  b.k = k;
  b.m = m;
  for (int j = 0; j <= m + 1; ++j) {
    const std::size_t n = ipow(k, j);
    const double y = std::pow(static_cast<double>(k), -(j + 1));
    std::vector<double> row(n + 1);
    for (std::size_t l = 0; l <= n; ++l) row[l] = f(static_cast<double>(l) / static_cast<double>(n), y);
    b.rows.push_back(std::move(row));
  }
  const std::size_t n = ipow(k, m);
  b.base.resize(n + 1);
  for (std::size_t l = 0; l <= n; ++l) b.base[l] = f(static_cast<double>(l) / static_cast<double>(n), 0.0);
  return b;
}

BrickGraph brick_graph(int k, int m) {
  if (k < 2 || m < 0) throw InputError("brick graph needs k >= 2, M >= 0");
  BrickGraph g;
  g.k = k;
  g.m = m;
  for (int j = 0; j <= m + 1; ++j) {
    g.row_offset.push_back(g.vertices.size());
    const std::size_t n = ipow(k, j);
    const double y = std::pow(static_cast<double>(k), -(j + 1));
    for (std::size_t l = 0; l <= n; ++l) g.vertices.push_back({static_cast<double>(l) / static_cast<double>(n), y});
  }
  for (int lev = 0; lev <= m; ++lev) {
    const std::size_t bricks = ipow(k, lev);
    for (std::size_t b = 0; b < bricks; ++b) {
      auto add = [&](std::size_t u, std::size_t v) {
        g.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), lev});
      };
      add(g.vertex(lev, b), g.vertex(lev, b + 1));
      add(g.vertex(lev, b), g.vertex(lev + 1, b * k));
      add(g.vertex(lev, b + 1), g.vertex(lev + 1, (b + 1) * k));
      for (int i = 0; i < k; ++i) add(g.vertex(lev + 1, b * k + i), g.vertex(lev + 1, b * k + i + 1));
    }
  }
  return g;
}

BrickGraph brick_base_graph(int k) { return brick_graph(k, 0); }

namespace {

/// Squared edge differences of every brick, grouped by level.
std::vector<double> level_sums(const BrickFunction& f) {
  if (static_cast<int>(f.rows.size()) != f.m + 2) throw InputError("brick function needs rows 0..M+1");
  std::vector<double> out(f.m + 1, 0.0);
  const int k = f.k;
  for (int lev = 0; lev <= f.m; ++lev) {
    const auto& top = f.rows[lev];
    const auto& bot = f.rows[lev + 1];
    if (top.size() != ipow(k, lev) + 1 || bot.size() != ipow(k, lev + 1) + 1) {
      throw InputError("brick function row has the wrong length");
    }
    std::vector<double> terms;
    terms.reserve(top.size() * (k + 3));
    for (std::size_t b = 0; b + 1 < top.size(); ++b) {
      auto sq = [&](double a, double c) { terms.push_back((a - c) * (a - c)); };
      sq(top[b], top[b + 1]);
      sq(top[b], bot[b * k]);
      sq(top[b + 1], bot[(b + 1) * k]);
      for (int i = 0; i < k; ++i) sq(bot[b * k + i], bot[b * k + i + 1]);
    }
    out[lev] = pairwise_sum(terms);
  }
  return out;
}

}  // namespace

double brick_graph_energy(const BrickFunction& f, double r) {
  check_r(r);
  const auto sums = level_sums(f);
  double e = 0.0;
  for (int lev = 0; lev <= f.m; ++lev) e += std::pow(r, -lev) * sums[lev];
  return e;
}

std::vector<double> brick_level_norms(const BrickFunction& f) {
  auto sums = level_sums(f);
  for (auto& s : sums) s = std::sqrt(s);
  return sums;
}

double line_increment_norm(const BrickFunction& f, int n) {
  if (n < 0 || n > f.m) throw InputError("D_n needs 0 <= n <= M");
  const std::size_t stride = ipow(f.k, f.m - n);
  double s = 0.0;
  for (std::size_t l = 0; l + stride < f.base.size(); l += stride) {
    const double d = f.base[l] - f.base[l + stride];
    s += d * d;
  }
  return std::sqrt(s);
}

RestrictionReport check_restriction(const BrickFunction& f) {
  const auto norms = brick_level_norms(f);
  RestrictionReport rep;
  rep.holds = true;
  for (int n = 0; n <= f.m; ++n) {
    RestrictionRow row;
    row.n = n;
    row.lhs = line_increment_norm(f, n);
    for (int j = n; j <= f.m; ++j) row.rhs += norms[j];
    const std::size_t pts = ipow(f.k, n);
    const std::size_t base_stride = ipow(f.k, f.m - n);
    const std::size_t deep_stride = ipow(f.k, f.m + 1 - n);
    double tail = 0.0;
    for (std::size_t l = 0; l <= pts; ++l) {
      const double d = f.base[l * base_stride] - f.rows[f.m + 1][l * deep_stride];
      tail += d * d;
    }
    row.slack = 2.0 * std::sqrt(tail);
    row.holds = row.lhs <= 3.0 * row.rhs + row.slack + 1e-12;
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

double boundary_trace_seminorm_sq(const CellGrid& g, const std::vector<double>& cell_values, double r) {
  check_r(r);
  const std::size_t kn = ipow(g.k, g.n);
  double total = 0.0;
  for (int side = 1; side <= 4; ++side) {
    // Position along the side in cell widths: x for horizontal sides, y for vertical ones.
    const int axis = (side == 1 || side == 3) ? 0 : 1;
    std::vector<double> cell(kn, std::numeric_limits<double>::quiet_NaN());
    for (auto c : grid_boundary_cells(g, side)) {
      const std::int64_t pos = g.corner[c][axis];
      if (pos % g.s != 0) throw InputError("boundary cells are not on the k^-n grid");
      cell[static_cast<std::size_t>(pos / g.s)] = cell_values[c];
    }
    DyadicFunction u;
    u.k = g.k;
    u.m = g.n;
    u.values.resize(kn + 1);
    for (std::size_t l = 0; l <= kn; ++l) {
      double s = 0.0;
      int cnt = 0;
      if (l > 0 && !std::isnan(cell[l - 1])) {
        s += cell[l - 1];
        ++cnt;
      }
      if (l < kn && !std::isnan(cell[l])) {
        s += cell[l];
        ++cnt;
      }
      if (cnt == 0) throw InputError("boundary side is not covered by cells");
      u.values[l] = s / cnt;
    }
    const double v = besov_line_seminorm(u, r);
    total += v * v;
  }
  return total;
}

RestrictionRatioReport restriction_ratio(const USCSpec& spec, const std::vector<int>& levels, std::size_t samples,
                                         std::uint64_t seed, double r, const ConductanceScheme& scheme) {
  if (levels.empty() || samples == 0) throw InputError("restriction_ratio needs levels and samples");
  RestrictionRatioReport rep;
  const int top = *std::max_element(levels.begin(), levels.end());
  rep.r = r > 0.0 ? r : estimate_renorm(spec, std::max(2, top), scheme).r_hat;
  rep.levels = levels;
  // Coefficients of sum_{a+b<=3} c_ab x^a y^b, shared across levels.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::array<double, 10>> coeffs(samples);
  for (auto& c : coeffs) {
    for (auto& v : c) v = normal(rng);
  }
  auto poly = [](const std::array<double, 10>& c, double x, double y) {
    return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
           c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
  };
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (int n : levels) {
    CellNetwork net = build_cell_network(spec, n, scheme);
    net.normalization = side_resistance(net);
    std::vector<std::uint32_t> boundary;
    for (int side = 1; side <= 4; ++side) {
      const auto b = grid_boundary_cells(net.grid, side);
      boundary.insert(boundary.end(), b.begin(), b.end());
    }
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    std::vector<double> row(samples);
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<double> values(boundary.size());
      for (std::size_t i = 0; i < boundary.size(); ++i) {
        const PointD c = net.grid.center(boundary[i]);
        values[i] = poly(coeffs[s], c.x, c.y);
      }
      const auto sol = harmonic_extension(net.graph, boundary, values);
      const double energy = net.normalization * sol.energy;
      if (!(energy > 0.0)) throw DegenerateError("constant boundary data");
      row[s] = boundary_trace_seminorm_sq(net.grid, sol.potential, rep.r) / energy;
      rep.min_ratio = std::min(rep.min_ratio, row[s]);
      rep.max_ratio = std::max(rep.max_ratio, row[s]);
    }
    rep.ratios.push_back(std::move(row));
  }
  rep.spread = rep.max_ratio / rep.min_ratio;
  return rep;
}

double besov_2inf_seminorm(const CellGrid& g, const std::vector<double>& f, double sigma, double d_h) {
  if (g.n < 2) throw InputError("besov_2inf_seminorm needs n >= 2");
  if (f.size() != g.size()) throw InputError("one value per cell expected");
  const double pairs = static_cast<double>(g.size()) * static_cast<double>(g.size());
  if (pairs > 4e9) throw BudgetExceeded("too many cell pairs for the double integral");
  const double mu = 1.0 / static_cast<double>(g.size());
  std::vector<PointD> c(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) c[i] = g.center(i);
  double best = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double rho = std::pow(static_cast<double>(g.k), -j);
    std::vector<double> rows(g.size());
    parallel_for(g.size(), [&](std::size_t a) {
      double s = 0.0;
      for (std::size_t b = 0; b < g.size(); ++b) {
        if (distance(c[a], c[b]) < rho) {
          const double d = f[a] - f[b];
          s += d * d;
        }
      }
      rows[a] = s;
    });
    const double integral = pairwise_sum(rows) * mu * mu;
    best = std::max(best, std::pow(rho, -2.0 * sigma - d_h) * integral);
  }
  return std::sqrt(best);
}

SigmaScan critical_sigma_scan(const USCSpec& spec, const std::vector<int>& levels, const std::vector<double>& sigmas,
                              double growth_threshold, const ConductanceScheme& scheme) {
  if (levels.size() < 2) throw InputError("critical_sigma_scan needs at least two levels");
  for (int n : levels) {
    if (n < 2) throw InputError("critical_sigma_scan needs levels >= 2");
  }
  SigmaScan scan;
  scan.levels = levels;
  const int top = *std::max_element(levels.begin(), levels.end());
  const RenormEstimate renorm = estimate_renorm(spec, top, scheme);
  scan.half_walk_dimension = renorm.d_w / 2.0;
  std::vector<CellGrid> grids;
  std::vector<std::vector<double>> proxies;
  for (int n : levels) {
    const CellNetwork net = build_cell_network(spec, n, scheme);
    const auto sol = solve_dirichlet(net.graph, {grid_boundary_cells(net.grid, 4), grid_boundary_cells(net.grid, 2)});
    grids.push_back(net.grid);
    proxies.push_back(sol.potential);
  }
  std::vector<double> sorted = sigmas;
  std::sort(sorted.begin(), sorted.end());
  scan.bracket_lo = std::numeric_limits<double>::quiet_NaN();
  scan.bracket_hi = std::numeric_limits<double>::quiet_NaN();
  for (double sigma : sorted) {
    SigmaScanRow row;
    row.sigma = sigma;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      row.values.push_back(besov_2inf_seminorm(grids[i], proxies[i], sigma, renorm.d_h));
    }
    row.growth = row.values.back() / row.values.front();
    row.verdict = row.growth > growth_threshold ? "growing" : "stable";
    if (row.verdict == "stable" && std::isnan(scan.bracket_hi)) scan.bracket_lo = sigma;
    if (row.verdict == "growing" && std::isnan(scan.bracket_hi)) scan.bracket_hi = sigma;
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

}  // namespace usc
