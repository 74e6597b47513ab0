#include "usc/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Core>

#include "usc/errors.hpp"
#include "usc/laplacian.hpp"
#include "usc/parallel.hpp"

namespace usc {

std::vector<TestFunction> builtin_test_functions() {
  return {
      {"1", [](double, double) { return 1.0; }, 0.0},
      {"x1", [](double x, double) { return x; }, 1.0},
      {"x1x2", [](double x, double y) { return x * y; }, std::sqrt(2.0)},
      {"x1^2x2", [](double x, double y) { return x * x * y; }, std::sqrt(5.0)},
  };
}

TestFunction builtin_test_function(const std::string& name) {
  for (auto& f : builtin_test_functions()) {
    if (f.name == name) return f;
  }
  throw InputError("unknown test function '" + name + "' (expected 1, x1, x1x2, x1^2x2)");
}

std::vector<std::size_t> transport_cells(const CellGrid& limit, const std::vector<int>& permutation) {
  const std::size_t nm = static_cast<std::size_t>(limit.n_maps);
  if (permutation.size() != nm) throw InputError("permutation length differs from N");
  std::vector<std::size_t> out(limit.size());
  for (std::size_t c = 0; c < limit.size(); ++c) {
    std::size_t rest = c, mapped = 0, place = 1;
    for (int d = 0; d < limit.n; ++d) {
      const std::size_t letter = rest % nm;
      rest /= nm;
      const int target = permutation[letter];
      if (target < 1 || static_cast<std::size_t>(target) > nm) throw InputError("permutation entry out of range");
      mapped += static_cast<std::size_t>(target - 1) * place;
      place *= nm;
    }
    out[c] = mapped;
  }
  return out;
}

namespace {

std::vector<const FamilyMember*> members_or_throw(const FamilySpec& family) {
  auto members = family.valid_members();
  if (members.empty()) throw InputError("family has no valid members");
  return members;
}

void check_shrinking(const std::vector<double>& lo) {
  if (lo.size() >= 2 && lo.back() > lo.front() + 1e-12) {
    throw DegenerateError("family does not approach its limit in Hausdorff distance");
  }
}

double mean_over_corners(const CellGrid& g, const std::function<double(double, double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const PointD p = g.lower_left(i);
    v[i] = f(p.x, p.y);
  }
  return pairwise_sum(v) / static_cast<double>(g.size());
}

}  // namespace

MeasureReport measure_convergence(const FamilySpec& family, int m, const std::vector<TestFunction>& functions) {
  if (m < 0) throw InputError("negative level");
  const auto members = members_or_throw(family);
  MeasureReport rep;
  rep.m = m;
  const CellGrid limit = build_cell_grid(family.limit, m);
  const double cell_diam = std::sqrt(2.0) * limit.side();
  std::vector<double> limit_means;
  for (const auto& f : functions) {
    rep.functions.push_back(f.name);
    rep.oscillation.push_back(f.lipschitz * cell_diam);
    limit_means.push_back(mean_over_corners(limit, f.f));
  }
  rep.rows.resize(members.size());
  parallel_for(members.size(), [&](std::size_t i) {
    const FamilyMember& mem = *members[i];
    const CellGrid g = build_cell_grid(mem.spec, m);
    const double d = match_ifs(family.limit, mem.spec).max_pair_distance;
    MeasureRow& row = rep.rows[i];
    row.index = mem.index;
    row.parameter = mem.parameter;
    for (std::size_t j = 0; j < functions.size(); ++j) {
      row.discrepancy.push_back(std::abs(mean_over_corners(g, functions[j].f) - limit_means[j]));
      row.bound.push_back(2.0 * functions[j].lipschitz * d + 2.0 * rep.oscillation[j]);
    }
  });
  for (std::size_t j = 0; j < functions.size(); ++j) {
    bool ok = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      ok = ok && rep.rows[i].discrepancy[j] <= rep.rows[i - 1].discrepancy[j] + 1e-12;
    }
    rep.monotone.push_back(ok);
  }
  return rep;
}

std::string ratio_trend(double ratio, double decreasing_ratio) {
  if (!std::isfinite(ratio)) return "undecided";
  if (ratio <= decreasing_ratio) return "decreasing";
  if (ratio > 0.5) return "not decreasing";
  return "undecided";
}

ConductanceScheme family_scheme() {
  ConductanceScheme s;
  s.mode = ConductanceScheme::Mode::overlap_weighted;
  s.point_contact_conductance = 1.0;
  return s;
}

std::vector<Word> default_grid_words(const CellGrid& limit) {
  if (limit.n < 1) throw InputError("grid words need level >= 1");
  std::vector<std::size_t> cells;
  const int nm = limit.n_maps;
  for (int t = 0; t < 8; ++t) {
    Word w(limit.n, 1);
    w[0] = 1 + (t * nm) / 8;
    cells.push_back(limit.index(w));
  }
  int contacts = 0;
  for (const auto& c : grid_contacts(limit)) {
    if (contacts == 4) break;
    if (c.overlap != 0) continue;
    if (limit.word(c.a)[0] == limit.word(c.b)[0]) continue;
    cells.push_back(c.a);
    cells.push_back(c.b);
    ++contacts;
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  std::vector<Word> out;
  for (auto c : cells) out.push_back(limit.word(c));
  return out;
}

namespace {

/// Normalized pairwise resistances among the given vertices.
std::vector<double> pairwise_resistances(const CellNetwork& net, const std::vector<std::size_t>& vertices) {
  std::vector<char> fixed(net.graph.size(), 0);
  fixed[0] = 1;
  const GroundedSolver solver(net.graph, fixed);
  const auto& pos = solver.free_position();
  const std::size_t p = vertices.size();
  const Eigen::Index nf = static_cast<Eigen::Index>(solver.free_vertices().size());
  std::vector<Eigen::VectorXd> cols(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (pos[vertices[i]] < 0) {
      cols[i] = Eigen::VectorXd::Zero(nf);
      continue;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    rhs[pos[vertices[i]]] = 1.0;
    cols[i] = solver.solve(rhs);
  }
  auto green = [&](std::size_t i, std::size_t j) { return pos[vertices[j]] < 0 ? 0.0 : cols[i][pos[vertices[j]]]; };
  std::vector<double> out;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const double gij = 0.5 * (green(i, j) + green(j, i));
      out.push_back((green(i, i) + green(j, j) - 2.0 * gij) / net.normalization);
    }
  }
  return out;
}

CellNetwork normalized(const USCSpec& spec, int n, const ConductanceScheme& scheme, double* r_hat) {
  CellNetwork net = build_cell_network(spec, n, scheme);
  net.normalization = side_resistance(net);
  if (r_hat) {
    const CellNetwork prev = build_cell_network(spec, n - 1, scheme);
    *r_hat = side_resistance(prev) / net.normalization;
  }
  return net;
}

}  // namespace

ResistanceConvergenceReport resistance_convergence(const FamilySpec& family, int n, const std::vector<Word>& points) {
  if (n < 1) throw InputError("resistance_convergence needs level >= 1");
  const auto members = members_or_throw(family);
  const ConductanceScheme scheme = family_scheme();
  ResistanceConvergenceReport rep;
  rep.level = n;
  rep.note = "grid transport by matched words tests a canonical subfamily of convergent point sequences";

  const CellNetwork limit = normalized(family.limit, n, scheme, &rep.limit_r_hat);
  rep.points = points.empty() ? default_grid_words(limit.grid) : points;
  std::vector<std::size_t> limit_vertices;
  for (const auto& w : rep.points) {
    if (static_cast<int>(w.size()) != n) throw InputError("grid word " + word_to_string(w) + " has the wrong length");
    limit_vertices.push_back(limit.grid.index(w));
  }
  const auto limit_r = pairwise_resistances(limit, limit_vertices);
  rep.pairs = limit_r.size();

  rep.rows.resize(members.size());
  parallel_for(members.size(), [&](std::size_t i) {
    const FamilyMember& mem = *members[i];
    ResistanceRow& row = rep.rows[i];
    row.index = mem.index;
    row.parameter = mem.parameter;
    const HausdorffInterval hd = hausdorff_distance(mem.spec, family.limit, n);
    row.hausdorff_lo = hd.lo;
    row.hausdorff_hi = hd.hi;
    const CellNetwork net = normalized(mem.spec, n, scheme, &row.r_hat);
    const auto map = transport_cells(limit.grid, match_ifs(family.limit, mem.spec).permutation);
    std::vector<std::size_t> vertices;
    for (auto v : limit_vertices) vertices.push_back(map[v]);
    const auto r = pairwise_resistances(net, vertices);
    double dev = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) dev = std::max(dev, std::abs(r[j] - limit_r[j]));
    row.deviation = dev;
  });
  std::vector<double> lo;
  for (const auto& r : rep.rows) lo.push_back(r.hausdorff_lo);
  check_shrinking(lo);
  const double first = rep.rows.front().deviation, last = rep.rows.back().deviation;
  rep.ratio = first > 0.0 ? last / first : (last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.trend = (first == 0.0 && last == 0.0) ? "zero" : ratio_trend(rep.ratio);
  return rep;
}

std::vector<double> harmonic_x1(const CellNetwork& net) {
  std::vector<std::uint32_t> boundary;
  for (int side = 1; side <= 4; ++side) {
    const auto b = grid_boundary_cells(net.grid, side);
    boundary.insert(boundary.end(), b.begin(), b.end());
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  std::vector<double> values;
  for (auto c : boundary) values.push_back(net.grid.center(c).x);
  return harmonic_extension(net.graph, boundary, values).potential;
}

GammaLiminfReport gamma_liminf_check(const FamilySpec& family, int n, const std::vector<double>& f_limit) {
  const auto members = members_or_throw(family);
  const ConductanceScheme scheme = family_scheme();
  GammaLiminfReport rep;
  rep.level = n;
  rep.note = "partial check: liminf inequality on word-transported sequences only";
  const CellNetwork limit = normalized(family.limit, n, scheme, nullptr);
  if (f_limit.size() != limit.graph.size()) throw InputError("f must have one value per limit cell");
  rep.limit_energy = limit.normalization * edge_energy(limit.graph, f_limit);
  rep.member_energies.resize(members.size());
  for (auto* m : members) rep.indices.push_back(m->index);
  parallel_for(members.size(), [&](std::size_t i) {
    const FamilyMember& mem = *members[i];
    const CellNetwork net = normalized(mem.spec, n, scheme, nullptr);
    const auto matching = match_ifs(family.limit, mem.spec);
    if (static_cast<int>(matching.permutation.size()) != family.limit.n_maps()) {
      throw InputError("word transport failed for member " + std::to_string(mem.index));
    }
    const auto map = transport_cells(limit.grid, matching.permutation);
    std::vector<double> g(net.graph.size());
    for (std::size_t c = 0; c < map.size(); ++c) g[map[c]] = f_limit[c];
    rep.member_energies[i] = net.normalization * edge_energy(net.graph, g);
  });
  const std::size_t half = rep.member_energies.size() / 2;
  rep.liminf = *std::min_element(rep.member_energies.begin() + static_cast<std::ptrdiff_t>(half),
                                 rep.member_energies.end());
  rep.margin = rep.liminf - rep.limit_energy;
  rep.holds = rep.limit_energy <= rep.liminf + 1e-12 * std::max(1.0, std::abs(rep.limit_energy));
  return rep;
}

}  // namespace usc
