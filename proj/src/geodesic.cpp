#include "usc/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>

#include "usc/cell_grid.hpp"
#include "usc/errors.hpp"
#include "usc/family.hpp"
#include "usc/parallel.hpp"

namespace usc {

namespace {

using Interval = std::array<std::int64_t, 2>;
using LineMap = std::unordered_map<std::int64_t, std::vector<Interval>>;

struct PairHash {
  std::size_t operator()(const std::array<std::int64_t, 2>& p) const {
    const std::uint64_t a = static_cast<std::uint64_t>(p[0]) * 0x9E3779B97F4A7C15ULL;
    return static_cast<std::size_t>(a ^ (static_cast<std::uint64_t>(p[1]) + 0x7F4A7C159E3779B9ULL + (a << 6) + (a >> 2)));
  }
};

std::int64_t checked(const mpz_class& v) {
  if (!v.fits_slong_p() || abs(v) >= (mpz_class(1) << 62)) {
    throw BudgetExceeded("skeleton coordinates exceed 2^62; lower the level");
  }
  return v.get_si();
}

void merge(std::vector<Interval>& v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv[0] <= out.back()[1]) {
      out.back()[1] = std::max(out.back()[1], iv[1]);
    } else {
      out.push_back(iv);
    }
  }
  v.swap(out);
}

/// Merged interval containing t, or nullptr.
const Interval* covering(const std::vector<Interval>& v, std::int64_t t) {
  auto it = std::upper_bound(v.begin(), v.end(), t, [](std::int64_t x, const Interval& iv) { return x < iv[0]; });
  if (it == v.begin()) return nullptr;
  --it;
  return t <= (*it)[1] ? &*it : nullptr;
}

const std::vector<Interval>* line(const LineMap& m, std::int64_t key) {
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

std::vector<double> dijkstra(const SkeletonGraph& g, std::size_t source, std::size_t target) {
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == target) break;
    for (const auto& [w, len] : g.adjacency[v]) {
      const double nd = d + len;
      if (nd < dist[w]) {
        dist[w] = nd;
        pq.emplace(nd, w);
      }
    }
  }
  const double u = static_cast<double>(g.unit);
  for (auto& d : dist) d /= u;
  return dist;
}

}  // namespace

std::size_t SkeletonGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& a : adjacency) e += a.size();
  return e / 2;
}

std::size_t SkeletonGraph::vertex_at(const Point& p) const {
  const mpq_class sx = p.x.value() * unit;
  const mpq_class sy = p.y.value() * unit;
  if (sx.get_den() != 1 || sy.get_den() != 1) return npos;
  if (!sx.get_num().fits_slong_p() || !sy.get_num().fits_slong_p()) return npos;
  const std::array<std::int64_t, 2> key{sx.get_num().get_si(), sy.get_num().get_si()};
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), key,
                             [](const auto& e, const std::array<std::int64_t, 2>& k) { return e.first < k; });
  if (it == lookup_.end() || it->first != key) return npos;
  return it->second;
}

std::size_t SkeletonGraph::nearest(const PointD& p, double* snap) const {
  std::size_t best = npos;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = usc::distance(p, points[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  if (snap) *snap = bd;
  return best;
}

bool SkeletonGraph::covers(const PointD& p, double tol) const {
  const double u = static_cast<double>(unit);
  const double sx = p.x * u, sy = p.y * u;
  const double rx = std::round(sx), ry = std::round(sy);
  if (std::abs(sy - ry) <= tol * u) {
    if (const auto* l = line(horizontal, static_cast<std::int64_t>(ry))) {
      for (const auto& iv : *l) {
        if (sx >= iv[0] - tol * u && sx <= iv[1] + tol * u) return true;
      }
    }
  }
  if (std::abs(sx - rx) <= tol * u) {
    if (const auto* l = line(vertical, static_cast<std::int64_t>(rx))) {
      for (const auto& iv : *l) {
        if (sy >= iv[0] - tol * u && sy <= iv[1] + tol * u) return true;
      }
    }
  }
  return false;
}

std::vector<double> SkeletonGraph::distances_from(std::size_t source) const {
  if (source >= size()) throw InputError("source vertex not on skeleton");
  return dijkstra(*this, source, npos);
}

double SkeletonGraph::distance(std::size_t a, std::size_t b) const {
  if (a >= size() || b >= size()) throw InputError("query vertex not on skeleton");
  if (a == b) return 0.0;
  const double d = dijkstra(*this, a, b)[b];
  if (!std::isfinite(d)) throw DisconnectedError("skeleton vertices are not connected");
  return d;
}

SkeletonGraph build_skeleton(const USCSpec& spec, int m, const SkeletonOptions& options) {
  if (m < 0) throw InputError("negative skeleton level");
  const std::size_t budget = options.budget ? options.budget : default_cell_budget();
  const CellGrid grid = build_cell_grid(spec, m, budget);
  const int sub = options.subdivision > 0 ? options.subdivision : spec.k;

  mpz_class denom = mpz_class(static_cast<long>(grid.q)) * sub;
  for (const auto& p : options.pins) {
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.x.denominator().get_mpz_t());
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.y.denominator().get_mpz_t());
  }
  SkeletonGraph g;
  g.level = m;
  g.square_crossings = options.square_crossings;
  g.unit = checked(denom);
  const std::int64_t factor = g.unit / grid.q;
  const std::int64_t side = grid.s * factor;
  const std::int64_t h = side / sub;
  g.spacing = static_cast<double>(h) / static_cast<double>(g.unit);

  LineMap& hl = g.horizontal;
  LineMap& vl = g.vertical;
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> hp, vp;
  std::vector<std::array<std::int64_t, 2>> squares(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int64_t x = grid.corner[i][0] * factor, y = grid.corner[i][1] * factor;
    squares[i] = {x, y};
    for (std::int64_t yy : {y, y + side}) {
      hl[yy].push_back({x, x + side});
      hp[yy].push_back(x);
      hp[yy].push_back(x + side);
    }
    for (std::int64_t xx : {x, x + side}) {
      vl[xx].push_back({y, y + side});
      vp[xx].push_back(y);
      vp[xx].push_back(y + side);
    }
  }
  for (auto& [k, v] : hl) merge(v);
  for (auto& [k, v] : vl) merge(v);
  auto add_grid_points = [h](const LineMap& lines, auto& pts) {
    for (const auto& [key, ivs] : lines) {
      auto& p = pts[key];
      for (const auto& iv : ivs) {
        const std::int64_t first = (iv[0] + h - 1) / h * h;
        for (std::int64_t t = first; t <= iv[1]; t += h) p.push_back(t);
      }
    }
  };
  add_grid_points(hl, hp);
  add_grid_points(vl, vp);

  for (const auto& pin : options.pins) {
    const std::int64_t px = checked(mpz_class(pin.x.value() * g.unit));
    const std::int64_t py = checked(mpz_class(pin.y.value() * g.unit));
    bool placed = false;
    if (const auto* l = line(hl, py); l && covering(*l, px)) {
      hp[py].push_back(px);
      placed = true;
    }
    if (const auto* l = line(vl, px); l && covering(*l, py)) {
      vp[px].push_back(py);
      placed = true;
    }
    if (!placed) {
      throw InputError("pinned point (" + pin.x.to_string() + ", " + pin.y.to_string() +
                       ") is not on the level-" + std::to_string(m) + " skeleton");
    }
  }

  std::unordered_map<std::array<std::int64_t, 2>, std::uint32_t, PairHash> ids;
  auto vertex = [&](std::int64_t x, std::int64_t y) -> std::uint32_t {
    auto [it, inserted] = ids.try_emplace({x, y}, static_cast<std::uint32_t>(g.coords.size()));
    if (inserted) {
      if (g.coords.size() >= budget * 8) throw BudgetExceeded("skeleton vertex count exceeds budget");
      g.coords.push_back({x, y});
    }
    return it->second;
  };
  std::vector<std::array<std::uint32_t, 2>> edges;
  // Deterministic vertex numbering: lines in increasing key order.
  auto sorted_keys = [](const auto& m) {
    std::vector<std::int64_t> keys;
    for (const auto& kv : m) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  for (int orient = 0; orient < 2; ++orient) {
    auto& pts = orient == 0 ? hp : vp;
    const LineMap& lines = orient == 0 ? hl : vl;
    for (std::int64_t key : sorted_keys(pts)) {
      auto& p = pts[key];
      std::sort(p.begin(), p.end());
      p.erase(std::unique(p.begin(), p.end()), p.end());
      const auto& ivs = lines.at(key);
      std::uint32_t prev = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const std::uint32_t id = orient == 0 ? vertex(p[i], key) : vertex(key, p[i]);
        if (i > 0) {
          const Interval* c = covering(ivs, p[i - 1]);
          if (c && p[i] <= (*c)[1]) edges.push_back({prev, id});
        }
        prev = id;
      }
    }
  }

  if (options.square_crossings) {
    auto on_segment = [&](const auto& pts, std::int64_t key, std::int64_t a, std::int64_t b, bool horizontal_line,
                          std::vector<std::uint32_t>& out) {
      const auto& p = pts.at(key);
      for (auto it = std::lower_bound(p.begin(), p.end(), a); it != p.end() && *it <= b; ++it) {
        out.push_back(horizontal_line ? ids.at({*it, key}) : ids.at({key, *it}));
      }
    };
    std::vector<std::uint32_t> boundary;
    for (const auto& sq : squares) {
      const std::int64_t x = sq[0], y = sq[1];
      boundary.clear();
      on_segment(hp, y, x, x + side, true, boundary);
      on_segment(hp, y + side, x, x + side, true, boundary);
      on_segment(vp, x, y, y + side, false, boundary);
      on_segment(vp, x + side, y, y + side, false, boundary);
      std::sort(boundary.begin(), boundary.end());
      boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
      for (std::size_t a = 0; a < boundary.size(); ++a) {
        for (std::size_t b = a + 1; b < boundary.size(); ++b) {
          const auto& ca = g.coords[boundary[a]];
          const auto& cb = g.coords[boundary[b]];
          if (ca[0] == cb[0] || ca[1] == cb[1]) continue;
          edges.push_back({boundary[a], boundary[b]});
        }
      }
    }
  }

  g.lookup_.reserve(g.coords.size());
  for (std::size_t i = 0; i < g.coords.size(); ++i) g.lookup_.emplace_back(g.coords[i], static_cast<std::uint32_t>(i));
  std::sort(g.lookup_.begin(), g.lookup_.end());
  const double u = static_cast<double>(g.unit);
  g.points.resize(g.coords.size());
  for (std::size_t i = 0; i < g.coords.size(); ++i) {
    g.points[i] = {static_cast<double>(g.coords[i][0]) / u, static_cast<double>(g.coords[i][1]) / u};
  }
  g.adjacency.assign(g.coords.size(), {});
  for (const auto& e : edges) {
    const double dx = static_cast<double>(g.coords[e[0]][0] - g.coords[e[1]][0]);
    const double dy = static_cast<double>(g.coords[e[0]][1] - g.coords[e[1]][1]);
    const double len = std::hypot(dx, dy);
    g.adjacency[e[0]].emplace_back(e[1], len);
    g.adjacency[e[1]].emplace_back(e[0], len);
  }
  return g;
}

GeodesicEstimate geodesic_estimate(const SkeletonGraph& skel, const PointD& x, const PointD& y) {
  GeodesicEstimate est;
  est.level = skel.level;
  est.lower = distance(x, y);
  const std::size_t a = skel.nearest(x, &est.snap_x);
  const std::size_t b = skel.nearest(y, &est.snap_y);
  est.upper = skel.distance(a, b);
  return est;
}

GeodesicEstimate geodesic_estimate(const USCSpec& spec, int m, const Point& x, const Point& y) {
  SkeletonOptions opts;
  opts.pins = {x, y};
  const SkeletonGraph skel = build_skeleton(spec, m, opts);
  GeodesicEstimate est;
  est.level = m;
  est.lower = distance(to_double(x), to_double(y));
  est.upper = skel.distance(skel.vertex_at(x), skel.vertex_at(y));
  return est;
}

ComparabilityConstant comparability_constant(const USCSpec& spec, int c0_level) {
  ComparabilityConstant c;
  c.c_prime = 4.0 * spec.n_maps() / (spec.k - 1);
  c.c0 = estimate_c0(spec, c0_level).value;
  c.c = (2.0 * c.c_prime + 12.0) / c.c0;
  return c;
}

std::vector<ModulusRow> continuity_modulus(const SkeletonGraph& skel, const std::vector<double>& etas,
                                           std::size_t sources, std::uint64_t seed) {
  std::vector<double> sorted = etas;
  std::sort(sorted.begin(), sorted.end());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, skel.size() - 1);
  std::vector<std::size_t> src(sources);
  for (auto& s : src) s = pick(rng);
  std::vector<std::vector<double>> best(sources, std::vector<double>(sorted.size(), 0.0));
  std::vector<std::vector<std::size_t>> counts(sources, std::vector<std::size_t>(sorted.size(), 0));
  parallel_for(sources, [&](std::size_t s) {
    const auto dist = skel.distances_from(src[s]);
    for (std::size_t v = 0; v < skel.size(); ++v) {
      const double e = distance(skel.points[src[s]], skel.points[v]);
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (e < sorted[i]) {
          best[s][i] = std::max(best[s][i], dist[v]);
          ++counts[s][i];
        }
      }
    }
  });
  std::vector<ModulusRow> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out[i].eta = sorted[i];
    for (std::size_t s = 0; s < sources; ++s) {
      out[i].value = std::max(out[i].value, best[s][i]);
      out[i].pairs += counts[s][i];
    }
  }
  return out;
}

std::string classify_trend(const std::vector<double>& values, double spacing, double threshold) {
  if (values.empty()) return "undecided";
  const double first = values.front(), last = values.back();
  if (last < std::max(10.0 * spacing, first / 10.0)) return "->0";
  if (last > threshold) return "bounded below";
  return "undecided";
}

namespace {

struct Contact {
  int i;
  int j;
  Point p;
};

std::vector<Contact> limit_contacts(const USCSpec& spec) {
  const Rational s(1, spec.k);
  std::vector<Contact> out;
  const int n = spec.n_maps();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Point& a = spec.offsets[i];
      const Point& b = spec.offsets[j];
      const Rational dx = abs(a.x - b.x), dy = abs(a.y - b.y);
      if (dx > s || dy > s) continue;
      if (dx == s && dy == s) {
        out.push_back({i, j, {max(a.x, b.x), max(a.y, b.y)}});
      } else if (dx == s) {
        const Rational x = max(a.x, b.x);
        const Rational y0 = max(a.y, b.y), y1 = min(a.y, b.y) + s;
        for (const Rational& y : {y0, (y0 + y1) / Rational(2), y1}) out.push_back({i, j, {x, y}});
      } else if (dy == s) {
        const Rational y = max(a.y, b.y);
        const Rational x0 = max(a.x, b.x), x1 = min(a.x, b.x) + s;
        for (const Rational& x : {x0, (x0 + x1) / Rational(2), x1}) out.push_back({i, j, {x, y}});
      }
    }
  }
  return out;
}

}  // namespace

EquicontinuityReport equicontinuity_diagnostic(const FamilySpec& family, int m, double threshold) {
  const USCSpec& limit = family.limit;
  const auto members = family.valid_members();
  if (members.empty()) throw InputError("family has no valid members");
  EquicontinuityReport rep;
  rep.level = m;
  rep.threshold = threshold > 0.0 ? threshold : 1.0 / (limit.k * limit.k);
  rep.spacing = std::pow(static_cast<double>(limit.k), -(m + 1));

  for (const auto* mem : members) {
    rep.members.push_back(mem->parameter.to_string());
    rep.hausdorff_hi.push_back(hausdorff_distance(mem->spec, limit, m).hi);
  }
  const double lo_first = hausdorff_distance(members.front()->spec, limit, m).lo;
  const double lo_last = hausdorff_distance(members.back()->spec, limit, m).lo;
  if (lo_last > lo_first + 1e-12) throw DegenerateError("family does not approach its limit in Hausdorff distance");

  const auto contacts = limit_contacts(limit);
  const Rational k(limit.k);
  std::vector<std::array<Point, 2>> local(contacts.size());
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    const auto& ct = contacts[c];
    local[c][0] = {(ct.p.x - limit.offsets[ct.i].x) * k, (ct.p.y - limit.offsets[ct.i].y) * k};
    local[c][1] = {(ct.p.x - limit.offsets[ct.j].x) * k, (ct.p.y - limit.offsets[ct.j].y) * k};
  }
  std::vector<std::vector<double>> values(members.size(), std::vector<double>(contacts.size(), 0.0));
  parallel_for(members.size(), [&](std::size_t mi) {
    const USCSpec& spec = members[mi]->spec;
    const IfsMatching match = match_ifs(limit, spec);
    const Rational s(1, spec.k);
    std::vector<std::array<Point, 2>> ends(contacts.size());
    SkeletonOptions opts;
    opts.square_crossings = true;
    for (std::size_t c = 0; c < contacts.size(); ++c) {
      const Point& ci = spec.offsets[match.permutation[contacts[c].i] - 1];
      const Point& cj = spec.offsets[match.permutation[contacts[c].j] - 1];
      ends[c][0] = {local[c][0].x * s + ci.x, local[c][0].y * s + ci.y};
      ends[c][1] = {local[c][1].x * s + cj.x, local[c][1].y * s + cj.y};
      opts.pins.push_back(ends[c][0]);
      opts.pins.push_back(ends[c][1]);
    }
    const SkeletonGraph skel = build_skeleton(spec, m, opts);
    std::unordered_map<std::size_t, std::vector<double>> cache;
    for (std::size_t c = 0; c < contacts.size(); ++c) {
      if (ends[c][0] == ends[c][1]) continue;
      const std::size_t a = skel.vertex_at(ends[c][0]);
      const std::size_t b = skel.vertex_at(ends[c][1]);
      auto it = cache.find(a);
      if (it == cache.end()) it = cache.emplace(a, skel.distances_from(a)).first;
      values[mi][c] = it->second[b];
    }
  });

  rep.all_to_zero = true;
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    ContactSequence seq;
    seq.i = contacts[c].i + 1;
    seq.j = contacts[c].j + 1;
    seq.contact = to_double(contacts[c].p);
    seq.x = to_double(local[c][0]);
    seq.y = to_double(local[c][1]);
    for (std::size_t mi = 0; mi < members.size(); ++mi) seq.values.push_back(values[mi][c]);
    seq.trend = classify_trend(seq.values, rep.spacing, rep.threshold);
    rep.all_to_zero = rep.all_to_zero && seq.trend == "->0";
    rep.any_bounded_below = rep.any_bounded_below || seq.trend == "bounded below";
    rep.sequences.push_back(std::move(seq));
  }
  return rep;
}

}  // namespace usc
