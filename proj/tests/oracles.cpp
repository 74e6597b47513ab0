#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <map>

namespace oracle {

mpq_class exact_resistance(int n, const std::vector<RationalEdge>& edges, int a, int b) {
  std::vector<std::map<int, mpq_class>> adj(n);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    adj[e.u][e.v] += e.c;
    adj[e.v][e.u] += e.c;
  }
  for (int x = 0; x < n; ++x) {
    if (x == a || x == b) continue;
    mpq_class total = 0;
    for (const auto& [y, c] : adj[x]) total += c;
    std::vector<std::pair<int, mpq_class>> nb(adj[x].begin(), adj[x].end());
    for (const auto& [y, c] : nb) adj[y].erase(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        const mpq_class add = nb[i].second * nb[j].second / total;
        adj[nb[i].first][nb[j].first] += add;
        adj[nb[j].first][nb[i].first] += add;
      }
    }
    adj[x].clear();
  }
  const auto it = adj[a].find(b);
  if (it == adj[a].end() || it->second == 0) return mpq_class(-1);
  return 1 / it->second;
}

usc::Network to_network(int n, const std::vector<RationalEdge>& edges) {
  std::vector<usc::WeightedEdge> w;
  for (const auto& e : edges) {
    w.push_back({static_cast<std::uint32_t>(e.u), static_cast<std::uint32_t>(e.v), e.c.get_d()});
  }
  return usc::Network(static_cast<std::size_t>(n), w);
}

std::vector<RationalEdge> random_connected(int n, int extra, std::mt19937_64& rng) {
  std::vector<RationalEdge> e;
  std::uniform_int_distribution<int> cond(1, 5);
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    e.push_back({parent(rng), v, mpq_class(cond(rng))});
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int i = 0; i < extra; ++i) {
    const int u = any(rng), v = any(rng);
    if (u != v) e.push_back({u, v, mpq_class(cond(rng))});
  }
  return e;
}

double expected_hitting_time(const usc::Network& net, const std::vector<std::uint32_t>& start,
                             const std::vector<std::uint32_t>& target) {
  const auto n = static_cast<Eigen::Index>(net.size());
  std::vector<char> is_target(net.size(), 0);
  for (auto t : target) is_target[t] = 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (is_target[x]) continue;
    rhs[x] = 1.0;
    const double c = net.weighted_degree(x);
    for (std::size_t j = 0; j < net.degree(x); ++j) a(x, net.neighbors(x)[j]) -= net.weights(x)[j] / c;
  }
  const Eigen::VectorXd h = a.partialPivLu().solve(rhs);
  double s = 0.0;
  for (auto v : start) s += h[v];
  return s / static_cast<double>(start.size());
}

std::vector<usc::GridContact> brute_contacts(const usc::CellGrid& g) {
  std::vector<usc::GridContact> out;
  const std::int64_t s = g.s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const std::int64_t dx = std::abs(g.corner[i][0] - g.corner[j][0]);
      const std::int64_t dy = std::abs(g.corner[i][1] - g.corner[j][1]);
      if (dx > s || dy > s) continue;
      if (dx < s && dy < s) continue;
      usc::GridContact c;
      c.a = static_cast<std::uint32_t>(i);
      c.b = static_cast<std::uint32_t>(j);
      c.overlap = dx == s ? s - dy : s - dx;
      out.push_back(c);
    }
  }
  return out;
}

usc::Rational q(long p, long d) { return usc::Rational(p, d); }

usc::USCSpec standard_carpet() { return usc::make_spec(3, usc::boundary_ring_offsets(3)); }

usc::USCSpec ring_plus(int k, const std::vector<usc::Point>& extra, const std::vector<usc::Point>& removed) {
  std::vector<usc::Point> offs;
  for (const auto& p : usc::boundary_ring_offsets(k)) {
    if (std::find(removed.begin(), removed.end(), p) == removed.end()) offs.push_back(p);
  }
  offs.insert(offs.end(), extra.begin(), extra.end());
  return usc::make_spec(k, offs);
}

usc::USCSpec kz_unchecked(const usc::Rational& z) {
  const usc::Point seed{z + q(2, 7), q(1, 7)};
  std::vector<usc::Point> orbit;
  for (auto g : usc::kAllSymmetries) {
    const auto p = usc::symmetry_square_image(g, seed, q(1, 7));
    if (std::find(orbit.begin(), orbit.end(), p) == orbit.end()) orbit.push_back(p);
  }
  return ring_plus(7, orbit);
}

namespace {

bool segment_in_squares(const std::vector<std::array<double, 4>>& sq, const usc::PointD& p, const usc::PointD& q) {
  std::vector<double> ts = {0.0, 1.0};
  const double dx = q.x - p.x, dy = q.y - p.y;
  for (const auto& s : sq) {
    for (double x : {s[0], s[2]}) {
      if (std::abs(dx) > 0.0) ts.push_back((x - p.x) / dx);
    }
    for (double y : {s[1], s[3]}) {
      if (std::abs(dy) > 0.0) ts.push_back((y - p.y) / dy);
    }
  }
  std::sort(ts.begin(), ts.end());
  const double eps = 1e-12;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = std::max(0.0, ts[i]), b = std::min(1.0, ts[i + 1]);
    if (b - a <= 1e-14) continue;
    const double t = 0.5 * (a + b);
    const double x = p.x + t * dx, y = p.y + t * dy;
    bool inside = false;
    for (const auto& s : sq) {
      if (x >= s[0] - eps && x <= s[2] + eps && y >= s[1] - eps && y <= s[3] + eps) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<double>> square_union_distances(const usc::USCSpec& spec,
                                                        const std::vector<usc::PointD>& points) {
  const double side = 1.0 / spec.k;
  std::vector<std::array<double, 4>> sq;
  std::vector<usc::PointD> nodes = points;
  for (const auto& o : spec.offsets) {
    const double x = o.x.to_double(), y = o.y.to_double();
    sq.push_back({x, y, x + side, y + side});
    for (double cx : {x, x + side}) {
      for (double cy : {y, y + side}) nodes.push_back({cx, cy});
    }
  }
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (std::size_t i = 0; i < n; ++i) {
    w[i][i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (segment_in_squares(sq, nodes[i], nodes[j])) w[i][j] = w[j][i] = std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
    }
  }
  std::vector<std::vector<double>> out(points.size());
  for (std::size_t s = 0; s < points.size(); ++s) {
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    std::vector<char> done(n, 0);
    d[s] = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && (u == n || d[v] < d[u])) u = v;
      }
      if (u == n || !std::isfinite(d[u])) break;
      done[u] = 1;
      for (std::size_t v = 0; v < n; ++v) d[v] = std::min(d[v], d[u] + w[u][v]);
    }
    out[s].assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(points.size()));
  }
  return out;
}

}  // namespace oracle
