#include "usc/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "usc/cell_grid.hpp"
#include "usc/errors.hpp"

namespace usc {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw InputError("offset coordinates must be integers or \"p/q\" strings");
}

}  // namespace

std::size_t default_cell_budget() {
  if (const char* env = std::getenv("CARPET_CELL_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 500000;
}

std::string word_to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(w[i]);
  }
  return out;
}

Word parse_word(std::string_view text) {
  Word w;
  if (text.find('.') == std::string_view::npos) {
    for (char c : text) {
      if (c < '1' || c > '9') throw InputError("word letters must be digits 1-9 or dot-separated");
      w.push_back(c - '0');
    }
    return w;
  }
  std::string cur;
  for (char c : std::string(text) + ".") {
    if (c == '.') {
      if (cur.empty()) throw InputError("empty letter in word");
      w.push_back(std::stoi(cur));
      cur.clear();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      cur += c;
    } else {
      throw InputError("bad character in word");
    }
  }
  return w;
}

USCSpec make_spec(int k, std::vector<Point> offsets) {
  if (k < 3) throw InputError("k must be at least 3");
  const Rational hi = Rational(1) - Rational(1, k);
  for (const auto& c : offsets) {
    if (c.x.sign() < 0 || c.y.sign() < 0 || c.x > hi || c.y > hi) {
      throw InputError("offset (" + c.x.to_string() + ", " + c.y.to_string() + ") outside [0, " + hi.to_string() +
                       "]^2");
    }
  }
  USCSpec s;
  s.k = k;
  s.offsets = std::move(offsets);
  const auto ring = boundary_ring_offsets(k);
  s.boundary_numbering_canonical =
      s.offsets.size() >= ring.size() && std::equal(ring.begin(), ring.end(), s.offsets.begin());
  return s;
}

USCSpec parse_spec(std::string_view config_text) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(config_text)};
  std::string line;
  std::string pending_key;
  std::string pending_value;
  int depth = 0;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    if (depth > 0) {
      pending_value += line;
    } else {
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError("expected key = value, got '" + line + "'");
      pending_key = trim(line.substr(0, eq));
      pending_value = trim(line.substr(eq + 1));
    }
    depth = 0;
    for (char c : pending_value) depth += (c == '[') - (c == ']');
    if (depth < 0) throw InputError("unbalanced brackets in '" + pending_key + "'");
    if (depth == 0) fields[pending_key] = trim(pending_value);
  }
  if (depth != 0) throw InputError("unterminated list in '" + pending_key + "'");

  auto get_int = [&](const std::string& key) -> long {
    auto v = nlohmann::json::parse(fields.at(key), nullptr, false);
    if (!v.is_number_integer()) throw InputError(key + " must be an integer");
    return v.get<long>();
  };
  auto get_string = [&](const std::string& key) -> std::string {
    auto v = nlohmann::json::parse(fields.at(key), nullptr, false);
    if (v.is_string()) return v.get<std::string>();
    return fields.at(key);
  };

  if (!fields.count("k")) throw InputError("missing field k");
  const long k = get_int("k");
  if (k < 3 || k > 1000) throw InputError("k must be in [3, 1000]");

  std::vector<Point> offsets;
  if (fields.count("family")) {
    const std::string fam = get_string("family");
    if (fam != "kz") throw InputError("unknown family '" + fam + "'");
    if (k != 7) throw InputError("family kz requires k = 7");
    if (!fields.count("z")) throw InputError("family kz requires z");
    const Rational z = Rational::parse(get_string("z"));
    if (z.sign() < 0 || z > Rational(1, 14)) throw InputError("z must lie in [0, 1/14]");
    return complete_symmetry_orbit({Point{z + Rational(2, 7), Rational(1, 7)}}, 7, true);
  }
  if (!fields.count("offsets")) throw InputError("missing field offsets");
  const auto arr = nlohmann::json::parse(fields.at("offsets"), nullptr, false);
  if (!arr.is_array()) throw InputError("offsets must be a list of [x, y] pairs");
  for (const auto& pt : arr) {
    if (!pt.is_array() || pt.size() != 2) throw InputError("each offset must be a pair [x, y]");
    offsets.push_back({json_rational(pt[0]), json_rational(pt[1])});
  }
  if (fields.count("n_maps")) {
    const long nm = get_int("n_maps");
    if (nm != static_cast<long>(offsets.size())) {
      throw InputError("n_maps = " + std::to_string(nm) + " but " + std::to_string(offsets.size()) +
                       " offsets given");
    }
  }
  return make_spec(static_cast<int>(k), std::move(offsets));
}

SymmetryAction symmetry_action(Symmetry g) {
  switch (g) {
    case Symmetry::v: return {{{{1, 0}, {0, -1}}}, {0, 1}};
    case Symmetry::h: return {{{{-1, 0}, {0, 1}}}, {1, 0}};
    case Symmetry::d1: return {{{{0, 1}, {1, 0}}}, {0, 0}};
    case Symmetry::d2: return {{{{0, -1}, {-1, 0}}}, {1, 1}};
    case Symmetry::id: return {{{{1, 0}, {0, 1}}}, {0, 0}};
    case Symmetry::r1: return {{{{0, -1}, {1, 0}}}, {1, 0}};
    case Symmetry::r2: return {{{{-1, 0}, {0, -1}}}, {1, 1}};
    case Symmetry::r3: return {{{{0, 1}, {-1, 0}}}, {0, 1}};
  }
  throw std::logic_error("unknown symmetry");
}

std::string symmetry_name(Symmetry g) {
  switch (g) {
    case Symmetry::v: return "v";
    case Symmetry::h: return "h";
    case Symmetry::d1: return "d1";
    case Symmetry::d2: return "d2";
    case Symmetry::id: return "id";
    case Symmetry::r1: return "r1";
    case Symmetry::r2: return "r2";
    case Symmetry::r3: return "r3";
  }
  return "?";
}

Symmetry compose(Symmetry g, Symmetry h) {
  const auto sg = symmetry_action(g);
  const auto sh = symmetry_action(h);
  SymmetryAction c{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) c.a[i][j] = sg.a[i][0] * sh.a[0][j] + sg.a[i][1] * sh.a[1][j];
    c.t[i] = sg.a[i][0] * sh.t[0] + sg.a[i][1] * sh.t[1] + sg.t[i];
  }
  for (Symmetry e : kAllSymmetries) {
    const auto se = symmetry_action(e);
    if (se.a == c.a && se.t == c.t) return e;
  }
  throw std::logic_error("dihedral group not closed");
}

Symmetry inverse(Symmetry g) {
  for (Symmetry e : kAllSymmetries) {
    if (compose(g, e) == Symmetry::id) return e;
  }
  throw std::logic_error("no inverse");
}

Point symmetry_square_image(Symmetry g, const Point& c, const Rational& side) {
  const auto s = symmetry_action(g);
  Point out = apply_symmetry(g, c);
  if (s.a[0][0] < 0 || s.a[0][1] < 0) out.x -= side;
  if (s.a[1][0] < 0 || s.a[1][1] < 0) out.y -= side;
  return out;
}

ValidationReport validate_usc(const USCSpec& spec) {
  ValidationReport r;
  const int k = spec.k;
  const int n = spec.n_maps();
  const Rational s(1, k);
  r.map_count_in_range = n >= 4 * (k - 1) && n <= k * k - 1;
  if (!r.map_count_in_range) {
    r.messages.push_back("N = " + std::to_string(n) + " outside [" + std::to_string(4 * (k - 1)) + ", " +
                         std::to_string(k * k - 1) + "]");
  }

  r.non_overlapping = true;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Rational dx = abs(spec.offsets[i].x - spec.offsets[j].x);
      const Rational dy = abs(spec.offsets[i].y - spec.offsets[j].y);
      if (dx < s && dy < s) {
        if (r.non_overlapping) {
          r.messages.push_back("squares " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                               " have overlapping interiors");
        }
        r.non_overlapping = false;
      }
      if (dx <= s && dy <= s) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }

  int components = 0;
  for (int i = 0; i < n; ++i) components += find_root(parent, i) == i;
  r.connected = components == 1;
  if (!r.connected) r.messages.push_back("square union has " + std::to_string(components) + " components");

  std::vector<Point> sorted = spec.offsets;
  std::sort(sorted.begin(), sorted.end());
  r.symmetric = true;
  for (Symmetry g : kAllSymmetries) {
    std::vector<Point> img;
    img.reserve(n);
    for (const auto& c : spec.offsets) img.push_back(symmetry_square_image(g, c, s));
    std::sort(img.begin(), img.end());
    if (img != sorted) {
      r.symmetric = false;
      r.messages.push_back("offset set not invariant under " + symmetry_name(g));
      break;
    }
  }

  std::vector<Rational> bottom;
  for (const auto& c : spec.offsets) {
    if (c.y.is_zero()) bottom.push_back(c.x);
  }
  std::sort(bottom.begin(), bottom.end());
  Rational reach(0);
  for (const auto& x : bottom) {
    if (x > reach) break;
    reach = max(reach, x + s);
  }
  r.boundary_included = reach == Rational(1);
  if (!r.boundary_included) r.messages.push_back("bottom row covers [0, " + reach.to_string() + "] only");

  const auto ring = boundary_ring_offsets(k);
  r.boundary_numbering_canonical =
      spec.offsets.size() >= ring.size() && std::equal(ring.begin(), ring.end(), spec.offsets.begin());
  return r;
}

CellMap cell_map(const USCSpec& spec, const Word& w) {
  CellMap m;
  const Rational s(1, spec.k);
  for (int letter : w) {
    if (letter < 1 || letter > spec.n_maps()) {
      throw InputError("letter " + std::to_string(letter) + " out of range 1.." + std::to_string(spec.n_maps()));
    }
    const Point& c = spec.offsets[letter - 1];
    m.offset = {m.offset.x + c.x * m.scale, m.offset.y + c.y * m.scale};
    m.scale *= s;
  }
  return m;
}

std::vector<AdjacencyRecord> cell_adjacency(const USCSpec& spec, int n, std::size_t budget) {
  if (n < 1) throw InputError("adjacency needs level n >= 1");
  const CellGrid g = build_cell_grid(spec, n, budget);
  const auto contacts = grid_contacts(g);
  const Rational unit(mpq_class(1, mpz_class(std::to_string(g.q))));
  std::vector<AdjacencyRecord> out;
  out.reserve(contacts.size());
  for (const auto& c : contacts) {
    AdjacencyRecord r;
    r.a = g.word(c.a);
    r.b = g.word(c.b);
    r.kind = c.overlap > 0 ? ContactKind::segment : ContactKind::point;
    r.overlap_length = Rational(c.overlap) * unit;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Word> boundary_words(const USCSpec& spec, int n, int side) {
  const CellGrid g = build_cell_grid(spec, n);
  std::vector<Word> out;
  for (auto idx : grid_boundary_cells(g, side)) out.push_back(g.word(idx));
  return out;
}

C0Estimate estimate_c0(const USCSpec& spec, int n, std::size_t budget) {
  if (n < 1) throw InputError("estimate_c0 needs n >= 1");
  const CellGrid g = build_cell_grid(spec, n, budget);
  const std::size_t V = g.size();
  std::vector<std::vector<std::uint32_t>> nb(V);
  for (std::size_t i = 0; i < V; ++i) nb[i].push_back(static_cast<std::uint32_t>(i));
  for (const auto& c : grid_contacts(g)) {
    nb[c.a].push_back(c.b);
    nb[c.b].push_back(c.a);
  }
  for (auto& l : nb) std::sort(l.begin(), l.end());
  // Closed neighbourhoods of closed neighbourhoods: a pair shares a neighbour
  // iff b lies within two contact steps of a.
  __int128 best = -1;
  std::vector<std::uint32_t> mark(V, 0);
  std::uint32_t stamp = 0;
  for (std::size_t a = 0; a < V; ++a) {
    ++stamp;
    for (auto m : nb[a]) {
      for (auto b : nb[m]) mark[b] = stamp;
    }
    for (std::size_t b = a + 1; b < V; ++b) {
      if (mark[b] == stamp) continue;
      const std::int64_t dx = std::max<std::int64_t>(0, std::abs(g.corner[a][0] - g.corner[b][0]) - g.s);
      const std::int64_t dy = std::max<std::int64_t>(0, std::abs(g.corner[a][1] - g.corner[b][1]) - g.s);
      const __int128 d2 = static_cast<__int128>(dx) * dx + static_cast<__int128>(dy) * dy;
      if (best < 0 || d2 < best) best = d2;
    }
  }
  if (best < 0) throw DegenerateError("every pair of level-n cells shares a neighbour");
  // k^n * d = sqrt(d2) / D0 since Q = D0 k^n.
  const mpz_class d2(std::to_string(static_cast<long long>(best)));
  const mpz_class d0sq = mpz_class(static_cast<long>(g.d0)) * mpz_class(static_cast<long>(g.d0));
  C0Estimate out;
  out.scaled_distance_squared = Rational(mpq_class(d2, d0sq));
  out.value = std::sqrt(out.scaled_distance_squared.to_double());
  return out;
}

namespace {

/// Squares of equal side, bucketed on a grid of the same pitch.
class SquareIndex {
 public:
  SquareIndex(std::vector<PointD> corners, double side) : corners_(std::move(corners)), side_(side) {
    cells_per_axis_ = static_cast<long>(std::ceil(1.0 / side_)) + 1;
    for (std::size_t i = 0; i < corners_.size(); ++i) {
      const long x0 = bucket(corners_[i].x), x1 = bucket(corners_[i].x + side_);
      const long y0 = bucket(corners_[i].y), y1 = bucket(corners_[i].y + side_);
      for (long bx = x0; bx <= x1; ++bx) {
        for (long by = y0; by <= y1; ++by) buckets_[key(bx, by)].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }

  double distance(const PointD& p) const {
    const long bx = bucket(p.x), by = bucket(p.y);
    double best = std::numeric_limits<double>::infinity();
    for (long ring = 0; ring <= cells_per_axis_ + 1; ++ring) {
      if (static_cast<double>(ring - 1) * side_ > best) break;
      for (long dx = -ring; dx <= ring; ++dx) {
        for (long dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          auto it = buckets_.find(key(bx + dx, by + dy));
          if (it == buckets_.end()) continue;
          for (auto i : it->second) best = std::min(best, to_square(p, corners_[i]));
        }
      }
    }
    return best;
  }

 private:
  long bucket(double v) const { return static_cast<long>(std::floor(v / side_)); }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ static_cast<long long>(y & 0xffffffffL); }
  double to_square(const PointD& p, const PointD& c) const {
    const double dx = std::max({0.0, c.x - p.x, p.x - c.x - side_});
    const double dy = std::max({0.0, c.y - p.y, p.y - c.y - side_});
    return std::hypot(dx, dy);
  }

  std::vector<PointD> corners_;
  double side_;
  long cells_per_axis_ = 0;
  std::unordered_map<long long, std::vector<std::uint32_t>> buckets_;
};

double one_sided(const CellGrid& from, const SquareIndex& to, int per_side) {
  const double side = from.side();
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const PointD c = from.lower_left(i);
    for (int t = 0; t < per_side; ++t) {
      const double f = side * t / per_side;
      const PointD samples[4] = {{c.x + f, c.y}, {c.x + side, c.y + f}, {c.x + side - f, c.y + side}, {c.x, c.y + side - f}};
      for (const auto& p : samples) worst = std::max(worst, to.distance(p));
    }
  }
  return worst;
}

}  // namespace

HausdorffInterval hausdorff_distance(const USCSpec& a, const USCSpec& b, int m, std::size_t budget) {
  if (m < 0) throw InputError("negative level");
  const CellGrid ga = build_cell_grid(a, m, budget);
  const CellGrid gb = build_cell_grid(b, m, budget);
  if (a.k != b.k) throw InputError("hausdorff_distance expects specs with the same k");
  auto corners = [](const CellGrid& g) {
    std::vector<PointD> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.lower_left(i);
    return v;
  };
  const double s = ga.side();
  constexpr int per_side = 4;
  const double eps = s / per_side;
  const SquareIndex ia(corners(ga), s), ib(corners(gb), s);
  const double lo = std::max(one_sided(ga, ib, per_side), one_sided(gb, ia, per_side));
  // Sampled points lie on cell boundaries, hence in the carpets; each carpet
  // point is within sqrt(s^2/4 + eps^2/4) of a sample and each square point is
  // within s/2 of the carpet.
  HausdorffInterval out;
  out.lo = lo;
  out.hi = lo + std::sqrt(s * s / 4 + eps * eps / 4) + s / 2 + 1e-12;
  return out;
}

IfsMatching match_ifs(const USCSpec& a, const USCSpec& b) {
  if (a.k != b.k || a.n_maps() != b.n_maps()) throw InputError("match_ifs needs specs with equal k and N");
  const int n = a.n_maps();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost[i][j] = distance(to_double(a.offsets[i]), to_double(b.offsets[j]));
  }
  // Shortest augmenting path Hungarian method, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  IfsMatching out;
  out.permutation.assign(n, 0);
  for (int j = 1; j <= n; ++j) out.permutation[p[j] - 1] = j;
  for (int i = 0; i < n; ++i) {
    const double c = cost[i][out.permutation[i] - 1];
    out.cost += c;
    out.max_pair_distance = std::max(out.max_pair_distance, c);
  }
  return out;
}

std::vector<Point> boundary_ring_offsets(int k) {
  const Point q[5] = {{Rational(0), Rational(0)}, {Rational(1), Rational(0)}, {Rational(1), Rational(1)},
                      {Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
  const Rational shrink = Rational(1) - Rational(1, k);
  std::vector<Point> out;
  for (int j = 0; j < 4; ++j) {
    for (int i = 1; i <= k - 1; ++i) {
      const Rational t(i - 1, k);
      out.push_back({q[j].x * shrink + t * (q[j + 1].x - q[j].x), q[j].y * shrink + t * (q[j + 1].y - q[j].y)});
    }
  }
  return out;
}

USCSpec complete_symmetry_orbit(const std::vector<Point>& partial, int k, bool boundary_ring) {
  std::vector<Point> seeds;
  if (boundary_ring) seeds = boundary_ring_offsets(k);
  seeds.insert(seeds.end(), partial.begin(), partial.end());
  const Rational s(1, k);
  std::vector<Point> out;
  auto present = [&](const Point& p) { return std::find(out.begin(), out.end(), p) != out.end(); };
  for (const auto& seed : seeds) {
    if (present(seed)) continue;
    out.push_back(seed);
    for (Symmetry g : kAllSymmetries) {
      const Point img = symmetry_square_image(g, seed, s);
      if (!present(img)) out.push_back(img);
    }
  }
  USCSpec spec = make_spec(k, std::move(out));
  const ValidationReport rep = validate_usc(spec);
  if (!rep.non_overlapping) throw InputError("symmetry closure creates overlapping squares");
  if (!rep.map_count_in_range) {
    throw InputError("symmetry closure has " + std::to_string(spec.n_maps()) + " maps, outside [4(k-1), k^2-1]");
  }
  return canonicalize(std::move(spec));
}

USCSpec canonicalize(USCSpec spec) {
  const auto ring = boundary_ring_offsets(spec.k);
  std::vector<Point> rest;
  std::size_t found = 0;
  for (const auto& c : spec.offsets) {
    if (std::find(ring.begin(), ring.end(), c) != ring.end()) {
      ++found;
    } else {
      rest.push_back(c);
    }
  }
  if (found != ring.size()) {
    spec.boundary_numbering_canonical = false;
    return spec;
  }
  std::vector<Point> ordered = ring;
  ordered.insert(ordered.end(), rest.begin(), rest.end());
  spec.offsets = std::move(ordered);
  spec.boundary_numbering_canonical = true;
  return spec;
}

std::string render_svg(const USCSpec& spec, int n, std::size_t budget) {
  const CellGrid g = build_cell_grid(spec, n, budget);
  constexpr double size = 800.0;
  std::ostringstream os;
  os.precision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n<g fill=\"black\">\n";
  const double side = g.side() * size;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const PointD c = g.lower_left(i);
    os << "<rect x=\"" << c.x * size << "\" y=\"" << (1.0 - c.y) * size - side << "\" width=\"" << side
       << "\" height=\"" << side << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace usc
