#include "usc/cell_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "usc/errors.hpp"

namespace usc {

namespace {

constexpr std::int64_t kCoordinateLimit = std::int64_t{1} << 62;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  const __int128 p = static_cast<__int128>(a) * b;
  if (p >= kCoordinateLimit || p <= -kCoordinateLimit) {
    throw BudgetExceeded("lattice coordinates exceed 2^62; lower the level");
  }
  return static_cast<std::int64_t>(p);
}

struct Keyed {
  std::int64_t major;
  std::int64_t minor;
  std::uint32_t idx;
  bool operator<(const Keyed& o) const { return std::tie(major, minor, idx) < std::tie(o.major, o.minor, o.idx); }
};

std::vector<Keyed> sorted_by(const CellGrid& g, int major_axis) {
  std::vector<Keyed> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    v[i] = {g.corner[i][major_axis], g.corner[i][1 - major_axis], static_cast<std::uint32_t>(i)};
  }
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

Word CellGrid::word(std::size_t index) const {
  Word w(n);
  for (int t = n - 1; t >= 0; --t) {
    w[t] = static_cast<int>(index % n_maps) + 1;
    index /= n_maps;
  }
  return w;
}

std::size_t CellGrid::index(const Word& w) const {
  if (static_cast<int>(w.size()) != n) throw InputError("word level does not match grid level");
  std::size_t idx = 0;
  for (int letter : w) {
    if (letter < 1 || letter > n_maps) throw InputError("letter out of range");
    idx = idx * n_maps + (letter - 1);
  }
  return idx;
}

PointD CellGrid::lower_left(std::size_t i) const {
  const double qd = static_cast<double>(q);
  return {static_cast<double>(corner[i][0]) / qd, static_cast<double>(corner[i][1]) / qd};
}

PointD CellGrid::center(std::size_t i) const {
  const double qd = static_cast<double>(q);
  const double h = 0.5 * static_cast<double>(s);
  return {(static_cast<double>(corner[i][0]) + h) / qd, (static_cast<double>(corner[i][1]) + h) / qd};
}

std::size_t CellGrid::locate(const PointD& p) const {
  constexpr double tol = 1e-12;
  struct Frame {
    std::size_t prefix;
    int depth;
    std::int64_t x;
    std::int64_t y;
  };
  std::vector<Frame> stack{{0, 0, 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == n) return f.prefix;
    const double unit = static_cast<double>(d0) * std::pow(static_cast<double>(k), f.depth + 1);
    for (int i = n_maps - 1; i >= 0; --i) {
      const std::int64_t cx = f.x * k + offset_units[i][0];
      const std::int64_t cy = f.y * k + offset_units[i][1];
      const double x0 = static_cast<double>(cx) / unit;
      const double y0 = static_cast<double>(cy) / unit;
      const double side_d = static_cast<double>(d0) / unit;
      if (p.x >= x0 - tol && p.x <= x0 + side_d + tol && p.y >= y0 - tol && p.y <= y0 + side_d + tol) {
        stack.push_back({f.prefix * n_maps + i, f.depth + 1, cx, cy});
      }
    }
  }
  return size();
}

CellGrid build_cell_grid(const USCSpec& spec, int n, std::size_t budget) {
  if (n < 0) throw InputError("negative level");
  const int nm = spec.n_maps();
  double cells = 1.0;
  for (int t = 0; t < n; ++t) cells *= nm;
  if (cells > static_cast<double>(budget)) {
    throw BudgetExceeded("level " + std::to_string(n) + " needs " + std::to_string(static_cast<long long>(cells)) +
                         " cells, budget is " + std::to_string(budget));
  }
  const Rational kr(spec.k);
  mpz_class den = 1;
  for (const auto& c : spec.offsets) {
    den = lcm_denominator(den, c.x * kr);
    den = lcm_denominator(den, c.y * kr);
  }
  if (!den.fits_slong_p()) throw BudgetExceeded("offset denominators too large");
  CellGrid g;
  g.k = spec.k;
  g.n = n;
  g.n_maps = nm;
  g.d0 = den.get_si();
  g.s = g.d0;
  g.q = g.d0;
  for (int t = 0; t < n; ++t) g.q = checked_mul(g.q, spec.k);
  std::vector<std::array<std::int64_t, 2>> units(nm);
  for (int i = 0; i < nm; ++i) {
    for (int a = 0; a < 2; ++a) {
      const Rational c = (a == 0 ? spec.offsets[i].x : spec.offsets[i].y) * kr;
      const mpz_class v = c.numerator() * (den / c.denominator());
      units[i][a] = v.get_si();
    }
  }
  std::vector<std::array<std::int64_t, 2>> cur{{0, 0}};
  for (int t = 0; t < n; ++t) {
    std::vector<std::array<std::int64_t, 2>> next;
    next.reserve(cur.size() * nm);
    for (const auto& c : cur) {
      const std::int64_t bx = checked_mul(c[0], spec.k);
      const std::int64_t by = checked_mul(c[1], spec.k);
      for (int i = 0; i < nm; ++i) next.push_back({bx + units[i][0], by + units[i][1]});
    }
    cur.swap(next);
  }
  g.corner = std::move(cur);
  g.offset_units = std::move(units);
  return g;
}

std::vector<GridContact> grid_contacts(const CellGrid& g) {
  std::vector<GridContact> out;
  const std::int64_t S = g.s;
  for (int axis = 0; axis < 2; ++axis) {
    const auto sorted = sorted_by(g, axis);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::int64_t major = g.corner[i][axis] + S;
      const std::int64_t minor = g.corner[i][1 - axis];
      auto it = std::lower_bound(sorted.begin(), sorted.end(), Keyed{major, minor - S, 0});
      for (; it != sorted.end() && it->major == major && it->minor <= minor + S; ++it) {
        const std::int64_t d = std::abs(it->minor - minor);
        // Corner contacts are seen by both sweeps; keep them from the first.
        if (d == S && axis == 1) continue;
        GridContact c;
        c.a = static_cast<std::uint32_t>(std::min<std::size_t>(i, it->idx));
        c.b = static_cast<std::uint32_t>(std::max<std::size_t>(i, it->idx));
        c.overlap = S - d;
        out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const GridContact& x, const GridContact& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

std::vector<std::uint32_t> grid_boundary_cells(const CellGrid& g, int side) {
  if (side < 1 || side > 4) throw InputError("side index must be 1..4");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& c = g.corner[i];
    const bool hit = (side == 1 && c[1] == 0) || (side == 2 && c[0] + g.s == g.q) ||
                     (side == 3 && c[1] + g.s == g.q) || (side == 4 && c[0] == 0);
    if (hit) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

std::vector<std::uint32_t> symmetry_permutation(const CellGrid& g, Symmetry sym) {
  const SymmetryAction act = symmetry_action(sym);
  const auto sorted = sorted_by(g, 0);
  std::vector<std::uint32_t> perm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::array<std::int64_t, 2> img{};
    for (int r = 0; r < 2; ++r) {
      std::int64_t v = act.a[r][0] * g.corner[i][0] + act.a[r][1] * g.corner[i][1] + act.t[r] * g.q;
      if (act.a[r][0] < 0 || act.a[r][1] < 0) v -= g.s;
      img[r] = v;
    }
    auto it = std::lower_bound(sorted.begin(), sorted.end(), Keyed{img[0], img[1], 0});
    if (it == sorted.end() || it->major != img[0] || it->minor != img[1]) {
      throw InputError("cell set is not invariant under " + symmetry_name(sym));
    }
    perm[i] = it->idx;
  }
  return perm;
}

}  // namespace usc
