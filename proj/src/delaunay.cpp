#include "phsadapt/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "phsadapt/errors.hpp"

namespace phsadapt {

namespace {

constexpr double kOrientTol = 1e-12;
constexpr double kIncircleTol = 1e-12;

double orient(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Incircle determinant together with its permanent, used as the scale for a
// relative decision threshold.
std::pair<double, double> incircle_with_bound(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bc = bdx * cdy - bdy * cdx;
  const double ca = cdx * ady - cdy * adx;
  const double ab = adx * bdy - ady * bdx;
  const double det = alift * bc + blift * ca + clift * ab;
  const double perm = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                      blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                      clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
  return {det, perm};
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] lies across the edge opposite v[i]
};

class Builder {
 public:
  explicit Builder(std::span<const Point> input) : pts_(input.begin(), input.end()), real_(input.size()) {
    double lox = pts_[0][0], hix = lox, loy = pts_[0][1], hiy = loy;
    for (const auto& p : pts_) {
      lox = std::min(lox, p[0]);
      hix = std::max(hix, p[0]);
      loy = std::min(loy, p[1]);
      hiy = std::max(hiy, p[1]);
    }
    const double size = std::max({hix - lox, hiy - loy, 1e-300});
    const double cx = 0.5 * (lox + hix), cy = 0.5 * (loy + hiy);
    const double big = 1e3 * size;
    pts_.push_back(make_point(cx - big, cy - big));
    pts_.push_back(make_point(cx + big, cy - big));
    pts_.push_back(make_point(cx, cy + big));
    const int s = static_cast<int>(real_);
    tris_.push_back(Tri{{s, s + 1, s + 2}, {-1, -1, -1}});
  }

  void insert(int pi) {
    const auto loc = locate(pts_[static_cast<std::size_t>(pi)]);
    if (!loc) return;  // duplicate of an existing vertex
    auto [t, edge] = *loc;
    if (edge < 0) {
      split_triangle(t, pi);
    } else {
      split_edge(t, edge, pi);
    }
    while (!stack_.empty()) {
      const auto [tri, p] = stack_.back();
      stack_.pop_back();
      legalize(tri, p);
    }
  }

  std::vector<Triangle> result() const {
    std::vector<Triangle> out;
    for (const auto& t : tris_) {
      if (t.v[0] >= static_cast<int>(real_) || t.v[1] >= static_cast<int>(real_) ||
          t.v[2] >= static_cast<int>(real_)) {
        continue;
      }
      out.push_back({static_cast<std::size_t>(t.v[0]), static_cast<std::size_t>(t.v[1]),
                     static_cast<std::size_t>(t.v[2])});
    }
    return out;
  }

 private:
  const Point& P(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  Tri& T(int i) { return tris_[static_cast<std::size_t>(i)]; }

  // Returns (triangle, edge index) where edge >= 0 means p lies on that edge.
  std::optional<std::pair<int, int>> locate(const Point& p) {
    int t = last_;
    const auto limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tr = T(t);
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const Point& a = P(tr.v[static_cast<std::size_t>((i + 1) % 3)]);
        const Point& b = P(tr.v[static_cast<std::size_t>((i + 2) % 3)]);
        if (orient(a, b, p) < -tolerance(a, b, p)) {
          next = tr.n[static_cast<std::size_t>(i)];
          break;
        }
      }
      if (next < 0) return classify(t, p);
      t = next;
    }
    // The walk can cycle only on non-Delaunay intermediate states; scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const Tri& tr = T(i);
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e) {
        const Point& a = P(tr.v[static_cast<std::size_t>((e + 1) % 3)]);
        const Point& b = P(tr.v[static_cast<std::size_t>((e + 2) % 3)]);
        inside = orient(a, b, p) >= -tolerance(a, b, p);
      }
      if (inside) return classify(i, p);
    }
    return std::nullopt;
  }

  static double tolerance(const Point& a, const Point& b, const Point& p) {
    return kOrientTol * distance(a, b) * std::max(distance(p, a), distance(p, b));
  }

  std::optional<std::pair<int, int>> classify(int t, const Point& p) {
    const Tri& tr = T(t);
    int on_edge = -1;
    int on_count = 0;
    for (int i = 0; i < 3; ++i) {
      const Point& a = P(tr.v[static_cast<std::size_t>((i + 1) % 3)]);
      const Point& b = P(tr.v[static_cast<std::size_t>((i + 2) % 3)]);
      if (std::abs(orient(a, b, p)) <= tolerance(a, b, p)) {
        on_edge = i;
        ++on_count;
      }
    }
    for (int i = 0; i < 3; ++i) {
      if (squared_distance(P(tr.v[static_cast<std::size_t>(i)]), p) == 0.0) return std::nullopt;
    }
    if (on_count >= 2) return std::nullopt;  // numerically at a vertex
    return std::make_pair(t, on_edge);
  }

  // Points the neighbor across each edge of t back at t.
  void relink(int t) {
    const Tri tr = T(t);
    for (int i = 0; i < 3; ++i) {
      const int nb = tr.n[static_cast<std::size_t>(i)];
      if (nb < 0) continue;
      const int a = tr.v[static_cast<std::size_t>((i + 1) % 3)];
      const int b = tr.v[static_cast<std::size_t>((i + 2) % 3)];
      Tri& o = T(nb);
      for (int j = 0; j < 3; ++j) {
        const int oa = o.v[static_cast<std::size_t>((j + 1) % 3)];
        const int ob = o.v[static_cast<std::size_t>((j + 2) % 3)];
        if ((oa == a && ob == b) || (oa == b && ob == a)) o.n[static_cast<std::size_t>(j)] = t;
      }
    }
  }

  int add(const Tri& tr) {
    tris_.push_back(tr);
    return static_cast<int>(tris_.size()) - 1;
  }

  void split_triangle(int t, int p) {
    const Tri old = T(t);
    const int v0 = old.v[0], v1 = old.v[1], v2 = old.v[2];
    const int a = t;
    const int b = add(Tri{});
    const int c = add(Tri{});
    T(a) = Tri{{v0, v1, p}, {b, c, old.n[2]}};
    T(b) = Tri{{v1, v2, p}, {c, a, old.n[0]}};
    T(c) = Tri{{v2, v0, p}, {a, b, old.n[1]}};
    for (int x : {a, b, c}) {
      relink(x);
      stack_.emplace_back(x, p);
    }
    last_ = a;
  }

  void split_edge(int t, int i, int p) {
    const Tri t0 = T(t);
    const int u = t0.v[static_cast<std::size_t>(i)];
    const int a = t0.v[static_cast<std::size_t>((i + 1) % 3)];
    const int b = t0.v[static_cast<std::size_t>((i + 2) % 3)];
    const int s = t0.n[static_cast<std::size_t>(i)];
    const int n_ua = t0.n[static_cast<std::size_t>((i + 2) % 3)];
    const int n_bu = t0.n[static_cast<std::size_t>((i + 1) % 3)];

    if (s < 0) {
      const int t2 = add(Tri{});
      T(t) = Tri{{u, a, p}, {-1, t2, n_ua}};
      T(t2) = Tri{{u, p, b}, {-1, n_bu, t}};
      for (int x : {t, t2}) {
        relink(x);
        stack_.emplace_back(x, p);
      }
      last_ = t;
      return;
    }

    const Tri s0 = T(s);
    int w = -1, n_wb = -1, n_aw = -1;
    for (int j = 0; j < 3; ++j) {
      const int vj = s0.v[static_cast<std::size_t>(j)];
      if (vj != a && vj != b) w = vj;
    }
    for (int j = 0; j < 3; ++j) {
      const int vj = s0.v[static_cast<std::size_t>(j)];
      if (vj == a) n_wb = s0.n[static_cast<std::size_t>(j)];  // edge (w, b) is opposite a
      if (vj == b) n_aw = s0.n[static_cast<std::size_t>(j)];
    }
    const int t1 = t;
    const int t2 = add(Tri{});
    const int t3 = s;
    const int t4 = add(Tri{});
    T(t1) = Tri{{u, a, p}, {t4, t2, n_ua}};
    T(t2) = Tri{{u, p, b}, {t3, n_bu, t1}};
    T(t3) = Tri{{w, b, p}, {t2, t4, n_wb}};
    T(t4) = Tri{{w, p, a}, {t1, n_aw, t3}};
    for (int x : {t1, t2, t3, t4}) {
      relink(x);
      stack_.emplace_back(x, p);
    }
    last_ = t1;
  }

  void legalize(int t, int p) {
    const Tri tr = T(t);
    int ip = -1;
    for (int i = 0; i < 3; ++i) {
      if (tr.v[static_cast<std::size_t>(i)] == p) ip = i;
    }
    if (ip < 0) return;  // triangle was reshaped by an earlier flip
    const int nb = tr.n[static_cast<std::size_t>(ip)];
    if (nb < 0) return;
    const int a = tr.v[static_cast<std::size_t>((ip + 1) % 3)];
    const int b = tr.v[static_cast<std::size_t>((ip + 2) % 3)];
    const Tri o = T(nb);
    int d = -1, n_ad = -1, n_db = -1;
    for (int j = 0; j < 3; ++j) {
      const int vj = o.v[static_cast<std::size_t>(j)];
      if (vj != a && vj != b) d = vj;
    }
    for (int j = 0; j < 3; ++j) {
      const int vj = o.v[static_cast<std::size_t>(j)];
      if (vj == b) n_ad = o.n[static_cast<std::size_t>(j)];
      if (vj == a) n_db = o.n[static_cast<std::size_t>(j)];
    }
    const auto [det, perm] = incircle_with_bound(P(p), P(a), P(b), P(d));
    if (!(det > kIncircleTol * perm)) return;
    // Flip edge (a, b) to (p, d); quad order is p, a, d, b.
    if (!(orient(P(p), P(a), P(d)) > 0.0 && orient(P(p), P(d), P(b)) > 0.0)) return;
    const int n_pa = tr.n[static_cast<std::size_t>((ip + 2) % 3)];
    const int n_bp = tr.n[static_cast<std::size_t>((ip + 1) % 3)];
    const int t1 = t;
    const int t2 = nb;
    T(t1) = Tri{{p, a, d}, {n_ad, t2, n_pa}};
    T(t2) = Tri{{p, d, b}, {n_db, n_bp, t1}};
    relink(t1);
    relink(t2);
    stack_.emplace_back(t1, p);
    stack_.emplace_back(t2, p);
  }

  std::vector<Point> pts_;
  std::size_t real_;
  std::vector<Tri> tris_;
  std::vector<std::pair<int, int>> stack_;
  int last_ = 0;
};

}  // namespace

double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  return incircle_with_bound(a, b, c, d).first;
}

std::vector<Triangle> delaunay_triangulate(std::span<const Point> points) {
  if (points.size() < 3) throw DegenerateInput("delaunay: at least three points are required");
  Builder builder(points);
  for (std::size_t i = 0; i < points.size(); ++i) builder.insert(static_cast<int>(i));
  auto tris = builder.result();
  if (tris.empty()) throw DegenerateInput("delaunay: all points are collinear");
  return tris;
}

}  // namespace phsadapt
