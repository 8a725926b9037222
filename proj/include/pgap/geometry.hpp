#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pgap/errors.hpp"

namespace pgap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  Vec2 rot90() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Validated convex planar domain; vertices counterclockwise, strictly
/// convex turn at every vertex.
class ConvexPolygon2D {
 public:
  struct Edge {
    Vec2 a, b;
    Vec2 normal;    // outward unit normal
    double offset;  // normal . x <= offset on the polygon
  };

  /// Validates and reorients a vertex loop. Degeneracy tolerance for
  /// convexity: cross product >= 1e-12 * (bounding-box scale)^2, so thin
  /// rectangles down to eps = 1e-4 pass.
  static ConvexPolygon2D validate(std::vector<Vec2> pts) {
    if (pts.size() < 3)
      throw Error(ErrorCode::TooFewVertices, "need at least 3 vertices");
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& v : pts) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
    const double scale = std::max({xmax - xmin, ymax - ymin, 1e-300});
    const double tol = 1e-12 * scale * scale;

    double signed2 = 0.0;  // twice the signed area
    for (size_t i = 0; i < pts.size(); ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % pts.size()];
      signed2 += a.cross(b);
    }
    if (std::abs(signed2) <= 2.0 * tol)
      throw Error(ErrorCode::Degenerate, "polygon area below tolerance");
    if (signed2 < 0.0) std::reverse(pts.begin(), pts.end());

    for (size_t i = 0; i < pts.size(); ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % pts.size()];
      const Vec2& c = pts[(i + 2) % pts.size()];
      if ((b - a).cross(c - b) <= tol)
        throw Error(ErrorCode::NonConvex, "non-strictly-convex turn at vertex " +
                                              std::to_string((i + 1) % pts.size()));
    }
    ConvexPolygon2D poly;
    poly.verts_ = std::move(pts);
    return poly;
  }

  const std::vector<Vec2>& vertices() const { return verts_; }
  size_t size() const { return verts_.size(); }

  double area() const {
    double s = 0.0;
    for (size_t i = 0; i < verts_.size(); ++i)
      s += verts_[i].cross(verts_[(i + 1) % verts_.size()]);
    return 0.5 * s;
  }

  Vec2 centroid() const {
    double a = 0.0;
    Vec2 c{0.0, 0.0};
    for (size_t i = 0; i < verts_.size(); ++i) {
      const Vec2& p = verts_[i];
      const Vec2& q = verts_[(i + 1) % verts_.size()];
      const double w = p.cross(q);
      a += w;
      c = c + (p + q) * w;
    }
    return c / (3.0 * a);
  }

  /// Max distance over vertex pairs; equals the convex-body diameter.
  double diameter() const {
    double best = 0.0;
    for (size_t i = 0; i < verts_.size(); ++i)
      for (size_t j = i + 1; j < verts_.size(); ++j)
        best = std::max(best, (verts_[i] - verts_[j]).norm());
    return best;
  }

  /// Minimal support-slab width; attained in a direction normal to an edge.
  double width() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < verts_.size(); ++i) {
      const Vec2 d = (verts_[(i + 1) % verts_.size()] - verts_[i]).normalized();
      const Vec2 n = d.rot90();
      double lo = n.dot(verts_[0]), hi = lo;
      for (const auto& v : verts_) {
        const double t = n.dot(v);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      best = std::min(best, hi - lo);
    }
    return best;
  }

  /// Maximum vertical section length (the "depth" eta in the N=2 proof).
  double vertical_depth() const {
    double best = 0.0;
    // The maximum over x of the section length is attained at a vertex
    // abscissa (the section length is concave piecewise-linear in x).
    for (const auto& v : verts_) {
      double ylo = std::numeric_limits<double>::infinity();
      double yhi = -ylo;
      bool hit = false;
      for (size_t i = 0; i < verts_.size(); ++i) {
        const Vec2 a = verts_[i];
        const Vec2 b = verts_[(i + 1) % verts_.size()];
        if ((a.x - v.x) * (b.x - v.x) <= 0.0 && a.x != b.x) {
          const double t = (v.x - a.x) / (b.x - a.x);
          if (t >= 0.0 && t <= 1.0) {
            const double y = a.y + t * (b.y - a.y);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
            hit = true;
          }
        }
      }
      if (hit) best = std::max(best, yhi - ylo);
    }
    return best;
  }

  double support(Vec2 dir) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts_) best = std::max(best, dir.dot(v));
    return best;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> es;
    es.reserve(verts_.size());
    for (size_t i = 0; i < verts_.size(); ++i) {
      Edge e;
      e.a = verts_[i];
      e.b = verts_[(i + 1) % verts_.size()];
      e.normal = (e.b - e.a).normalized().rot90() * -1.0;  // CCW loop -> outward
      e.offset = e.normal.dot(e.a);
      es.push_back(e);
    }
    return es;
  }

  bool contains(Vec2 p, double tol = 0.0) const {
    for (size_t i = 0; i < verts_.size(); ++i) {
      const Vec2 a = verts_[i];
      const Vec2 b = verts_[(i + 1) % verts_.size()];
      if ((b - a).cross(p - a) < -tol) return false;
    }
    return true;
  }

  /// Signed distance to the boundary: positive inside.
  double boundary_distance(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < verts_.size(); ++i) {
      const Vec2 a = verts_[i];
      const Vec2 b = verts_[(i + 1) % verts_.size()];
      const Vec2 n = (b - a).normalized().rot90();  // inward for CCW
      best = std::min(best, n.dot(p - a));
    }
    return best;
  }

  static ConvexPolygon2D rectangle(double lx, double ly, Vec2 origin = {0.0, 0.0}) {
    return validate({origin,
                     {origin.x + lx, origin.y},
                     {origin.x + lx, origin.y + ly},
                     {origin.x, origin.y + ly}});
  }

  static ConvexPolygon2D regular_ngon(int n, double radius = 1.0, Vec2 center = {0.0, 0.0}) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * 3.141592653589793238463 * i / n;
      pts.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
    }
    return validate(std::move(pts));
  }

 private:
  std::vector<Vec2> verts_;
};

/// Maximal-area inscribed ellipse: {center + R(angle) diag(a1,a2) u, |u|<=1}
/// with a1 >= a2. The factor-2 dilation about the center contains the
/// polygon (N = 2 case of John's theorem).
struct JohnEllipse {
  Vec2 center;
  double a1 = 0.0;
  double a2 = 0.0;
  double angle = 0.0;  // radians, direction of the a1 axis

  double support(Vec2 dir) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 e1{c, s}, e2{-s, c};
    const double u = a1 * dir.dot(e1), v = a2 * dir.dot(e2);
    return center.dot(dir) + std::hypot(u, v);
  }

  double area() const { return 3.141592653589793238463 * a1 * a2; }
};

namespace detail {

// 2x2 symmetric matrix [[m00,m01],[m01,m11]] helpers for the john solver.
struct Sym2 {
  double m00 = 1.0, m01 = 0.0, m11 = 1.0;
  double det() const { return m00 * m11 - m01 * m01; }
  bool spd() const { return m00 > 0.0 && det() > 0.0; }
  Vec2 apply(Vec2 v) const { return {m00 * v.x + m01 * v.y, m01 * v.x + m11 * v.y}; }
};

} // namespace detail

/// Interior-point ascent on log det(B) under the per-edge containment
/// constraints n_i . c + |B n_i| <= d_i. The polygon is affinely normalized
/// first so the iteration is well conditioned even for thin rectangles.
inline JohnEllipse john_ellipse(const ConvexPolygon2D& poly) {
  using detail::Sym2;
  const Vec2 c0 = poly.centroid();
  double xs = 0.0, ys = 0.0;
  for (const auto& v : poly.vertices()) {
    xs = std::max(xs, std::abs(v.x - c0.x));
    ys = std::max(ys, std::abs(v.y - c0.y));
  }
  // normalized polygon edge data: a.x' <= d with x' = S(x - c0)
  struct Cons {
    Vec2 a;
    double d;
  };
  std::vector<Cons> cons;
  for (const auto& e : poly.edges()) {
    // normal in scaled coordinates: a' = S^-1 n (unnormalized), offset shifts
    Vec2 ap{e.normal.x * xs, e.normal.y * ys};
    double dd = e.offset - e.normal.dot(c0);
    const double nn = ap.norm();
    cons.push_back({ap / nn, dd / nn});
  }

  Sym2 B;
  Vec2 c{0.0, 0.0};
  {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& k : cons) r = std::min(r, k.d - k.a.dot(c));
    if (!(r > 0.0)) {
      // centroid in scaled coordinates is interior for any convex polygon;
      // this only trips on degenerate input
      throw Error(ErrorCode::SolverDidNotConverge, "no interior start for john ellipse");
    }
    B = {0.8 * r, 0.0, 0.8 * r};
  }

  auto slacks = [&](const Sym2& Bq, Vec2 cq, std::vector<double>& g) {
    bool ok = true;
    g.resize(cons.size());
    for (size_t i = 0; i < cons.size(); ++i) {
      g[i] = cons[i].d - cons[i].a.dot(cq) - Bq.apply(cons[i].a).norm();
      if (!(g[i] > 0.0)) ok = false;
    }
    return ok;
  };

  std::vector<double> g;
  if (!slacks(B, c, g))
    throw Error(ErrorCode::SolverDidNotConverge, "infeasible john ellipse start");

  // state vector z = (b11, b12, b22, cx, cy)
  auto pack = [](const Sym2& Bq, Vec2 cq) {
    return std::array<double, 5>{Bq.m00, Bq.m01, Bq.m11, cq.x, cq.y};
  };
  auto unpack = [](const std::array<double, 5>& z, Sym2& Bq, Vec2& cq) {
    Bq = {z[0], z[1], z[2]};
    cq = {z[3], z[4]};
  };
  auto phi_of = [&](const std::array<double, 5>& z, double mu, bool& feasible) {
    Sym2 Bq;
    Vec2 cq;
    unpack(z, Bq, cq);
    std::vector<double> gq;
    if (!Bq.spd() || !slacks(Bq, cq, gq)) {
      feasible = false;
      return -1e300;
    }
    feasible = true;
    double s = std::log(Bq.det());
    for (double v : gq) s += mu * std::log(v);
    return s;
  };
  auto grad_of = [&](const std::array<double, 5>& z, double mu) {
    Sym2 Bq;
    Vec2 cq;
    unpack(z, Bq, cq);
    std::vector<double> gq;
    slacks(Bq, cq, gq);
    const double det = Bq.det();
    std::array<double, 5> gr{Bq.m11 / det, -2.0 * Bq.m01 / det, Bq.m00 / det, 0.0, 0.0};
    for (size_t i = 0; i < cons.size(); ++i) {
      const Vec2 a = cons[i].a;
      const Vec2 u = Bq.apply(a);
      const double un = u.norm();
      const double w = mu / gq[i];
      gr[0] -= w * (a.x * u.x) / un;
      gr[1] -= w * (a.x * u.y + a.y * u.x) / un;
      gr[2] -= w * (a.y * u.y) / un;
      gr[3] -= w * a.x;
      gr[4] -= w * a.y;
    }
    return gr;
  };

  std::array<double, 5> z = pack(B, c);
  int iter = 0;
  const int kMaxIter = 5000;
  for (double mu = 0.5; mu > 1e-13; mu *= 0.15) {
    int calm = 0;
    double prev = -1e300;
    while (calm < 5) {
      if (++iter > kMaxIter)
        throw Error(ErrorCode::SolverDidNotConverge, "john ellipse iteration budget");
      const auto gr = grad_of(z, mu);
      // damped Newton with the analytic Hessian of the barrier
      double H[5][5] = {};
      {
        Sym2 Bq;
        Vec2 cq;
        unpack(z, Bq, cq);
        std::vector<double> gq;
        slacks(Bq, cq, gq);
        const double det = Bq.det();
        const Sym2 Binv{Bq.m11 / det, -Bq.m01 / det, Bq.m00 / det};
        // basis of symmetric perturbations for (b11, b12, b22)
        const double E[3][2][2] = {{{1, 0}, {0, 0}}, {{0, 1}, {1, 0}}, {{0, 0}, {0, 1}}};
        auto mat_apply = [](const double M[2][2], Vec2 v) {
          return Vec2{M[0][0] * v.x + M[0][1] * v.y, M[1][0] * v.x + M[1][1] * v.y};
        };
        // d^2 logdet = -tr(Binv E_k Binv E_l)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            double s = 0.0;
            for (int r = 0; r < 2; ++r) {
              const Vec2 col{E[l][0][r], E[l][1][r]};      // column r of E_l
              const Vec2 t1 = Binv.apply(col);             // Binv E_l (:,r)
              const Vec2 t2 = mat_apply(E[k], t1);         // E_k Binv E_l (:,r)
              const Vec2 t3 = Binv.apply(t2);              // Binv E_k Binv E_l (:,r)
              s += (r == 0) ? t3.x : t3.y;                 // trace accumulation
            }
            H[k][l] -= s;
          }
        for (size_t i = 0; i < cons.size(); ++i) {
          const Vec2 a = cons[i].a;
          const Vec2 u = Bq.apply(a);
          const double un = u.norm();
          const Vec2 nu = u / un;
          // dg: B part -(E_k a).nu, c part -a
          std::array<double, 5> dg{};
          std::array<Vec2, 3> Ea;
          for (int k = 0; k < 3; ++k) {
            Ea[k] = mat_apply(E[k], a);
            dg[k] = -Ea[k].dot(nu);
          }
          dg[3] = -a.x;
          dg[4] = -a.y;
          const double gi = gq[i];
          for (int k = 0; k < 5; ++k)
            for (int l = 0; l < 5; ++l) H[k][l] -= mu / (gi * gi) * dg[k] * dg[l];
          // d^2 g (B block only): -(Ea_k . Ea_l)/un + (Ea_k.nu)(Ea_l.nu)/un
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double d2g = -(Ea[k].dot(Ea[l])) / un + dg[k] * dg[l] / un;
              H[k][l] += mu / gi * d2g;
            }
        }
      }
      // solve (-H + tau I) d = gr for an ascent direction
      std::array<double, 5> d = gr;
      {
        double A[5][6];
        const double tau = 1e-12;
        for (int r = 0; r < 5; ++r) {
          for (int cc = 0; cc < 5; ++cc) A[r][cc] = -H[r][cc] + (r == cc ? tau : 0.0);
          A[r][5] = gr[r];
        }
        bool ok = true;
        for (int r = 0; r < 5 && ok; ++r) {
          int piv = r;
          for (int rr = r + 1; rr < 5; ++rr)
            if (std::abs(A[rr][r]) > std::abs(A[piv][r])) piv = rr;
          if (std::abs(A[piv][r]) < 1e-300) {
            ok = false;
            break;
          }
          std::swap(A[piv], A[r]);
          for (int rr = r + 1; rr < 5; ++rr) {
            const double f = A[rr][r] / A[r][r];
            for (int cc = r; cc < 6; ++cc) A[rr][cc] -= f * A[r][cc];
          }
        }
        if (ok) {
          for (int r = 4; r >= 0; --r) {
            double s = A[r][5];
            for (int cc = r + 1; cc < 5; ++cc) s -= A[r][cc] * d[cc];
            d[r] = s / A[r][r];
          }
          double ddotg = 0.0;
          for (int k = 0; k < 5; ++k) ddotg += d[k] * gr[k];
          if (!(ddotg > 0.0)) d = gr;  // not an ascent direction, fall back
        } else {
          d = gr;
        }
      }
      bool feas0 = false;
      const double phi0 = phi_of(z, mu, feas0);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        auto zn = z;
        for (int k = 0; k < 5; ++k) zn[k] += t * d[k];
        bool feas = false;
        const double phin = phi_of(zn, mu, feas);
        if (feas && phin > phi0) {
          z = zn;
          moved = true;
          calm = (std::abs(phin - prev) <= 1e-10 * std::max(1.0, std::abs(phin)))
                     ? calm + 1
                     : 0;
          prev = phin;
          break;
        }
      }
      if (!moved) ++calm;  // stalled at this barrier level: sharpen
    }
  }
  unpack(z, B, c);

  // back to physical coordinates: x = c0 + S^-1 x'; M = S^-1 B
  const double m00 = xs * B.m00, m01 = xs * B.m01;
  const double m10 = ys * B.m01, m11 = ys * B.m11;
  // SVD of M via eigen-decomposition of M M^T (2x2)
  const double a_ = m00 * m00 + m01 * m01;
  const double b_ = m00 * m10 + m01 * m11;
  const double d_ = m10 * m10 + m11 * m11;
  const double tr = a_ + d_;
  const double dif = std::hypot(a_ - d_, 2.0 * b_);
  const double l1 = 0.5 * (tr + dif), l2 = 0.5 * (tr - dif);
  JohnEllipse e;
  e.center = {c0.x + xs * c.x, c0.y + ys * c.y};
  e.a1 = std::sqrt(std::max(l1, 0.0));
  e.a2 = std::sqrt(std::max(l2, 0.0));
  e.angle = 0.5 * std::atan2(2.0 * b_, a_ - d_);
  return e;
}

/// Deterministic uniform double in [0,1) from a mt19937_64 stream.
/// (uniform_real_distribution is not bit-stable across standard libraries.)
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

namespace detail {

inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {  // upper
    while (k >= lower && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

} // namespace detail

/// Convex hull of n_points uniform in the unit disk, rescaled to diameter
/// exactly 1. Deterministic per seed.
inline ConvexPolygon2D random_convex_polygon(std::uint64_t seed, int n_points) {
  if (n_points < 3)
    throw Error(ErrorCode::TooFewVertices, "random_convex_polygon needs n_points >= 3");
  for (int attempt = 0; attempt < 64; ++attempt) {
    SeededRng rng(seed + 0x9e3779b97f4a7c15ULL * std::uint64_t(attempt));
    std::vector<Vec2> pts;
    pts.reserve(n_points);
    while (static_cast<int>(pts.size()) < n_points) {
      const double x = 2.0 * rng.uniform() - 1.0;
      const double y = 2.0 * rng.uniform() - 1.0;
      if (x * x + y * y <= 1.0) pts.push_back({x, y});
    }
    auto hull = detail::convex_hull(pts);
    if (hull.size() < 3) continue;
    try {
      auto poly = ConvexPolygon2D::validate(hull);
      const double d = poly.diameter();
      std::vector<Vec2> scaled;
      scaled.reserve(hull.size());
      for (const auto& v : poly.vertices()) scaled.push_back(v / d);
      return ConvexPolygon2D::validate(std::move(scaled));
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorCode::Degenerate, "random_convex_polygon failed after retries");
}

} // namespace pgap
