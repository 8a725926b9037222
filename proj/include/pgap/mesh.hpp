#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "pgap/errors.hpp"
#include "pgap/geometry.hpp"

namespace pgap {

/// Conforming triangulation of a convex polygon.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<bool> boundary;
  double target_h = 0.0;
  double realized_h = 0.0;   // max edge length
  double min_angle_deg = 0.0;
  double area = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int tri_count() const { return static_cast<int>(triangles.size()); }

  double tri_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * (nodes[tr[1]] - nodes[tr[0]]).cross(nodes[tr[2]] - nodes[tr[0]]);
  }
};

namespace meshdetail {

inline long double orient(Vec2 a, Vec2 b, Vec2 p) {
  return ((long double)b.x - a.x) * ((long double)p.y - a.y) -
         ((long double)b.y - a.y) * ((long double)p.x - a.x);
}

// d strictly inside circumcircle of CCW triangle (a,b,c)
inline bool in_circle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const long double ax = a.x - d.x, ay = a.y - d.y;
  const long double bx = b.x - d.x, by = b.y - d.y;
  const long double cx = c.x - d.x, cy = c.y - d.y;
  const long double det = (ax * ax + ay * ay) * (bx * cy - by * cx) -
                          (bx * bx + by * by) * (ax * cy - ay * cx) +
                          (cx * cx + cy * cy) * (ax * by - ay * bx);
  return det > 0.0L;
}

struct DTri {
  std::array<int, 3> v{-1, -1, -1};
  std::array<int, 3> nb{-1, -1, -1};  // nb[i] across the edge opposite v[i]
  bool alive = false;
};

/// Incremental Bowyer-Watson with walking point location.
class Delaunay {
 public:
  explicit Delaunay(const std::vector<Vec2>& input) : pts_(input) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double r = 4.0 * std::max({xmax - xmin, ymax - ymin, 1e-12});
    const int s0 = add_point({cx - 2.5 * r, cy - r});
    const int s1 = add_point({cx + 2.5 * r, cy - r});
    const int s2 = add_point({cx, cy + 2.5 * r});
    super_ = static_cast<int>(pts_.size()) - 3;
    DTri t;
    t.v = {s0, s1, s2};
    t.alive = true;
    tris_.push_back(t);
    last_ = 0;
    for (int i = 0; i < super_; ++i) insert(i);
  }

  /// Triangles not touching the synthetic super-vertices.
  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int add_point(Vec2 p) {
    pts_.push_back(p);
    return static_cast<int>(pts_.size()) - 1;
  }

  int locate(Vec2 p) const {
    int cur = last_;
    if (cur < 0 || !tris_[cur].alive)
      for (size_t i = 0; i < tris_.size(); ++i)
        if (tris_[i].alive) {
          cur = static_cast<int>(i);
          break;
        }
    // walk toward p across the most violated edge; ties on exact edges can
    // make a first-negative walk cycle
    for (int guard = 0; guard < 2 * static_cast<int>(tris_.size()) + 64; ++guard) {
      const DTri& t = tris_[cur];
      int next = -1;
      long double worst = 0.0L;
      for (int i = 0; i < 3; ++i) {
        const Vec2 a = pts_[t.v[(i + 1) % 3]];
        const Vec2 b = pts_[t.v[(i + 2) % 3]];
        const long double o = orient(a, b, p);
        if (o < worst && t.nb[i] >= 0) {
          worst = o;
          next = t.nb[i];
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // walk cycled on degenerate geometry: fall back to a containment scan
    for (size_t i = 0; i < tris_.size(); ++i) {
      if (!tris_[i].alive) continue;
      const DTri& t = tris_[i];
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k)
        inside = orient(pts_[t.v[k]], pts_[t.v[(k + 1) % 3]], p) >= 0.0L;
      if (inside) return static_cast<int>(i);
    }
    throw Error(ErrorCode::SolverDidNotConverge, "mesh point location failed");
  }

  void insert(int ip) {
    const Vec2 p = pts_[ip];
    const int seed = locate(p);

    // cavity: connected set of triangles whose circumcircle contains p
    std::vector<int> bad;
    std::vector<int> stack{seed};
    std::vector<char> mark(tris_.size(), 0);
    mark[seed] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      const DTri& t = tris_[ti];
      if (!in_circle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p)) {
        mark[ti] = 2;  // visited, not bad
        continue;
      }
      mark[ti] = 3;  // bad
      bad.push_back(ti);
      for (int nb : t.nb)
        if (nb >= 0 && !mark[nb]) {
          mark[nb] = 1;
          stack.push_back(nb);
        }
    }
    if (bad.empty()) {
      // p is on/outside every circumcircle (degenerate); treat the located
      // triangle as the cavity
      bad.push_back(seed);
      mark[seed] = 3;
    }

    struct BEdge {
      int a, b, outside;
    };
    std::vector<BEdge> boundary;
    for (int ti : bad) {
      const DTri& t = tris_[ti];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.nb[i];
        if (nb < 0 || mark[nb] != 3)
          boundary.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb});
      }
    }
    for (int ti : bad) tris_[ti].alive = false;

    // fan of new CCW triangles (p, a, b) over the cavity boundary; spokes
    // (p,a) and (b,p) are shared with the fan neighbors
    std::unordered_map<int, int> by_first, by_second;  // outer edge a->b
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      DTri nt;
      nt.v = {ip, e.a, e.b};
      nt.nb = {e.outside, -1, -1};
      nt.alive = true;
      const int id = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      created.push_back(id);
      if (e.outside >= 0) {
        DTri& o = tris_[e.outside];
        for (int i = 0; i < 3; ++i)
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.nb[i] = id;
      }
      by_first[e.a] = id;
      by_second[e.b] = id;
    }
    for (int id : created) {
      DTri& t = tris_[id];
      const auto f = by_first.find(t.v[2]);   // edge (b, p): mate starts at b
      const auto s = by_second.find(t.v[1]);  // edge (p, a): mate ends at a
      if (f == by_first.end() || s == by_second.end())
        throw Error(ErrorCode::SolverDidNotConverge,
                    "degenerate cavity while inserting a mesh point");
      t.nb[1] = f->second;
      t.nb[2] = s->second;
    }
    last_ = created.empty() ? last_ : created.back();
  }

  std::vector<Vec2> pts_;
  std::vector<DTri> tris_;
  int super_ = 0;
  int last_ = 0;
};

inline void finalize_stats(Mesh& m) {
  m.realized_h = 0.0;
  m.min_angle_deg = 180.0;
  m.area = 0.0;
  for (const auto& t : m.triangles) {
    const Vec2 a = m.nodes[t[0]], b = m.nodes[t[1]], c = m.nodes[t[2]];
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    m.realized_h = std::max({m.realized_h, la, lb, lc});
    auto angle = [](double opp, double s1, double s2) {
      const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2),
                                     -1.0, 1.0);
      return std::acos(cosv) * 180.0 / 3.141592653589793238463;
    };
    m.min_angle_deg = std::min({m.min_angle_deg, angle(la, lb, lc), angle(lb, lc, la),
                                angle(lc, la, lb)});
    m.area += 0.5 * (b - a).cross(c - a);
  }
}

inline bool axis_aligned_rectangle(const ConvexPolygon2D& poly, double& x0, double& y0,
                                   double& lx, double& ly) {
  if (poly.size() != 4) return false;
  const auto& v = poly.vertices();
  for (int i = 0; i < 4; ++i) {
    const Vec2 d = v[(i + 1) % 4] - v[i];
    if (d.x != 0.0 && d.y != 0.0) return false;
  }
  double xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
  for (const auto& p : v) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  x0 = xmin;
  y0 = ymin;
  lx = xmax - xmin;
  ly = ymax - ymin;
  return lx > 0.0 && ly > 0.0;
}

} // namespace meshdetail

/// Delaunay-refined conforming mesh with target edge length h. The target is
/// capped at width/4 so thin domains always get at least 4 element layers
/// across the short side. Axis-aligned rectangles take a structured path
/// (uniform diagonal, nested under h -> h/2 refinement).
inline Mesh triangulate(const ConvexPolygon2D& poly, double h,
                        std::size_t node_cap = 500000) {
  const double diam = poly.diameter();
  if (!(h > 0.0) || h > 0.5 * diam)
    throw Error(ErrorCode::InvalidExponent, "triangulate requires 0 < h <= diameter/2");
  const double h_eff = std::min(h, poly.width() / 4.0);

  Mesh mesh;
  mesh.target_h = h;

  double x0, y0, lx, ly;
  if (meshdetail::axis_aligned_rectangle(poly, x0, y0, lx, ly)) {
    const int nx = std::max(1, (int)std::ceil(lx / h_eff));
    const int ny = std::max(1, (int)std::ceil(ly / h_eff));
    const std::size_t nn = std::size_t(nx + 1) * std::size_t(ny + 1);
    if (nn > node_cap)
      throw Error(ErrorCode::MeshBudgetExceeded,
                  "structured mesh needs " + std::to_string(nn) + " nodes");
    mesh.nodes.reserve(nn);
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        mesh.nodes.push_back({x0 + lx * i / nx, y0 + ly * j / ny});
        mesh.boundary.push_back(i == 0 || i == nx || j == 0 || j == ny);
      }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    meshdetail::finalize_stats(mesh);
    return mesh;
  }

  // boundary ring: polygon vertices plus per-edge subdivision
  std::vector<Vec2> pts;
  std::vector<bool> bnd;
  for (const auto& e : poly.edges()) {
    const double len = (e.b - e.a).norm();
    const int k = std::max(1, (int)std::ceil(len / h_eff));
    for (int i = 0; i < k; ++i) {
      pts.push_back(e.a + (e.b - e.a) * (double(i) / k));
      bnd.push_back(true);
    }
  }
  const std::size_t n_bnd = pts.size();

  // interior hexagonal lattice, culled near the boundary, tiny deterministic
  // jitter to break cocircular degeneracies
  {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& v : poly.vertices()) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
    const double dy = h_eff * 0.8660254037844386;
    // the jitter that breaks cocircular lattice degeneracies can stay tiny
    // when the incircle predicate runs in 80-bit long double; platforms where
    // long double is plain double need a coarser perturbation
    const double jit =
        (std::numeric_limits<long double>::digits > 53 ? 2e-6 : 1e-4) * h_eff;
    std::uint64_t hsh = 0x9e3779b97f4a7c15ULL;
    int row = 0;
    for (double y = ymin + 0.5 * dy; y < ymax; y += dy, ++row) {
      const double xoff = (row % 2) ? 0.5 * h_eff : 0.0;
      for (double x = xmin + 0.5 * h_eff + xoff; x < xmax; x += h_eff) {
        Vec2 q{x, y};
        if (poly.boundary_distance(q) < 0.45 * h_eff) continue;
        hsh = hsh * 6364136223846793005ULL + 1442695040888963407ULL;
        const double jx = ((hsh >> 11) * 0x1.0p-53 - 0.5) * jit;
        hsh = hsh * 6364136223846793005ULL + 1442695040888963407ULL;
        const double jy = ((hsh >> 11) * 0x1.0p-53 - 0.5) * jit;
        pts.push_back({x + jx, y + jy});
        bnd.push_back(false);
        if (pts.size() > node_cap)
          throw Error(ErrorCode::MeshBudgetExceeded,
                      "node cap " + std::to_string(node_cap) + " exceeded");
      }
    }
  }

  // Delaunay + smoothing sweeps (interior nodes only), retriangulating after
  // each sweep; stop early once the angle quality is comfortable
  std::vector<std::array<int, 3>> tris;
  for (int round = 0; round < 8; ++round) {
    meshdetail::Delaunay dt(pts);
    tris = dt.triangles();
    // drop degenerate/outside triangles (hull == polygon, so mostly a no-op)
    std::vector<std::array<int, 3>> keep;
    keep.reserve(tris.size());
    for (auto& t : tris) {
      const double a2 = (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]);
      if (a2 <= 1e-14 * h_eff * h_eff) continue;
      const Vec2 cen = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
      if (poly.boundary_distance(cen) < -1e-9 * diam) continue;
      keep.push_back(t);
    }
    tris.swap(keep);

    Mesh probe;
    probe.nodes = pts;
    probe.triangles = tris;
    meshdetail::finalize_stats(probe);
    if (probe.min_angle_deg >= 28.0 && round >= 1) break;

    // Laplacian smoothing
    std::vector<Vec2> acc(pts.size(), Vec2{0, 0});
    std::vector<int> cnt(pts.size(), 0);
    for (const auto& t : tris)
      for (int i = 0; i < 3; ++i) {
        acc[t[i]] = acc[t[i]] + pts[t[(i + 1) % 3]] + pts[t[(i + 2) % 3]];
        cnt[t[i]] += 2;
      }
    for (std::size_t i = n_bnd; i < pts.size(); ++i)
      if (cnt[i] > 0) {
        Vec2 target = acc[i] / double(cnt[i]);
        if (poly.boundary_distance(target) > 0.2 * h_eff)
          pts[i] = pts[i] + (target - pts[i]) * 0.7;
      }
  }

  mesh.nodes = std::move(pts);
  mesh.boundary = std::move(bnd);
  mesh.triangles = std::move(tris);
  meshdetail::finalize_stats(mesh);
  return mesh;
}

} // namespace pgap
