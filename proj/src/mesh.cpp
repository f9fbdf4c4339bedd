#include "gpv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

namespace {
constexpr double kPi = std::numbers::pi;

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}
}  // namespace

double TriMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double TriMesh::triangle_diameter(int t) const {
  const auto& tr = triangles[t];
  return std::max({dist(vertices[tr[0]], vertices[tr[1]]),
                   dist(vertices[tr[1]], vertices[tr[2]]),
                   dist(vertices[tr[2]], vertices[tr[0]])});
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < num_triangles(); ++t) s += triangle_area(t);
  return s;
}

double TriMesh::domain_diameter() const {
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& v : vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  return std::hypot(xmax - xmin, ymax - ymin);
}

EdgeAdjacency build_edge_adjacency(const TriMesh& m) {
  EdgeAdjacency adj;
  adj.reserve(m.triangles.size() * 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(tr[e], tr[(e + 1) % 3]);
      auto [it, inserted] = adj.try_emplace(key, std::array<int, 2>{t, -1});
      if (!inserted) {
        if (it->second[1] != -1)
          throw MeshError("edge shared by more than two triangles");
        it->second[1] = t;
      }
    }
  }
  return adj;
}

void audit_mesh(const TriMesh& m) {
  if (m.boundary_vertex.size() != m.vertices.size())
    throw MeshError("boundary flag array size mismatch");
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.triangle_area(t) <= 0.0)
      throw MeshError("non-positive triangle area at triangle " +
                      std::to_string(t));
  }
  const auto adj = build_edge_adjacency(m);
  for (const auto& [key, tris] : adj) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (tris[1] == -1) {
      if (!m.boundary_vertex[a] || !m.boundary_vertex[b])
        throw MeshError("boundary edge with interior endpoint");
    }
  }
  // Every flagged vertex must lie on at least one single-triangle edge.
  std::vector<std::uint8_t> on_bedge(m.vertices.size(), 0);
  for (const auto& [key, tris] : adj) {
    if (tris[1] == -1) {
      on_bedge[static_cast<int>(key >> 32)] = 1;
      on_bedge[static_cast<int>(key & 0xffffffffu)] = 1;
    }
  }
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.boundary_vertex[v] && !on_bedge[v])
      throw MeshError("flagged boundary vertex not on a boundary edge");
  }
}

double min_angle(const TriMesh& m) {
  double amin = kPi;
  for (const auto& tr : m.triangles) {
    for (int c = 0; c < 3; ++c) {
      const Vec2& p = m.vertices[tr[c]];
      const Vec2& q = m.vertices[tr[(c + 1) % 3]];
      const Vec2& r = m.vertices[tr[(c + 2) % 3]];
      const double ux = q.x - p.x, uy = q.y - p.y;
      const double vx = r.x - p.x, vy = r.y - p.y;
      const double cosang = (ux * vx + uy * vy) /
                            (std::hypot(ux, uy) * std::hypot(vx, vy));
      amin = std::min(amin, std::acos(std::clamp(cosang, -1.0, 1.0)));
    }
  }
  return amin;
}

namespace {

/// Rotate triangle indices (orientation preserved) so the longest edge is
/// (v0, v1); vertex 2 becomes the bisection peak.
void orient_longest_edge(const std::vector<Vec2>& verts,
                         std::array<int, 3>& tr) {
  double best = -1.0;
  int rot = 0;
  for (int e = 0; e < 3; ++e) {
    const double len = dist(verts[tr[e]], verts[tr[(e + 1) % 3]]);
    if (len > best) {
      best = len;
      rot = e;
    }
  }
  std::array<int, 3> out;
  for (int k = 0; k < 3; ++k) out[k] = tr[(rot + k) % 3];
  tr = out;
}

}  // namespace

TriMesh make_ellipse_mesh(double rx, double ry, int nbseg, double inflation) {
  if (rx <= 0.0 || ry <= 0.0)
    throw ConfigError("ellipse semi-axes must be positive");
  if (nbseg < 8) throw ConfigError("@nbseg must be at least 8");
  if (inflation < 1.0) throw ConfigError("@aRdom must be at least 1");

  const double ax = inflation * rx;
  const double ay = inflation * ry;
  const int nrings = std::max(1, static_cast<int>(std::ceil(nbseg / (2.0 * kPi))));

  TriMesh m;
  m.ellipse_rx = ax;
  m.ellipse_ry = ay;
  m.vertices.push_back({0.0, 0.0});

  std::vector<std::vector<int>> rings(nrings);
  for (int k = 1; k <= nrings; ++k) {
    const double t = static_cast<double>(k) / nrings;
    int nk = (k == nrings)
                 ? nbseg
                 : std::max<int>(6, std::llround(static_cast<double>(nbseg) *
                                                 k / nrings));
    auto& ring = rings[k - 1];
    ring.reserve(nk);
    for (int j = 0; j < nk; ++j) {
      const double th = 2.0 * kPi * j / nk;
      ring.push_back(m.num_vertices());
      m.vertices.push_back({ax * t * std::cos(th), ay * t * std::sin(th)});
    }
  }
  m.boundary_vertex.assign(m.vertices.size(), 0);
  for (int v : rings.back()) m.boundary_vertex[v] = 1;

  // Fan around the center.
  {
    const auto& r1 = rings[0];
    const int n1 = static_cast<int>(r1.size());
    for (int j = 0; j < n1; ++j)
      m.triangles.push_back({0, r1[j], r1[(j + 1) % n1]});
  }
  // Annuli between consecutive rings: angular two-pointer advance.
  for (int k = 0; k + 1 < nrings; ++k) {
    const auto& in = rings[k];
    const auto& out = rings[k + 1];
    const int ni = static_cast<int>(in.size());
    const int no = static_cast<int>(out.size());
    auto ain = [&](int i) { return 2.0 * kPi * i / ni; };
    auto aout = [&](int j) { return 2.0 * kPi * j / no; };
    int i = 0, j = 0;
    while (i < ni || j < no) {
      const bool take_outer =
          j < no && (i == ni || aout(j + 1) <= ain(i + 1) + 1e-14);
      if (take_outer) {
        m.triangles.push_back({in[i % ni], out[j % no], out[(j + 1) % no]});
        ++j;
      } else {
        m.triangles.push_back({in[i % ni], out[j % no], in[(i + 1) % ni]});
        ++i;
      }
    }
  }

  for (auto& tr : m.triangles) orient_longest_edge(m.vertices, tr);
  audit_mesh(m);
  return m;
}

namespace {

/// Mutable triangulation state for compatible newest-vertex bisection.
class Refiner {
public:
  explicit Refiner(const TriMesh& m)
      : verts_(m.vertices),
        bnd_(m.boundary_vertex),
        rx_(m.ellipse_rx),
        ry_(m.ellipse_ry) {
    tris_.reserve(m.triangles.size() * 2);
    for (const auto& tr : m.triangles) tris_.push_back({tr, true});
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) link(t);
  }

  void refine(int t) {
    if (!tris_[t].alive) return;  // already split by closure
    split_compatible(t);
  }

  TriMesh finish(int generation) const {
    TriMesh out;
    out.vertices = verts_;
    out.boundary_vertex = bnd_;
    out.ellipse_rx = rx_;
    out.ellipse_ry = ry_;
    out.generation = generation;
    for (const auto& t : tris_)
      if (t.alive) out.triangles.push_back(t.v);
    return out;
  }

private:
  struct Tri {
    std::array<int, 3> v;  // refinement edge (v0, v1), peak v2
    bool alive;
  };

  void link(int t) {
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(tris_[t].v[e], tris_[t].v[(e + 1) % 3]);
      auto [it, ins] = edges_.try_emplace(key, std::array<int, 2>{t, -1});
      if (!ins) {
        if (it->second[0] == -1)
          it->second[0] = t;
        else
          it->second[1] = t;
      }
    }
  }

  void unlink(int t) {
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(tris_[t].v[e], tris_[t].v[(e + 1) % 3]);
      auto& pair = edges_.at(key);
      if (pair[0] == t)
        pair[0] = -1;
      else if (pair[1] == t)
        pair[1] = -1;
    }
  }

  int neighbor_across(std::uint64_t key, int self) const {
    const auto it = edges_.find(key);
    if (it == edges_.end()) return -1;
    for (int cand : it->second)
      if (cand != -1 && cand != self && tris_[cand].alive) return cand;
    return -1;
  }

  int midpoint(int a, int b, bool on_boundary) {
    const auto key = edge_key(a, b);
    if (const auto it = mid_.find(key); it != mid_.end()) return it->second;
    Vec2 p{0.5 * (verts_[a].x + verts_[b].x),
           0.5 * (verts_[a].y + verts_[b].y)};
    if (on_boundary && rx_ > 0.0 && ry_ > 0.0) {
      const double q = std::hypot(p.x / rx_, p.y / ry_);
      if (q > 0.0) {
        p.x /= q;
        p.y /= q;
      }
    }
    const int idx = static_cast<int>(verts_.size());
    verts_.push_back(p);
    bnd_.push_back(on_boundary ? 1 : 0);
    mid_.emplace(key, idx);
    return idx;
  }

  void bisect(int t, int m) {
    const auto v = tris_[t].v;
    unlink(t);
    tris_[t].alive = false;
    const int c1 = static_cast<int>(tris_.size());
    tris_.push_back({{v[2], v[0], m}, true});
    link(c1);
    const int c2 = static_cast<int>(tris_.size());
    tris_.push_back({{v[1], v[2], m}, true});
    link(c2);
  }

  void split_compatible(int t) {
    const auto key = edge_key(tris_[t].v[0], tris_[t].v[1]);
    int nb = neighbor_across(key, t);
    if (nb != -1 && edge_key(tris_[nb].v[0], tris_[nb].v[1]) != key) {
      split_compatible(nb);
      nb = neighbor_across(key, t);
      // After bisecting the neighbor, the child sharing this edge has it
      // as its refinement edge.
    }
    const int a = tris_[t].v[0], b = tris_[t].v[1];
    const bool on_boundary = (nb == -1);
    const int m = midpoint(a, b, on_boundary);
    bisect(t, m);
    if (nb != -1) bisect(nb, m);
  }

  std::vector<Vec2> verts_;
  std::vector<std::uint8_t> bnd_;
  std::vector<Tri> tris_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edges_;
  std::unordered_map<std::uint64_t, int> mid_;
  double rx_, ry_;
};

}  // namespace

TriMesh bisect_refine(const TriMesh& m, const std::vector<int>& marked) {
  if (marked.empty()) return m;
  for (int t : marked) {
    if (t < 0 || t >= m.num_triangles())
      throw MeshError("marked triangle index out of range");
  }
  Refiner r(m);
  for (int t : marked) r.refine(t);
  return r.finish(m.generation + 1);
}

TriMesh uniform_refine(const TriMesh& m) {
  std::vector<int> all(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
  return bisect_refine(m, all);
}

PointLocator::PointLocator(const TriMesh& m) : mesh_(m) {
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  double hsum = 0.0;
  for (const auto& v : m.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  for (int t = 0; t < m.num_triangles(); ++t) hsum += m.triangle_diameter(t);
  cell_ = std::max(hsum / std::max(1, m.num_triangles()), 1e-12);
  x0_ = xmin - cell_;
  y0_ = ymin - cell_;
  nx_ = static_cast<int>((xmax - x0_) / cell_) + 2;
  ny_ = static_cast<int>((ymax - y0_) / cell_) + 2;
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    double txmin = std::numeric_limits<double>::max(), txmax = -txmin;
    double tymin = txmin, tymax = -txmin;
    for (int k = 0; k < 3; ++k) {
      txmin = std::min(txmin, m.vertices[tr[k]].x);
      txmax = std::max(txmax, m.vertices[tr[k]].x);
      tymin = std::min(tymin, m.vertices[tr[k]].y);
      tymax = std::max(tymax, m.vertices[tr[k]].y);
    }
    const int i0 = std::clamp(static_cast<int>((txmin - x0_) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((txmax - x0_) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tymin - y0_) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((tymax - y0_) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

namespace {

std::array<double, 3> barycentric(const Vec2& a, const Vec2& b, const Vec2& c,
                                  const Vec2& p) {
  const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double l1 =
      ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
  const double l2 =
      ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

/// Closest point to p on segment [a, b], returned as the parameter t.
double segment_param(const Vec2& a, const Vec2& b, const Vec2& p) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 <= 0.0) return 0.0;
  return std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
}

}  // namespace

PointLocator::Hit PointLocator::locate(const Vec2& p) const {
  const int ci = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);

  Hit best;
  double best_score = -std::numeric_limits<double>::max();
  auto consider = [&](int t) {
    const auto& tr = mesh_.triangles[t];
    const auto bc = barycentric(mesh_.vertices[tr[0]], mesh_.vertices[tr[1]],
                                mesh_.vertices[tr[2]], p);
    const double minb = std::min({bc[0], bc[1], bc[2]});
    if (minb > best_score) {
      best_score = minb;
      best.triangle = t;
      best.bary = bc;
    }
  };

  const int rmax = std::max(nx_, ny_);
  bool seen_any = false;
  for (int radius = 0; radius <= rmax; ++radius) {
    const int i0 = std::max(0, ci - radius), i1 = std::min(nx_ - 1, ci + radius);
    const int j0 = std::max(0, cj - radius), j1 = std::min(ny_ - 1, cj + radius);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        if (radius > 0 && i != i0 && i != i1 && j != j0 && j != j1) continue;
        for (int t : cells_[static_cast<std::size_t>(j) * nx_ + i]) consider(t);
      }
    }
    if (best_score >= -1e-13) break;       // inside a triangle
    if (seen_any && radius >= 2) break;    // nearest candidate found
    if (best.triangle != -1) seen_any = true;
  }
  if (best.triangle == -1) throw MeshError("point locator: empty mesh");

  if (best_score >= -1e-13) {
    for (auto& b : best.bary) b = std::max(b, 0.0);
    const double s = best.bary[0] + best.bary[1] + best.bary[2];
    for (auto& b : best.bary) b /= s;
    best.outside_distance = 0.0;
    return best;
  }

  // Outside: closest point on the best triangle's edges.
  const auto& tr = mesh_.triangles[best.triangle];
  double dmin = std::numeric_limits<double>::max();
  std::array<double, 3> bbest{};
  for (int e = 0; e < 3; ++e) {
    const int ia = e, ib = (e + 1) % 3;
    const Vec2& a = mesh_.vertices[tr[ia]];
    const Vec2& b = mesh_.vertices[tr[ib]];
    const double t = segment_param(a, b, p);
    const Vec2 q{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    const double d = dist(q, p);
    if (d < dmin) {
      dmin = d;
      bbest = {0.0, 0.0, 0.0};
      bbest[ia] = 1.0 - t;
      bbest[ib] = t;
    }
  }
  best.bary = bbest;
  best.outside_distance = dmin;
  return best;
}

RadialMesh1D make_radial_mesh(double r_max, int n) {
  if (r_max <= 0.0) throw ConfigError("radial mesh radius must be positive");
  if (n < 16) throw ConfigError("radial mesh needs at least 16 intervals");
  RadialMesh1D rm;
  rm.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    rm.nodes[i] = r_max * static_cast<double>(i) / n;
  rm.nodes.back() = r_max;
  return rm;
}

void write_mesh(const TriMesh& m, std::ostream& os) {
  os.precision(17);
  os << "GPV-MESH 1\n";
  os << m.ellipse_rx << ' ' << m.ellipse_ry << ' ' << m.generation << '\n';
  os << m.num_vertices() << '\n';
  for (int v = 0; v < m.num_vertices(); ++v)
    os << m.vertices[v].x << ' ' << m.vertices[v].y << ' '
       << static_cast<int>(m.boundary_vertex[v]) << '\n';
  os << m.num_triangles() << '\n';
  for (const auto& tr : m.triangles)
    os << tr[0] << ' ' << tr[1] << ' ' << tr[2] << '\n';
}

TriMesh read_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "GPV-MESH" || version != 1)
    throw IoError("bad mesh header: '" + magic + " " +
                  std::to_string(version) + "'");
  TriMesh m;
  int nv = 0, nt = 0;
  is >> m.ellipse_rx >> m.ellipse_ry >> m.generation >> nv;
  if (!is || nv <= 0) throw IoError("bad mesh vertex count");
  m.vertices.resize(nv);
  m.boundary_vertex.resize(nv);
  for (int v = 0; v < nv; ++v) {
    int flag = 0;
    is >> m.vertices[v].x >> m.vertices[v].y >> flag;
    m.boundary_vertex[v] = static_cast<std::uint8_t>(flag);
  }
  is >> nt;
  if (!is || nt <= 0) throw IoError("bad mesh triangle count");
  m.triangles.resize(nt);
  for (auto& tr : m.triangles) is >> tr[0] >> tr[1] >> tr[2];
  if (!is) throw IoError("truncated mesh file");
  audit_mesh(m);
  return m;
}

void save_mesh(const TriMesh& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_mesh(m, os);
  if (!os) throw IoError("write failed: " + path);
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_mesh(is);
}

}  // namespace gpv
