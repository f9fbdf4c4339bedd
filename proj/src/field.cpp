#include "gpv/field.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

const TriQuad& tri_quad_degree2() {
  static const TriQuad q = [] {
    TriQuad r;
    r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }();
  return q;
}

const TriQuad& tri_quad_degree4() {
  static const TriQuad q = [] {
    TriQuad r;
    const double a1 = 0.816847572980459, b1 = 0.091576213509771;
    const double w1 = 0.109951743655322;
    const double a2 = 0.108103018168070, b2 = 0.445948490915965;
    const double w2 = 0.223381589678011;
    r.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return q;
}

const TriQuad& tri_quad_degree6() {
  static const TriQuad q = [] {
    TriQuad r;
    const double a1 = 0.873821971016996, b1 = 0.063089014491502;
    const double w1 = 0.050844906370207;
    const double a2 = 0.501426509658179, b2 = 0.249286745170910;
    const double w2 = 0.116786275726379;
    const double a3 = 0.636502499121399, b3 = 0.310352451033785;
    const double c3 = 0.053145049844816;
    const double w3 = 0.082851075618374;
    r.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2},
                {a3, b3, c3}, {a3, c3, b3}, {b3, a3, c3},
                {b3, c3, a3}, {c3, a3, b3}, {c3, b3, a3}};
    r.weights = {w1, w1, w1, w2, w2, w2, w3, w3, w3, w3, w3, w3};
    return r;
  }();
  return q;
}

Discretization::Discretization(const TriMesh& m, const ModelParams& p)
    : mesh(&m), params(p) {
  const int nv = m.num_vertices();
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> tM, tK, tR, tP, tPe, tW;
  const std::size_t guess = m.triangles.size() * 9;
  tM.reserve(guess);
  tK.reserve(guess);
  tR.reserve(guess);
  tP.reserve(guess);
  tPe.reserve(guess);
  tW.reserve(guess);

  const auto& q4 = tri_quad_degree4();
  const auto& q6 = tri_quad_degree6();
  quad4_w.resize(m.triangles.size());

  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const Vec2& p0 = m.vertices[tr[0]];
    const Vec2& p1 = m.vertices[tr[1]];
    const Vec2& p2 = m.vertices[tr[2]];
    const double area = m.triangle_area(t);

    // Constant barycentric gradients.
    double gx[3], gy[3];
    gx[0] = (p1.y - p2.y) / (2.0 * area);
    gy[0] = (p2.x - p1.x) / (2.0 * area);
    gx[1] = (p2.y - p0.y) / (2.0 * area);
    gy[1] = (p0.x - p2.x) / (2.0 * area);
    gx[2] = (p0.y - p1.y) / (2.0 * area);
    gy[2] = (p1.x - p0.x) / (2.0 * area);

    const double xs[3] = {p0.x, p1.x, p2.x};
    const double ys[3] = {p0.y, p1.y, p2.y};

    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int gi = tr[i], gj = tr[j];
        tM.emplace_back(gi, gj, area / 12.0 * (i == j ? 2.0 : 1.0));
        tK.emplace_back(gi, gj, area * (gx[i] * gx[j] + gy[i] * gy[j]));
        // int phi_i x = area (2 x_i + x_j + x_k) / 12 and likewise in y.
        const double ix =
            area * (xs[0] + xs[1] + xs[2] + xs[i]) / 12.0;
        const double iy =
            area * (ys[0] + ys[1] + ys[2] + ys[i]) / 12.0;
        tR.emplace_back(gi, gj, iy * gx[j] - ix * gy[j]);
      }
    }

    double pe[3][3] = {}, pb[3][3] = {}, wm[3][3] = {};
    for (std::size_t qp = 0; qp < q6.points.size(); ++qp) {
      const auto& bc = q6.points[qp];
      const double w = q6.weights[qp] * area;
      const double x = bc[0] * xs[0] + bc[1] * xs[1] + bc[2] * xs[2];
      const double y = bc[0] * ys[0] + bc[1] * ys[1] + bc[2] * ys[2];
      const double cb = p.c_trap(x, y);
      const double ce = p.c_trap_eff(x, y);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          pb[i][j] += w * cb * bc[i] * bc[j];
          pe[i][j] += w * ce * bc[i] * bc[j];
        }
    }
    for (std::size_t qp = 0; qp < q4.points.size(); ++qp) {
      const auto& bc = q4.points[qp];
      const double w = q4.weights[qp] * area;
      quad4_w[t][qp] = w;
      const double x = bc[0] * xs[0] + bc[1] * xs[1] + bc[2] * xs[2];
      const double y = bc[0] * ys[0] + bc[1] * ys[1] + bc[2] * ys[2];
      const double cw = 1.0 + p.c_omega * p.c_omega * (x * x + y * y);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) wm[i][j] += w * cw * bc[i] * bc[j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tP.emplace_back(tr[i], tr[j], pb[i][j]);
        tPe.emplace_back(tr[i], tr[j], pe[i][j]);
        tW.emplace_back(tr[i], tr[j], wm[i][j]);
      }
  }

  auto build = [nv](std::vector<Trip>& trips) {
    SpMat s(nv, nv);
    s.setFromTriplets(trips.begin(), trips.end());
    s.makeCompressed();
    return s;
  };
  M = build(tM);
  K = build(tK);
  P = build(tP);
  Peff = build(tPe);
  W = build(tW);
  SpMat R = build(tR);
  Ra = 0.5 * (R - SpMat(R.transpose()));
  Ra.makeCompressed();
}

double l2_inner(const SpMat& M, const Vec& x, const Vec& y) {
  return x.dot(M * y);
}

double l2_norm(const SpMat& M, const ComplexField& u) {
  return std::sqrt(l2_inner(M, u.re, u.re) + l2_inner(M, u.im, u.im));
}

double normalize(const SpMat& M, ComplexField& u) {
  const double n = l2_norm(M, u);
  if (!(n > 0.0) || !std::isfinite(n))
    throw NumericError("cannot normalize a vanishing field");
  u.re /= n;
  u.im /= n;
  return n;
}

double l2_norm_quad(const TriMesh& m, const ComplexField& u) {
  const auto& q2 = tri_quad_degree2();
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const double area = m.triangle_area(t);
    for (std::size_t qp = 0; qp < q2.points.size(); ++qp) {
      const auto& bc = q2.points[qp];
      double ur = 0.0, ui = 0.0;
      for (int k = 0; k < 3; ++k) {
        ur += bc[k] * u.re[tr[k]];
        ui += bc[k] * u.im[tr[k]];
      }
      s += q2.weights[qp] * area * (ur * ur + ui * ui);
    }
  }
  return std::sqrt(s);
}

double normalize_quad(const TriMesh& m, ComplexField& u) {
  const double n = l2_norm_quad(m, u);
  if (!(n > 0.0) || !std::isfinite(n))
    throw NumericError("cannot normalize a vanishing field");
  u.re /= n;
  u.im /= n;
  return n;
}

double quartic_integral(const Discretization& d, const ComplexField& u) {
  const auto& q4 = tri_quad_degree4();
  const TriMesh& m = *d.mesh;
  double s = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    for (std::size_t qp = 0; qp < q4.points.size(); ++qp) {
      const auto& bc = q4.points[qp];
      double ur = 0.0, ui = 0.0;
      for (int k = 0; k < 3; ++k) {
        ur += bc[k] * u.re[tr[k]];
        ui += bc[k] * u.im[tr[k]];
      }
      const double rho = ur * ur + ui * ui;
      s += d.quad4_w[t][qp] * rho * rho;
    }
  }
  return s;
}

void cubic_vectors(const Discretization& d, const ComplexField& u, Vec& cr,
                   Vec& ci) {
  const auto& q4 = tri_quad_degree4();
  const TriMesh& m = *d.mesh;
  cr = Vec::Zero(m.num_vertices());
  ci = Vec::Zero(m.num_vertices());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    for (std::size_t qp = 0; qp < q4.points.size(); ++qp) {
      const auto& bc = q4.points[qp];
      double ur = 0.0, ui = 0.0;
      for (int k = 0; k < 3; ++k) {
        ur += bc[k] * u.re[tr[k]];
        ui += bc[k] * u.im[tr[k]];
      }
      const double rho = ur * ur + ui * ui;
      const double w = d.quad4_w[t][qp];
      for (int k = 0; k < 3; ++k) {
        cr[tr[k]] += w * rho * ur * bc[k];
        ci[tr[k]] += w * rho * ui * bc[k];
      }
    }
  }
}

void apply_dirichlet(const TriMesh& m, ComplexField& u) {
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.boundary_vertex[v]) {
      u.re[v] = 0.0;
      u.im[v] = 0.0;
    }
  }
}

ComplexField transfer_field(const TriMesh& src_mesh, const ComplexField& src,
                            const TriMesh& dst_mesh) {
  if (src.size() != src_mesh.num_vertices())
    throw MeshError("field size does not match source mesh");
  const PointLocator loc(src_mesh);
  const double tol = 1e-8 * src_mesh.domain_diameter();

  // Source boundary vertices, for nearest-boundary evaluation of
  // destination boundary points that fall just outside the source mesh.
  std::vector<int> src_bnd;
  for (int v = 0; v < src_mesh.num_vertices(); ++v)
    if (src_mesh.boundary_vertex[v]) src_bnd.push_back(v);

  ComplexField out(dst_mesh.num_vertices());
  for (int v = 0; v < dst_mesh.num_vertices(); ++v) {
    const Vec2& p = dst_mesh.vertices[v];
    const auto hit = loc.locate(p);
    if (hit.outside_distance > tol) {
      if (dst_mesh.boundary_vertex[v] && !src_bnd.empty()) {
        int bestv = src_bnd[0];
        double bestd = std::numeric_limits<double>::max();
        for (int b : src_bnd) {
          const double d = std::hypot(src_mesh.vertices[b].x - p.x,
                                      src_mesh.vertices[b].y - p.y);
          if (d < bestd) {
            bestd = d;
            bestv = b;
          }
        }
        out.re[v] = src.re[bestv];
        out.im[v] = src.im[bestv];
        continue;
      }
      throw MeshError("transfer_field: destination vertex outside source mesh");
    }
    const auto& tr = src_mesh.triangles[hit.triangle];
    double ur = 0.0, ui = 0.0;
    for (int k = 0; k < 3; ++k) {
      ur += hit.bary[k] * src.re[tr[k]];
      ui += hit.bary[k] * src.im[tr[k]];
    }
    out.re[v] = ur;
    out.im[v] = ui;
  }
  return out;
}

void write_field(const ComplexField& u, std::ostream& os) {
  os.precision(17);
  os << "GPV-SOL 1\n" << u.size() << '\n';
  for (int v = 0; v < u.size(); ++v) os << u.re[v] << ' ' << u.im[v] << '\n';
}

ComplexField read_field(std::istream& is) {
  std::string magic;
  int version = 0, n = 0;
  is >> magic >> version >> n;
  if (magic != "GPV-SOL" || version != 1)
    throw IoError("bad solution header: '" + magic + " " +
                  std::to_string(version) + "'");
  if (!is || n <= 0) throw IoError("bad solution size");
  ComplexField u(n);
  for (int v = 0; v < n; ++v) is >> u.re[v] >> u.im[v];
  if (!is) throw IoError("truncated solution file");
  return u;
}

void save_field(const ComplexField& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_field(u, os);
  if (!os) throw IoError("write failed: " + path);
}

ComplexField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_field(is);
}

}  // namespace gpv
