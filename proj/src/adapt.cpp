#include "gpv/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

/// Area-weighted recovery of a P1 field's (piecewise-constant) gradient
/// to the vertices.
void recover_gradient(const TriMesh& m, const Vec& f, Vec& gx, Vec& gy) {
  const int nv = m.num_vertices();
  gx = Vec::Zero(nv);
  gy = Vec::Zero(nv);
  Vec wsum = Vec::Zero(nv);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const Vec2& p0 = m.vertices[tr[0]];
    const Vec2& p1 = m.vertices[tr[1]];
    const Vec2& p2 = m.vertices[tr[2]];
    const double area = m.triangle_area(t);
    const double inv2a = 1.0 / (2.0 * area);
    const double bx[3] = {(p1.y - p2.y) * inv2a, (p2.y - p0.y) * inv2a,
                          (p0.y - p1.y) * inv2a};
    const double by[3] = {(p2.x - p1.x) * inv2a, (p0.x - p2.x) * inv2a,
                          (p1.x - p0.x) * inv2a};
    double tx = 0.0, ty = 0.0;
    for (int k = 0; k < 3; ++k) {
      tx += bx[k] * f[tr[k]];
      ty += by[k] * f[tr[k]];
    }
    for (int k = 0; k < 3; ++k) {
      gx[tr[k]] += area * tx;
      gy[tr[k]] += area * ty;
      wsum[tr[k]] += area;
    }
  }
  for (int v = 0; v < nv; ++v) {
    gx[v] /= wsum[v];
    gy[v] /= wsum[v];
  }
}

}  // namespace

ErrorIndicator hessian_indicator(const TriMesh& m, const ComplexField& u) {
  const int nv = m.num_vertices();
  Vec rho(nv);
  for (int v = 0; v < nv; ++v) rho[v] = u.density(v);

  Vec gx, gy, hxx, hxy, hyx, hyy;
  recover_gradient(m, rho, gx, gy);
  recover_gradient(m, gx, hxx, hxy);
  recover_gradient(m, gy, hyx, hyy);

  Vec hnorm(nv);
  for (int v = 0; v < nv; ++v) {
    const double off = 0.5 * (hxy[v] + hyx[v]);
    hnorm[v] = std::sqrt(hxx[v] * hxx[v] + hyy[v] * hyy[v] +
                         2.0 * off * off);
  }

  ErrorIndicator ind;
  ind.score.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const double h = m.triangle_diameter(t);
    const double avg = (hnorm[tr[0]] + hnorm[tr[1]] + hnorm[tr[2]]) / 3.0;
    ind.score[t] = h * h * avg;
  }
  return ind;
}

AdaptResult adapt_mesh(const TriMesh& m, const ComplexField& u,
                       double eps_target, double h_min, double h_max,
                       int vertex_budget) {
  AdaptResult out{m, u, false};
  if (!std::isfinite(eps_target)) return out;

  const ErrorIndicator ind = hessian_indicator(m, u);
  const int nt = m.num_triangles();
  const double total =
      std::accumulate(ind.score.begin(), ind.score.end(), 0.0);
  if (!(total > 0.0)) return out;
  const double mean = total / nt;

  // Doerfler set: smallest collection of triangles covering half the
  // total score.
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return ind.score[a] > ind.score[b];
  });
  std::vector<std::uint8_t> doerfler(nt, 0);
  double acc = 0.0;
  for (int t : order) {
    if (acc >= 0.5 * total) break;
    doerfler[t] = 1;
    acc += ind.score[t];
  }

  std::vector<int> marked;
  for (int t = 0; t < nt; ++t) {
    const double h = m.triangle_diameter(t);
    if (h <= h_min) continue;
    if (h > h_max || (doerfler[t] && ind.score[t] > eps_target * mean))
      marked.push_back(t);
  }
  if (marked.empty()) return out;

  TriMesh refined = bisect_refine(m, marked);
  if (refined.num_vertices() > vertex_budget)
    throw MeshError("mesh adaptation exceeds the vertex budget (" +
                    std::to_string(refined.num_vertices()) + " > " +
                    std::to_string(vertex_budget) + ")");
  ComplexField tu = transfer_field(m, u, refined);
  apply_dirichlet(refined, tu);
  normalize_quad(refined, tu);
  out.mesh = std::move(refined);
  out.u = std::move(tu);
  out.changed = true;
  return out;
}

}  // namespace gpv
