#include <doctest.h>

#include <cmath>

#include "gpv/adapt.hpp"

using namespace gpv;

namespace {

ComplexField gaussian_field(const TriMesh& m, double sx, double sy) {
  ComplexField u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const double x = m.vertices[v].x, y = m.vertices[v].y;
    u.re[v] = std::exp(-(x * x) / (2.0 * sx * sx) -
                       (y * y) / (2.0 * sy * sy));
  }
  apply_dirichlet(m, u);
  normalize_quad(m, u);
  return u;
}

double total_score(const ErrorIndicator& ind) {
  double s = 0.0;
  for (double v : ind.score) s += v;
  return s;
}

}  // namespace

TEST_SUITE("adapt") {

TEST_CASE("constant density produces near-zero scores") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 48);
  ComplexField u(m.num_vertices());
  u.re.setConstant(1.0);  // no Dirichlet: keep the density flat everywhere
  const ErrorIndicator ind = hessian_indicator(m, u);
  REQUIRE(static_cast<int>(ind.score.size()) == m.num_triangles());
  CHECK(total_score(ind) < 1e-10);
}

TEST_CASE("uniform refinement shrinks the indicator roughly fourfold") {
  const TriMesh m0 = make_ellipse_mesh(3.0, 3.0, 64);
  const TriMesh m1 = uniform_refine(m0);
  const TriMesh m2 = uniform_refine(m1);
  const ComplexField u1 = gaussian_field(m1, 1.0, 1.0);
  const ComplexField u2 = gaussian_field(m2, 1.0, 1.0);
  const double s1 =
      total_score(hessian_indicator(m1, u1)) / m1.num_triangles();
  const double s2 =
      total_score(hessian_indicator(m2, u2)) / m2.num_triangles();
  // score_T ~ h_T^2 |H|: one bisection shrinks diameters by about
  // sqrt(2), so the mean per-triangle score roughly halves.
  const double ratio = s1 / s2;
  CHECK(ratio > 1.4);
  CHECK(ratio < 3.5);
}

TEST_CASE("adaptation refines where the density varies") {
  const TriMesh m = make_ellipse_mesh(3.0, 3.0, 48);
  const ComplexField u = gaussian_field(m, 0.5, 0.5);
  const AdaptResult ar = adapt_mesh(m, u, 0.05, 0.01, 1.0);
  REQUIRE(ar.changed);
  audit_mesh(ar.mesh);
  CHECK(ar.mesh.num_vertices() > m.num_vertices());
  CHECK(l2_norm_quad(ar.mesh, ar.u) == doctest::Approx(1.0).epsilon(1e-12));

  // Smallest triangle near the peak is smaller than the smallest one in
  // the outer vacuum region.
  double h_center = 1e9, h_rim = 1e9;
  for (int t = 0; t < ar.mesh.num_triangles(); ++t) {
    const auto& tr = ar.mesh.triangles[t];
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k < 3; ++k) {
      cx += ar.mesh.vertices[tr[k]].x / 3.0;
      cy += ar.mesh.vertices[tr[k]].y / 3.0;
    }
    const double r = std::hypot(cx, cy);
    const double h = ar.mesh.triangle_diameter(t);
    if (r < 0.6) h_center = std::min(h_center, h);
    if (r > 2.2) h_rim = std::min(h_rim, h);
  }
  CHECK(h_center < h_rim);
}

TEST_CASE("h_min stops refinement") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 48);
  const ComplexField u = gaussian_field(m, 0.3, 0.3);
  // With h_min larger than every edge nothing may be refined.
  const AdaptResult ar = adapt_mesh(m, u, 1e-6, 10.0, 100.0);
  CHECK(!ar.changed);
  CHECK(ar.mesh.num_vertices() == m.num_vertices());
}

TEST_CASE("oversized triangles are always refined") {
  const TriMesh m = make_ellipse_mesh(2.0, 2.0, 16);
  ComplexField u(m.num_vertices());
  u.re.setConstant(1.0);
  normalize_quad(m, u);
  // Flat density but h_max far below the mesh size: everything splits.
  const AdaptResult ar = adapt_mesh(m, u, 0.1, 0.001, 0.3);
  CHECK(ar.changed);
  CHECK(ar.mesh.num_triangles() > m.num_triangles());
}

}  // TEST_SUITE
