#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gpv/field.hpp"
#include "gpv/params.hpp"

using namespace gpv;

namespace {

ModelParams harmonic_params() {
  DirectCoefficients c;
  c.beta = 500.0;
  c.rot_ratio = 0.4;
  return build_dimensionless(c, Scaling::Classical);
}

// Integral of a reference-triangle function over the unit triangle
// (0,0)-(1,0)-(0,1); the rule weights sum to one, the area is 1/2.
template <class F>
double ref_integral(const TriQuad& q, F&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const double x = q.points[k][1];
    const double y = q.points[k][2];
    s += q.weights[k] * f(x, y);
  }
  return 0.5 * s;
}

ComplexField random_field(const Discretization& d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexField u(d.mesh->num_vertices());
  for (int v = 0; v < u.size(); ++v) {
    u.re[v] = g(rng);
    u.im[v] = g(rng);
  }
  apply_dirichlet(*d.mesh, u);
  normalize(d.M, u);
  return u;
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("quadrature rules integrate monomials exactly") {
  for (const TriQuad* q :
       {&tri_quad_degree2(), &tri_quad_degree4(), &tri_quad_degree6()}) {
    double w = 0.0;
    for (double wk : q->weights) w += wk;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    // int_T x dx = 1/6, int_T x y = 1/24
    CHECK(ref_integral(*q, [](double x, double) { return x; }) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(ref_integral(*q, [](double x, double y) { return x * y; }) ==
          doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  }
  // x^2 y^2 has total degree 4: exact for the degree-4 and degree-6
  // rules; int_T x^2 y^2 = 1/180.
  CHECK(ref_integral(tri_quad_degree4(),
                     [](double x, double y) { return x * x * y * y; }) ==
        doctest::Approx(1.0 / 180.0).epsilon(1e-14));
  CHECK(ref_integral(tri_quad_degree6(),
                     [](double x, double y) { return x * x * y * y; }) ==
        doctest::Approx(1.0 / 180.0).epsilon(1e-14));
  // x^4 y^2 has degree 6: int_T = 1/840.
  CHECK(ref_integral(tri_quad_degree6(), [](double x, double y) {
          return x * x * x * x * y * y;
        }) == doctest::Approx(1.0 / 840.0).epsilon(1e-14));
}

TEST_CASE("assembled matrices have the structural identities") {
  const TriMesh m = make_ellipse_mesh(1.5, 1.0, 48);
  const Discretization d(m, harmonic_params());
  const int n = m.num_vertices();
  const Vec ones = Vec::Ones(n);

  // 1^T M 1 = |domain|, K 1 = 0, Ra antisymmetric.
  CHECK(ones.dot(d.M * ones) ==
        doctest::Approx(m.total_area()).epsilon(1e-12));
  CHECK((d.K * ones).lpNorm<Eigen::Infinity>() ==
        doctest::Approx(0.0).epsilon(1e-10));
  const SpMat sym = SpMat(d.Ra.transpose()) + d.Ra;
  CHECK(Eigen::Map<const Vec>(sym.valuePtr(), sym.nonZeros())
            .lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("quadrature norm agrees with the mass-matrix norm") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 40);
  const Discretization d(m, harmonic_params());
  ComplexField u = random_field(d, 3);
  CHECK(l2_norm_quad(m, u) == doctest::Approx(l2_norm(d.M, u)).epsilon(1e-12));
  u.re *= 3.7;
  u.im *= 3.7;
  const double prev = normalize_quad(m, u);
  CHECK(prev == doctest::Approx(3.7).epsilon(1e-12));
  CHECK(l2_norm(d.M, u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quartic integral of a constant field") {
  const TriMesh m = make_ellipse_mesh(1.3, 0.8, 56);
  const Discretization d(m, harmonic_params());
  const double area = m.total_area();
  ComplexField u(m.num_vertices());
  u.re.setConstant(1.0 / std::sqrt(area));
  CHECK(quartic_integral(d, u) ==
        doctest::Approx(1.0 / area).epsilon(1e-12));
}

TEST_CASE("cubic vectors match the mass-weighted cubic for constants") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 40);
  const Discretization d(m, harmonic_params());
  ComplexField u(m.num_vertices());
  u.re.setConstant(0.7);
  u.im.setConstant(-0.2);
  Vec cr, ci;
  cubic_vectors(d, u, cr, ci);
  const double rho = 0.7 * 0.7 + 0.2 * 0.2;
  const Vec er = d.M * (rho * u.re);
  const Vec ei = d.M * (rho * u.im);
  CHECK((cr - er).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((ci - ei).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("apply_dirichlet zeroes exactly the boundary") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 32);
  ComplexField u(m.num_vertices());
  u.re.setConstant(1.0);
  u.im.setConstant(2.0);
  apply_dirichlet(m, u);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.boundary_vertex[v]) {
      CHECK(u.re[v] == 0.0);
      CHECK(u.im[v] == 0.0);
    } else {
      CHECK(u.re[v] == 1.0);
    }
  }
}

TEST_CASE("transfer reproduces linear fields on a refined mesh") {
  const TriMesh m = make_ellipse_mesh(1.5, 1.0, 48);
  ComplexField u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    u.re[v] = 0.3 + 0.5 * m.vertices[v].x - 0.2 * m.vertices[v].y;
    u.im[v] = -0.1 + 0.4 * m.vertices[v].y;
  }
  const TriMesh r = uniform_refine(m);
  const ComplexField w = transfer_field(m, u, r);
  for (int v = 0; v < r.num_vertices(); ++v) {
    if (r.boundary_vertex[v]) continue;  // snapped points move slightly
    const double ex = 0.3 + 0.5 * r.vertices[v].x - 0.2 * r.vertices[v].y;
    const double ey = -0.1 + 0.4 * r.vertices[v].y;
    CHECK(w.re[v] == doctest::Approx(ex).epsilon(1e-10));
    CHECK(w.im[v] == doctest::Approx(ey).epsilon(1e-10));
  }
}

TEST_CASE("field serialization round-trips exactly") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 32);
  const Discretization d(m, harmonic_params());
  const ComplexField u = random_field(d, 17);
  std::stringstream ss;
  write_field(u, ss);
  const ComplexField r = read_field(ss);
  REQUIRE(r.size() == u.size());
  CHECK((r.re - u.re).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((r.im - u.im).lpNorm<Eigen::Infinity>() == 0.0);
}

}  // TEST_SUITE
