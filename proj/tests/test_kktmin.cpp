#include <doctest.h>

#include <cmath>
#include <random>

#include "gpv/kktmin.hpp"
#include "gpv/tfinit.hpp"

using namespace gpv;

namespace {

ModelParams make_params(double beta, double rot) {
  DirectCoefficients c;
  c.beta = beta;
  c.rot_ratio = rot;
  return build_dimensionless(c, Scaling::Classical);
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

TEST_SUITE("kktmin") {

TEST_CASE("split energy equals the complex-field energy") {
  const TriMesh m = make_ellipse_mesh(1.2, 1.0, 36);
  const Discretization d(m, make_params(250.0, 0.6));
  for (unsigned s = 0; s < 5; ++s) {
    const ComplexField u = random_field(d, s + 1);
    CHECK(split_energy(d, u.re, u.im) ==
          doctest::Approx(energy(d, u).total).epsilon(1e-12));
  }
}

TEST_CASE("split gradient matches finite differences") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 24);
  const Discretization d(m, make_params(90.0, 0.5));
  const ComplexField u = random_field(d, 3);
  Vec gr, gi;
  split_gradient(d, u.re, u.im, gr, gi);

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, m.num_vertices() - 1);
  const double h = 1e-6;
  int tested = 0;
  while (tested < 20) {
    const int v = pick(rng);
    if (m.boundary_vertex[v]) continue;
    ++tested;
    Vec rp = u.re, rm = u.re;
    rp[v] += h;
    rm[v] -= h;
    const double fdr = (split_energy(d, rp, u.im) -
                        split_energy(d, rm, u.im)) /
                       (2.0 * h);
    CHECK(gr[v] == doctest::Approx(fdr).epsilon(1e-5));
    Vec ip = u.im, im2 = u.im;
    ip[v] += h;
    im2[v] -= h;
    const double fdi = (split_energy(d, u.re, ip) -
                        split_energy(d, u.re, im2)) /
                       (2.0 * h);
    CHECK(gi[v] == doctest::Approx(fdi).epsilon(1e-5));
  }
}

TEST_CASE("split hessian is symmetric and matches gradient differences") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 20);
  const Discretization d(m, make_params(60.0, 0.4));
  const ComplexField u = random_field(d, 11);
  const SpMat H = split_hessian(d, u.re, u.im);
  const int n = m.num_vertices();
  REQUIRE(H.rows() == 2 * n);

  const SpMat asym = SpMat(H.transpose()) - H;
  CHECK(Eigen::Map<const Vec>(asym.valuePtr(), asym.nonZeros())
            .lpNorm<Eigen::Infinity>() < 1e-12);

  // Directional check H x == d(grad)/dt along random interior directions.
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = 1e-6;
  for (int rep = 0; rep < 5; ++rep) {
    Vec dir = Vec::Zero(2 * n);
    for (int v = 0; v < n; ++v) {
      if (m.boundary_vertex[v]) continue;
      dir[v] = g(rng);
      dir[v + n] = g(rng);
    }
    const Vec hd = H * dir;
    Vec grp, gip, grm, gim;
    split_gradient(d, u.re + h * dir.head(n), u.im + h * dir.tail(n), grp,
                   gip);
    split_gradient(d, u.re - h * dir.head(n), u.im - h * dir.tail(n), grm,
                   gim);
    Vec fd(2 * n);
    fd.head(n) = (grp - grm) / (2.0 * h);
    fd.tail(n) = (gip - gim) / (2.0 * h);
    for (int v = 0; v < n; ++v) {
      if (m.boundary_vertex[v]) continue;
      CHECK(hd[v] ==
            doctest::Approx(fd[v]).epsilon(1e-5).scale(fd.norm()));
      CHECK(hd[v + n] ==
            doctest::Approx(fd[v + n]).epsilon(1e-5).scale(fd.norm()));
    }
  }
}

TEST_CASE("hessian reduces to the quadratic operator blocks") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 24);
  const Discretization d(m, make_params(0.0, 0.0));
  const ComplexField u = random_field(d, 2);
  const SpMat H = split_hessian(d, u.re, u.im);
  const int n = m.num_vertices();
  // With C_g = C_Omega = 0: H = diag(K + 2P, K + 2P) on interior dofs,
  // no real-imaginary coupling.
  const SpMat ref = d.K + 2.0 * d.P;
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec x = Vec::Zero(2 * n);
  for (int v = 0; v < n; ++v)
    if (!m.boundary_vertex[v]) {
      x[v] = g(rng);
      x[v + n] = g(rng);
    }
  const Vec hx = H * x;
  const Vec rr = ref * x.head(n);
  const Vec ri = ref * x.tail(n);
  for (int v = 0; v < n; ++v) {
    if (m.boundary_vertex[v]) continue;
    CHECK(hx[v] == doctest::Approx(rr[v]).epsilon(1e-10).scale(1.0));
    CHECK(hx[v + n] == doctest::Approx(ri[v]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("newton converges in a handful of steps on a quadratic energy") {
  const ModelParams p = make_params(0.0, 0.0);
  const TriMesh m = make_ellipse_mesh(5.0, 5.0, 48);
  const Discretization d(m, p);
  ComplexField seed(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const double r2 = m.vertices[v].x * m.vertices[v].x +
                      m.vertices[v].y * m.vertices[v].y;
    seed.re[v] = std::exp(-0.4 * r2);
  }
  apply_dirichlet(m, seed);
  normalize(d.M, seed);

  KKTOptions opts;
  opts.tol = 1e-10;
  opts.adapt_enabled = false;
  const KKTResult res = kkt_minimize(m, seed, p, opts);
  CHECK(res.converged);
  CHECK(res.inner_iterations <= 8);
  CHECK(std::abs(res.constraint) < 1e-10);
  CHECK(res.grad_l_inf < 1e-10);
}

TEST_CASE("interacting minimization satisfies the optimality conditions") {
  const ModelParams p = make_params(200.0, 0.3);
  const TFProfile tf = tf_profile(p);
  double rx = 0.0, ry = 0.0;
  domain_radii(tf, 1.25, rx, ry);
  const TriMesh m = make_ellipse_mesh(rx, ry, 56);
  const ComplexField seed = tf_field(tf, p, m);

  KKTOptions opts;
  opts.tol = 1e-9;
  opts.adapt_enabled = false;
  const KKTResult res = kkt_minimize(m, seed, p, opts);
  CHECK(res.converged);
  CHECK(std::abs(res.constraint) < 1e-10);
  CHECK(res.grad_l_inf < 1e-9);
  // The multiplier is minus the chemical potential mu = E + E_int.
  CHECK(res.lambda ==
        doctest::Approx(-res.final_energy.chemical).epsilon(1e-6));
  CHECK(res.final_energy.total < energy(Discretization(m, p), seed).total);
}

TEST_CASE("outer adaptation stages refine the mesh") {
  const ModelParams p = make_params(150.0, 0.2);
  const TFProfile tf = tf_profile(p);
  double rx = 0.0, ry = 0.0;
  domain_radii(tf, 1.25, rx, ry);
  const TriMesh m = make_ellipse_mesh(rx, ry, 40);
  const ComplexField seed = tf_field(tf, p, m);

  KKTOptions opts;
  opts.tol = 1e-8;
  opts.n_adapt = 2;
  opts.eps0 = 0.1;
  opts.eps_last = 0.05;
  opts.h_min = 0.02;
  const KKTResult res = kkt_minimize(m, seed, p, opts);
  CHECK(res.converged);
  CHECK(res.adaptations == 1);
  CHECK(res.mesh.num_vertices() > m.num_vertices());
  CHECK(std::abs(res.constraint) < 1e-10);
}

}  // TEST_SUITE
