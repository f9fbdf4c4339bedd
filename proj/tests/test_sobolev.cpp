#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gpv/energy.hpp"
#include "gpv/sobolev.hpp"
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

// The H_A bilinear form evaluated directly from the assembled blocks.
double ha_form(const Discretization& d, const ComplexField& a,
               const ComplexField& b) {
  const double com = d.params.c_omega;
  const SpMat A = d.W + d.K;
  return a.re.dot(A * b.re) + a.im.dot(A * b.im) +
         2.0 * com * (a.re.dot(d.Ra * b.im) - a.im.dot(d.Ra * b.re));
}

}  // namespace

TEST_SUITE("sobolev") {

TEST_CASE("riesz representative reproduces the energy derivative") {
  const TriMesh m = make_ellipse_mesh(1.5, 1.2, 40);
  const Discretization d(m, make_params(150.0, 0.6));
  const HASystem sys(d);
  const ComplexField u = random_field(d, 4);
  const ComplexField g = ha_riesz_solve(sys, d, u);

  Vec gr, gi;
  gradient_l2(d, u, gr, gi);
  for (unsigned s = 0; s < 8; ++s) {
    const ComplexField v = random_field(d, 100 + s);
    const double lhs = ha_form(d, g, v);
    const double rhs =
        (gr.dot(v.re) + gi.dot(v.im)) / (2.0 * d.params.epsilon);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("tangent projection is orthogonal and idempotent") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 40);
  const Discretization d(m, make_params(300.0, 0.4));
  const HASystem sys(d);
  const ComplexField u = random_field(d, 9);
  const ComplexField g = ha_riesz_solve(sys, d, u);
  const ComplexField pg = project_tangent(sys, d, u, g);

  const double along =
      u.re.dot(d.M * pg.re) + u.im.dot(d.M * pg.im);
  CHECK(std::abs(along) < 1e-10);

  const ComplexField pg2 = project_tangent(sys, d, u, pg);
  CHECK((pg2.re - pg.re).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((pg2.im - pg.im).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("cubic solver on known polynomials") {
  auto sorted = [](std::vector<double> r) {
    std::sort(r.begin(), r.end());
    return r;
  };
  // (x-1)(x-2)(x-3)
  auto r = sorted(solve_cubic(1.0, -6.0, 11.0, -6.0));
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(3.0).epsilon(1e-12));
  // One real root: x^3 + x + 1
  r = solve_cubic(1.0, 0.0, 1.0, 1.0);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(-0.6823278038280193).epsilon(1e-12));
  // Triple root (x-2)^3
  r = solve_cubic(1.0, -6.0, 12.0, -8.0);
  REQUIRE(!r.empty());
  for (double x : r) CHECK(x == doctest::Approx(2.0).epsilon(1e-5));
  // Degenerate quadratic x^2 - 1
  r = sorted(solve_cubic(0.0, 1.0, 0.0, -1.0));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-12));
  // Linear 2x + 4
  r = solve_cubic(0.0, 0.0, 2.0, 4.0);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(-2.0).epsilon(1e-12));
  // All coefficients zero
  CHECK(solve_cubic(0.0, 0.0, 0.0, 0.0).empty());
}

TEST_CASE("line search matches a dense grid argmin") {
  const TriMesh m = make_ellipse_mesh(1.2, 1.0, 32);
  const Discretization d(m, make_params(120.0, 0.5));
  const HASystem sys(d);
  for (unsigned s = 0; s < 10; ++s) {
    const ComplexField u = random_field(d, 7 * s + 2);
    const ComplexField g = ha_riesz_solve(sys, d, u);
    const ComplexField pg = project_tangent(sys, d, u, g);
    const auto ls = cubic_linesearch(d, u, pg);
    REQUIRE(ls.has_value());
    CHECK(ls->alpha > 0.0);
    CHECK(ls->delta_j < 0.0);
    CHECK(ls->chi == doctest::Approx(2.0 * d.params.epsilon * ls->alpha)
                         .epsilon(1e-14));

    // Unconstrained energy J(alpha) = E(u - alpha pg) evaluated on a
    // 10^4-point grid around the reported step.
    auto j_of = [&](double alpha) {
      ComplexField t(u.size());
      t.re = u.re - alpha * pg.re;
      t.im = u.im - alpha * pg.im;
      return energy(d, t).total;
    };
    const double a_hi = 2.5 * ls->alpha;
    const int ngrid = 10000;
    double best_a = 0.0, best_j = j_of(0.0);
    for (int i = 1; i <= ngrid; ++i) {
      const double a = a_hi * i / ngrid;
      const double j = j_of(a);
      if (j < best_j) {
        best_j = j;
        best_a = a;
      }
    }
    CHECK(std::abs(ls->alpha - best_a) <= 1.5 * a_hi / ngrid);
    CHECK(j_of(ls->alpha) <= best_j + 1e-12 * (1.0 + std::abs(best_j)));
  }
}

TEST_CASE("line search closed form when the energy is quadratic") {
  const TriMesh m = make_ellipse_mesh(1.0, 1.0, 32);
  const Discretization d(m, make_params(0.0, 0.5));
  const HASystem sys(d);
  const ComplexField u = random_field(d, 13);
  const ComplexField g = ha_riesz_solve(sys, d, u);
  const ComplexField pg = project_tangent(sys, d, u, g);
  const auto ls = cubic_linesearch(d, u, pg);
  REQUIRE(ls.has_value());

  // With C_g = 0, J'(alpha) = alpha g^T H2 g - g^T H2 u is linear.
  const double com = d.params.c_omega;
  auto h2 = [&](const ComplexField& x, Vec& yr, Vec& yi) {
    yr = d.K * x.re + 2.0 * (d.P * x.re) + 2.0 * com * (d.Ra * x.im);
    yi = d.K * x.im + 2.0 * (d.P * x.im) - 2.0 * com * (d.Ra * x.re);
  };
  Vec ar, ai, br, bi;
  h2(pg, ar, ai);
  h2(u, br, bi);
  const double expected = (pg.re.dot(br) + pg.im.dot(bi)) /
                          (pg.re.dot(ar) + pg.im.dot(ai));
  CHECK(ls->alpha == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("ladder thresholds and level bookkeeping") {
  LadderState s;
  s.opt = LadderOptions{1e-2, 1e-9, 2, 2.0};
  CHECK(s.threshold(1) == doctest::Approx(1e-2));
  CHECK(s.threshold(2) == doctest::Approx(5e-3));
  CHECK(s.max_level() == 1 + static_cast<int>(
                                 std::floor(std::log(1e7) / std::log(2.0))));
}

TEST_CASE("two adapts at a level advance the ladder") {
  LadderState s;
  s.opt = LadderOptions{1e-2, 1e-9, 2, 2.0};
  const double eps_c = 1e-12;
  // Still above the first threshold: nothing happens.
  CHECK(ladder_check(s, -2e-2, -3e-2, eps_c) == LadderAction::None);
  // Crosses under the first threshold while decreasing: adapt once.
  CHECK(ladder_check(s, -8e-3, -2e-2, eps_c) == LadderAction::Adapt);
  CHECK(s.level == 1);
  // The second adapt in the same window advances the level.
  CHECK(ladder_check(s, -7e-3, -8e-3, eps_c) == LadderAction::AdvanceLevel);
  CHECK(s.level == 2);
  CHECK(s.adapts_at_level == 0);
}

TEST_CASE("ladder relaxes on an energy-decrease slowdown") {
  LadderState s;
  s.opt = LadderOptions{1e-2, 1e-9, 2, 2.0};
  s.level = 3;
  CHECK(ladder_check(s, -5e-3, -1e-3, 1e-12) == LadderAction::RelaxLevel);
  CHECK(s.level == 2);
}

TEST_CASE("ladder skips windows already passed") {
  LadderState s;
  s.opt = LadderOptions{1e-2, 1e-9, 2, 2.0};
  // dE drops straight to 1e-4: the window containing it is found first.
  CHECK(ladder_check(s, -1e-4, -2e-4, 1e-12) == LadderAction::Adapt);
  CHECK(s.threshold(s.level) > 1e-4);
  CHECK(s.threshold(s.level + 1) <= 1e-4);
}

TEST_CASE("ladder ignores converged-scale decrements") {
  LadderState s;
  s.opt = LadderOptions{1e-2, 1e-9, 2, 2.0};
  CHECK(ladder_check(s, -1e-13, -2e-13, 1e-12) == LadderAction::None);
}

TEST_CASE("descent without adaptation reaches the harmonic ground state") {
  const ModelParams p = make_params(100.0, 0.0);
  const TFProfile tf = tf_profile(p);
  double rx = 0.0, ry = 0.0;
  domain_radii(tf, 1.25, rx, ry);
  const TriMesh m = make_ellipse_mesh(rx, ry, 64);
  const ComplexField seed = tf_field(tf, p, m);

  DescentOptions opts;
  opts.eps_c = 1e-9;
  opts.adapt_enabled = false;
  const DescentResult res = descend(m, seed, p, opts);
  CHECK(res.converged);
  CHECK(res.final_energy.total > 0.0);

  // Monotone energies (each step row never increases the energy).
  double prev = std::numeric_limits<double>::max();
  for (const auto& row : res.trace.rows) {
    if (row.event == "step")
      CHECK(row.energy <= prev + 1e-12 * (1.0 + std::abs(prev)));
    prev = row.energy;
    CHECK(row.norm == doctest::Approx(1.0).epsilon(1e-8));
  }

  // Ground-state energy bracket: below the TF seed, above the TF bound.
  const Discretization d(m, p);
  CHECK(res.final_energy.total < energy(d, seed).total);
  CHECK(std::abs(res.final_energy.angular_momentum) < 1e-6);
}

TEST_CASE("descent with the ladder adapts and still converges") {
  const ModelParams p = make_params(200.0, 0.3);
  const TFProfile tf = tf_profile(p);
  double rx = 0.0, ry = 0.0;
  domain_radii(tf, 1.25, rx, ry);
  const TriMesh m = make_ellipse_mesh(rx, ry, 48);
  const ComplexField seed = tf_field(tf, p, m);

  DescentOptions opts;
  opts.eps_c = 1e-8;
  opts.err_target = 0.2;
  opts.h_min = 0.02;
  const DescentResult res = descend(m, seed, p, opts);
  CHECK(res.converged);
  CHECK(res.adaptations >= 1);
  CHECK(res.mesh.num_vertices() > m.num_vertices());
  bool saw_adapt = false;
  for (const auto& row : res.trace.rows)
    if (row.event == "adapt") saw_adapt = true;
  CHECK(saw_adapt);
}

}  // TEST_SUITE
