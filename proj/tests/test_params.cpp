#include <doctest.h>

#include <cmath>

#include "gpv/errors.hpp"
#include "gpv/params.hpp"

using namespace gpv;

TEST_SUITE("params") {

TEST_CASE("classical scaling from direct coefficients") {
  DirectCoefficients c;
  c.beta = 500.0;
  c.rot_ratio = 0.4;
  const ModelParams p = build_dimensionless(c, Scaling::Classical);
  CHECK(p.epsilon == 1.0);
  CHECK(p.c_g == 500.0);
  CHECK(p.c_omega == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p.ax == doctest::Approx(1.0 - 0.16).epsilon(1e-15));
  CHECK(p.ay == doctest::Approx(1.0 - 0.16).epsilon(1e-15));
  CHECK(p.ax_bare == 1.0);
}

TEST_CASE("aftalion-riviere scaling from beta") {
  DirectCoefficients c;
  c.beta = 500.0;
  c.rot_ratio = 0.4;
  const ModelParams p = build_dimensionless(c, Scaling::AR);
  const double eps = std::pow(1000.0, -0.4);
  CHECK(p.epsilon == doctest::Approx(eps).epsilon(1e-14));
  CHECK(p.c_g == doctest::Approx(std::sqrt(eps) * 500.0).epsilon(1e-14));
  CHECK(p.c_omega == doctest::Approx(0.4 / eps).epsilon(1e-14));
}

TEST_CASE("physical parameters reduce to frozen dimensionless values") {
  // Rubidium-like numbers; the reference values were computed once with
  // extended-precision arithmetic and frozen here.
  PhysicalParams ph;
  ph.atom_count = 1e5;
  ph.atomic_mass = 1.44316e-25;
  ph.scattering_length = 5.1e-9;
  ph.omega_perp = 2.0 * M_PI * 200.0;
  ph.omega_x = ph.omega_perp;
  ph.omega_y = ph.omega_perp;
  ph.rotation_rate = 0.4 * ph.omega_perp;

  const ModelParams pc = build_dimensionless(ph, Scaling::Classical);
  CHECK(pc.epsilon == 1.0);
  CHECK(pc.c_g == doctest::Approx(8404.350056143554).epsilon(1e-12));
  CHECK(pc.rot_ratio == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(pc.ax_bare == doctest::Approx(1.0).epsilon(1e-14));

  const ModelParams pa = build_dimensionless(ph, Scaling::AR);
  CHECK(pa.epsilon ==
        doctest::Approx(0.020407337568571677).epsilon(1e-12));
  CHECK(pa.c_g == doctest::Approx(1200.597148290875).epsilon(1e-12));
  // eps from the physical route equals (2 beta)^(-2/5).
  CHECK(pa.epsilon ==
        doctest::Approx(std::pow(2.0 * 8404.350056143554, -0.4))
            .epsilon(1e-12));
}

TEST_CASE("bare potential is effective plus centrifugal") {
  DirectCoefficients c;
  c.beta = 100.0;
  c.rot_ratio = 0.7;
  c.a4 = 0.5;
  const ModelParams p = build_dimensionless(c, Scaling::Classical);
  const double x = 0.3, y = -1.2;
  const double r2 = x * x + y * y;
  CHECK(p.bare_potential(x, y) ==
        doctest::Approx(p.effective_potential(x, y) + 0.5 * 0.49 * r2)
            .epsilon(1e-14));
  CHECK(p.effective_potential(x, y) ==
        doctest::Approx(0.5 * (p.ax * x * x + p.ay * y * y +
                               0.5 * r2 * r2))
            .epsilon(1e-14));
}

TEST_CASE("c_trap carries the 1/eps^2 factor") {
  DirectCoefficients c;
  c.beta = 500.0;
  c.rot_ratio = 0.2;
  const ModelParams p = build_dimensionless(c, Scaling::AR);
  const double x = 0.5, y = 0.25;
  CHECK(p.c_trap(x, y) ==
        doctest::Approx(p.bare_potential(x, y) / (p.epsilon * p.epsilon))
            .epsilon(1e-14));
  CHECK(p.c_trap_eff(x, y) ==
        doctest::Approx(p.effective_potential(x, y) /
                        (p.epsilon * p.epsilon))
            .epsilon(1e-14));
}

TEST_CASE("invalid inputs are rejected") {
  DirectCoefficients c;
  c.beta = -1.0;
  CHECK_THROWS_AS(build_dimensionless(c, Scaling::Classical), ConfigError);
  c.beta = 0.0;
  CHECK_THROWS_AS(build_dimensionless(c, Scaling::AR), ConfigError);
  c.beta = 1.0;
  c.a4 = -0.5;
  CHECK_THROWS_AS(build_dimensionless(c, Scaling::Classical), ConfigError);
  CHECK_THROWS(epsilon_ar(-1.0, 1e-9, 1e-6));
}

}  // TEST_SUITE
