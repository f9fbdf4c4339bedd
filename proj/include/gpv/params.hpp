#pragma once

#include <string>

namespace gpv {

enum class Scaling { Classical, AR };

/// Physical (dimensional) description of the trapped condensate:
/// harmonic trap plus an optional detuned laser beam (quadratic +
/// quartic contribution).
struct PhysicalParams {
  double atom_count = 0.0;        // N
  double atomic_mass = 0.0;       // m [kg]
  double scattering_length = 0.0; // a_s [m]
  double rotation_rate = 0.0;     // Omega [rad/s]
  double omega_x = 0.0;           // [rad/s]
  double omega_y = 0.0;           // [rad/s]
  double omega_z = 0.0;           // [rad/s]
  double omega_perp = 0.0;        // reference frequency [rad/s]
  double laser_u2 = 0.0;          // U_2 [J]
  double laser_u4 = 0.0;          // U_4 [J]
  double waist_w2 = 0.0;          // w_2 [m]
  double waist_w4 = 0.0;          // w_4 [m]
};

/// Dimensionless coefficients given directly in a config file instead of
/// being derived from physical quantities.
struct DirectCoefficients {
  double beta = 0.0;      // interaction constant (beta_2D in 2D)
  double rot_ratio = 0.0; // Omega / omega_perp
  double ax = 1.0;        // bare harmonic coefficient, x
  double ay = 1.0;        // bare harmonic coefficient, y
  double az = 1.0;        // bare harmonic coefficient, z (3D formulas only)
  double a4 = 0.0;        // quartic coefficient
};

/// All dimensionless constants of the minimization problem.  Immutable
/// after construction; everything downstream of the configuration
/// boundary works exclusively with these.
struct ModelParams {
  Scaling scaling = Scaling::Classical;
  int dim = 2;
  double epsilon = 1.0;   // scaling parameter (1 for Classical)
  double c_g = 0.0;       // interaction constant C_g = sqrt(eps) * beta
  double c_omega = 0.0;   // rotation constant C_Omega = rot_ratio / eps
  double rot_ratio = 0.0; // Omega / omega_perp
  // Bare trap coefficients (no centrifugal correction).
  double ax_bare = 1.0;
  double ay_bare = 1.0;
  double az_bare = 1.0;
  double a4 = 0.0;
  // Centrifugally corrected coefficients: a = a_bare - rot_ratio^2.
  double ax = 1.0;
  double ay = 1.0;

  /// Effective dimensionless potential V_eff = (ax x^2 + ay y^2 + a4 r^4)/2.
  double effective_potential(double x, double y) const {
    const double r2 = x * x + y * y;
    return 0.5 * (ax * x * x + ay * y * y + a4 * r2 * r2);
  }

  /// Bare dimensionless potential (effective plus the centrifugal term).
  double bare_potential(double x, double y) const {
    const double r2 = x * x + y * y;
    return effective_potential(x, y) + 0.5 * rot_ratio * rot_ratio * r2;
  }

  /// C_trap = V_bare / eps^2, the coefficient entering the energy in its
  /// non-covariant form.
  double c_trap(double x, double y) const {
    return bare_potential(x, y) / (epsilon * epsilon);
  }

  /// C_trap^eff = V_eff / eps^2, for the covariant energy form.
  double c_trap_eff(double x, double y) const {
    return effective_potential(x, y) / (epsilon * epsilon);
  }
};

/// Aftalion-Riviere scaling parameter eps = (a_ho / (8 pi N a_s))^(2/5).
double epsilon_ar(double atom_count, double scattering_length, double a_ho);

/// Build ModelParams from direct dimensionless coefficients.
ModelParams build_dimensionless(const DirectCoefficients& c, Scaling scaling,
                                int dim = 2);

/// Build ModelParams from physical quantities.
ModelParams build_dimensionless(const PhysicalParams& p, Scaling scaling,
                                int dim = 2);

const char* to_string(Scaling s);

}  // namespace gpv
