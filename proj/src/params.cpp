#include "gpv/params.hpp"

#include <cmath>
#include <numbers>

#include "gpv/errors.hpp"

namespace gpv {

namespace {
constexpr double kHbar = 1.054571817e-34;  // [J s]
constexpr double kPi = std::numbers::pi;
}  // namespace

double epsilon_ar(double atom_count, double scattering_length, double a_ho) {
  if (atom_count <= 0.0 || scattering_length <= 0.0 || a_ho <= 0.0) {
    throw std::domain_error(
        "epsilon_ar: atom count, scattering length and oscillator length "
        "must all be positive");
  }
  return std::pow(a_ho / (8.0 * kPi * atom_count * scattering_length),
                  2.0 / 5.0);
}

ModelParams build_dimensionless(const DirectCoefficients& c, Scaling scaling,
                                int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  if (c.beta < 0.0) throw ConfigError("@beta must be non-negative");
  if (c.a4 < 0.0) throw ConfigError("@a4 must be non-negative");

  ModelParams p;
  p.scaling = scaling;
  p.dim = dim;
  if (scaling == Scaling::Classical) {
    p.epsilon = 1.0;
  } else {
    // AR scaling from beta alone: beta = 4 pi N a_s / a_ho implies
    // eps = (a_ho / (8 pi N a_s))^(2/5) = (2 beta)^(-2/5).
    if (c.beta <= 0.0)
      throw ConfigError("AR scaling requires a positive @beta");
    p.epsilon = std::pow(2.0 * c.beta, -2.0 / 5.0);
  }
  p.c_g = std::sqrt(p.epsilon) * c.beta;
  p.rot_ratio = c.rot_ratio;
  p.c_omega = c.rot_ratio / p.epsilon;
  p.ax_bare = c.ax;
  p.ay_bare = c.ay;
  p.az_bare = c.az;
  p.a4 = c.a4;
  p.ax = p.ax_bare - c.rot_ratio * c.rot_ratio;
  p.ay = p.ay_bare - c.rot_ratio * c.rot_ratio;
  return p;
}

ModelParams build_dimensionless(const PhysicalParams& ph, Scaling scaling,
                                int dim) {
  auto require = [](bool ok, const char* name) {
    if (!ok)
      throw ConfigError(std::string("missing or invalid physical parameter: ") +
                        name);
  };
  require(ph.atom_count > 0.0, "@N");
  require(ph.atomic_mass > 0.0, "@m");
  require(ph.scattering_length > 0.0, "@as");
  require(ph.omega_perp > 0.0, "@omegaperp");
  if (ph.laser_u2 != 0.0) require(ph.waist_w2 > 0.0, "@w2");
  if (ph.laser_u4 != 0.0) require(ph.waist_w4 > 0.0, "@w4");

  const double a_ho = std::sqrt(kHbar / (ph.atomic_mass * ph.omega_perp));
  const double beta =
      4.0 * kPi * ph.atom_count * ph.scattering_length / a_ho;

  ModelParams p;
  p.scaling = scaling;
  p.dim = dim;
  p.epsilon = (scaling == Scaling::Classical)
                  ? 1.0
                  : epsilon_ar(ph.atom_count, ph.scattering_length, a_ho);
  p.c_g = std::sqrt(p.epsilon) * beta;
  p.rot_ratio = ph.rotation_rate / ph.omega_perp;
  p.c_omega = p.rot_ratio / p.epsilon;

  const double mo2 = ph.atomic_mass * ph.omega_perp * ph.omega_perp;
  const double laser2 =
      (ph.laser_u2 != 0.0)
          ? 2.0 * ph.laser_u2 / (mo2 * ph.waist_w2 * ph.waist_w2)
          : 0.0;
  auto sq = [](double v) { return v * v; };
  p.ax_bare = sq(ph.omega_x / ph.omega_perp) + laser2;
  p.ay_bare = sq(ph.omega_y / ph.omega_perp) + laser2;
  p.az_bare = sq(ph.omega_z / ph.omega_perp);
  p.a4 = (ph.laser_u4 != 0.0)
             ? (2.0 / p.epsilon) * ph.laser_u4 * a_ho * a_ho /
                   (mo2 * std::pow(ph.waist_w4, 4))
             : 0.0;
  p.ax = p.ax_bare - p.rot_ratio * p.rot_ratio;
  p.ay = p.ay_bare - p.rot_ratio * p.rot_ratio;
  return p;
}

const char* to_string(Scaling s) {
  return s == Scaling::Classical ? "Classical" : "AR";
}

}  // namespace gpv
