#include "gpv/energy.hpp"

namespace gpv {

EnergyBreakdown energy(const Discretization& d, const ComplexField& u) {
  const ModelParams& p = d.params;
  EnergyBreakdown e;
  e.kinetic = 0.5 * p.epsilon *
              (u.re.dot(d.K * u.re) + u.im.dot(d.K * u.im));
  e.potential = p.epsilon *
                (u.re.dot(d.P * u.re) + u.im.dot(d.P * u.im));
  e.interaction = 0.5 * p.epsilon * p.c_g * quartic_integral(d, u);
  e.angular_momentum = 2.0 * u.im.dot(d.Ra * u.re);
  e.rotation = -p.epsilon * p.c_omega * e.angular_momentum;
  e.total = e.kinetic + e.potential + e.interaction + e.rotation;
  e.chemical = e.total + e.interaction;
  return e;
}

double energy_covariant(const Discretization& d, const ComplexField& u) {
  const ModelParams& p = d.params;
  // |grad_A u|^2 = |grad u|^2 + C_Omega^2 r^2 |u|^2 - 2 C_Omega Im(...)
  // with the trap reduced to its effective (centrifugally corrected) form.
  const double kin =
      0.5 * (u.re.dot(d.K * u.re) + u.im.dot(d.K * u.im));
  const double r2term =
      0.5 * (u.re.dot((d.W - d.M) * u.re) + u.im.dot((d.W - d.M) * u.im));
  const double pot =
      u.re.dot(d.Peff * u.re) + u.im.dot(d.Peff * u.im);
  const double inter = 0.5 * p.c_g * quartic_integral(d, u);
  const double lz = 2.0 * u.im.dot(d.Ra * u.re);
  return p.epsilon * (kin + r2term + pot + inter - p.c_omega * lz);
}

void gradient_l2(const Discretization& d, const ComplexField& u, Vec& gr,
                 Vec& gi) {
  const ModelParams& p = d.params;
  Vec cr, ci;
  cubic_vectors(d, u, cr, ci);
  gr = p.epsilon * (d.K * u.re + 2.0 * (d.P * u.re) + 2.0 * p.c_g * cr +
                    2.0 * p.c_omega * (d.Ra * u.im));
  gi = p.epsilon * (d.K * u.im + 2.0 * (d.P * u.im) + 2.0 * p.c_g * ci -
                    2.0 * p.c_omega * (d.Ra * u.re));
}

}  // namespace gpv
