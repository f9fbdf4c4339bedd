#pragma once

#include <vector>

#include "gpv/field.hpp"
#include "gpv/mesh.hpp"
#include "gpv/params.hpp"

namespace gpv {

/// One manufactured vortex: center, core radius and winding number.
struct VortexSpec {
  double xc = 0.0;
  double yc = 0.0;
  double core_radius = 0.25;  // eps_v
  int winding = 1;
};

/// Concentric rings of manufactured vortices.
struct VortexArraySpec {
  int rings = 0;           // narray
  int per_ring = 1;        // Nv
  double r_first = 1.0;    // Rarr
  double r_step = 0.0;     // dRarr
  double th_first = 0.0;   // Tharr [rad]
  double th_step = 0.0;    // dTharr [rad]
};

enum class CenterlineShape { I, S, U };

/// Axisymmetric reduced ground state: minimizes the 1D energy
///   2 pi int [ 1/2 f'^2 + (C_trap^eff + m^2/(2 r^2)) f^2
///              + 1/2 C_g f^4 ] r dr
/// under 2 pi int f^2 r dr = 1, with f(R) = 0 and f(0) = 0 for m >= 1.
/// Returns nodal values on rm.
std::vector<double> radial_ground_state(const ModelParams& p,
                                        const RadialMesh1D& rm, int winding);

/// Lift a radial profile onto a 2D mesh: u = f(r) e^{i m theta},
/// normalized against the given discretization.
ComplexField radial_to_field(const Discretization& d,
                             const RadialMesh1D& rm,
                             const std::vector<double>& f, int winding);

/// Multiply u by the vortex ansatz
///   sqrt(1/2 (1 + tanh(4/eps_v (r_v - eps_v)))) e^{i w theta_v}
/// and renormalize.
ComplexField imprint_vortex(const Discretization& d, const ComplexField& u,
                            const VortexSpec& v);

/// Imprint every vortex of the array (ring k, slot j at radius
/// Rarr + k dRarr and angle Tharr + k dTharr + 2 pi j / Nv); a single
/// renormalization at the end.
ComplexField imprint_array(const Discretization& d, const ComplexField& u,
                           const VortexArraySpec& spec, double core_radius);

/// Vortex centerline x_c(z) for the 3D ansatz shapes: S is the
/// two-branch bending formula, U mirrors its magnitude, I is the
/// straight line.
double centerline_x(double z, CenterlineShape shape, double alpha_v,
                    double beta_v);

}  // namespace gpv
