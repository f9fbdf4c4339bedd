#pragma once

#include "gpv/field.hpp"

namespace gpv {

/// Components of the Gross-Pitaevskii energy of a state u.  Every entry
/// already carries the eps prefactor, so total is their plain sum.
struct EnergyBreakdown {
  double kinetic = 0.0;          // eps/2 int |grad u|^2
  double potential = 0.0;        // eps int C_trap |u|^2
  double interaction = 0.0;      // eps C_g / 2 int |u|^4
  double rotation = 0.0;         // -eps C_Omega L_z
  double angular_momentum = 0.0; // L_z = int i conj(u) (A^t . grad u)
  double total = 0.0;
  double chemical = 0.0;         // mu = total + interaction
};

EnergyBreakdown energy(const Discretization& d, const ComplexField& u);

/// Same total energy evaluated through the covariant splitting
/// (magnetic kinetic term plus effective trap); used as a consistency
/// check on the assembly.
double energy_covariant(const Discretization& d, const ComplexField& u);

/// L2 gradient of the energy: dE/du_re and dE/du_im as nodal vectors
/// (the Frechet derivative tested against finite differences).
void gradient_l2(const Discretization& d, const ComplexField& u, Vec& gr,
                 Vec& gi);

}  // namespace gpv
