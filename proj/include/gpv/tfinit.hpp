#pragma once

#include <string>

#include "gpv/field.hpp"
#include "gpv/mesh.hpp"
#include "gpv/params.hpp"

namespace gpv {

enum class TFRegime {
  Harmonic2D,
  Harmonic3D,
  QuarticPlus2D,
  QuarticHole2D,
  QuarticPure3D,
  QuarticPlus3D,
  QuarticHole3D,
  QuarticDepletion3D,
};

const char* to_string(TFRegime r);

/// Closed-form Thomas-Fermi description: peak parameter rho0 such that
/// rho_TF = ((rho0 - 2 V_eff) / C_S)_+, plus condensate radii.
struct TFProfile {
  TFRegime regime = TFRegime::Harmonic2D;
  double rho0 = 0.0;
  double cs = 0.0;     // C_S = 2 eps^2 C_g
  double rx = 0.0;     // semi-axis along x (harmonic) or R_max (radial)
  double ry = 0.0;
  double rz = 0.0;     // 3D only
  double r_max = 0.0;  // outer radius for radially symmetric traps
  double r_minus = 0.0;  // annulus inner radius (hole regimes)
  double eta = 0.0;      // nonlinear-equation root when applicable
};

TFProfile tf_harmonic_2d(double ax, double ay, double cs);
TFProfile tf_harmonic_3d(double ax, double ay, double az, double cs);
TFProfile tf_quartic_2d(double a2, double a4, double cs);
TFProfile tf_quartic_3d(double a2, double a4, double az, double cs);

/// Dispatch on the trap shape encoded in the model parameters
/// (harmonic when a4 = 0, radially symmetric quartic otherwise).
TFProfile tf_profile(const ModelParams& p);

/// Residual functions of the root equations, exposed for testing.
double tf_quartic_2d_f(double eta, double a2, double a4, double cs);
double tf_quartic_3d_f(double eta, double a_eta);
double tf_quartic_3d_fprime(double eta, double a_eta);

/// Thomas-Fermi density at a point, given the trap in p.
double tf_density(const TFProfile& tf, const ModelParams& p, double x,
                  double y);

/// Real-valued field sqrt(rho_TF) sampled at the vertices and normalized
/// to unit L2 norm.
ComplexField tf_field(const TFProfile& tf, const ModelParams& p,
                      const TriMesh& m);

/// Computational-domain semi-axes: inflation times the condensate radii.
void domain_radii(const TFProfile& tf, double inflation, double& rx,
                  double& ry);

}  // namespace gpv
