#include "gpv/tfinit.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

constexpr double kPi = std::numbers::pi;

/// Newton iteration safeguarded by bisection on a sign-changing bracket.
double safeguarded_newton(const std::function<double(double)>& f,
                          const std::function<double(double)>& fp, double lo,
                          double hi, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << what << ": root not bracketed in [" << lo << ", " << hi
        << "], f = [" << flo << ", " << fhi << "]";
    throw NumericError(msg.str());
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (std::abs(fx) < 1e-14 * (1.0 + std::abs(x))) return x;
    if (fx * flo < 0.0)
      hi = x;
    else {
      lo = x;
      flo = fx;
    }
    const double d = fp(x);
    double xn = (d != 0.0) ? x - fx / d : lo;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-16 * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  std::ostringstream msg;
  msg << what << ": Newton did not converge in 100 iterations, bracket ["
      << lo << ", " << hi << "]";
  throw NumericError(msg.str());
}

double outer_radius_sq(double a2, double a4, double rho0) {
  return (-a2 + std::sqrt(a2 * a2 + 4.0 * rho0 * a4)) / (2.0 * a4);
}

double inner_radius_sq(double a2, double a4, double rho0) {
  return (-a2 - std::sqrt(a2 * a2 + 4.0 * rho0 * a4)) / (2.0 * a4);
}

}  // namespace

const char* to_string(TFRegime r) {
  switch (r) {
    case TFRegime::Harmonic2D: return "Harmonic2D";
    case TFRegime::Harmonic3D: return "Harmonic3D";
    case TFRegime::QuarticPlus2D: return "QuarticPlus2D";
    case TFRegime::QuarticHole2D: return "QuarticHole2D";
    case TFRegime::QuarticPure3D: return "QuarticPure3D";
    case TFRegime::QuarticPlus3D: return "QuarticPlus3D";
    case TFRegime::QuarticHole3D: return "QuarticHole3D";
    case TFRegime::QuarticDepletion3D: return "QuarticDepletion3D";
  }
  return "?";
}

TFProfile tf_harmonic_2d(double ax, double ay, double cs) {
  if (cs <= 0.0) throw ConfigError("C_S must be positive");
  if (ax <= 0.0 || ay <= 0.0)
    throw ConfigError(
        "harmonic trap cannot confine at Omega >= omega_perp (effective "
        "coefficient non-positive)");
  TFProfile tf;
  tf.regime = TFRegime::Harmonic2D;
  tf.cs = cs;
  tf.rho0 = std::sqrt(2.0 * std::sqrt(ax * ay) * cs / kPi);
  tf.rx = std::sqrt(tf.rho0 / ax);
  tf.ry = std::sqrt(tf.rho0 / ay);
  tf.r_max = std::max(tf.rx, tf.ry);
  return tf;
}

TFProfile tf_harmonic_3d(double ax, double ay, double az, double cs) {
  if (cs <= 0.0) throw ConfigError("C_S must be positive");
  if (ax <= 0.0 || ay <= 0.0 || az <= 0.0)
    throw ConfigError(
        "harmonic trap cannot confine at Omega >= omega_perp (effective "
        "coefficient non-positive)");
  TFProfile tf;
  tf.regime = TFRegime::Harmonic3D;
  tf.cs = cs;
  tf.rho0 =
      std::pow(15.0 * std::sqrt(ax * ay * az) * cs / (8.0 * kPi), 2.0 / 5.0);
  tf.rx = std::sqrt(tf.rho0 / ax);
  tf.ry = std::sqrt(tf.rho0 / ay);
  tf.rz = std::sqrt(tf.rho0 / az);
  tf.r_max = std::max(tf.rx, tf.ry);
  return tf;
}

double tf_quartic_2d_f(double eta, double a2, double a4, double cs) {
  return 4.0 * a4 * eta * eta * eta + 3.0 * a2 * eta * eta -
         6.0 * cs / kPi;
}

TFProfile tf_quartic_2d(double a2, double a4, double cs) {
  if (cs <= 0.0) throw ConfigError("C_S must be positive");
  if (a4 <= 0.0) throw ConfigError("quartic coefficient a4 must be positive");
  TFProfile tf;
  tf.cs = cs;

  const double abs_a2 = std::abs(a2);
  const bool hole =
      a2 < 0.0 &&
      a4 < std::sqrt(kPi * abs_a2 * abs_a2 * abs_a2 / (6.0 * cs));
  if (hole) {
    tf.regime = TFRegime::QuarticHole2D;
    tf.rho0 = (std::pow(6.0 * a4 * a4 * cs / kPi, 2.0 / 3.0) - a2 * a2) /
              (4.0 * a4);
    tf.r_max = std::sqrt(outer_radius_sq(a2, a4, tf.rho0));
    tf.r_minus = std::sqrt(inner_radius_sq(a2, a4, tf.rho0));
  } else {
    tf.regime = TFRegime::QuarticPlus2D;
    // For a2 < 0 the admissible root lies beyond the local minimum of
    // the cubic at eta = -a2 / (2 a4).
    const double lo = std::max(1e-8, -a2 / (2.0 * a4));
    double hi = 200.0;
    while (tf_quartic_2d_f(hi, a2, a4, cs) < 0.0 && hi < 1e9) hi *= 2.0;
    tf.eta = safeguarded_newton(
        [&](double e) { return tf_quartic_2d_f(e, a2, a4, cs); },
        [&](double e) { return 12.0 * a4 * e * e + 6.0 * a2 * e; }, lo, hi,
        "2D quartic Thomas-Fermi");
    tf.rho0 = a2 * tf.eta + a4 * tf.eta * tf.eta;
    tf.r_max = std::sqrt(tf.eta);
  }
  tf.rx = tf.ry = tf.r_max;
  return tf;
}

double tf_quartic_3d_f(double eta, double a_eta) {
  const double s = 1.0 + eta * eta;
  return a_eta * eta * eta * eta * eta -
         s * s * std::acos(eta / std::sqrt(s)) + eta * eta * eta +
         (5.0 / 3.0) * eta;
}

double tf_quartic_3d_fprime(double eta, double a_eta) {
  const double s = 1.0 + eta * eta;
  return 4.0 * a_eta * eta * eta * eta -
         4.0 * eta * s * std::acos(eta / std::sqrt(s)) + s +
         3.0 * eta * eta + 5.0 / 3.0;
}

TFProfile tf_quartic_3d(double a2, double a4, double az, double cs) {
  if (cs <= 0.0) throw ConfigError("C_S must be positive");
  if (a4 <= 0.0 || az <= 0.0)
    throw ConfigError("quartic 3D trap needs a4 > 0 and az > 0");
  TFProfile tf;
  tf.cs = cs;

  if (a2 == 0.0) {
    tf.regime = TFRegime::QuarticPure3D;
    tf.rho0 = std::sqrt(2.0 * std::sqrt(az) * std::sqrt(4.0 * a4)) *
              std::sqrt(cs) / kPi;
    tf.r_max = std::pow(tf.rho0 / a4, 0.25);
    tf.rz = std::sqrt(tf.rho0 / az);
    tf.rx = tf.ry = tf.r_max;
    return tf;
  }

  const double a_eta =
      std::sqrt(az) * std::pow(4.0 * a4, 2.5) * cs / (kPi * std::pow(a2, 4));
  auto f = [&](double e) { return tf_quartic_3d_f(e, a_eta); };
  auto fp = [&](double e) { return tf_quartic_3d_fprime(e, a_eta); };

  if (a2 > 0.0) {
    tf.regime = TFRegime::QuarticPlus3D;
    tf.eta = safeguarded_newton(f, fp, 1e-8, 200.0,
                                "3D quartic+quadratic Thomas-Fermi");
    tf.rho0 = a2 * a2 / (4.0 * a4 * tf.eta * tf.eta);
    tf.r_max = std::sqrt(outer_radius_sq(a2, a4, tf.rho0));
    tf.rz = std::sqrt(tf.rho0 / az);
  } else {
    const double xi = std::sqrt(a_eta / kPi);
    const double shoulder = a2 * a2 / (4.0 * a4);
    if (xi <= 1.0) {
      tf.regime = TFRegime::QuarticHole3D;
      tf.rho0 = shoulder * (xi - 1.0);
      tf.r_max = std::sqrt(outer_radius_sq(a2, a4, tf.rho0));
      tf.r_minus = std::sqrt(inner_radius_sq(a2, a4, tf.rho0));
      tf.rz = std::sqrt(tf.rho0 / az + shoulder / az);
    } else {
      tf.regime = TFRegime::QuarticDepletion3D;
      // Close to xi = 1 the root runs off to -infinity; extend the
      // bracket until the quartic term dominates.
      double lo = -200.0;
      while (f(lo) < 0.0 && lo > -1e9) lo *= 2.0;
      tf.eta = safeguarded_newton(f, fp, lo, -1e-8,
                                  "3D quartic-quadratic Thomas-Fermi");
      tf.rho0 = a2 * a2 / (4.0 * a4 * tf.eta * tf.eta);
      tf.r_max = std::sqrt(outer_radius_sq(a2, a4, tf.rho0));
      tf.rz = std::sqrt(tf.rho0 / az + shoulder / az);
    }
  }
  tf.rx = tf.ry = tf.r_max;
  return tf;
}

TFProfile tf_profile(const ModelParams& p) {
  const double cs = 2.0 * p.epsilon * p.epsilon * p.c_g;
  if (cs <= 0.0)
    throw ConfigError(
        "Thomas-Fermi initialization requires an interacting gas (beta > 0)");
  if (p.a4 == 0.0) {
    return (p.dim == 3) ? tf_harmonic_3d(p.ax, p.ay, p.az_bare, cs)
                        : tf_harmonic_2d(p.ax, p.ay, cs);
  }
  if (p.ax != p.ay)
    throw ConfigError(
        "quartic Thomas-Fermi formulas assume a radially symmetric trap "
        "(ax = ay)");
  return (p.dim == 3) ? tf_quartic_3d(p.ax, p.a4, p.az_bare, cs)
                      : tf_quartic_2d(p.ax, p.a4, cs);
}

double tf_density(const TFProfile& tf, const ModelParams& p, double x,
                  double y) {
  const double v2 = 2.0 * p.effective_potential(x, y);
  return std::max(0.0, (tf.rho0 - v2) / tf.cs);
}

ComplexField tf_field(const TFProfile& tf, const ModelParams& p,
                      const TriMesh& m) {
  ComplexField u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    u.re[v] =
        std::sqrt(tf_density(tf, p, m.vertices[v].x, m.vertices[v].y));

  // Exact L2 norm of the P1 interpolant: |u_h|^2 is quadratic, so the
  // mid-edge rule integrates it exactly.
  const auto& q2 = tri_quad_degree2();
  double nrm2 = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    const double area = m.triangle_area(t);
    for (std::size_t qp = 0; qp < q2.points.size(); ++qp) {
      const auto& bc = q2.points[qp];
      double ur = 0.0;
      for (int k = 0; k < 3; ++k) ur += bc[k] * u.re[tr[k]];
      nrm2 += q2.weights[qp] * area * ur * ur;
    }
  }
  if (!(nrm2 > 0.0))
    throw NumericError("Thomas-Fermi field vanishes on the mesh");
  u.re /= std::sqrt(nrm2);
  return u;
}

void domain_radii(const TFProfile& tf, double inflation, double& rx,
                  double& ry) {
  if (inflation <= 0.0) throw ConfigError("@aRdom must be positive");
  rx = inflation * tf.rx;
  ry = inflation * tf.ry;
}

}  // namespace gpv
