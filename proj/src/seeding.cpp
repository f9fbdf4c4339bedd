#include "gpv/seeding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpv/errors.hpp"
#include "gpv/tfinit.hpp"

namespace gpv {

namespace {

constexpr double kPi = std::numbers::pi;

/// Per-quadrature-point data of the reduced 1D problem (3-point Gauss on
/// each interval; exact for the polynomial parts of the energy).
struct RadialQuad {
  std::vector<double> w;       // 2 pi r times the Gauss weight
  std::vector<double> v;       // potential value at the point
  std::vector<double> phi0;    // left hat value
  std::vector<double> phi1;    // right hat value
  std::vector<double> dphi;    // 1/h (right hat slope; left is -1/h)
  std::vector<int> left_node;
};

RadialQuad build_radial_quad(const ModelParams& p, const RadialMesh1D& rm,
                             int m) {
  static const double gp[3] = {-std::sqrt(3.0 / 5.0), 0.0,
                               std::sqrt(3.0 / 5.0)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  RadialQuad q;
  const int nint = static_cast<int>(rm.nodes.size()) - 1;
  for (int e = 0; e < nint; ++e) {
    const double a = rm.nodes[e], b = rm.nodes[e + 1];
    const double h = b - a;
    for (int k = 0; k < 3; ++k) {
      const double t = 0.5 * (1.0 + gp[k]);
      const double r = a + t * h;
      q.w.push_back(2.0 * kPi * r * gw[k] * 0.5 * h);
      double pot = p.c_trap_eff(r, 0.0);
      if (m != 0) pot += 0.5 * m * m / (r * r);
      q.v.push_back(pot);
      q.phi0.push_back(1.0 - t);
      q.phi1.push_back(t);
      q.dphi.push_back(1.0 / h);
      q.left_node.push_back(e);
    }
  }
  return q;
}

}  // namespace

std::vector<double> radial_ground_state(const ModelParams& p,
                                        const RadialMesh1D& rm, int winding) {
  if (winding < 0) throw ConfigError("radial winding must be >= 0");
  if (p.ax <= 0.0 && p.a4 <= 0.0)
    throw ConfigError(
        "effective trap is not confining (centrifugal force exceeds the "
        "harmonic trap and no quartic term is present)");
  const int n = static_cast<int>(rm.nodes.size());
  const int m = winding;
  const auto q = build_radial_quad(p, rm, m);
  const int nq = static_cast<int>(q.w.size());

  // Free dofs: drop the outer node, and the axis node when m >= 1.
  const int first = (m >= 1) ? 1 : 0;
  const int nfree = n - 1 - first;
  auto dof = [&](int node) { return node - first; };
  auto is_free = [&](int node) { return node >= first && node < n - 1; };

  using Mat = Eigen::MatrixXd;

  // Weighted 1D mass matrix on free dofs (2 pi int phi phi r dr).
  Mat M1 = Mat::Zero(nfree, nfree);
  for (int qp = 0; qp < nq; ++qp) {
    const int e = q.left_node[qp];
    const double ph[2] = {q.phi0[qp], q.phi1[qp]};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (is_free(e + i) && is_free(e + j))
          M1(dof(e + i), dof(e + j)) += q.w[qp] * ph[i] * ph[j];
  }

  // Initial profile: Thomas-Fermi when interacting, Gaussian otherwise,
  // pinched at the axis for nonzero winding.
  Vec f = Vec::Zero(nfree);
  double rho0 = 0.0, cs = 1.0;
  if (p.c_g > 0.0) {
    const TFProfile tf = tf_profile(p);
    rho0 = tf.rho0;
    cs = tf.cs;
  }
  for (int node = first; node < n - 1; ++node) {
    const double r = rm.nodes[node];
    double val;
    if (p.c_g > 0.0) {
      val = std::sqrt(
          std::max(0.0, (rho0 - 2.0 * p.effective_potential(r, 0.0)) / cs));
    } else {
      val = std::exp(-0.5 * r * r);
    }
    if (m >= 1) val *= std::pow(std::tanh(r), m);
    f[dof(node)] = val;
  }
  {
    const double nrm2 = f.dot(M1 * f);
    if (!(nrm2 > 0.0))
      throw NumericError("radial seed vanishes on the grid");
    f /= std::sqrt(nrm2);
  }

  auto energy_pieces = [&](const Vec& x, Vec* grad, Mat* hess) {
    double en = 0.0;
    if (grad) grad->setZero();
    if (hess) hess->setZero();
    for (int qp = 0; qp < nq; ++qp) {
      const int e = q.left_node[qp];
      const double ph[2] = {q.phi0[qp], q.phi1[qp]};
      const double dp[2] = {-q.dphi[qp], q.dphi[qp]};
      double fv = 0.0, fp = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double xi = is_free(e + i) ? x[dof(e + i)] : 0.0;
        fv += ph[i] * xi;
        fp += dp[i] * xi;
      }
      const double w = q.w[qp], v = q.v[qp];
      en += w * (0.5 * fp * fp + v * fv * fv +
                 0.5 * p.c_g * fv * fv * fv * fv);
      if (grad || hess) {
        for (int i = 0; i < 2; ++i) {
          if (!is_free(e + i)) continue;
          const int gi = dof(e + i);
          if (grad)
            (*grad)[gi] += w * (fp * dp[i] + 2.0 * v * fv * ph[i] +
                                2.0 * p.c_g * fv * fv * fv * ph[i]);
          if (hess) {
            for (int j = 0; j < 2; ++j) {
              if (!is_free(e + j)) continue;
              (*hess)(gi, dof(e + j)) +=
                  w * (dp[i] * dp[j] + 2.0 * v * ph[i] * ph[j] +
                       6.0 * p.c_g * fv * fv * ph[i] * ph[j]);
            }
          }
        }
      }
    }
    return en;
  };

  // Equality-constrained Newton with merit backtracking.
  Vec grad(nfree);
  Mat hess(nfree, nfree);
  energy_pieces(f, &grad, nullptr);
  Vec cgrad = 2.0 * (M1 * f);
  double lambda = -grad.dot(cgrad) / cgrad.squaredNorm();
  std::ostringstream history;

  auto merit = [&](const Vec& x, double lam) {
    Vec g(nfree);
    energy_pieces(x, &g, nullptr);
    const Vec gl = g + 2.0 * lam * (M1 * x);
    const double c = x.dot(M1 * x) - 1.0;
    return gl.squaredNorm() + c * c;
  };

  const int max_newton = 200;
  for (int it = 0; it < max_newton; ++it) {
    energy_pieces(f, &grad, &hess);
    cgrad = 2.0 * (M1 * f);
    const double c = f.dot(M1 * f) - 1.0;
    const Vec gl = grad + lambda * cgrad;
    const double res = std::max(gl.lpNorm<Eigen::Infinity>(), std::abs(c));
    history << "iter " << it << " res " << res << "\n";
    if (res < 1e-10) {
      std::vector<double> out(n, 0.0);
      for (int node = first; node < n - 1; ++node)
        out[node] = f[dof(node)];
      return out;
    }

    double tau = 0.0;
    for (;;) {
      Mat kkt = Mat::Zero(nfree + 1, nfree + 1);
      kkt.topLeftCorner(nfree, nfree) =
          hess + (2.0 * lambda + tau) * M1;
      kkt.topRightCorner(nfree, 1) = cgrad;
      kkt.bottomLeftCorner(1, nfree) = cgrad.transpose();
      Vec rhs(nfree + 1);
      rhs.head(nfree) = -gl;
      rhs[nfree] = -c;
      const Vec sol = kkt.partialPivLu().solve(rhs);
      const Vec dx = sol.head(nfree);
      const double dlam = sol[nfree];

      const double phi0 = gl.squaredNorm() + c * c;
      double alpha = 1.0;
      bool accepted = false;
      for (int half = 0; half < 30; ++half) {
        const Vec xn = f + alpha * dx;
        const double ln = lambda + alpha * dlam;
        if (merit(xn, ln) <= (1.0 - 1e-4 * alpha) * phi0) {
          f = xn;
          lambda = ln;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (accepted) break;
      tau = (tau == 0.0) ? 1e-8 : 2.0 * tau;
      if (tau > 1e8)
        throw NumericError(
            "radial ground state: Hessian regularization failed\n" +
            history.str());
    }
  }
  throw NumericError("radial ground state: Newton did not converge\n" +
                     history.str());
}

ComplexField radial_to_field(const Discretization& d, const RadialMesh1D& rm,
                             const std::vector<double>& f, int winding) {
  const TriMesh& m = *d.mesh;
  if (f.size() != rm.nodes.size())
    throw ConfigError("radial profile size does not match the radial mesh");
  const double rmax = rm.nodes.back();
  ComplexField u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) {
    const double x = m.vertices[v].x, y = m.vertices[v].y;
    const double r = std::hypot(x, y);
    double fr = 0.0;
    if (r < rmax) {
      const auto it =
          std::upper_bound(rm.nodes.begin(), rm.nodes.end(), r);
      const int e = std::max<int>(
          0, static_cast<int>(it - rm.nodes.begin()) - 1);
      const double h = rm.nodes[e + 1] - rm.nodes[e];
      const double t = (r - rm.nodes[e]) / h;
      fr = (1.0 - t) * f[e] + t * f[e + 1];
    }
    const double th = std::atan2(y, x);
    u.re[v] = fr * std::cos(winding * th);
    u.im[v] = fr * std::sin(winding * th);
  }
  apply_dirichlet(m, u);
  normalize(d.M, u);
  return u;
}

namespace {

void imprint_one(const TriMesh& m, ComplexField& u, const VortexSpec& v) {
  if (v.core_radius <= 0.0)
    throw ConfigError("vortex core radius must be positive");
  if (v.winding == 0) throw ConfigError("vortex winding must be nonzero");
  for (int i = 0; i < m.num_vertices(); ++i) {
    const double dx = m.vertices[i].x - v.xc;
    const double dy = m.vertices[i].y - v.yc;
    const double rv = std::hypot(dx, dy);
    const double amp = std::sqrt(
        0.5 *
        (1.0 + std::tanh(4.0 / v.core_radius * (rv - v.core_radius))));
    const double ph = v.winding * std::atan2(dy, dx);
    const double c = std::cos(ph), s = std::sin(ph);
    const double re = u.re[i], im = u.im[i];
    u.re[i] = amp * (re * c - im * s);
    u.im[i] = amp * (re * s + im * c);
  }
}

}  // namespace

ComplexField imprint_vortex(const Discretization& d, const ComplexField& u,
                            const VortexSpec& v) {
  ComplexField out = u;
  imprint_one(*d.mesh, out, v);
  normalize(d.M, out);
  return out;
}

ComplexField imprint_array(const Discretization& d, const ComplexField& u,
                           const VortexArraySpec& spec, double core_radius) {
  if (spec.rings >= 1 && spec.per_ring < 1)
    throw ConfigError("@Nv must be at least 1");
  ComplexField out = u;
  for (int k = 0; k < spec.rings; ++k) {
    const double radius = spec.r_first + k * spec.r_step;
    const double base = spec.th_first + k * spec.th_step;
    for (int j = 0; j < spec.per_ring; ++j) {
      const double th = base + 2.0 * kPi * j / spec.per_ring;
      VortexSpec v;
      v.xc = radius * std::cos(th);
      v.yc = radius * std::sin(th);
      v.core_radius = core_radius;
      v.winding = 1;
      imprint_one(*d.mesh, out, v);
    }
  }
  normalize(d.M, out);
  return out;
}

double centerline_x(double z, CenterlineShape shape, double alpha_v,
                    double beta_v) {
  if (shape == CenterlineShape::I) return 0.0;
  if (alpha_v <= 0.0 || beta_v <= 0.0)
    throw ConfigError("centerline curvature and length must be positive");
  const double s =
      (z < 0.0)
          ? -1.0 + std::tanh(alpha_v * (1.0 + z / beta_v)) / std::tanh(alpha_v)
          : 1.0 + std::tanh(alpha_v * (-1.0 + z / beta_v)) / std::tanh(alpha_v);
  return (shape == CenterlineShape::S) ? s : std::abs(s);
}

}  // namespace gpv
