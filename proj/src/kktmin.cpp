#include "gpv/kktmin.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

ComplexField as_field(const Vec& ur, const Vec& ui) {
  ComplexField u(static_cast<int>(ur.size()));
  u.re = ur;
  u.im = ui;
  return u;
}

}  // namespace

double split_energy(const Discretization& d, const Vec& ur, const Vec& ui) {
  return energy(d, as_field(ur, ui)).total;
}

void split_gradient(const Discretization& d, const Vec& ur, const Vec& ui,
                    Vec& gr, Vec& gi) {
  gradient_l2(d, as_field(ur, ui), gr, gi);
}

SpMat split_hessian(const Discretization& d, const Vec& ur, const Vec& ui) {
  const TriMesh& m = *d.mesh;
  const int n = m.num_vertices();
  const ModelParams& p = d.params;
  const auto& q4 = tri_quad_degree4();

  // Interaction blocks: Q_rr = int (|u|^2 + 2 u_r^2) phi phi, likewise
  // Q_ii, and the coupling W_ri = int u_r u_i phi phi.
  std::vector<Eigen::Triplet<double>> trr, tii, tri;
  trr.reserve(m.triangles.size() * 9);
  tii.reserve(m.triangles.size() * 9);
  tri.reserve(m.triangles.size() * 9);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    double arr[3][3] = {}, aii[3][3] = {}, ari[3][3] = {};
    for (std::size_t qp = 0; qp < q4.points.size(); ++qp) {
      const auto& bc = q4.points[qp];
      double uvr = 0.0, uvi = 0.0;
      for (int k = 0; k < 3; ++k) {
        uvr += bc[k] * ur[tr[k]];
        uvi += bc[k] * ui[tr[k]];
      }
      const double w = d.quad4_w[t][qp];
      const double rho = uvr * uvr + uvi * uvi;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double pp = bc[i] * bc[j];
          arr[i][j] += w * (rho + 2.0 * uvr * uvr) * pp;
          aii[i][j] += w * (rho + 2.0 * uvi * uvi) * pp;
          ari[i][j] += w * uvr * uvi * pp;
        }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        trr.emplace_back(tr[i], tr[j], arr[i][j]);
        tii.emplace_back(tr[i], tr[j], aii[i][j]);
        tri.emplace_back(tr[i], tr[j], ari[i][j]);
      }
  }
  auto build = [n](std::vector<Eigen::Triplet<double>>& trips) {
    SpMat s(n, n);
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
  };
  const SpMat qrr = build(trr), qii = build(tii), wri = build(tri);

  const double eps = p.epsilon, cg = p.c_g, com = p.c_omega;
  const SpMat hrr = eps * (d.K + 2.0 * d.P + 2.0 * cg * qrr);
  const SpMat hii = eps * (d.K + 2.0 * d.P + 2.0 * cg * qii);
  const SpMat hri = eps * (4.0 * cg * wri + 2.0 * com * d.Ra);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(hrr.nonZeros()) * 4 + 2 * n);
  auto free_dof = [&](int v) { return !m.boundary_vertex[v]; };
  auto add_block = [&](const SpMat& s, int roff, int coff, bool transpose,
                       double sign) {
    for (int col = 0; col < s.outerSize(); ++col) {
      for (SpMat::InnerIterator it(s, col); it; ++it) {
        const int r = transpose ? col : static_cast<int>(it.row());
        const int c = transpose ? static_cast<int>(it.row()) : col;
        if (free_dof(r) && free_dof(c))
          trips.emplace_back(r + roff, c + coff, sign * it.value());
      }
    }
  };
  add_block(hrr, 0, 0, false, 1.0);
  add_block(hii, n, n, false, 1.0);
  add_block(hri, 0, n, false, 1.0);
  add_block(hri, n, 0, true, 1.0);
  for (int v = 0; v < n; ++v) {
    if (!free_dof(v)) {
      trips.emplace_back(v, v, 1.0);
      trips.emplace_back(v + n, v + n, 1.0);
    }
  }
  SpMat h(2 * n, 2 * n);
  h.setFromTriplets(trips.begin(), trips.end());
  h.makeCompressed();
  return h;
}

SpMat split_mass(const Discretization& d) {
  const TriMesh& m = *d.mesh;
  const int n = m.num_vertices();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(d.M.nonZeros()) * 2);
  for (int col = 0; col < d.M.outerSize(); ++col) {
    for (SpMat::InnerIterator it(d.M, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (!m.boundary_vertex[r] && !m.boundary_vertex[col]) {
        trips.emplace_back(r, col, it.value());
        trips.emplace_back(r + n, col + n, it.value());
      }
    }
  }
  SpMat m2(2 * n, 2 * n);
  m2.setFromTriplets(trips.begin(), trips.end());
  m2.makeCompressed();
  return m2;
}

KKTStep kkt_step(const Discretization& d, const SpMat& hess,
                 const SpMat& m2, const Vec& x, double lambda,
                 const Vec& grad_l, double c) {
  const int n2 = static_cast<int>(x.size());
  const Vec cgrad = 2.0 * (m2 * x);
  constexpr double kDelta = 1e-10;

  double tau = 0.0;
  for (;;) {
    const SpMat top = hess + (2.0 * lambda + tau) * m2;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(top.nonZeros()) + 2 * n2 + 1);
    for (int col = 0; col < top.outerSize(); ++col)
      for (SpMat::InnerIterator it(top, col); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), col, it.value());
    for (int i = 0; i < n2; ++i) {
      if (cgrad[i] != 0.0) {
        trips.emplace_back(i, n2, cgrad[i]);
        trips.emplace_back(n2, i, cgrad[i]);
      }
    }
    trips.emplace_back(n2, n2, -kDelta);
    SpMat kkt(n2 + 1, n2 + 1);
    kkt.setFromTriplets(trips.begin(), trips.end());
    kkt.makeCompressed();

    Eigen::SimplicialLDLT<SpMat> ldlt(kkt);
    bool good = (ldlt.info() == Eigen::Success);
    if (good) {
      // KKT-correct inertia: exactly one negative pivot, coming from the
      // constraint row.
      int neg = 0;
      const Vec dvec = ldlt.vectorD();
      for (int i = 0; i < dvec.size(); ++i) {
        if (dvec[i] < 0.0) ++neg;
        if (dvec[i] == 0.0) good = false;
      }
      if (neg != 1) good = false;
      if (good) {
        Vec rhs(n2 + 1);
        rhs.head(n2) = -grad_l;
        rhs[n2] = -c;
        const Vec sol = ldlt.solve(rhs);
        KKTStep step;
        step.dx = sol.head(n2);
        step.dlambda = sol[n2];
        step.tau = tau;
        return step;
      }
    }
    tau = (tau == 0.0) ? 1e-8 : 2.0 * tau;
    if (tau > 1e8) throw NumericError("Hessian regularization failed");
  }
}

KKTResult kkt_minimize(const TriMesh& mesh, const ComplexField& seed,
                       const ModelParams& p, const KKTOptions& opts) {
  KKTResult res;
  res.mesh = mesh;
  res.u = seed;
  apply_dirichlet(res.mesh, res.u);

  auto disc = std::make_unique<Discretization>(res.mesh, p);
  normalize(disc->M, res.u);

  const int stages = opts.adapt_enabled ? std::max(1, opts.n_adapt) : 1;
  int iter_count = 0;

  for (int k = 0; k < stages; ++k) {
    const int n = res.mesh.num_vertices();
    SpMat m2 = split_mass(*disc);
    Vec x(2 * n);
    x.head(n) = res.u.re;
    x.tail(n) = res.u.im;

    Vec gr, gi;
    split_gradient(*disc, x.head(n), x.tail(n), gr, gi);
    Vec grad(2 * n);
    grad.head(n) = gr;
    grad.tail(n) = gi;
    for (int v = 0; v < n; ++v) {
      if (res.mesh.boundary_vertex[v]) {
        grad[v] = 0.0;
        grad[v + n] = 0.0;
      }
    }
    Vec cgrad = 2.0 * (m2 * x);
    double lambda = -grad.dot(cgrad) / cgrad.squaredNorm();

    std::ostringstream merit_log;
    for (int it = 0; it < opts.inner_max; ++it) {
      const Vec grad_l = grad + lambda * cgrad;
      const double c = x.dot(m2 * x) - 1.0;
      res.grad_l_inf = grad_l.lpNorm<Eigen::Infinity>();
      res.constraint = c;
      // Feasibility is held tighter than the stationarity tolerance: the
      // reported state must sit on the unit sphere to near machine
      // accuracy.
      if (res.grad_l_inf < opts.tol &&
          std::abs(c) < std::min(opts.tol, 1e-10)) {
        res.converged = true;
        break;
      }
      res.converged = false;

      const SpMat hess = split_hessian(*disc, x.head(n), x.tail(n));
      const KKTStep step = kkt_step(*disc, hess, m2, x, lambda, grad_l, c);

      const double phi0 = grad_l.squaredNorm() + c * c;
      double alpha = 1.0;
      bool accepted = false;
      Vec xn;
      double ln = lambda;
      for (int half = 0; half < 30; ++half) {
        xn = x + alpha * step.dx;
        ln = lambda + alpha * step.dlambda;
        Vec gnr, gni;
        split_gradient(*disc, xn.head(n), xn.tail(n), gnr, gni);
        Vec gn(2 * n);
        gn.head(n) = gnr;
        gn.tail(n) = gni;
        for (int v = 0; v < n; ++v) {
          if (res.mesh.boundary_vertex[v]) {
            gn[v] = 0.0;
            gn[v + n] = 0.0;
          }
        }
        const Vec cgn = 2.0 * (m2 * xn);
        const Vec gln = gn + ln * cgn;
        const double cn = xn.dot(m2 * xn) - 1.0;
        const double phin = gln.squaredNorm() + cn * cn;
        merit_log << "stage " << k << " iter " << it << " alpha " << alpha
                  << " merit " << phin << "\n";
        if (phin <= (1.0 - 1e-4 * alpha) * phi0) {
          x = xn;
          lambda = ln;
          grad = gn;
          cgrad = cgn;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // Far from the basin of attraction the Newton direction can fail
        // to decrease the merit at any step length (heavy inertia
        // correction).  Rescue: one projected-gradient descent step on
        // the energy, retracted onto the constraint sphere, then reset
        // the multiplier by least squares and resume Newton.
        Vec d = -(grad - (grad.dot(cgrad) / cgrad.squaredNorm()) * cgrad);
        const double e0 = split_energy(*disc, x.head(n), x.tail(n));
        double a = 1.0;
        for (int half = 0; half < 60; ++half) {
          Vec xt = x + a * d;
          const double nrm = std::sqrt(xt.dot(m2 * xt));
          if (nrm > 0.0) {
            xt /= nrm;
            if (split_energy(*disc, xt.head(n), xt.tail(n)) < e0) {
              xn = xt;
              accepted = true;
              break;
            }
          }
          a *= 0.5;
        }
        if (!accepted)
          throw NumericError("KKT line search stalled; merit trace:\n" +
                             merit_log.str());
        x = xn;
        Vec rr, ri;
        split_gradient(*disc, x.head(n), x.tail(n), rr, ri);
        grad.head(n) = rr;
        grad.tail(n) = ri;
        for (int v = 0; v < n; ++v) {
          if (res.mesh.boundary_vertex[v]) {
            grad[v] = 0.0;
            grad[v + n] = 0.0;
          }
        }
        cgrad = 2.0 * (m2 * x);
        lambda = -grad.dot(cgrad) / cgrad.squaredNorm();
      }
      ++iter_count;

      res.u.re = x.head(n);
      res.u.im = x.tail(n);
      const EnergyBreakdown eb = energy(*disc, res.u);
      TraceRow row;
      row.iteration = iter_count;
      row.energy = eb.total;
      row.delta_e = 0.0;
      row.lz = eb.angular_momentum;
      row.norm = l2_norm(disc->M, res.u);
      row.num_vertices = n;
      row.event = "step";
      res.trace.rows.push_back(row);
    }

    res.u.re = x.head(n);
    res.u.im = x.tail(n);
    res.lambda = lambda;
    {
      const Vec grad_l = grad + lambda * cgrad;
      res.grad_l_inf = grad_l.lpNorm<Eigen::Infinity>();
      res.constraint = x.dot(m2 * x) - 1.0;
      res.converged = res.grad_l_inf < opts.tol &&
                      std::abs(res.constraint) < std::min(opts.tol, 1e-10);
    }

    if (opts.adapt_enabled && k < stages - 1) {
      const double frac =
          (stages > 1) ? static_cast<double>(k) / (stages - 1) : 1.0;
      const double eps_k =
          opts.eps0 * std::pow(opts.eps_last / opts.eps0, frac);
      AdaptResult ar = adapt_mesh(res.mesh, res.u, eps_k, opts.h_min,
                                  opts.h_max, opts.vertex_budget);
      if (ar.changed) {
        res.mesh = std::move(ar.mesh);
        res.u = std::move(ar.u);
        disc = std::make_unique<Discretization>(res.mesh, p);
        normalize(disc->M, res.u);
        ++res.adaptations;
        ++iter_count;
        const EnergyBreakdown eb = energy(*disc, res.u);
        TraceRow row;
        row.iteration = iter_count;
        row.energy = eb.total;
        row.lz = eb.angular_momentum;
        row.norm = l2_norm(disc->M, res.u);
        row.num_vertices = res.mesh.num_vertices();
        row.event = "adapt";
        res.trace.rows.push_back(row);
      }
    }
  }

  res.inner_iterations = iter_count;
  res.final_energy = energy(*disc, res.u);
  return res;
}

}  // namespace gpv
