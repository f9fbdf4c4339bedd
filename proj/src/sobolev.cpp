#include "gpv/sobolev.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

/// 2N x 2N symmetric block matrix [[W+K, 2 C_Om Ra], [-2 C_Om Ra, W+K]]
/// with boundary rows and columns replaced by the identity.
SpMat build_ha_matrix(const Discretization& d) {
  const TriMesh& m = *d.mesh;
  const int n = m.num_vertices();
  const double com = d.params.c_omega;
  const SpMat A = d.W + d.K;
  const SpMat B = 2.0 * com * d.Ra;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()) * 2 +
                static_cast<std::size_t>(B.nonZeros()) * 2 + 2 * n);
  auto free_dof = [&](int v) { return !m.boundary_vertex[v]; };
  auto add_block = [&](const SpMat& s, int roff, int coff, double sign) {
    for (int col = 0; col < s.outerSize(); ++col) {
      for (SpMat::InnerIterator it(s, col); it; ++it) {
        if (free_dof(static_cast<int>(it.row())) && free_dof(col))
          trips.emplace_back(static_cast<int>(it.row()) + roff, col + coff,
                             sign * it.value());
      }
    }
  };
  add_block(A, 0, 0, 1.0);
  add_block(A, n, n, 1.0);
  add_block(B, 0, n, 1.0);
  add_block(B, n, 0, -1.0);
  for (int v = 0; v < n; ++v) {
    if (!free_dof(v)) {
      trips.emplace_back(v, v, 1.0);
      trips.emplace_back(v + n, v + n, 1.0);
    }
  }
  SpMat H(2 * n, 2 * n);
  H.setFromTriplets(trips.begin(), trips.end());
  H.makeCompressed();
  return H;
}

}  // namespace

HASystem::HASystem(const Discretization& d) : d_(&d) {
  ldlt_.compute(build_ha_matrix(d));
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("H_A factorization failed (singular operator)");
}

ComplexField HASystem::solve(const Vec& br, const Vec& bi) const {
  const TriMesh& m = *d_->mesh;
  const int n = m.num_vertices();
  Vec rhs(2 * n);
  rhs.head(n) = br;
  rhs.tail(n) = bi;
  for (int v = 0; v < n; ++v) {
    if (m.boundary_vertex[v]) {
      rhs[v] = 0.0;
      rhs[v + n] = 0.0;
    }
  }
  const Vec x = ldlt_.solve(rhs);
  ComplexField g(n);
  g.re = x.head(n);
  g.im = x.tail(n);
  return g;
}

ComplexField ha_riesz_solve(const HASystem& sys, const Discretization& d,
                            const ComplexField& u) {
  const double com = d.params.c_omega;
  Vec cr, ci;
  cubic_vectors(d, u, cr, ci);
  const Vec br = 0.5 * (d.K * u.re) + d.P * u.re + d.params.c_g * cr +
                 com * (d.Ra * u.im);
  const Vec bi = 0.5 * (d.K * u.im) + d.P * u.im + d.params.c_g * ci -
                 com * (d.Ra * u.re);
  return sys.solve(br, bi);
}

ComplexField project_tangent(const HASystem& sys, const Discretization& d,
                             const ComplexField& u, const ComplexField& G) {
  const ComplexField vha = sys.solve(d.M * u.re, d.M * u.im);
  const double denom =
      u.re.dot(d.M * vha.re) + u.im.dot(d.M * vha.im);
  if (std::abs(denom) < 1e-300)
    throw NumericError("degenerate tangent projection: <u, v_HA> = 0");
  const double num = u.re.dot(d.M * G.re) + u.im.dot(d.M * G.im);
  const double f = num / denom;
  ComplexField pg(u.size());
  pg.re = G.re - f * vha.re;
  pg.im = G.im - f * vha.im;
  return pg;
}

std::vector<double> solve_cubic(double c3, double c2, double c1, double c0) {
  const double scale =
      std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  std::vector<double> roots;
  if (scale == 0.0) return roots;

  auto poly = [&](double x) {
    return ((c3 * x + c2) * x + c1) * x + c0;
  };
  auto dpoly = [&](double x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };
  auto polish = [&](double x) {
    for (int it = 0; it < 8; ++it) {
      const double d = dpoly(x);
      if (d == 0.0) break;
      x -= poly(x) / d;
    }
    return x;
  };

  if (std::abs(c3) <= 1e-14 * scale) {
    if (std::abs(c2) <= 1e-14 * scale) {
      if (std::abs(c1) > 0.0) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
    roots.push_back(q / c2);
    if (q != 0.0) roots.push_back(c0 / q);
    return roots;
  }

  // Depressed cubic t^3 + p t + q, x = t - c2 / (3 c3).
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double t =
        std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq);
    roots.push_back(polish(t + shift));
  } else if (p == 0.0) {
    roots.push_back(polish(shift));
  } else {
    const double r = std::sqrt(-p * p * p / 27.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k)
      roots.push_back(polish(
          mag * std::cos((phi + 2.0 * std::numbers::pi * k) / 3.0) + shift));
  }

  // Companion-matrix fallback when the closed form went numerically bad.
  bool ok = true;
  for (double r : roots) {
    if (!std::isfinite(r) ||
        std::abs(poly(r)) >
            1e-7 * scale * (1.0 + std::abs(r) * std::abs(r) * std::abs(r)))
      ok = false;
  }
  if (!ok) {
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    comp(0, 2) = -c0 / c3;
    comp(1, 2) = -c1 / c3;
    comp(2, 2) = -c2 / c3;
    const Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    roots.clear();
    for (int k = 0; k < 3; ++k) {
      const auto ev = es.eigenvalues()[k];
      if (std::abs(ev.imag()) < 1e-8 * (1.0 + std::abs(ev.real())))
        roots.push_back(polish(ev.real()));
    }
  }
  return roots;
}

std::optional<LineSearchResult> cubic_linesearch(const Discretization& d,
                                                 const ComplexField& u,
                                                 const ComplexField& pg) {
  const ModelParams& p = d.params;
  const double com = p.c_omega;

  // Quadratic part of E / eps: x^T H2 x with
  // H2 = [[K + 2P, 2 C_Om Ra], [-2 C_Om Ra, K + 2P]].
  auto h2 = [&](const ComplexField& x, Vec& yr, Vec& yi) {
    yr = d.K * x.re + 2.0 * (d.P * x.re) + 2.0 * com * (d.Ra * x.im);
    yi = d.K * x.im + 2.0 * (d.P * x.im) - 2.0 * com * (d.Ra * x.re);
  };
  Vec h2g_r, h2g_i, h2u_r, h2u_i;
  h2(pg, h2g_r, h2g_i);
  h2(u, h2u_r, h2u_i);
  const double g_h2_g = pg.re.dot(h2g_r) + pg.im.dot(h2g_i);
  const double g_h2_u = pg.re.dot(h2u_r) + pg.im.dot(h2u_i);

  // Quartic part through the degree-4 rule (exact for P1 fields):
  // per point a = |u|^2, b = Re(u conj(G)), c = |G|^2.
  const auto& q4 = tri_quad_degree4();
  const TriMesh& m = *d.mesh;
  double s_cc = 0.0, s_bc = 0.0, s_ac = 0.0, s_bb = 0.0, s_ab = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    for (std::size_t qp = 0; qp < q4.points.size(); ++qp) {
      const auto& bc = q4.points[qp];
      double ur = 0.0, ui = 0.0, gr = 0.0, gi = 0.0;
      for (int k = 0; k < 3; ++k) {
        ur += bc[k] * u.re[tr[k]];
        ui += bc[k] * u.im[tr[k]];
        gr += bc[k] * pg.re[tr[k]];
        gi += bc[k] * pg.im[tr[k]];
      }
      const double w = d.quad4_w[t][qp];
      const double av = ur * ur + ui * ui;
      const double bv = ur * gr + ui * gi;
      const double cv = gr * gr + gi * gi;
      s_cc += w * cv * cv;
      s_bc += w * bv * cv;
      s_ac += w * av * cv;
      s_bb += w * bv * bv;
      s_ab += w * av * bv;
    }
  }

  const double cg = p.c_g;
  const double c3 = 2.0 * cg * s_cc;
  const double c2 = -6.0 * cg * s_bc;
  const double c1 = g_h2_g + 2.0 * cg * (s_ac + 2.0 * s_bb);
  const double c0 = -(g_h2_u + 2.0 * cg * s_ab);

  const auto roots = solve_cubic(c3, c2, c1, c0);
  std::optional<LineSearchResult> best;
  for (double alpha : roots) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) continue;
    const double dj = ((c3 * alpha / 4.0 + c2 / 3.0) * alpha + c1 / 2.0) *
                          alpha * alpha +
                      c0 * alpha;
    if (dj < 0.0 && (!best || dj < best->delta_j)) {
      LineSearchResult r;
      r.alpha = alpha;
      r.chi = 2.0 * p.epsilon * alpha;
      r.delta_j = dj;
      best = r;
    }
  }
  return best;
}

double LadderState::threshold(int lvl) const {
  return opt.eps1 / std::pow(opt.step, lvl - 1);
}

int LadderState::max_level() const {
  if (opt.eps_min >= opt.eps1) return 1;
  return 1 + static_cast<int>(std::floor(
                 std::log(opt.eps1 / opt.eps_min) / std::log(opt.step)));
}

LadderAction ladder_check(LadderState& s, double de, double de_prev,
                          double eps_c) {
  const double d = std::abs(de);
  const double dp = std::abs(de_prev);
  if (dp > 0.0 && d > dp) {
    if (s.level > 1) {
      --s.level;
      s.adapts_at_level = 0;
      return LadderAction::RelaxLevel;
    }
    return LadderAction::None;
  }
  if (s.level > s.max_level()) return LadderAction::None;
  if (!(d < s.threshold(s.level)) || !(d > eps_c)) return LadderAction::None;

  // If dE dropped past several windows at once, move to the one that
  // contains it before counting the adaptation.
  while (s.level < s.max_level() && d < s.threshold(s.level + 1)) {
    ++s.level;
    s.adapts_at_level = 0;
  }
  ++s.adapts_at_level;
  if (s.adapts_at_level >= s.opt.n_ad) {
    ++s.level;
    s.adapts_at_level = 0;
    return LadderAction::AdvanceLevel;
  }
  return LadderAction::Adapt;
}

DescentResult descend(const TriMesh& mesh, const ComplexField& seed,
                      const ModelParams& p, const DescentOptions& opts) {
  DescentResult res;
  res.mesh = mesh;
  res.u = seed;
  apply_dirichlet(res.mesh, res.u);

  auto disc = std::make_unique<Discretization>(res.mesh, p);
  auto sys = std::make_unique<HASystem>(*disc);
  normalize(disc->M, res.u);

  EnergyBreakdown eb = energy(*disc, res.u);
  double e_prev = eb.total;
  double de_prev = 0.0;
  double alpha_prev = 1.0;
  LadderState ladder{opts.ladder};
  bool just_adapted = false;

  for (int n = 1; n <= opts.max_iter; ++n) {
    const ComplexField g = ha_riesz_solve(*sys, *disc, res.u);
    const ComplexField pg = project_tangent(*sys, *disc, res.u, g);

    double alpha;
    if (const auto ls = cubic_linesearch(*disc, res.u, pg)) {
      alpha = ls->alpha;
    } else {
      alpha = 0.5 * alpha_prev;  // documented halving fallback
    }

    ComplexField trial(res.u.size());
    double e_new = 0.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      trial.re = res.u.re - alpha * pg.re;
      trial.im = res.u.im - alpha * pg.im;
      normalize(disc->M, trial);
      eb = energy(*disc, trial);
      e_new = eb.total;
      if (e_new <= e_prev + 1e-13 * (1.0 + std::abs(e_prev))) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "Sobolev descent diverged at iteration " << n << ": energy "
          << e_prev << " -> " << e_new << " with step " << alpha;
      throw NumericError(msg.str());
    }
    alpha_prev = alpha;
    res.u = trial;
    res.iterations = n;

    double de;
    if (std::abs(e_new) > 1e-12)
      de = (e_new - e_prev) / e_new;
    else
      de = e_new - e_prev;
    e_prev = e_new;

    TraceRow row;
    row.iteration = n;
    row.energy = e_new;
    row.delta_e = de;
    row.lz = eb.angular_momentum;
    row.norm = l2_norm(disc->M, res.u);
    row.num_vertices = res.mesh.num_vertices();
    row.event = "step";
    res.trace.rows.push_back(row);

    if (std::abs(de) < opts.eps_c) {
      res.converged = true;
      break;
    }

    if (opts.adapt_enabled && !just_adapted &&
        res.adaptations < opts.max_adapts) {
      const LadderAction act = ladder_check(ladder, de, de_prev, opts.eps_c);
      if (act == LadderAction::Adapt || act == LadderAction::AdvanceLevel) {
        AdaptResult ar =
            adapt_mesh(res.mesh, res.u, opts.err_target, opts.h_min,
                       opts.h_max, opts.vertex_budget);
        if (ar.changed) {
          res.mesh = std::move(ar.mesh);
          res.u = std::move(ar.u);
          disc = std::make_unique<Discretization>(res.mesh, p);
          sys = std::make_unique<HASystem>(*disc);
          normalize(disc->M, res.u);
          eb = energy(*disc, res.u);
          e_prev = eb.total;
          ++res.adaptations;
          TraceRow arow = row;
          arow.energy = e_prev;
          arow.delta_e = 0.0;
          arow.lz = eb.angular_momentum;
          arow.norm = l2_norm(disc->M, res.u);
          arow.num_vertices = res.mesh.num_vertices();
          arow.event = "adapt";
          res.trace.rows.push_back(arow);
          just_adapted = true;
          de = 0.0;
        }
      }
    } else {
      just_adapted = false;
    }
    de_prev = de;
  }

  res.final_energy = energy(*disc, res.u);
  return res;
}

}  // namespace gpv
