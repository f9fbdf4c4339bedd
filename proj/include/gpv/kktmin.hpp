#pragma once

#include "gpv/adapt.hpp"
#include "gpv/energy.hpp"
#include "gpv/post.hpp"

namespace gpv {

/// Split-form energy E(u_r, u_i), identical to energy(u).total.
double split_energy(const Discretization& d, const Vec& ur, const Vec& ui);

/// Frechet derivative of the split energy (2N cotangent vector).
void split_gradient(const Discretization& d, const Vec& ur, const Vec& ui,
                    Vec& gr, Vec& gi);

/// Second Frechet derivative as a symmetric 2N x 2N sparse matrix.
/// Boundary rows and columns are replaced by the identity.
SpMat split_hessian(const Discretization& d, const Vec& ur, const Vec& ui);

/// Block-diagonal L2 metric diag(M, M) restricted to interior dofs.
SpMat split_mass(const Discretization& d);

/// One inertia-corrected Newton step on the KKT system
///   [[H + 2 lambda M2 + tau M2, grad c], [grad c^T, -delta]]
/// Returns the step (dx, dlambda) and the regularization tau used.
struct KKTStep {
  Vec dx;          // 2N
  double dlambda = 0.0;
  double tau = 0.0;
};
KKTStep kkt_step(const Discretization& d, const SpMat& hess,
                 const SpMat& m2, const Vec& x, double lambda,
                 const Vec& grad_l, double c);

struct KKTOptions {
  int inner_max = 50;      // IpoptMaxIter
  double tol = 1e-8;       // EPS0
  int n_adapt = 4;         // nbadapt: meshes visited (n_adapt - 1 adaptations)
  double eps0 = 0.1;       // first adaptation error target
  double eps_last = 0.005; // last adaptation error target
  double h_min = 1e-3;
  double h_max = 1.0;
  int vertex_budget = 400000;
  bool adapt_enabled = true;
};

struct KKTResult {
  TriMesh mesh;
  ComplexField u;
  double lambda = 0.0;
  double constraint = 0.0;      // c(u) at the end
  double grad_l_inf = 0.0;      // KKT stationarity residual
  SolverTrace trace;
  EnergyBreakdown final_energy;
  int inner_iterations = 0;
  int adaptations = 0;
  bool converged = false;
};

/// Equality-constrained Newton minimization with merit backtracking and
/// the outer mesh-adaptation schedule eps_k = eps0 (eps_last/eps0)^{k/(n-1)}.
KKTResult kkt_minimize(const TriMesh& mesh, const ComplexField& seed,
                       const ModelParams& p, const KKTOptions& opts);

}  // namespace gpv
