#pragma once

#include <Eigen/SparseCholesky>
#include <optional>

#include "gpv/adapt.hpp"
#include "gpv/energy.hpp"
#include "gpv/post.hpp"

namespace gpv {

/// Factorized H_A operator (the Sobolev inner product) for one mesh,
/// with homogeneous Dirichlet conditions eliminated.  Independent of the
/// current field, so it is reused for every Riesz and projection solve.
class HASystem {
public:
  explicit HASystem(const Discretization& d);

  /// Solve H_A g = (br, bi); boundary entries of the right side are
  /// ignored, boundary entries of the result are zero.
  ComplexField solve(const Vec& br, const Vec& bi) const;

private:
  const Discretization* d_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

/// Sobolev gradient: G with <G, v>_{H_A} = E'(u) v / (2 eps).
ComplexField ha_riesz_solve(const HASystem& sys, const Discretization& d,
                            const ComplexField& u);

/// Projection of G onto the tangent space of the unit sphere at u.
ComplexField project_tangent(const HASystem& sys, const Discretization& d,
                             const ComplexField& u, const ComplexField& G);

struct LineSearchResult {
  double alpha = 0.0;  // step in u <- u - alpha PG
  double chi = 0.0;    // the 2 eps alpha step of the descent writeup
  double delta_j = 0.0;
};

/// Exact minimization of alpha -> E(u - alpha PG): the derivative is a
/// cubic whose real roots are found in closed form.  Empty when no
/// positive root decreases the energy (caller falls back to halving).
std::optional<LineSearchResult> cubic_linesearch(const Discretization& d,
                                                 const ComplexField& u,
                                                 const ComplexField& pg);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (Cardano, with a
/// companion-matrix fallback); exposed for testing.
std::vector<double> solve_cubic(double c3, double c2, double c1, double c0);

enum class LadderAction { None, Adapt, RelaxLevel, AdvanceLevel };

struct LadderOptions {
  double eps1 = 1e-2;     // first threshold (EPSAD1)
  double eps_min = 1e-9;  // deepest threshold (EPSADMIN)
  int n_ad = 2;           // adaptations per level (IPASSAL)
  double step = 2.0;      // geometric factor between levels (EPSADSTEP)
};

struct LadderState {
  LadderOptions opt;
  int level = 1;
  int adapts_at_level = 0;

  double threshold(int lvl) const;
  int max_level() const;
};

/// One ladder decision from the latest |dE| pair; mutates the state.
/// Adapt and AdvanceLevel both request a mesh adaptation; AdvanceLevel
/// additionally moves to the next (smaller) threshold.
LadderAction ladder_check(LadderState& s, double de, double de_prev,
                          double eps_c);

struct DescentOptions {
  double eps_c = 1e-9;  // convergence threshold on |dE|
  int max_iter = 8000;
  bool adapt_enabled = true;
  int max_adapts = 12;
  double err_target = 0.1;  // erradapt
  double h_min = 1e-3;
  double h_max = 1.0;
  int vertex_budget = 400000;
  LadderOptions ladder;
};

struct DescentResult {
  TriMesh mesh;
  ComplexField u;
  SolverTrace trace;
  EnergyBreakdown final_energy;
  int iterations = 0;
  int adaptations = 0;
  bool converged = false;
};

/// Projected Sobolev-gradient descent with the adaptive-mesh ladder.
DescentResult descend(const TriMesh& mesh, const ComplexField& seed,
                      const ModelParams& p, const DescentOptions& opts);

}  // namespace gpv
