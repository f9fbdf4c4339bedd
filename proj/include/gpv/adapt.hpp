#pragma once

#include "gpv/field.hpp"
#include "gpv/mesh.hpp"

namespace gpv {

/// Per-triangle refinement indicator with its control parameters.
struct ErrorIndicator {
  std::vector<double> score;  // nonnegative, one per triangle
  double eps_target = 0.1;
  double h_min = 1e-3;
  double h_max = 1.0;
};

/// Indicator driven by the recovered Hessian of the density |u|^2:
/// score_T = h_T^2 * ||H||_F averaged over the triangle's vertices.
ErrorIndicator hessian_indicator(const TriMesh& m, const ComplexField& u);

struct AdaptResult {
  TriMesh mesh;
  ComplexField u;
  bool changed = false;
};

/// Mark (threshold intersected with Doerfler 50%, respecting h_min and
/// forcing triangles above h_max), bisect, transfer and renormalize.
AdaptResult adapt_mesh(const TriMesh& m, const ComplexField& u,
                       double eps_target, double h_min = 1e-3,
                       double h_max = 1.0, int vertex_budget = 400000);

}  // namespace gpv
