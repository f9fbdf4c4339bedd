#pragma once

#include <string>
#include <vector>

#include "gpv/field.hpp"
#include "gpv/mesh.hpp"

namespace gpv {

struct Vortex {
  double x = 0.0;
  double y = 0.0;
  int winding = 0;
  double core_density = 0.0;
};

struct VortexReport {
  std::vector<Vortex> vortices;
  double rho_min = 0.2;  // detection threshold, fraction of peak density
  int count() const { return static_cast<int>(vortices.size()); }
  int total_winding() const {
    int s = 0;
    for (const auto& v : vortices) s += v.winding;
    return s;
  }
};

/// One row of the iteration log shared by both solvers.
struct TraceRow {
  int iteration = 0;
  double energy = 0.0;
  double delta_e = 0.0;
  double lz = 0.0;
  double norm = 1.0;
  int num_vertices = 0;
  std::string event = "step";  // step | adapt | renorm
};

struct SolverTrace {
  std::vector<TraceRow> rows;
};

/// Phase-winding vortex detector: per-triangle circulation of the
/// wrapped phase differences, clustered and filtered by core density.
VortexReport detect_vortices(const TriMesh& m, const ComplexField& u,
                             double rho_min = 0.2);

/// Winding number of the phase along the (counterclockwise) boundary
/// contour of the mesh.
int boundary_winding(const TriMesh& m, const ComplexField& u);

/// Legacy ASCII VTK (unstructured grid, density and phase point data).
void write_vtk(const TriMesh& m, const ComplexField& u,
               const std::string& path);

/// CSV trace plus a gnuplot-syntax plotting script alongside.
void write_trace(const SolverTrace& trace, const std::string& path);
SolverTrace read_trace(const std::string& path);

/// JSON report {count, vortices: [{x, y, winding}]}.
void write_vortex_json(const VortexReport& rep, const std::string& path);

}  // namespace gpv
