#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gpv/config.hpp"
#include "gpv/energy.hpp"
#include "gpv/post.hpp"
#include "gpv/tfinit.hpp"

namespace gpv {

struct RunResult {
  TriMesh mesh;
  ComplexField u;
  EnergyBreakdown final_energy;
  VortexReport vortices;
  SolverTrace trace;
  TFProfile tf;
  std::string output_dir;
  int iterations = 0;
  int adaptations = 0;
  bool converged = false;
};

/// Full pipeline: scaling, Thomas-Fermi profile, domain, seed, optional
/// vortex imprinting, minimization, post-processing.  With a non-empty
/// output root the field, mesh, restart data, iteration trace and vortex
/// report are written under
///   <root>/<dircase>_<trap>_<method>/
/// log receives progress lines (pass std::cout from the CLI).
RunResult run_case(const RunConfig& cfg, const std::string& output_root,
                   std::ostream& log);

/// Bundled ready-to-run configurations; each returns the physics and run
/// file contents.
struct ExampleCase {
  std::string name;
  std::string summary;
  std::string physics;
  std::string run;
};
const std::vector<ExampleCase>& bundled_examples();

}  // namespace gpv
