#pragma once

#include <optional>
#include <string>

#include "gpv/params.hpp"

namespace gpv {

/// Everything read from the physics and run parameter files (the
/// `@keyword value` format; // starts a comment).
struct RunConfig {
  // -- physics file --
  Scaling scaling = Scaling::Classical;  // @scaling (required)
  int kind = 0;                          // @kind (required): 0 direct, 1 physical
  DirectCoefficients direct;             // @beta @Omop @ax @ay @az @a4
  PhysicalParams physical;               // @N @m @as @Omega @omegax ... @U2 @U4

  // -- run file: required --
  std::string method;  // GradS | Ipopt (Ipopt maps to the KKT minimizer)
  double eps0 = 0.0;   // @EPS0
  std::string init;    // TF | Ipoptaxi | Ipoptnorot

  // -- iteration limits --
  int grads_max_iter = 8000;  // @GradSMaxIter
  int ipopt_max_iter = 50;    // @IpoptMaxIter

  // -- outputs --
  std::string dircase = "BEC_2D";
  std::string scase = "BEC_2D";
  bool savesol = true;
  std::string output = "vtk";  // vtk only; tecplot rejected
  int iter_save = 100;
  int iter_norm = 100;
  int iter_plot = 100;
  bool savenergy = true;
  bool countvortices = true;

  // -- initial mesh --
  double ardom = 1.25;  // @aRdom
  int nbseg = 200;

  // -- restart --
  bool load_restart = false;  // @ifILrst
  bool keepmesh = true;
  std::string dirload;
  std::string dmesh;
  std::string dsol;

  // -- initial field --
  int mod = 0;     // central winding of the axisymmetric seed
  int narray = 0;  // vortex rings in the manufactured seed
  int nv = 1;      // @Nv
  double rarr = 1.0, drarr = 0.0, tharr = 0.0, dtharr = 0.0;
  double epsv = 0.25;  // vortex core radius of the ansatz
  std::string shape = "I";
  double curvature = 10.0;
  double length = 2.0;

  // -- adaptivity --
  bool adapt_initial = true;   // @ifIadapt
  double erradapt_init = 0.1;  // @erradaptI
  bool adapt_during = true;    // @ifRadapt
  double hminad = 0.001;
  double hmaxad = 1.0;
  std::optional<double> erradapt;  // default depends on the method
  double epsad1 = 1e-2;
  double epsadmin = 1e-9;
  int ipassal = 2;
  double epsadstep = 2.0;
  int iteradapt = 0;
  int niadapt = 1;
  int nbadapt = 4;
  double maerr1 = 0.01;

  double erradapt_value() const {
    if (erradapt) return *erradapt;
    return (method == "GradS") ? 0.1 : 0.005;
  }
};

/// Parse the two parameter files.  Unknown keys, missing required keys
/// and malformed values raise ConfigError with file/line context.
RunConfig parse_config(const std::string& physics_path,
                       const std::string& run_path);

/// Same parser over in-memory file contents (used by the bundled
/// examples and the tests).
RunConfig parse_config_text(const std::string& physics_text,
                            const std::string& run_text);

/// Model parameters from the physics half of a config.
ModelParams config_params(const RunConfig& cfg);

}  // namespace gpv
