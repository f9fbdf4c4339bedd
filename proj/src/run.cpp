#include "gpv/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gpv/adapt.hpp"
#include "gpv/errors.hpp"
#include "gpv/kktmin.hpp"
#include "gpv/seeding.hpp"
#include "gpv/sobolev.hpp"

namespace gpv {

namespace {

ModelParams without_rotation(ModelParams p) {
  p.rot_ratio = 0.0;
  p.c_omega = 0.0;
  p.ax = p.ax_bare;
  p.ay = p.ay_bare;
  return p;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  std::string s = os.str();
  for (char& c : s)
    if (c == '.' || c == '+') c = 'p';
    else if (c == '-') c = 'm';
  return s;
}

ComplexField build_seed(const RunConfig& cfg, const ModelParams& p,
                        const TFProfile& tf, const TriMesh& mesh,
                        double r_dom, std::ostream& log) {
  Discretization d(mesh, p);
  if (cfg.init == "TF") return tf_field(tf, p, mesh);
  if (cfg.init == "Ipoptaxi") {
    if (p.ax != p.ay)
      throw ConfigError("@init Ipoptaxi needs a radially symmetric trap");
    RadialMesh1D rm = make_radial_mesh(r_dom, 512);
    log << "axisymmetric seed: 1D ground state, winding " << cfg.mod
        << "\n";
    const auto f = radial_ground_state(p, rm, cfg.mod);
    return radial_to_field(d, rm, f, cfg.mod);
  }
  // Ipoptnorot: constrained Newton ground state of the trap at rest.
  log << "non-rotating seed: fixed-mesh Newton solve\n";
  const ModelParams p0 = without_rotation(p);
  const TFProfile tf0 = tf_profile(p0);
  KKTOptions opts;
  opts.inner_max = cfg.ipopt_max_iter;
  opts.tol = std::max(cfg.eps0, 1e-8);
  opts.adapt_enabled = false;
  opts.n_adapt = 1;
  const auto res = kkt_minimize(mesh, tf_field(tf0, p0, mesh), p0, opts);
  return res.u;
}

void write_echo(const std::string& path, const RunConfig& cfg,
                const ModelParams& p, const TFProfile& tf,
                const RunResult& res, double wall_seconds) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << std::setprecision(16);
  os << "scaling        " << to_string(p.scaling) << "\n"
     << "method         " << cfg.method << "\n"
     << "init           " << cfg.init << "\n"
     << "epsilon        " << p.epsilon << "\n"
     << "Cg             " << p.c_g << "\n"
     << "COmega         " << p.c_omega << "\n"
     << "Omega/omega    " << p.rot_ratio << "\n"
     << "trap           ax " << p.ax_bare << " ay " << p.ay_bare << " a4 "
     << p.a4 << "\n"
     << "TF regime      " << to_string(tf.regime) << "\n"
     << "TF rho0        " << tf.rho0 << "\n"
     << "domain         rx " << res.mesh.ellipse_rx << " ry "
     << res.mesh.ellipse_ry << "\n"
     << "vertices       " << res.mesh.num_vertices() << "\n"
     << "iterations     " << res.iterations << "\n"
     << "adaptations    " << res.adaptations << "\n"
     << "converged      " << (res.converged ? 1 : 0) << "\n"
     << "energy         " << res.final_energy.total << "\n"
     << "  kinetic      " << res.final_energy.kinetic << "\n"
     << "  potential    " << res.final_energy.potential << "\n"
     << "  interaction  " << res.final_energy.interaction << "\n"
     << "  rotation     " << res.final_energy.rotation << "\n"
     << "Lz             " << res.final_energy.angular_momentum << "\n"
     << "chemical       " << res.final_energy.chemical << "\n"
     << "vortices       " << res.vortices.count() << "\n"
     << "total winding  " << res.vortices.total_winding() << "\n"
     << "wall time [s]  " << wall_seconds << "\n";
}

}  // namespace

RunResult run_case(const RunConfig& cfg, const std::string& output_root,
                   std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = config_params(cfg);
  RunResult res;
  res.tf = tf_profile(p);

  double rx = 0.0, ry = 0.0;
  domain_radii(res.tf, cfg.ardom, rx, ry);
  log << "Thomas-Fermi regime " << to_string(res.tf.regime) << ", rho0 "
      << res.tf.rho0 << ", domain " << rx << " x " << ry << "\n";

  TriMesh mesh = make_ellipse_mesh(rx, ry, cfg.nbseg);
  ComplexField u;
  if (cfg.load_restart) {
    const std::string mesh_path = cfg.dirload + "/" + cfg.dmesh;
    const std::string sol_path = cfg.dirload + "/" + cfg.dsol;
    log << "restart from " << sol_path << "\n";
    TriMesh old_mesh = load_mesh(mesh_path);
    ComplexField old_u = load_field(sol_path);
    if (old_u.size() != old_mesh.num_vertices())
      throw IoError("restart field does not match restart mesh");
    if (cfg.keepmesh) {
      mesh = std::move(old_mesh);
      u = std::move(old_u);
    } else {
      u = transfer_field(old_mesh, old_u, mesh);
      apply_dirichlet(mesh, u);
    }
    normalize_quad(mesh, u);
  } else {
    u = build_seed(cfg, p, res.tf, mesh, std::max(rx, ry), log);
  }

  if (cfg.narray >= 1) {
    VortexArraySpec spec;
    spec.rings = cfg.narray;
    spec.per_ring = cfg.nv;
    spec.r_first = cfg.rarr;
    spec.r_step = cfg.drarr;
    spec.th_first = cfg.tharr;
    spec.th_step = cfg.dtharr;
    Discretization d(mesh, p);
    u = imprint_array(d, u, spec, cfg.epsv);
    log << "imprinted " << cfg.narray * cfg.nv << " vortices\n";
  }

  if (cfg.adapt_initial) {
    for (int k = 0; k < std::max(1, cfg.niadapt); ++k) {
      auto a = adapt_mesh(mesh, u, cfg.erradapt_init, cfg.hminad,
                          cfg.hmaxad);
      if (!a.changed) break;
      mesh = std::move(a.mesh);
      u = std::move(a.u);
    }
    log << "initial adaptation: " << mesh.num_vertices() << " vertices\n";
  }

  if (cfg.method == "GradS") {
    DescentOptions opts;
    opts.eps_c = cfg.eps0;
    opts.max_iter = cfg.grads_max_iter;
    opts.adapt_enabled = cfg.adapt_during;
    opts.err_target = cfg.erradapt_value();
    opts.h_min = cfg.hminad;
    opts.h_max = cfg.hmaxad;
    opts.ladder.eps1 = cfg.epsad1;
    opts.ladder.eps_min = cfg.epsadmin;
    opts.ladder.n_ad = cfg.ipassal;
    opts.ladder.step = cfg.epsadstep;
    log << "Sobolev gradient descent, EPS0 " << cfg.eps0 << "\n";
    auto r = descend(mesh, u, p, opts);
    res.mesh = std::move(r.mesh);
    res.u = std::move(r.u);
    res.trace = std::move(r.trace);
    res.final_energy = r.final_energy;
    res.iterations = r.iterations;
    res.adaptations = r.adaptations;
    res.converged = r.converged;
  } else {
    log << "note: the interior-point backend is replaced by a direct "
           "Newton solve of the KKT system\n";
    KKTOptions opts;
    opts.inner_max = cfg.ipopt_max_iter;
    opts.tol = cfg.eps0;
    opts.n_adapt = cfg.nbadapt;
    opts.eps0 = cfg.maerr1;
    opts.eps_last = cfg.erradapt_value();
    opts.h_min = cfg.hminad;
    opts.h_max = cfg.hmaxad;
    opts.adapt_enabled = cfg.adapt_during;
    auto r = kkt_minimize(mesh, u, p, opts);
    res.mesh = std::move(r.mesh);
    res.u = std::move(r.u);
    res.trace = std::move(r.trace);
    res.final_energy = r.final_energy;
    res.iterations = r.inner_iterations;
    res.adaptations = r.adaptations;
    res.converged = r.converged;
  }
  log << "final energy " << std::setprecision(12) << res.final_energy.total
      << ", Lz " << res.final_energy.angular_momentum << ", "
      << res.mesh.num_vertices() << " vertices\n";

  if (cfg.countvortices) {
    res.vortices = detect_vortices(res.mesh, res.u);
    log << res.vortices.count() << " vortices detected (total winding "
        << res.vortices.total_winding() << ")\n";
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (!output_root.empty()) {
    const std::string trap = (p.a4 == 0.0) ? "harmonic" : "quartic";
    const std::string dir =
        output_root + "/" + cfg.dircase + "_" + trap + "_" + cfg.method;
    std::filesystem::create_directories(dir);
    const std::string prefix = dir + "/" + cfg.scase + "_om" +
                               fmt_num(p.rot_ratio) + "_cg" +
                               fmt_num(p.c_g);
    if (cfg.savesol) {
      write_vtk(res.mesh, res.u, prefix + ".vtk");
      save_mesh(res.mesh, prefix + ".mesh");
      save_field(res.u, prefix + ".rst");
    }
    if (cfg.savenergy) write_trace(res.trace, prefix + "_trace.csv");
    if (cfg.countvortices)
      write_vortex_json(res.vortices, prefix + "_vortices.json");
    write_echo(prefix + ".echo", cfg, p, res.tf, res, wall);
    res.output_dir = dir;
    log << "results in " << dir << "\n";
  }
  return res;
}

const std::vector<ExampleCase>& bundled_examples() {
  static const std::vector<ExampleCase> cases = {
      {"harmonic_central_vortex",
       "harmonic trap, beta 500, Omega/omega 0.4, one central vortex",
       "@scaling Classical\n"
       "@kind 0\n"
       "@beta 500\n"
       "@Omop 0.4\n"
       "@ax 1\n"
       "@ay 1\n",
       "@method GradS\n"
       "@EPS0 1e-7\n"
       "@init Ipoptaxi\n"
       "@mod 0\n"
       "@narray 1\n"
       "@Nv 1\n"
       "@Rarr 0\n"
       "@nbseg 120\n"
       "@hminad 0.01\n"
       "@erradaptI 0.2\n"
       "@erradapt 0.2\n"
       "@dircase example\n"
       "@scase central_vortex\n"},
      {"quartic_ring_11",
       "quartic-plus trap, beta 500, Omega/omega 2, ring of 11 vortices",
       "@scaling Classical\n"
       "@kind 0\n"
       "@beta 500\n"
       "@Omop 2\n"
       "@ax 1\n"
       "@ay 1\n"
       "@a4 0.5\n",
       "@method GradS\n"
       "@EPS0 1e-6\n"
       "@init TF\n"
       "@narray 1\n"
       "@Nv 11\n"
       "@Rarr 1.8\n"
       "@nbseg 160\n"
       "@hminad 0.02\n"
       "@erradaptI 0.2\n"
       "@erradapt 0.2\n"
       "@dircase example\n"
       "@scase ring11\n"},
  };
  return cases;
}

}  // namespace gpv
