#include "gpv/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

struct KeyValue {
  std::string value;
  std::string where;  // "file:line" for error messages
};

using KeyMap = std::map<std::string, KeyValue>;

void scan_text(const std::string& text, const std::string& label,
               KeyMap& keys) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::string pending_key;
  std::string pending_where;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto pos = line.find("//"); pos != std::string::npos)
      line.erase(pos);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok.front() == '@') {
        if (!pending_key.empty())
          throw ConfigError("key " + pending_key + " has no value (" +
                            pending_where + ")");
        pending_key = tok.substr(1);
        pending_where = label + ":" + std::to_string(lineno);
        if (pending_key.empty())
          throw ConfigError("bare @ without a key name (" + pending_where +
                            ")");
      } else {
        if (pending_key.empty())
          throw ConfigError("value '" + tok + "' without a @key (" + label +
                            ":" + std::to_string(lineno) + ")");
        keys[pending_key] = {tok, pending_where};
        pending_key.clear();
      }
    }
  }
  if (!pending_key.empty())
    throw ConfigError("key @" + pending_key + " has no value (" +
                      pending_where + ")");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open parameter file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

class Extractor {
public:
  explicit Extractor(KeyMap keys) : keys_(std::move(keys)) {}

  bool has(const std::string& k) const { return keys_.count(k) != 0; }

  std::string str(const std::string& k, const std::string& dflt) {
    used_.insert(k);
    const auto it = keys_.find(k);
    return (it == keys_.end()) ? dflt : it->second.value;
  }

  std::string required_str(const std::string& k) {
    used_.insert(k);
    const auto it = keys_.find(k);
    if (it == keys_.end())
      throw ConfigError("required key @" + k +
                        " is missing (a value must be given)");
    return it->second.value;
  }

  double num(const std::string& k, double dflt) {
    used_.insert(k);
    const auto it = keys_.find(k);
    return (it == keys_.end()) ? dflt : to_num(it->second);
  }

  double required_num(const std::string& k) {
    return to_num_at(required_str(k), k);
  }

  int integer(const std::string& k, int dflt) {
    const double v = num(k, dflt);
    return static_cast<int>(v);
  }

  bool flag(const std::string& k, bool dflt) {
    return num(k, dflt ? 1.0 : 0.0) != 0.0;
  }

  void mark_used(const std::string& k) { used_.insert(k); }

  void reject_unknown() const {
    for (const auto& [k, kv] : keys_) {
      if (!used_.count(k))
        throw ConfigError("unknown key @" + k + " (" + kv.where + ")");
    }
  }

private:
  double to_num(const KeyValue& kv) const {
    return to_num_where(kv.value, kv.where);
  }
  double to_num_at(const std::string& v, const std::string& key) const {
    const auto it = keys_.find(key);
    return to_num_where(v, it != keys_.end() ? it->second.where : key);
  }
  static double to_num_where(const std::string& v, const std::string& where) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("malformed numeric value '" + v + "' (" + where +
                        ")");
    }
  }

  KeyMap keys_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig parse_config_text(const std::string& physics_text,
                            const std::string& run_text) {
  RunConfig cfg;

  {
    KeyMap keys;
    scan_text(physics_text, "physics", keys);
    Extractor ex(std::move(keys));
    const std::string scal = ex.required_str("scaling");
    if (scal == "AR")
      cfg.scaling = Scaling::AR;
    else if (scal == "Classical")
      cfg.scaling = Scaling::Classical;
    else
      throw ConfigError("@scaling must be AR or Classical, got '" + scal +
                        "'");
    cfg.kind = static_cast<int>(ex.required_num("kind"));
    if (cfg.kind == 0) {
      cfg.direct.beta = ex.required_num("beta");
      cfg.direct.rot_ratio = ex.required_num("Omop");
      cfg.direct.ax = ex.num("ax", 1.0);
      cfg.direct.ay = ex.num("ay", 1.0);
      cfg.direct.az = ex.num("az", 1.0);
      cfg.direct.a4 = ex.num("a4", 0.0);
    } else if (cfg.kind == 1) {
      cfg.physical.atom_count = ex.required_num("N");
      cfg.physical.atomic_mass = ex.required_num("m");
      cfg.physical.scattering_length = ex.required_num("as");
      cfg.physical.rotation_rate = ex.required_num("Omega");
      cfg.physical.omega_x = ex.required_num("omegax");
      cfg.physical.omega_y = ex.required_num("omegay");
      cfg.physical.omega_z = ex.num("omegaz", 0.0);
      cfg.physical.omega_perp = ex.num("omegaperp", cfg.physical.omega_x);
      cfg.physical.laser_u2 = ex.num("U2", 0.0);
      cfg.physical.laser_u4 = ex.num("U4", 0.0);
      cfg.physical.waist_w2 = ex.num("omega2", 0.0);
      cfg.physical.waist_w4 = ex.num("omega4", 0.0);
    } else {
      throw ConfigError("@kind must be 0 or 1");
    }
    ex.reject_unknown();
  }

  {
    KeyMap keys;
    scan_text(run_text, "run", keys);
    Extractor ex(std::move(keys));
    cfg.method = ex.required_str("method");
    if (cfg.method != "GradS" && cfg.method != "Ipopt")
      throw ConfigError("@method must be GradS or Ipopt, got '" +
                        cfg.method + "'");
    cfg.eps0 = ex.required_num("EPS0");
    cfg.init = ex.required_str("init");
    if (cfg.init != "TF" && cfg.init != "Ipoptaxi" &&
        cfg.init != "Ipoptnorot")
      throw ConfigError("@init must be TF, Ipoptaxi or Ipoptnorot, got '" +
                        cfg.init + "'");

    cfg.grads_max_iter = ex.integer("GradSMaxIter", 8000);
    cfg.ipopt_max_iter = ex.integer("IpoptMaxIter", 50);

    cfg.dircase = ex.str("dircase", "BEC_2D");
    cfg.scase = ex.str("scase", "BEC_2D");
    cfg.savesol = ex.flag("savesol", true);
    cfg.output = ex.str("output", "vtk");
    if (cfg.output != "vtk")
      throw ConfigError("@output '" + cfg.output +
                        "' is not supported; only vtk is available");
    cfg.iter_save = ex.integer("ITERSAVE", 100);
    cfg.iter_norm = ex.integer("ITERNORM", 100);
    cfg.iter_plot = ex.integer("ITERPLOT", 100);
    cfg.savenergy = ex.flag("savenergy", true);
    ex.mark_used("plotenergy");
    ex.mark_used("withplot");
    ex.mark_used("IWAIT");
    ex.mark_used("meditplot");
    cfg.countvortices = ex.flag("countvortices", true);

    cfg.ardom = ex.num("aRdom", 1.25);
    cfg.nbseg = ex.integer("nbseg", 200);
    // 3D-only mesh keys parse but are ignored in this 2D code.
    ex.mark_used("meshkind");
    ex.mark_used("hminsurf");
    ex.mark_used("hminvol");

    cfg.load_restart = ex.flag("ifILrst", false);
    if (cfg.load_restart) {
      cfg.keepmesh = ex.flag("keepmesh", true);
      cfg.dirload = ex.required_str("dirload");
      cfg.dmesh = ex.required_str("dmesh");
      cfg.dsol = ex.required_str("dsol");
    } else {
      ex.mark_used("keepmesh");
      ex.mark_used("dirload");
      ex.mark_used("dmesh");
      ex.mark_used("dsol");
    }

    cfg.mod = ex.integer("mod", 0);
    cfg.narray = ex.integer("narray", 0);
    if (cfg.narray >= 1) {
      cfg.nv = static_cast<int>(ex.required_num("Nv"));
      cfg.rarr = ex.required_num("Rarr");
      cfg.drarr = ex.num("dRarr", 0.0);
      cfg.tharr = ex.num("Tharr", 0.0);
      cfg.dtharr = ex.num("dTharr", 0.0);
    } else {
      ex.mark_used("Nv");
      ex.mark_used("Rarr");
      ex.mark_used("dRarr");
      ex.mark_used("Tharr");
      ex.mark_used("dTharr");
    }
    cfg.epsv = ex.num("epsv", 0.25);
    cfg.shape = ex.str("shape", "I");
    cfg.curvature = ex.num("curvature", 10.0);
    cfg.length = ex.num("length", 2.0);

    cfg.adapt_initial = ex.flag("ifIadapt", true);
    cfg.erradapt_init = ex.num("erradaptI", 0.1);
    cfg.adapt_during = ex.flag("ifRadapt", true);
    cfg.hminad = ex.num("hminad", 0.001);
    cfg.hmaxad = ex.num("hmaxad", 1.0);
    if (ex.has("erradapt")) cfg.erradapt = ex.num("erradapt", 0.0);
    ex.mark_used("erradapt");
    ex.mark_used("anisoadapt");
    cfg.epsad1 = ex.num("EPSAD1", 1e-2);
    cfg.epsadmin = ex.num("EPSADMIN", 1e-9);
    cfg.ipassal = ex.integer("IPASSAL", 2);
    cfg.epsadstep = ex.num("EPSADSTEP", 2.0);
    cfg.iteradapt = ex.integer("ITERADAPT", 0);
    cfg.niadapt = ex.integer("niadapt", 1);
    cfg.nbadapt = ex.integer("nbadapt", 4);
    cfg.maerr1 = ex.num("maerr1", 0.01);
    ex.reject_unknown();
  }

  if (cfg.eps0 <= 0.0) throw ConfigError("@EPS0 must be positive");
  return cfg;
}

RunConfig parse_config(const std::string& physics_path,
                       const std::string& run_path) {
  return parse_config_text(read_file(physics_path), read_file(run_path));
}

ModelParams config_params(const RunConfig& cfg) {
  if (cfg.kind == 0) return build_dimensionless(cfg.direct, cfg.scaling, 2);
  return build_dimensionless(cfg.physical, cfg.scaling, 2);
}

}  // namespace gpv
