#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "gpv/config.hpp"
#include "gpv/errors.hpp"
#include "gpv/run.hpp"
#include "gpv/tfinit.hpp"

namespace {

int do_run(const std::string& physics, const std::string& runfile,
           const std::string& out) {
  const gpv::RunConfig cfg = gpv::parse_config(physics, runfile);
  gpv::run_case(cfg, out, std::cout);
  return 0;
}

int do_tf_profile(const std::string& physics, const std::string& csv,
                  const std::string& json, int samples) {
  std::ifstream is(physics);
  if (!is) throw gpv::ConfigError("cannot open parameter file: " + physics);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  // The profile needs only the physics half; supply a minimal run file.
  const gpv::RunConfig cfg =
      gpv::parse_config_text(text, "@method GradS @EPS0 1 @init TF");
  const gpv::ModelParams p = gpv::config_params(cfg);
  const gpv::TFProfile tf = gpv::tf_profile(p);

  double rx = 0.0, ry = 0.0;
  gpv::domain_radii(tf, 1.0, rx, ry);
  const double r_end = 1.25 * std::max(rx, ry);
  {
    std::ofstream os(csv);
    if (!os) throw gpv::IoError("cannot write " + csv);
    os << "r,rho_tf\n" << std::setprecision(16);
    for (int i = 0; i <= samples; ++i) {
      const double r = r_end * i / samples;
      os << r << "," << gpv::tf_density(tf, p, r, 0.0) << "\n";
    }
  }
  if (!json.empty()) {
    std::ofstream os(json);
    if (!os) throw gpv::IoError("cannot write " + json);
    os << std::setprecision(16) << "{\n"
       << "  \"regime\": \"" << gpv::to_string(tf.regime) << "\",\n"
       << "  \"rho0\": " << tf.rho0 << ",\n"
       << "  \"cs\": " << tf.cs << ",\n"
       << "  \"rx\": " << tf.rx << ",\n"
       << "  \"ry\": " << tf.ry << ",\n"
       << "  \"r_max\": " << tf.r_max << ",\n"
       << "  \"r_minus\": " << tf.r_minus << ",\n"
       << "  \"eta\": " << tf.eta << "\n}\n";
  }
  std::cout << "regime " << gpv::to_string(tf.regime) << ", rho0 "
            << tf.rho0 << ", profile in " << csv << "\n";
  return 0;
}

int do_examples(const std::string& name, const std::string& out) {
  const auto& cases = gpv::bundled_examples();
  if (name.empty()) {
    for (const auto& c : cases)
      std::cout << c.name << "\n    " << c.summary << "\n";
    return 0;
  }
  for (const auto& c : cases) {
    if (c.name != name) continue;
    const gpv::RunConfig cfg = gpv::parse_config_text(c.physics, c.run);
    gpv::run_case(cfg, out, std::cout);
    return 0;
  }
  throw gpv::ConfigError("unknown example '" + name +
                         "'; run without a name for the list");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary states of the rotating Gross-Pitaevskii energy"};
  app.require_subcommand(1);

  std::string physics, runfile, out = "Output";
  auto* run = app.add_subcommand("run", "minimize a configured case");
  run->add_option("--physics", physics, "physics parameter file")
      ->required();
  run->add_option("--run", runfile, "run parameter file")->required();
  run->add_option("--out", out, "output root directory");

  std::string csv = "tf_profile.csv", json;
  int samples = 400;
  auto* tf = app.add_subcommand("tf-profile",
                                "Thomas-Fermi profile of a physics file");
  tf->add_option("--physics", physics, "physics parameter file")->required();
  tf->add_option("--csv", csv, "radial density output");
  tf->add_option("--json", json, "profile summary output");
  tf->add_option("--samples", samples, "radial sample count")
      ->check(CLI::PositiveNumber);

  std::string name;
  auto* ex = app.add_subcommand("examples", "list or run a bundled case");
  ex->add_option("name", name, "example to run (omit to list)");
  ex->add_option("--out", out, "output root directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(physics, runfile, out);
    if (*tf) return do_tf_profile(physics, csv, json, samples);
    return do_examples(name, out);
  } catch (const gpv::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
