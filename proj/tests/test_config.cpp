#include <doctest.h>

#include "gpv/config.hpp"
#include "gpv/errors.hpp"

using namespace gpv;

namespace {
const char* kPhys =
    "@scaling Classical\n"
    "@kind 0\n"
    "@beta 500\n"
    "@Omop 0.4\n";
const char* kRun =
    "@method GradS\n"
    "@EPS0 1e-8\n"
    "@init TF\n";
}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const RunConfig cfg = parse_config_text(kPhys, kRun);
  CHECK(cfg.scaling == Scaling::Classical);
  CHECK(cfg.kind == 0);
  CHECK(cfg.direct.beta == 500.0);
  CHECK(cfg.direct.rot_ratio == 0.4);
  CHECK(cfg.direct.ax == 1.0);
  CHECK(cfg.method == "GradS");
  CHECK(cfg.eps0 == 1e-8);
  CHECK(cfg.init == "TF");
  CHECK(cfg.grads_max_iter == 8000);
  CHECK(cfg.ipopt_max_iter == 50);
  CHECK(cfg.ardom == 1.25);
  CHECK(cfg.nbseg == 200);
  CHECK(cfg.narray == 0);
  CHECK(cfg.epsv == 0.25);
  CHECK(cfg.adapt_initial);
  CHECK(cfg.hminad == 0.001);
  CHECK(cfg.epsad1 == 1e-2);
  CHECK(cfg.epsadmin == 1e-9);
  CHECK(cfg.ipassal == 2);
  CHECK(cfg.epsadstep == 2.0);
  CHECK(cfg.nbadapt == 4);
  CHECK(cfg.maerr1 == 0.01);
  CHECK(!cfg.load_restart);
  CHECK(cfg.output == "vtk");
}

TEST_CASE("erradapt default depends on the method") {
  RunConfig g = parse_config_text(kPhys, kRun);
  CHECK(g.erradapt_value() == 0.1);
  RunConfig k = parse_config_text(
      kPhys, "@method Ipopt\n@EPS0 1e-8\n@init TF\n");
  CHECK(k.erradapt_value() == 0.005);
  RunConfig e = parse_config_text(
      kPhys, "@method Ipopt\n@EPS0 1e-8\n@init TF\n@erradapt 0.02\n");
  CHECK(e.erradapt_value() == 0.02);
}

TEST_CASE("comments and duplicate keys") {
  const RunConfig cfg = parse_config_text(
      "@scaling Classical // comment\n"
      "// a full comment line\n"
      "@kind 0 @beta 100 @beta 250\n"
      "@Omop 0.9\n",
      kRun);
  CHECK(cfg.direct.beta == 250.0);
  CHECK(cfg.direct.rot_ratio == 0.9);
}

TEST_CASE("missing required keys") {
  CHECK_THROWS_AS(parse_config_text("@kind 0 @beta 1 @Omop 0", kRun),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(kPhys, "@method GradS @EPS0 1e-8"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(kPhys, "@EPS0 1e-8 @init TF"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(kPhys, "@method GradS @init TF"),
                  ConfigError);
}

TEST_CASE("unknown and malformed input") {
  CHECK_THROWS_AS(
      parse_config_text(kPhys,
                        "@method GradS @EPS0 1e-8 @init TF @bogus 1\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(kPhys, "@method GradS @EPS0 abc @init TF\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text(kPhys, "@method GradS @EPS0\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("@scaling Weird @kind 0 @beta 1 @Omop 0", kRun),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(kPhys, "stray @method GradS @EPS0 1e-8 @init TF"),
      ConfigError);
}

TEST_CASE("unsupported output format") {
  CHECK_THROWS_AS(
      parse_config_text(
          kPhys, "@method GradS @EPS0 1e-8 @init TF @output tecplot\n"),
      ConfigError);
}

TEST_CASE("vortex array keys become required with narray") {
  CHECK_THROWS_AS(
      parse_config_text(kPhys,
                        "@method GradS @EPS0 1e-8 @init TF @narray 1\n"),
      ConfigError);
  const RunConfig cfg = parse_config_text(
      kPhys,
      "@method GradS @EPS0 1e-8 @init TF\n"
      "@narray 2 @Nv 6 @Rarr 1.5 @dRarr 0.5 @Tharr 0.1\n");
  CHECK(cfg.narray == 2);
  CHECK(cfg.nv == 6);
  CHECK(cfg.rarr == 1.5);
  CHECK(cfg.drarr == 0.5);
  CHECK(cfg.tharr == 0.1);
}

TEST_CASE("restart keys become required with ifILrst") {
  CHECK_THROWS_AS(
      parse_config_text(kPhys,
                        "@method GradS @EPS0 1e-8 @init TF @ifILrst 1\n"),
      ConfigError);
  const RunConfig cfg = parse_config_text(
      kPhys,
      "@method GradS @EPS0 1e-8 @init TF\n"
      "@ifILrst 1 @keepmesh 0 @dirload Out @dmesh a.mesh @dsol a.rst\n");
  CHECK(cfg.load_restart);
  CHECK(!cfg.keepmesh);
  CHECK(cfg.dirload == "Out");
}

TEST_CASE("config_params maps the physics block") {
  const ModelParams p = config_params(parse_config_text(kPhys, kRun));
  CHECK(p.dim == 2);
  CHECK(p.c_g == 500.0);
  CHECK(p.rot_ratio == 0.4);
}

}  // TEST_SUITE
