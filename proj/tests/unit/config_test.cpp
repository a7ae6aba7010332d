#include <gtest/gtest.h>

#include <foamrp/config.hpp>
#include <sstream>
#include <string>

using namespace foamrp;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return RunConfig::from_stream(in, "test.ini");
}

std::string message_of(const std::string& text) {
  try {
    parse(text);
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsProvideBuiltinProblems) {
  RunConfig cfg = RunConfig::defaults();
  EXPECT_NO_THROW(cfg.find_params("table1"));
  const ProblemDef& d = cfg.find_problem("drainage");
  EXPECT_DOUBLE_EQ(d.left.S, 0.1);
  EXPECT_DOUBLE_EQ(d.right.S, 0.99);
  EXPECT_DOUBLE_EQ(d.t, 0.5);
  const ProblemDef& i = cfg.find_problem("imbibition");
  EXPECT_DOUBLE_EQ(i.left.S, 0.99);
  EXPECT_DOUBLE_EQ(i.right.C, 0.0);
  EXPECT_THROW(cfg.find_params("nope"), config_error);
  EXPECT_THROW(cfg.find_problem("nope"), config_error);
}

TEST(Config, ParsesSectionsKeysAndInlineComments) {
  RunConfig cfg = parse(
      "# leading comment\n"
      "[problem.demo]\n"
      "S_L = 0.2   ; inline comment\n"
      "C_L = 0.1\n"
      "S_R = 0.8 # another style\n"
      "C_R = 0.0\n"
      "t = 0.25\n"
      "samples = 11\n"
      "\n"
      "[sim]\n"
      "cells = 123\n"
      "dt = 2.5e-5\n"
      "\n"
      "[output]\n"
      "dir = results\n"
      "\n"
      "[tolerances]\n"
      "tol_boundary = 1e-4\n");
  const ProblemDef& p = cfg.find_problem("demo");
  EXPECT_DOUBLE_EQ(p.left.S, 0.2);
  EXPECT_DOUBLE_EQ(p.right.S, 0.8);
  EXPECT_DOUBLE_EQ(p.t, 0.25);
  EXPECT_EQ(p.samples, 11);
  EXPECT_EQ(p.params, "table1");  // default attribution
  EXPECT_EQ(cfg.sim.n_cells, 123);
  EXPECT_DOUBLE_EQ(cfg.sim.dt, 2.5e-5);
  EXPECT_EQ(cfg.output_dir, "results");
  EXPECT_DOUBLE_EQ(cfg.tolerances.tol_boundary, 1e-4);
  // builtin problems survive alongside the new one
  EXPECT_NO_THROW(cfg.find_problem("drainage"));
}

TEST(Config, FileProblemReplacesBuiltinOfSameName) {
  RunConfig cfg = parse(
      "[problem.drainage]\n"
      "S_L = 0.3\n"
      "C_L = 0.0\n"
      "S_R = 0.7\n"
      "C_R = 0.0\n"
      "t = 1.0\n");
  const ProblemDef& d = cfg.find_problem("drainage");
  EXPECT_DOUBLE_EQ(d.left.S, 0.3);  // replaced wholesale, not merged
  EXPECT_DOUBLE_EQ(d.t, 1.0);
}

namespace {

// all keys of the builtin table, with selective overrides appended
std::string full_params_section(const std::string& name,
                                const std::string& overrides = "") {
  FoamParams p = FoamParams::table1();
  std::ostringstream out;
  out.precision(17);
  out << "[params." << name << "]\n"
      << "krw0 = " << p.krw0 << "\nkrg0 = " << p.krg0 << "\nnw = " << p.nw
      << "\nng = " << p.ng << "\nmu_w = " << p.mu_w << "\nmu_g = " << p.mu_g
      << "\nphi = " << p.phi << "\nrho_w = " << p.rho_w
      << "\nrho_s = " << p.rho_s << "\nfmmob = " << p.fmmob
      << "\nfmdry = " << p.fmdry << "\nepdry = " << p.epdry
      << "\nSwc = " << p.Swc << "\nSgr = " << p.Sgr
      << "\nfmsurf = " << p.fmsurf << "\nepsurf = " << p.epsurf
      << "\nCmax = " << p.Cmax << "\nKda = " << p.Kda << "\n" << overrides;
  return out.str();
}

}  // namespace

TEST(Config, ParameterSetsReplaceWholesale) {
  // a [params.NAME] section starts NAME from scratch: partial definitions do
  // not silently inherit the builtin values, they fail validation
  try {
    parse("[params.custom]\nfmmob = 100\n");
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("parameter set 'custom'"),
              std::string::npos);
  }
  // a complete definition passes and can tweak single entries
  RunConfig cfg = parse(full_params_section("custom", "fmmob = 0\n"));
  EXPECT_DOUBLE_EQ(cfg.find_params("custom").fmmob, 0.0);
  // table1 itself is untouched
  EXPECT_GT(cfg.find_params("table1").fmmob, 0.0);
}

TEST(Config, ErrorsCarryFileAndLineNumber) {
  EXPECT_NE(message_of("[nope]\n").find("test.ini:1"), std::string::npos);
  EXPECT_NE(message_of("[sim]\nbogus = 1\n").find("test.ini:2"),
            std::string::npos);
  EXPECT_NE(message_of("[sim]\ncells = ten\n").find("not an integer"),
            std::string::npos);
  EXPECT_NE(message_of("[sim]\ndt = fast\n").find("not a number"),
            std::string::npos);
  EXPECT_NE(message_of("key = 1\n").find("outside any section"),
            std::string::npos);
  EXPECT_NE(message_of("[sim]\nnokey\n").find("expected key = value"),
            std::string::npos);
  EXPECT_NE(message_of("[unterminated\n").find("unterminated"),
            std::string::npos);
}

TEST(Config, SemanticValidationRunsAfterParsing) {
  // structurally fine, semantically broken: porosity of zero
  std::string text =
      "[params.bad]\n"
      "phi = 0\n";
  EXPECT_THROW(parse(text), config_error);
  // problem referencing a parameter set that does not exist
  EXPECT_THROW(parse("[problem.p]\nparams = ghost\nS_R = 0.5\n"), config_error);
  // problem with a state outside the unit square
  EXPECT_THROW(parse("[problem.p]\nS_L = 1.5\n"), config_error);
}

TEST(Config, MissingFileReportsPath) {
  try {
    RunConfig::from_file("/nonexistent/foamrp.ini");
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/foamrp.ini"),
              std::string::npos);
  }
}

TEST(Config, ShippedConfigFileParses) {
  RunConfig cfg = RunConfig::from_file(std::string(FOAMRP_SOURCE_DIR) +
                                       "/configs/table1.ini");
  EXPECT_NO_THROW(cfg.find_params("table1"));
  EXPECT_NO_THROW(cfg.find_problem("drainage"));
  EXPECT_NO_THROW(cfg.find_problem("imbibition"));
  EXPECT_NO_THROW(cfg.find_problem("stability_minus"));
  EXPECT_NO_THROW(cfg.find_problem("stability_plus"));
  EXPECT_EQ(cfg.sim.n_cells, 2000);
  // the file spells out the same constants as the builtin table
  FoamParams builtin = FoamParams::table1();
  const FoamParams& file = cfg.find_params("table1");
  EXPECT_DOUBLE_EQ(file.fmmob, builtin.fmmob);
  EXPECT_DOUBLE_EQ(file.Kda, builtin.Kda);
  EXPECT_DOUBLE_EQ(file.Swc, builtin.Swc);
}
