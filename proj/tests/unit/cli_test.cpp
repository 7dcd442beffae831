#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "commands.hpp"
#include "io.hpp"
#include "modrabi/errors.hpp"
#include "scenario.hpp"

using namespace modrabi;
using namespace modrabi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = MODRABI_SCENARIO_DIR;

json short_scenario() {
  json doc = read_json(kScenarios / "fig3a.json");
  doc["name"] = "short";
  doc["model"] = "rotated_exact";
  doc["dissipation"] = false;
  doc["fock_cutoff"] = 6;
  doc["grid"] = {{"t_end", {{"value", 0.5}, {"unit", "ns"}}}, {"samples", 11}};
  return doc;
}

std::string parse_error(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("modrabi_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MODRABI_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 5e-324, 1e21}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Format, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  CsvTable t({"x", "y"});
  t.add_row(std::vector<double>{1.5, 2});
  EXPECT_EQ(t.str(), "x,y\r\n1.5,2\r\n");
  EXPECT_THROW(t.add_row(std::vector<double>{1.0}), std::exception);
}

TEST(Scenario, ShippedScenariosParse) {
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    const auto s = load_scenario(entry.path());
    EXPECT_EQ(s.name, entry.path().stem().string());
    const auto again = parse_scenario(to_json(s));
    EXPECT_EQ(again.drive.omega2, s.drive.omega2);
    EXPECT_NEAR(again.drive.eta2, s.drive.eta2, 1e-15);
    EXPECT_EQ(again.system.g, s.system.g);
    EXPECT_EQ(again.fock_cutoff, s.fock_cutoff);
    EXPECT_EQ(again.outputs, s.outputs);
  }
}

TEST(Scenario, UnitConversion) {
  EXPECT_DOUBLE_EQ(frequency_from_unit(1, "GHz", "x"), 2e9 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(frequency_from_unit(3, "kHz", "x"), 6e3 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(frequency_from_unit(5, "rad/s", "x"), 5.0);
  EXPECT_THROW(frequency_from_unit(1, "THz", "x"), ValidationError);
  const auto s = parse_scenario(short_scenario());
  EXPECT_NEAR(s.drive.eta1, 2.296 / 3.2, 1e-15);
  EXPECT_NEAR(resolve_t_end(s, modulation::effective_params(s.system, s.drive)), 0.5e-9, 1e-24);
}

TEST(Scenario, ErrorsNameTheField) {
  json doc = short_scenario();
  doc["grid"]["samples"] = 0;
  EXPECT_NE(parse_error(doc).find("grid.samples"), std::string::npos) << parse_error(doc);

  doc = short_scenario();
  doc["drive"]["colour"] = 1;
  EXPECT_NE(parse_error(doc).find("drive.colour"), std::string::npos) << parse_error(doc);

  doc = short_scenario();
  doc["system"].erase("g");
  EXPECT_NE(parse_error(doc).find("system.g"), std::string::npos) << parse_error(doc);

  doc = short_scenario();
  doc["outputs"] = {"sigma_pop", "fidelity"};
  EXPECT_NE(parse_error(doc).find("outputs"), std::string::npos) << parse_error(doc);

  doc = short_scenario();
  doc["fock_cutoff"] = 1;
  EXPECT_NE(parse_error(doc).find("fock_cutoff"), std::string::npos);

  doc = short_scenario();
  doc["design"] = {{"lambda", 1}, {"gratio", 0.5}};
  EXPECT_FALSE(parse_error(doc).empty());
}

TEST(Scenario, ParametersAndSweepValues) {
  auto s = parse_scenario(short_scenario());
  apply_parameter(s, "drive.eta2", 0.5);
  EXPECT_EQ(s.drive.eta2, 0.5);
  apply_parameter(s, "system.g", 1e6);
  EXPECT_DOUBLE_EQ(s.system.g, 2e6 * std::numbers::pi);
  apply_parameter(s, "fock_cutoff", 12);
  EXPECT_EQ(s.fock_cutoff, 12);
  EXPECT_THROW(apply_parameter(s, "system.epsilon", 1), ValidationError);
  EXPECT_THROW(apply_parameter(s, "fock_cutoff", 1), ValidationError);
  EXPECT_FALSE(is_sweepable("grid.samples"));

  const auto v = sweep_values({"drive.eta2", 0.0, 1.2024, 41, {}});
  ASSERT_EQ(v.size(), 41u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 1.2024);
  EXPECT_NEAR(v[1], 1.2024 / 40, 1e-16);
  EXPECT_THROW(sweep_values({"drive.eta2", 0.0, 1.0, 1, {}}), ValidationError);
}

TEST(Design, RoundTripsThroughSimulation) {
  const auto sys = modulation::SystemParams::circuit_qed_reference();
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    DesignRequest req;
    req.lambda = lambda;
    req.gratio = 0.75;
    const auto d = design_drive(sys, req);
    const auto scenario = parse_scenario(design_scenario(sys, d));
    const auto eff = modulation::effective_params(scenario.system, scenario.drive);
    EXPECT_NEAR(coupling_ratio(eff), 0.75, 1e-6) << lambda;
    if (lambda > 0) EXPECT_NEAR(eff.lambda, lambda, 1e-9) << lambda;
  }
  DesignRequest bad;
  bad.gratio = 1e-6;
  EXPECT_THROW(design_drive(sys, bad), UnreachableTarget);
}

TEST(Simulation, ShortRunShapes) {
  const auto result = run_simulation(parse_scenario(short_scenario()));
  ASSERT_TRUE(result.rotated.has_value());
  EXPECT_FALSE(result.ideal.has_value());
  const auto table = timeseries_table(result);
  EXPECT_EQ(table.rows(), 11u);
  EXPECT_TRUE(result.cutoff_adequate());
  const auto manifest = simulation_manifest(result, {"timeseries.csv"});
  EXPECT_EQ(manifest["resolved"]["samples"], 11);
  EXPECT_EQ(manifest["resolved"]["hilbert_dim"], 12);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = temp_dir("codes");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("validate " + (kScenarios / "fig3a.json").string()), 0);
  EXPECT_EQ(run_cli("frobnicate"), kExitValidation);

  json bad = short_scenario();
  bad["grid"]["samples"] = 0;
  write_json(dir / "bad.json", bad);
  EXPECT_EQ(run_cli("validate " + (dir / "bad.json").string()), kExitValidation);
  EXPECT_EQ(run_cli("validate " + (dir / "missing.json").string()), kExitValidation);

  EXPECT_EQ(run_cli("design --lambda 1 --gratio 0.000001"), kExitUnreachable);
  EXPECT_EQ(run_cli("design --lambda inf --gratio 0.5"), 0);

  json tight = short_scenario();
  tight["fock_cutoff"] = 2;
  tight["initial_state"] = "vac_e";
  tight["grid"]["t_end"] = {{"value", 20}, {"unit", "ns"}};
  write_json(dir / "tight.json", tight);
  EXPECT_EQ(run_cli("simulate " + (dir / "tight.json").string() + " -o " + (dir / "tight").string()),
            kExitNumerical);
  EXPECT_TRUE(fs::exists(dir / "tight" / "manifest.json"));
}

TEST(Binary, DeterministicOutput) {
  const fs::path dir = temp_dir("determinism");
  write_json(dir / "short.json", short_scenario());
  ASSERT_EQ(run_cli("simulate " + (dir / "short.json").string() + " -o " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate " + (dir / "short.json").string() + " -o " + (dir / "b").string()), 0);
  const std::string a = slurp(dir / "a" / "timeseries.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "timeseries.csv"));
  EXPECT_EQ(a.substr(0, a.find("\r\n")), "time_s,sigma_pop,photon_number,trace,purity,top_fock_pop");
  const json manifest = read_json(dir / "a" / "manifest.json");
  EXPECT_EQ(manifest["status"], "ok");
}

TEST(Binary, SweepKeepsOrderAcrossThreads) {
  const fs::path dir = temp_dir("sweep");
  json doc = short_scenario();
  doc["sweep"] = {{"param", "drive.eta2"}, {"from", 0.0}, {"to", 1.0}, {"points", 5}};
  write_json(dir / "sweep.json", doc);
  ASSERT_EQ(run_cli("sweep " + (dir / "sweep.json").string() + " -o " + (dir / "one").string()), 0);
  ASSERT_EQ(std::system(("MODRABI_THREADS=3 " + std::string(MODRABI_CLI) + " sweep " +
                         (dir / "sweep.json").string() + " -o " + (dir / "three").string() + " > /dev/null")
                            .c_str()),
            0);
  EXPECT_EQ(slurp(dir / "one" / "sweep_summary.csv"), slurp(dir / "three" / "sweep_summary.csv"));
  EXPECT_EQ(slurp(dir / "one" / "sweep.csv"), slurp(dir / "three" / "sweep.csv"));
}

TEST(Convergence, FockCutoffOnShortWindow) {
  json doc = read_json(kScenarios / "fig3a.json");
  doc["model"] = "rotated_exact";
  doc["dissipation"] = false;
  doc["grid"] = {{"t_end", {{"value", 5}, {"unit", "ns"}}}, {"samples", 26}};
  std::vector<std::vector<double>> runs;
  for (int cutoff : {20, 30, 40}) {
    doc["fock_cutoff"] = cutoff;
    runs.push_back(run_simulation(parse_scenario(doc)).rotated->observable("photon_number"));
  }
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    EXPECT_NEAR(runs[0][i], runs[2][i], 1e-4) << i;
    EXPECT_NEAR(runs[1][i], runs[2][i], 1e-4) << i;
  }
}
