#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqt/config.hpp"
#include "eqt/error.hpp"
#include "eqt/runner.hpp"
#include "json.hpp"

using namespace eqt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eqt_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kSmall = R"(seed = 5
[spike]
source = sampled
n_ions = 300
[tomography]
repeats = 1
calibration_shots = 2
[interactions]
n_targets = 2000
tau_count = 3
)";

std::string config_error(const std::string& text) {
  try {
    ExperimentConfig::parse(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalDocumentGivesDefaults) {
  const ExperimentConfig c = ExperimentConfig::parse("seed = 1\n");
  EXPECT_EQ(c.resolved_text(), ExperimentConfig().resolved_text());
  EXPECT_EQ(c.count("ensemble.n_ions"), 100000u);
  EXPECT_EQ(c.text("spike.source"), "prepared");
}

TEST(Config, UnitConversion) {
  const ExperimentConfig c = ExperimentConfig::parse("prep.narrowing.band_inner = 25khz\n");
  EXPECT_DOUBLE_EQ(preparation_plan(c).narrowing.band_inner, 2 * kPi * 25e3);
  const ExperimentConfig t = ExperimentConfig::parse("[prep.narrowing]\nduration = 0.08ms\n");
  EXPECT_DOUBLE_EQ(t.number("prep.narrowing.duration"), 0.08e-3);
  EXPECT_DOUBLE_EQ(ExperimentConfig().number("interactions.shift_ref"), 1e9);
}

TEST(Config, ErrorsNameKeyAndLine) {
  const std::string unknown = config_error("seed = 1\nensembel.n_ions = 5\n");
  EXPECT_NE(unknown.find("ensembel.n_ions"), std::string::npos);
  EXPECT_NE(unknown.find("test.cfg:2"), std::string::npos);
  EXPECT_NE(config_error("ensemble.width = 50\n").find("ensemble.width"), std::string::npos);
  EXPECT_NE(config_error("seed = 1\nseed = 2\n").find("seed"), std::string::npos);
  EXPECT_FALSE(config_error("spike.source = banana\n").empty());
  EXPECT_FALSE(config_error("ensemble.n_ions = -3\n").empty());
  EXPECT_FALSE(config_error("interactions.tau_min = 1ms\n").empty());
  EXPECT_TRUE(config_error("# comment only\n\n").empty());
}

TEST(Config, ResolvedTextRoundTrips) {
  ExperimentConfig c = ExperimentConfig::parse(kSmall);
  c.set("noise.shot_scale_jitter", "0.1234567890123");
  const ExperimentConfig back = ExperimentConfig::parse(c.resolved_text());
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.number("noise.shot_scale_jitter"), c.number("noise.shot_scale_jitter"));
  EXPECT_EQ(c.hash().size(), 16u);
  EXPECT_NE(c.hash(), ExperimentConfig().hash());
}

TEST(Config, Builders) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  EXPECT_EQ(sampled_spike_spec(c).n_ions, 300u);
  const auto grid = tau_grid(c);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_DOUBLE_EQ(grid.front(), 5e-6);
  EXPECT_DOUBLE_EQ(grid.back(), 400e-6);
  EXPECT_NEAR(interaction_model(c).perturber_density, density_from_separation(2.5, 1e-6), 1e-20);
  EXPECT_EQ(tomography_setup(c, 2).repeats, 1u);
}

TEST(Config, ParseState) {
  double corr = 1;
  const TargetState s = parse_state("0.7071067811865476+0i,0+0.7071067811865476i", &corr);
  EXPECT_NEAR(corr, 0.0, 1e-15);
  EXPECT_NEAR(s.beta().imag(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(parse_state("1+0i"), std::exception);
}

TEST(Runner, CommandNames) {
  for (Command c : {Command::kPrepare, Command::kTomo, Command::kTable1, Command::kEcho,
                    Command::kShifts}) {
    EXPECT_EQ(parse_command(to_string(c)), c);
  }
  EXPECT_THROW(parse_command("fly"), ConfigError);
}

TEST(Runner, OutputsIndependentOfWorkers) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  std::ostringstream log;
  for (Command cmd : {Command::kTomo, Command::kTable1, Command::kEcho, Command::kShifts}) {
    RunOptions a;
    a.out_dir = scratch(to_string(cmd) + "_a");
    a.workers = 1;
    RunOptions b = a;
    b.out_dir = scratch(to_string(cmd) + "_b");
    b.workers = 3;
    run_command(cmd, c, a, log);
    run_command(cmd, c, b, log);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a.out_dir)) {
      const fs::path other = b.out_dir / entry.path().filename();
      ASSERT_TRUE(fs::exists(other)) << other;
      EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
      ++files;
    }
    EXPECT_GE(files, 3u) << to_string(cmd);
  }
}

TEST(Runner, ManifestRecordsRun) {
  const ExperimentConfig c = ExperimentConfig::parse(kSmall);
  RunOptions o;
  o.out_dir = scratch("manifest");
  o.state = "0+0i,1+0i";
  std::ostringstream log;
  run_command(Command::kTomo, c, o, log);
  const Manifest m = load_manifest(o.out_dir / "manifest.json");
  EXPECT_EQ(m.command, Command::kTomo);
  EXPECT_EQ(m.config.hash(), c.hash());
  ASSERT_TRUE(m.state.has_value());
  const auto j = nlohmann::json::parse(slurp(o.out_dir / "manifest.json"));
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), 5u);
  EXPECT_EQ(slurp(o.out_dir / "config.resolved"), c.resolved_text());
  const auto report = nlohmann::json::parse(slurp(o.out_dir / "tomo_report.json"));
  EXPECT_TRUE(report.is_object());
}

#ifdef EQT_CLI_PATH
TEST(Cli, RunsAndRerunsFromManifest) {
  const fs::path dir = scratch("cli");
  {
    std::ofstream cfg(dir / "small.cfg");
    cfg << kSmall;
  }
  const std::string exe = EQT_CLI_PATH;
  const std::string run = exe + " shifts --config " + (dir / "small.cfg").string() + " -o " +
                          (dir / "a").string() + " 2>/dev/null";
  ASSERT_EQ(std::system(run.c_str()), 0);
  const std::string rerun = exe + " --from-manifest " + (dir / "a" / "manifest.json").string() +
                            " -j 3 -o " + (dir / "b").string() + " 2>/dev/null";
  ASSERT_EQ(std::system(rerun.c_str()), 0);
  EXPECT_EQ(slurp(dir / "a" / "shift_histogram.csv"), slurp(dir / "b" / "shift_histogram.csv"));
  EXPECT_EQ(slurp(dir / "a" / "shifts_report.json"), slurp(dir / "b" / "shifts_report.json"));
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "ensembel.n_ions = 5\n";
  }
  const std::string fail = exe + " shifts --config " + (dir / "bad.cfg").string() + " -o " +
                           (dir / "c").string() + " 2>/dev/null";
  const int status = std::system(fail.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
#endif
