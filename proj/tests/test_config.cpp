#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bsasym/config.hpp"

using namespace bsasym;

namespace {

std::filesystem::path scratch_dir() {
    auto d = std::filesystem::temp_directory_path() / "bsasym_config_test";
    std::filesystem::create_directories(d);
    return d;
}

std::string write_file(const std::string& name, const std::string& body) {
    const auto p = scratch_dir() / name;
    std::ofstream(p) << body;
    return p.string();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BSASYM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(KeyValues, CommentsBlankLinesAndOverrides) {
    std::istringstream in("# header\n\ngrid.N = 32  # trailing\nrun.T=2\nrun.T = 3\n");
    const auto kv = parse_key_values(in);
    ASSERT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv.at("grid.N"), "32");
    EXPECT_EQ(kv.at("run.T"), "3");
    std::istringstream bad("grid.N 32\n");
    EXPECT_THROW(parse_key_values(bad), ConfigError);
}

TEST(Overrides, KnownKeysApplyAndUnknownKeysThrow) {
    const ExperimentConfig c = apply_overrides(default_config(Experiment::ex1),
                                               {{"grid.N", "32"}, {"source.r", "1.2"}, {"solver.limiter", "minmod"}});
    EXPECT_EQ(c.N, 32);
    EXPECT_EQ(c.source_r, 1.2);
    EXPECT_EQ(c.stencil.limiter, Limiter::minmod);
    EXPECT_THROW(apply_overrides(default_config(Experiment::ex1), {{"grid.M", "3"}}), ConfigError);
    EXPECT_THROW(apply_overrides(default_config(Experiment::ex1), {{"grid.N", "3.5"}}), ConfigError);
    EXPECT_THROW(apply_overrides(default_config(Experiment::ex1), {{"experiment", "ex2"}}), ConfigError);
}

TEST(Overrides, TruncatedSchemePicksSmallerStep) {
    const ExperimentConfig a = apply_overrides(default_config(Experiment::ex1), {{"solver.scheme", "imcf_truncated"}});
    EXPECT_EQ(a.dt_factor, 0.025);
    const ExperimentConfig b = apply_overrides(default_config(Experiment::ex1),
                                               {{"solver.scheme", "imcf_truncated"}, {"solver.dt_factor", "0.01"}});
    EXPECT_EQ(b.dt_factor, 0.01);
}

TEST(Defaults, PaperParameters) {
    const ExperimentConfig v = default_config(Experiment::volcano);
    EXPECT_EQ(v.R, 2.56);
    EXPECT_EQ(v.N, 128);
    EXPECT_EQ(v.lambda, 0.5);
    EXPECT_EQ(v.Lambda, 5.05);
    EXPECT_NEAR(v.dt(), 0.025 * 0.02 * 0.02, 1e-18);
    const ExperimentConfig e2 = default_config(Experiment::ex2);
    EXPECT_EQ(e2.sweep->values().size(), 13u);
    EXPECT_EQ(e2.sweep->values().back(), 2.0);
}

TEST(Desk, ReducesGridAndHorizon) {
    const ExperimentConfig d = load_config(Experiment::ex1, std::nullopt, true);
    EXPECT_EQ(d.N, 64);
    EXPECT_EQ(d.T, 10.0);
    const ExperimentConfig v = load_config(Experiment::volcano, std::nullopt, true);
    EXPECT_EQ(v.N, 64);
    EXPECT_EQ(v.T, 2.5);
    const std::string path = write_file("desk_override.conf", "grid.N = 40\n");
    EXPECT_EQ(load_config(Experiment::ex1, path, true).N, 40);
}

TEST(Validation, RejectsOutOfRange) {
    EXPECT_THROW(apply_overrides(default_config(Experiment::ex1), {{"grid.N", "0"}}).validate(), ConfigError);
    EXPECT_THROW(apply_overrides(default_config(Experiment::ex1), {{"solver.eps", "0"}}).validate(), ConfigError);
    EXPECT_THROW(apply_overrides(default_config(Experiment::volcano), {{"solver.Lambda", "3"}}).validate(), ConfigError);
    EXPECT_THROW(apply_overrides(default_config(Experiment::radial), {{"value_function.dt", "0.01"}}).validate(),
                 ConfigError);
    EXPECT_THROW(load_config(Experiment::ex1, std::string("/nonexistent/bsasym.conf"), false), ConfigError);
    EXPECT_THROW(parse_experiment("ex9"), ConfigError);
}

TEST(Echo, ListsResolvedSettings) {
    const std::string e = load_config(Experiment::ex2, std::nullopt, true).echo();
    EXPECT_NE(e.find("experiment=ex2"), std::string::npos);
    EXPECT_NE(e.find("grid.N=64"), std::string::npos);
    EXPECT_NE(e.find("run.T=10"), std::string::npos);
    EXPECT_NE(e.find("fit.r_min=1.6"), std::string::npos);
    EXPECT_EQ(e.find('\n'), std::string::npos);
}

TEST(SampleConfigs, AllLoad) {
    const std::filesystem::path dir = std::filesystem::path(BSASYM_SOURCE_DIR) / "configs";
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".conf") continue;
        const Experiment e = parse_experiment(entry.path().stem().string());
        EXPECT_NO_THROW(load_config(e, entry.path().string(), false)) << entry.path();
        ++seen;
    }
    EXPECT_EQ(seen, 8);
}

TEST(Cli, ExitCodes) {
    const auto out = (scratch_dir() / "out").string();
    EXPECT_EQ(run_cli("ex1 --config " + write_file("bad.conf", "grid.M = 3\n") + " --out " + out), 3);
    EXPECT_EQ(run_cli("nonsense --out " + out), 3);
    const std::string unstable = write_file("unstable.conf",
                                            "grid.N = 16\nsolver.dt_factor = 20\nrun.T = 100\nsweep.start = 1.6\n"
                                            "sweep.stop = 1.6\nsweep.step = 0.1\n");
    EXPECT_EQ(run_cli("ex1 --config " + unstable + " --out " + out), 2);
    const std::string tiny = write_file("tiny.conf", "grid.N = 8\nrun.T = 0.5\nsweep.start = 0.8\nsweep.stop = 0.8\n"
                                                     "sweep.step = 0.1\n");
    EXPECT_EQ(run_cli("ex1 --config " + tiny + " --out " + out), 0);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / "ex1_r0.8_series.csv"));
    std::ifstream csv(std::filesystem::path(out) / "ex1_r0.8_series.csv");
    std::string first;
    std::getline(csv, first);
    EXPECT_EQ(first.rfind("# experiment=ex1", 0), 0u);
}
