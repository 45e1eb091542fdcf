#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

fs::path scratch() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("cifctl_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

Run cifctl(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const std::string cmd = std::string(CIFCTL_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    Run r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, CifFastDiagonalPasses) {
    const auto r = cifctl("cif --d 1 --family constant --value 1 --fast-diagonal --schedule 1e4,1e5,1e6");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["extrapolated"]["pos"].get<double>(), 2.0, 0.02);
    EXPECT_EQ(j["command"], "cif");
    EXPECT_TRUE(j.contains("timestamp"));
    EXPECT_EQ(j["config"]["schedule"].size(), 3u);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(cifctl("cif --d 1").status, 1);
    EXPECT_EQ(cifctl("cif --d 1 --family nonsense").status, 1);
    EXPECT_EQ(cifctl("cif --d 1 --family constant --schedule 3,2,1").status, 1);
    EXPECT_EQ(cifctl("lemmas --only no_such_suite").status, 1);
    EXPECT_EQ(cifctl("probe --kind blowup --d 3").status, 1);
    EXPECT_EQ(cifctl("--format xml lemmas --only transfer").status, 1);
    EXPECT_EQ(cifctl("").status, 1);
}

TEST(Cli, QuantitativeFailureExitsTwo) {
    // a tolerance far below the truncation error of a short ladder
    EXPECT_EQ(cifctl("cif --d 1 --family cosine_mode --schedule 64,96,128 --tolerance 1e-9").status, 2);
}

TEST(Cli, LemmasOnlyRunsSelectedSuite) {
    const auto r = cifctl("lemmas --only tensor");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["verdicts"].size(), 1u);
    EXPECT_EQ(j["verdicts"][0]["test"], "tensor_lemma");
}

TEST(Cli, NormsReport) {
    const auto r = cifctl("norms --d 2 --family constant");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["verdict_l2"]["member"].get<bool>());
    EXPECT_TRUE(j["verdict_lm"]["member"].get<bool>());

    const auto grid = scratch() / "bad_grid.txt";
    std::ofstream(grid) << "1 1 nan 1 1 1 1 1\n";
    EXPECT_EQ(cifctl("norms --d 1 --family custom_grid --file " + grid.string()).status, 1);
}

TEST(Cli, CwikelProbeTable) {
    const auto r = cifctl("--format csv probe --kind cwikel --d 1 --family constant --schedule 64,128");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("R,dim,weak_norm,ratio\n", 0), 0u);
    EXPECT_NE(r.out.find("0.5810587973"), std::string::npos);
}

TEST(Cli, SpectrumDumpAndMatrixContainer) {
    const auto mat = scratch() / "op.bin";
    const auto r = cifctl("--format csv spectrum --d 1 --family cosine_mode --cutoff 4 --matrix " + mat.string());
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("rank,singular_value\n0,", 0), 0u);
    EXPECT_EQ(fs::file_size(mat), 16u + 9u * 9u * 16u);
}

TEST(Cli, ConfigFileAndFlagOverride) {
    const auto cfg = scratch() / "run.ini";
    std::ofstream(cfg) << "format=json\n[cif]\nd=1\nfamily=constant\nvalue=2\nschedule=[100,200,400]\n";
    auto r = cifctl("--no-timestamp --config " + cfg.string() + " cif");
    ASSERT_EQ(r.status, 0);
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["targets"]["pos"].get<double>(), 4.0, 1e-12);
    EXPECT_FALSE(j.contains("timestamp"));

    r = cifctl("--no-timestamp --config " + cfg.string() + " cif --value 3");
    ASSERT_EQ(r.status, 0);
    j = json::parse(r.out);
    EXPECT_NEAR(j["targets"]["pos"].get<double>(), 6.0, 1e-12);
    EXPECT_EQ(j["config"]["function"]["params"]["value"], "3");
}

TEST(Cli, ReportsAreByteReproducible) {
    // the effective config echoes --out, so both runs write to the same directory
    const auto dir = scratch() / "run";
    const auto first = scratch() / "run_first";
    const std::string args = "--no-timestamp --format both --out " + dir.string() +
                             " cif --d 1 --family shifted_cosine --shift 0.5 --schedule 64,96,128";
    fs::remove_all(dir);
    fs::remove_all(first);
    ASSERT_NE(cifctl(args).status, 1);
    fs::rename(dir, first);
    ASSERT_NE(cifctl(args).status, 1);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(first)) {
        ++files;
        EXPECT_EQ(slurp(entry.path()), slurp(dir / entry.path().filename())) << entry.path();
    }
    EXPECT_GE(files, 2u + 2u * 3u);
}
