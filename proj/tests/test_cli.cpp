#include "wzlab/cli.hpp"
#include "wzlab/report_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using wzlab::Json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result wz(std::vector<std::string> args) {
    args.insert(args.begin(), "wz-lab");
    std::ostringstream out, err;
    const int code = wzlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path dir(const std::string& name) {
    const fs::path p = fs::path(WZLAB_TEST_TMP) / "cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Cli, HelpListsEverySubcommand) {
    const Result r = wz({"--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* sub : {"simulate", "skeleton", "wong-zakai", "support-upper", "support-lower", "truncation",
                            "lyapunov", "plot"})
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
    EXPECT_EQ(wz({"wong-zakai", "--help"}).code, 0);
}

TEST(Cli, LyapunovExample) {
    const fs::path d = dir("lyap");
    const Result r = wz({"lyapunov", "--model", "cubic", "--V", "x^2", "--theta", "1", "--eta", "4", "--domain",
                         "box:-10:10", "--samples", "2000", "--out", (d / "audit.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_LT(std::abs(j["conditions"]["J1"]["sup_ratio"].get<double>()), 1e-5);
    EXPECT_TRUE(fs::exists(d / "config.resolved.json"));
}

TEST(Cli, LyapunovFailureExitCode) {
    const fs::path d = dir("lyapfail");
    const Result r =
        wz({"lyapunov", "--model", "cubic", "--eta", "1", "--C", "1", "--out", (d / "audit.json").string()});
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, SimulateWritesCsv) {
    const fs::path d = dir("sim");
    const Result r = wz({"simulate", "--model", "cubic", "--x0", "0.5", "--L", "12", "--seed", "1", "--out",
                         (d / "traj.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(d / "traj.csv");
    EXPECT_EQ(csv.rfind("t,x_1\n0,0.5\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4096 + 3);
}

TEST(Cli, SkeletonWithControl) {
    const fs::path d = dir("skel");
    const Result r = wz({"skeleton", "--model", "cubic", "--x0", "1", "--L", "10", "--h", "0,0.5,1:1;-1", "--out",
                         (d / "s.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json cfg = Json::parse(slurp(d / "config.resolved.json"));
    EXPECT_EQ(cfg["h"]["breakpoints"].size(), 3u);
}

TEST(Cli, ValidationErrors) {
    EXPECT_EQ(wz({"simulate", "--model", "nope"}).code, 1);
    EXPECT_EQ(wz({"simulate", "--L", "abc"}).code, 1);
    EXPECT_EQ(wz({"wong-zakai", "--M", "10"}).code, 1);
    EXPECT_EQ(wz({"frobnicate"}).code, 1);
    EXPECT_EQ(wz({"simulate", "--param", "bogus=1"}).code, 1);
    EXPECT_EQ(wz({"plot", "--in", "/nonexistent.json"}).code, 1);
}

TEST(Cli, ConfigErrorsAreLineReferenced) {
    const fs::path d = dir("badcfg");
    write(d / "unknown.json", "{\n  \"model\": \"cubic\",\n  \"sigma\": 2\n}\n");
    Result r = wz({"simulate", "--config", (d / "unknown.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown.json:3:"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("sigma"), std::string::npos);

    write(d / "broken.json", "{\n  \"model\": \"cubic\",\n  \"L\": 12,,\n}\n");
    r = wz({"simulate", "--config", (d / "broken.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("broken.json:3:"), std::string::npos) << r.err;

    write(d / "typed.json", "{\n  \"model\": \"cubic\",\n\n  \"L\": \"twelve\"\n}\n");
    r = wz({"simulate", "--config", (d / "typed.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("typed.json:4:"), std::string::npos) << r.err;
}

TEST(Cli, FlagsOverrideConfigAndEnvSeedsDefault) {
    const fs::path d = dir("prec");
    write(d / "c.json", "{\"model\": \"cubic\", \"L\": 6, \"seed\": 5}");
    ASSERT_EQ(wz({"simulate", "--config", (d / "c.json").string(), "--L", "7", "--out", (d / "t.csv").string()}).code,
              0);
    Json cfg = Json::parse(slurp(d / "config.resolved.json"));
    EXPECT_EQ(cfg["L"], 7);
    EXPECT_EQ(cfg["seed"], 5);

    setenv("WZ_LAB_SEED", "31", 1);
    ASSERT_EQ(wz({"simulate", "--L", "5", "--out", (d / "t.csv").string()}).code, 0);
    EXPECT_EQ(Json::parse(slurp(d / "config.resolved.json"))["seed"], 31);
    ASSERT_EQ(wz({"simulate", "--L", "5", "--seed", "2", "--out", (d / "t.csv").string()}).code, 0);
    EXPECT_EQ(Json::parse(slurp(d / "config.resolved.json"))["seed"], 2);
    unsetenv("WZ_LAB_SEED");
}

TEST(Cli, ResolvedConfigReproducesReport) {
    const fs::path a = dir("rtA"), b = dir("rtB");
    ASSERT_EQ(wz({"wong-zakai", "--levels", "2,4", "--M", "100", "--L", "9", "--seed", "3", "--out",
                  (a / "r.json").string()})
                  .code,
              0);
    Json cfg = Json::parse(slurp(a / "config.resolved.json"));
    cfg["out"] = (b / "r.json").string();
    write(b / "in.json", cfg.dump(2));
    ASSERT_EQ(wz({"wong-zakai", "--config", (b / "in.json").string()}).code, 0);
    EXPECT_EQ(slurp(a / "r.json"), slurp(b / "r.json"));
    EXPECT_EQ(slurp(a / "r.csv"), slurp(b / "r.csv"));
}

TEST(Cli, WorkersDoNotChangeReports) {
    const fs::path a = dir("wk1"), b = dir("wk3");
    ASSERT_EQ(wz({"support-upper", "--models", "x"}).code, 1);
    for (const auto& [d, w] : {std::pair{a, "1"}, std::pair{b, "3"}})
        ASSERT_EQ(wz({"support-upper", "--model", "threshold_ou", "--M", "100", "--L", "11", "--workers", w, "--out",
                      (d / "r.json").string()})
                      .code,
                  0);
    EXPECT_EQ(slurp(a / "r.json"), slurp(b / "r.json"));
}

TEST(Cli, PlotFromReport) {
    const fs::path d = dir("plot");
    ASSERT_EQ(wz({"support-lower", "--h", "1", "--M", "100", "--L", "11", "--out", (d / "r.json").string()}).code, 0);
    const Result r = wz({"plot", "--in", (d / "r.json").string(), "--out", (d / "p.svg").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(d / "p.svg").find("<svg"), std::string::npos);
}

TEST(Cli, TruncationRuns) {
    const fs::path d = dir("trunc");
    const Result r = wz({"truncation", "--M", "100", "--x0", "1", "--L", "9", "--n", "3", "--radii", "1,2,4",
                         "--out", (d / "t.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["radii"].size(), 3u);
}
