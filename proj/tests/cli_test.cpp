// Drives the installed binary end to end and checks exit codes / output.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run cli(const std::string& args) {
    const auto log = fs::temp_directory_path() / "qzeno_cli_test.out";
    const std::string cmd = std::string(QZENO_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream f(log);
    std::ostringstream ss;
    ss << f.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST(Cli, ZenoDefaultPrintsCsv) {
    const auto r = cli("zeno --events 100");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.rfind("scenario,N,d,survival,stderr,seed\nzeno,100,0.01,0.97592103939888", 0), 0u) << r.out;
}

TEST(Cli, SampledNeedsSeed) {
    const auto r = cli("zeno --mode sampled --trajectories 10");
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("root_seed"), std::string::npos);
}

TEST(Cli, SampledWithSeed) {
    const auto a = cli("zeno --mode sampled --trajectories 200 --seed 4 --format json");
    const auto b = cli("zeno --mode sampled --trajectories 200 --seed 4 --format json");
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, EventsAndEffortExclusive) { EXPECT_EQ(cli("zeno --events 5 --effort 0.5").code, 2); }

TEST(Cli, UnknownFlag) { EXPECT_EQ(cli("zeno --frobnicate").code, 2); }

TEST(Cli, BranchCapacity) {
    EXPECT_EQ(cli("branch --terminals 21").code, 2);
    const auto r = cli("branch --terminals 3 --probability 0.1");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("7,3,0.0010000000000000002"), std::string::npos) << r.out;
}

TEST(Cli, Calcium) {
    const auto r = cli("calcium --format json");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"velocity_ratio\": 277.1"), std::string::npos) << r.out;
}

TEST(Cli, SweepTooFewCounts) { EXPECT_EQ(cli("sweep --counts 100").code, 2); }

TEST(Cli, RunConfigWithOverrides) {
    const auto cfg = write_config("qzeno_cli_test.json",
                                  R"({"scenario":"zeno","hamiltonian":{"preset":"rabi","omega":3.141592653589793},)"
                                  R"("projector":{"basis":[0]},"total_time":1,"event_count":10,)"
                                  R"("mode":"sampled","root_seed":1,"trajectories":50})");
    const auto out = fs::temp_directory_path() / "qzeno_cli_test_result.json";
    fs::remove(out);
    const auto r = cli("run --config " + cfg.string() + " --seed 9 --out " + out.string());
    EXPECT_EQ(r.code, 0) << r.out;
    ASSERT_TRUE(fs::exists(out));
    std::ifstream f(out);
    std::ostringstream ss;
    ss << f.rdbuf();
    EXPECT_NE(ss.str().find("\"root_seed\": 9"), std::string::npos);
}

TEST(Cli, MissingConfigFile) { EXPECT_EQ(cli("run --config /nonexistent.json").code, 2); }

TEST(Cli, RuntimeFailureExitsThree) {
    const auto cfg = write_config("qzeno_cli_no.json",
                                  R"({"scenario":"custom-pipeline","hamiltonian":{"preset":"rabi","omega":1},)"
                                  R"("projector":{"basis":[0]},"pipeline":{"steps":[{"op":"answer","value":"no"}]}})");
    const auto r = cli("run --config " + cfg.string());
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("custom-pipeline"), std::string::npos);
}

TEST(Cli, UnwritableOutputExitsThree) {
    EXPECT_EQ(cli("calcium --out /nonexistent/dir/x.csv").code, 3);
}
