#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        work_ = fs::temp_directory_path() / (std::string("ruin_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(work_);
        fs::create_directories(work_);
    }
    void TearDown() override { fs::remove_all(work_); }

    RunResult run(const std::string& args) const {
        const auto out = work_ / "stdout.txt";
        const auto err = work_ / "stderr.txt";
        const std::string cmd = std::string("\"") + RUIN_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                                err.string() + "\"";
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    static std::string fixture(const std::string& name) {
        return std::string("--config \"") + RUIN_FIXTURES_DIR + "/" + name + ".json\"";
    }
    std::string out_flag(const std::string& sub = "out") const { return "--out \"" + (work_ / sub).string() + "\""; }

    fs::path work_;
};

TEST_F(Cli, GeometricKappaThreeReport) {
    const auto r = run(fixture("geometric_k3") + " " + out_flag());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    for (const char* v : {"0.582072", "0.0818989", "0.0658497", "0.480212", "-0.368094"})
        EXPECT_NE(r.out.find(v), std::string::npos) << v;
    EXPECT_EQ(r.out.find("mc_phi_u"), std::string::npos);
    EXPECT_EQ(r.out.find("stationarity"), std::string::npos);
    for (const char* f : {"report.txt", "survival.csv", "finite_time.csv", "roots.csv", "verification.csv"})
        EXPECT_TRUE(fs::exists(work_ / "out" / f)) << f;
}

TEST_F(Cli, NetProfitViolationExitsTwo) {
    const auto r = run(fixture("net_profit_violation") + " " + out_flag());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("net profit"), std::string::npos) << r.err;
    EXPECT_TRUE(fs::exists(work_ / "out" / "report.txt"));
    EXPECT_FALSE(fs::exists(work_ / "out" / "survival.csv"));
}

TEST_F(Cli, DoubleRootWithVerify) {
    const auto r = run(fixture("double_root") + " --verify --mc-paths 20000 --no-timings " + out_flag());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("derivative-1"), std::string::npos);
    EXPECT_NE(r.out.find("multiplicity 2"), std::string::npos);
    EXPECT_NE(r.out.find("mc_phi_u"), std::string::npos);
}

TEST_F(Cli, SeededRunsAreByteIdentical) {
    const std::string common = fixture("geometric_k3") + " --verify --mc-paths 5000 --seed 42 --no-timings ";
    const auto a = run(common + out_flag("a"));
    const auto b = run(common + out_flag("b"));
    EXPECT_EQ(a.exit_code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    for (const char* f : {"report.txt", "survival.csv", "verification.csv"})
        EXPECT_EQ(slurp(work_ / "a" / f), slurp(work_ / "b" / f)) << f;
}

TEST_F(Cli, CsvOutputWithLongTable) {
    const auto r = run(fixture("geometric_k2") + " --u-max 100 --format csv " + out_flag());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "u,phi");
    int rows = 0;
    double last = -1.0;
    while (std::getline(lines, line)) {
        const double phi = std::stod(line.substr(line.find(',') + 1));
        EXPECT_GE(phi, last);
        last = phi;
        ++rows;
    }
    EXPECT_EQ(rows, 101);
    EXPECT_EQ(slurp(work_ / "out" / "finite_time.csv").rfind("u,T,phi\n", 0), 0u);
    EXPECT_EQ(slurp(work_ / "out" / "roots.csv").rfind("re,im,multiplicity,on_boundary\n", 0), 0u);
    EXPECT_EQ(slurp(work_ / "out" / "verification.csv").rfind("check,value,tolerance,passed,detail\n", 0), 0u);
}

TEST_F(Cli, BadInputsExitThree) {
    EXPECT_EQ(run(fixture("geometric_k2") + " --frobnicate " + out_flag()).exit_code, 3);
    EXPECT_EQ(run("--config /nonexistent.json " + out_flag()).exit_code, 3);
    const auto malformed = run(fixture("malformed") + " " + out_flag());
    EXPECT_EQ(malformed.exit_code, 3);
    EXPECT_NE(malformed.err.find("bogus"), std::string::npos);
    EXPECT_EQ(run(fixture("geometric_k2") + " --format xml " + out_flag()).exit_code, 3);
}

TEST_F(Cli, Warnings) {
    const auto boundary = run(fixture("even_support") + " " + out_flag());
    EXPECT_EQ(boundary.exit_code, 0) << boundary.err;
    EXPECT_NE(boundary.out.find("|s| = 1"), std::string::npos);

    const auto low = run(fixture("low_x0") + " " + out_flag());
    EXPECT_EQ(low.exit_code, 0) << low.err;
    EXPECT_NE(low.out.find("x_0"), std::string::npos);

    const auto cluster = run(fixture("cluster_ambiguity") + " " + out_flag());
    EXPECT_EQ(cluster.exit_code, 0) << cluster.err;
    EXPECT_NE(cluster.out.find("tol_cluster"), std::string::npos);

    const auto shifted = run(fixture("shifted_support") + " " + out_flag());
    EXPECT_EQ(shifted.exit_code, 0) << shifted.err;
    EXPECT_NE(shifted.out.find("0.6"), std::string::npos);
}

TEST_F(Cli, DegenerateModel) {
    const auto r = run(fixture("degenerate") + " --format csv " + out_flag());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("u,phi\n0,0\n1,1\n", 0), 0u) << r.out;
}

}  // namespace
