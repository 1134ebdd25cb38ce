#include "presic/cli.hpp"
#include "presic/demos.hpp"
#include "presic/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace presic;
using namespace presic::cli;

namespace {

std::string problem(const char* name) { return std::string(PRESIC_PROBLEMS) + "/" + name; }

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

io::Json parse(const Outcome& o) { return io::Json::parse(o.out); }

} // namespace

TEST(Cli, VerifyExitCodes) {
    const auto pass = run_cli({"--no-timestamp", "verify", problem("averaging_k1_ciric.json")});
    EXPECT_EQ(pass.code, kSuccess) << pass.err;
    EXPECT_EQ(parse(pass)["certificate"]["verdict"], "passed_on_samples");

    const auto fail = run_cli({"verify", problem("averaging_k1_ciric_tight.json"), "--no-timestamp"});
    EXPECT_EQ(fail.code, kFailed);
    EXPECT_FALSE(parse(fail)["certificate"]["witness"].is_null());

    const auto missing = run_cli({"verify", problem("missing_condition.json")});
    EXPECT_EQ(missing.code, kUsage);
    EXPECT_NE(missing.err.find("condition"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, kUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
    EXPECT_EQ(run_cli({"verify"}).code, kUsage);
    EXPECT_EQ(run_cli({"verify", "/nonexistent.json"}).code, kUsage);
    EXPECT_EQ(run_cli({"--format", "xml", "verify", problem("averaging_k1_ciric.json")}).code, kUsage);
    EXPECT_EQ(run_cli({"--samples", "0", "verify", problem("averaging_k1_ciric.json")}).code, kUsage);
    EXPECT_EQ(run_cli({"demo", "no-such-demo"}).code, kUsage);
    EXPECT_EQ(run_cli({"--help"}).code, kSuccess);

    const auto dir = std::filesystem::temp_directory_path() / "presic_cli_malformed.json";
    std::ofstream(dir) << "{\"space\": ";
    EXPECT_EQ(run_cli({"verify", dir.string()}).code, kUsage);
    std::filesystem::remove(dir);
}

TEST(Cli, SolveExitCodes) {
    const auto avg = run_cli({"--no-timestamp", "solve", problem("averaging_k3_random.json")});
    EXPECT_EQ(avg.code, kSuccess) << avg.err;
    const auto j = parse(avg);
    EXPECT_EQ(j["trace"]["stop_reason"], "converged");
    EXPECT_EQ(j["start"].size(), 3u);
    EXPECT_LT(std::abs(j["trace"]["limit"][0].get<double>()), 1e-4);

    const auto div = run_cli({"--no-timestamp", "solve", problem("divergent_doubling.json")});
    EXPECT_EQ(div.code, kFailed);
    EXPECT_EQ(parse(div)["trace"]["stop_reason"], "diverged");

    const auto csv = run_cli({"--format", "csv", "solve", problem("averaging_k1_ciric.json")});
    EXPECT_EQ(csv.code, kSuccess);
    EXPECT_EQ(csv.out.substr(0, 28), "n,x,alpha_n\n1,2,1\n2,1,0.25\n3");

    const auto picard = run_cli({"--no-timestamp", "--picard", "solve", problem("averaging_k3_random.json")});
    EXPECT_EQ(picard.code, kSuccess);
    EXPECT_EQ(parse(picard)["scheme"], "picard");
    EXPECT_EQ(parse(picard)["start"].size(), 1u);

    EXPECT_EQ(run_cli({"solve", problem("averaging_k1_ciric_tight.json")}).code, kUsage);
}

TEST(Cli, StrictDomain) {
    EXPECT_EQ(run_cli({"--strict-domain", "solve", problem("divergent_doubling.json")}).code, kFailed);
}

TEST(Cli, SeedPrecedence) {
    Options o;
    ::unsetenv("PRESIC_LAB_SEED");
    EXPECT_EQ(resolve_seed(o), 0u);
    EXPECT_EQ(resolve_seed(o, 9), 9u);
    ::setenv("PRESIC_LAB_SEED", "123", 1);
    EXPECT_EQ(resolve_seed(o, 9), 123u);
    o.seed = 5;
    EXPECT_EQ(resolve_seed(o), 5u);
    o.seed.reset();
    ::setenv("PRESIC_LAB_SEED", "abc", 1);
    EXPECT_THROW(resolve_seed(o), UsageError);
    EXPECT_EQ(run_cli({"verify", problem("averaging_k1_ciric.json")}).code, kUsage);
    ::unsetenv("PRESIC_LAB_SEED");

    const auto a = parse(run_cli({"--no-timestamp", "--seed", "11", "verify", problem("phi_anomaly.json")}));
    EXPECT_EQ(a["certificate"]["seed"], 11u);
}

TEST(Cli, BoundsCommand) {
    const auto eta = run_cli({"--no-timestamp", "bounds", problem("averaging_k1_ciric.json"), "--eta", "0.25"});
    EXPECT_EQ(eta.code, kSuccess) << eta.err;
    EXPECT_EQ(parse(eta)["all_steps_within"], true);
    EXPECT_EQ(run_cli({"bounds", problem("averaging_k1_ciric.json"), "--eta", "1.5"}).code, kUsage);
    EXPECT_EQ(run_cli({"bounds", problem("averaging_k1_ciric.json")}).code, kUsage);

    const auto kannan = run_cli({"--no-timestamp", "bounds", problem("kannan_quarter.json"), "--a", "0.6666666666666666"});
    EXPECT_EQ(kannan.code, kSuccess) << kannan.err;
    const auto k = parse(kannan);
    EXPECT_DOUBLE_EQ(k["d01"].get<double>(), 0.75);
    EXPECT_NEAR(k["per_step"][2]["bound_n"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(run_cli({"bounds", problem("kannan_quarter.json"), "--a", "1.0"}).code, kUsage);

    const auto dir = std::filesystem::temp_directory_path() / "presic_cli_constant.json";
    std::ofstream(dir) << R"({"space": {"kind": "euclidean", "dim": 1, "box": {"lo": 0, "hi": 1}},
                               "operator": {"kind": "constant", "value": 0.5},
                               "solve": {"start": [[1]]}})";
    const auto zero = parse(run_cli({"--no-timestamp", "bounds", dir.string(), "--a", "0"}));
    for (std::size_t n = 1; n < zero["per_step"].size(); ++n) EXPECT_EQ(zero["per_step"][n]["bound_n"], 0.0);
    std::filesystem::remove(dir);
}

TEST(Cli, EstimateB) {
    const auto r = run_cli({"--no-timestamp", "--grid", "--grid-points", "60", "estimate-b", problem("power_p3.json")});
    EXPECT_EQ(r.code, kSuccess) << r.err;
    const auto j = parse(r);
    EXPECT_LE(j["b_hat"].get<double>(), 4.0 + 1e-9);
    EXPECT_GE(j["b_hat"].get<double>(), 3.9);
}

TEST(Cli, OutFileAndTimestamp) {
    const auto path = std::filesystem::temp_directory_path() / "presic_cli_out.json";
    const auto r = run_cli({"--out", path.string(), "verify", problem("averaging_k1_ciric.json")});
    EXPECT_EQ(r.code, kSuccess);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    const auto j = io::Json::parse(in);
    EXPECT_TRUE(j.contains("generated_at"));
    std::filesystem::remove(path);
}

TEST(Cli, DeterministicAcrossThreads) {
    const auto one = run_cli({"--no-timestamp", "--seed", "3", "verify", problem("affine_k2.json")});
    const auto four = run_cli({"--no-timestamp", "--seed", "3", "--threads", "4", "verify", problem("affine_k2.json")});
    EXPECT_EQ(one.out, four.out);
}

TEST(Demos, AllPass) {
    for (const auto& name : demos::demo_names()) {
        const auto report = demos::run_demo(name, 0);
        EXPECT_TRUE(report.all_pass()) << report.table();
    }
    const auto phi = run_cli({"demo", "paper-phi-anomaly"});
    EXPECT_EQ(phi.code, kSuccess);
    EXPECT_NE(phi.out.find("window (0, 2)"), std::string::npos);
}
