#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vbarrier/cli.hpp"

using namespace vbarrier;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> result;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) result.push_back(line);
    return result;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("vbarrier_test_" + name);
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(cli::format_number(0.1), "0.1");
    EXPECT_EQ(cli::format_number(110.0), "110");
    EXPECT_EQ(cli::format_number(0.0), "0");
    const double v = 0.5328213748123;
    EXPECT_EQ(std::stod(cli::format_number(v)), v);
}

TEST(ConfigText, ParsesCommentsAndDashes) {
    const auto kv = cli::parse_config_text("# reference\nspot = 105\nbarrier-low=4.6 # inline\n\n");
    EXPECT_EQ(kv.at("spot"), "105");
    EXPECT_EQ(kv.at("barrier_low"), "4.6");
}

TEST(ConfigText, RejectsUnknownKey) {
    try {
        cli::parse_config_text("volatility = 0.2\n");
        FAIL();
    } catch (const cli::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("volatility"), std::string::npos);
    }
}

TEST(BuildConfig, MissingStrikeNamesTheKey) {
    auto kv = cli::default_values();
    kv["strike"] = "";
    try {
        cli::build_config(cli::Command::price, kv);
        FAIL();
    } catch (const cli::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("strike"), std::string::npos);
    }
}

TEST(BuildConfig, SweepParsing) {
    auto kv = cli::default_values();
    kv["sweep"] = "theta=0.02,0.04,0.08";
    const auto cfg = cli::build_config(cli::Command::curve, kv);
    ASSERT_TRUE(cfg.sweep.has_value());
    EXPECT_EQ(cfg.sweep->name, "theta");
    EXPECT_EQ(cfg.sweep->values.size(), 3u);
    kv["sweep"] = "sigma9=1";
    EXPECT_THROW(cli::build_config(cli::Command::curve, kv), cli::ConfigError);
}

TEST(PriceCommand, DefaultsPrintOneLine) {
    const auto r = run_cli({"price"});
    EXPECT_EQ(r.code, cli::kSuccess);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 1u);
    EXPECT_EQ(ls[0].substr(0, 4), "110,");
    EXPECT_NEAR(std::stod(ls[0].substr(4)), 0.53282, 5e-5);
}

TEST(PriceCommand, KnockedOutExitsWithCodeTwo) {
    const auto r = run_cli({"price", "--spot", "135"});
    EXPECT_EQ(r.code, cli::kKnockedOut);
    EXPECT_EQ(r.out, "135,0\n");
}

TEST(PriceCommand, MissingStrikeIsConfigError) {
    const auto r = run_cli({"price", "--strike", ""});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.err.find("strike"), std::string::npos);
}

TEST(PriceCommand, UnknownFlagIsConfigError) {
    EXPECT_EQ(run_cli({"price", "--volatility", "0.2"}).code, cli::kConfigError);
}

TEST(PriceCommand, FlagsOverrideFileOverridesDefaults) {
    const auto path = temp_file("precedence.cfg");
    std::ofstream(path) << "spot = 100\nstrike = 95\n";
    const auto file_only = run_cli({"price", "--config", path.string()});
    const auto both = run_cli({"price", "--config", path.string(), "--spot", "120"});
    std::filesystem::remove(path);
    EXPECT_EQ(file_only.out.substr(0, 4), "100,");
    EXPECT_EQ(both.out.substr(0, 4), "120,");
    const auto flag_only = run_cli({"price", "--spot", "120", "--strike", "95"});
    EXPECT_EQ(both.out, flag_only.out);
}

TEST(PriceCommand, VerifyAppendsMonteCarloColumns) {
    const auto r = run_cli({"price", "--verify", "--paths", "20000", "--steps", "64"});
    EXPECT_EQ(r.code, cli::kSuccess);
    std::vector<double> fields;
    std::stringstream ss(lines(r.out).at(0));
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(std::stod(f));
    ASSERT_EQ(fields.size(), 4u);
    EXPECT_LE(std::abs(fields[1] - fields[2]), 4.0 * fields[3]);
}

TEST(CurveCommand, SweepProducesOneColumnPerValue) {
    const auto r = run_cli({"curve", "--sweep", "a=0.5,1,2"});
    EXPECT_EQ(r.code, cli::kSuccess);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 26u);
    EXPECT_EQ(ls[0], "spot,a=0.5,a=1,a=2");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        EXPECT_EQ(std::count(ls[i].begin(), ls[i].end(), ','), 3) << ls[i];
    }
    EXPECT_EQ(ls[1].substr(0, 3), "85,");
    EXPECT_EQ(ls[25].substr(0, 4), "128,");
}

TEST(CurveCommand, ForwardAxisHeader) {
    const auto r = run_cli({"curve", "--axis", "forward", "--grid", "100:110:3"});
    EXPECT_EQ(lines(r.out).at(0), "forward,price");
}

TEST(CurveCommand, ByteIdenticalAcrossRuns) {
    const std::vector<std::string> args{"curve", "--kind", "double", "--sweep", "theta=0.02,0.04,0.08"};
    EXPECT_EQ(run_cli(args).out, run_cli(args).out);
}

TEST(CurveCommand, SvgIsDeterministicWithOnePolylinePerSeries) {
    const std::vector<std::string> args{"curve", "--format", "svg", "--sweep", "rho=-0.5,0,0.5"};
    const auto a = run_cli(args);
    EXPECT_EQ(a.code, cli::kSuccess);
    EXPECT_EQ(a.out, run_cli(args).out);
    std::size_t count = 0;
    for (std::size_t pos = a.out.find("<polyline"); pos != std::string::npos; pos = a.out.find("<polyline", pos + 1)) {
        ++count;
    }
    EXPECT_EQ(count, 3u);
}

TEST(CurveCommand, WritesOutputFile) {
    const auto path = temp_file("curve.csv");
    const auto r = run_cli({"curve", "--out", path.string()});
    EXPECT_EQ(r.code, cli::kSuccess);
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    std::filesystem::remove(path);
    EXPECT_EQ(content.str(), run_cli({"curve"}).out);
}

TEST(CurveCommand, UnwritableOutputIsConfigError) {
    const auto r = run_cli({"curve", "--out", "/nonexistent-dir/deeper/curve.csv"});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.err.find("cannot write"), std::string::npos);
}

TEST(VerifyCommand, SmokeRunFinishesQuickly) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_cli({"verify", "--paths", "1000", "--steps", "64"});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 5.0);
    EXPECT_TRUE(r.code == cli::kSuccess || r.code == cli::kVerificationFailed);
    const auto ls = lines(r.out);
    EXPECT_GE(ls.size(), 10u);
    for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
        EXPECT_TRUE(ls[i].rfind("PASS", 0) == 0 || ls[i].rfind("FAIL", 0) == 0) << ls[i];
    }
}

TEST(VerifyCommand, TamperedBondFormulaIsDetected) {
    const auto r = run_cli({"verify", "--paths", "20000", "--steps", "64", "--debug-bond-formula", "printed"});
    EXPECT_EQ(r.code, cli::kVerificationFailed);
    bool bond_failed = false;
    for (const auto& l : lines(r.out)) {
        if (l.rfind("FAIL", 0) == 0 && l.find("bond price vs Monte Carlo") != std::string::npos) bond_failed = true;
    }
    EXPECT_TRUE(bond_failed) << r.out;
}
