#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "sublin/cli.hpp"
#include "sublin/model_io.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sublin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = sublin::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(SUBLIN_CONFIG_DIR "/") + name; }

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / (std::string("sublin_test_") + name)).string();
}

}  // namespace

TEST(Cli, ProbeModeReportsBothSides) {
  const auto r = run({"check-independence", "--config", config("example36.json"), "--mode", "peng-probe",
                      "--exact", "--probe", "1-abs(X-Y)"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lhs=5/8 rhs=11/16"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("verdict=false"), std::string::npos);
}

TEST(Cli, PseudoMode) {
  const auto r = run({"check-independence", "--config", config("example36.json"), "--exact"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict=true"), std::string::npos);
}

TEST(Cli, CounterexampleClt) {
  const auto r = run({"counterexample", "--which", "clt", "--K", "100", "--n", "25"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value=0.95"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("classical=0.2021"), std::string::npos) << r.out;
}

TEST(Cli, CounterexampleBoundedTentExact) {
  const auto r = run({"--exact", "counterexample", "--which", "clt", "--K", "2", "--n", "1", "--floor", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value=3/4"), std::string::npos) << r.out;
}

TEST(Cli, GNormal) {
  const auto r = run({"gnormal", "--sigma-lo", "1", "--sigma-hi", "1", "--phi", "1-abs(x)"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("upper=0.2021"), std::string::npos) << r.out;
}

TEST(Cli, LlnWritesDeterministicCsv) {
  const auto a = temp_path("a.csv");
  const auto b = temp_path("b.csv");
  for (const auto& path : {a, b}) {
    const auto r = run({"lln", "--config", config("bernoulli-band.json"), "--phi", "1-abs(x-0.5)", "--schedule",
                        "16,32,64", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto ca = sublin::read_text_file(a);
  EXPECT_EQ(ca, sublin::read_text_file(b));
  EXPECT_EQ(ca.substr(0, ca.find('\n')), "n,value,prediction,gap");
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, EvalExact) {
  const auto r = run({"eval", "--config", config("bernoulli-band.json"), "--phi", "x", "--n", "10", "--scale", "n",
                      "--exact"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("upper=3/5"), std::string::npos) << r.out;
}

TEST(Cli, DiagnoseCounterexample) {
  const auto r = run({"diagnose", "--K", "10000", "--schedule", "10,100,10000", "--exact"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nV(|X|>=n)=1/10000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("H1 holds, H2 fails"), std::string::npos) << r.out;
}

TEST(Cli, EnlargeDumpsVertices) {
  const auto json = temp_path("vertices.json");
  const auto r = run({"enlarge", "--config", config("example36.json"), "--exact", "--json", json});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("vertices=8"), std::string::npos);
  EXPECT_EQ(sublin::parse_joint_model<sublin::Rational>(sublin::read_text_file(json)).num_measures(), 8u);
  std::remove(json.c_str());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"eval", "--config", config("bernoulli-band.json"), "--phi", "x+"}).code, 1);
  EXPECT_EQ(run({"eval", "--config", config("example36.json"), "--phi", "x"}).code, 2);
  EXPECT_EQ(run({"eval", "--config", config("bernoulli-band.json"), "--phi", "1/(x-1)"}).code, 3);
  EXPECT_EQ(run({"check-independence", "--config", config("example36.json"), "--mode", "peng-exact", "--cell-cap",
                 "1"})
                .code,
            4);
  EXPECT_EQ(run({"clt", "--config", config("bernoulli-band.json"), "--phi", "x", "--schedule", "4"}).code, 1);
}
