#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adqec/code_io.hpp"
#include "cli.hpp"

using namespace adqec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result qecopt(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qecopt_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

int csv_rows(const std::string& csv) {
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  return lines - 1;
}

}  // namespace

TEST(CliParse, GammaRanges) {
  EXPECT_EQ(cli::parse_gammas("0:0.5:0.1"), (std::vector<double>{0, 0.1, 0.2, 0.3, 0.4, 0.5}));
  EXPECT_EQ(cli::parse_gammas("0.1,0.3"), (std::vector<double>{0.1, 0.3}));
  EXPECT_EQ(cli::parse_gammas("0"), (std::vector<double>{0}));
  EXPECT_EQ(cli::parse_gammas("0.1:0.1:0.05"), (std::vector<double>{0.1}));
  EXPECT_THROW(cli::parse_gammas("0:1"), std::runtime_error);
  EXPECT_THROW(cli::parse_gammas("0:1:0"), std::runtime_error);
  EXPECT_THROW(cli::parse_gammas("a"), std::runtime_error);
}

TEST(CliSvg, FixedCanvasWithOneLinePerSeries) {
  const std::string svg = cli::svg_chart({{"a", {0, 1}, {0.5, 0.9}}, {"b<c", {0, 1}, {0.4, NAN}}}, "x", "y");
  EXPECT_NE(svg.find("width=\"800\" height=\"500\""), std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
  EXPECT_NE(svg.find("b&lt;c"), std::string::npos);
}

TEST_F(Cli, SweepNoiselessPoint) {
  const auto r = qecopt({"sweep", "--gammas", "0", "--restarts", "2", "--out", at("zero")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(at("zero.csv"));
  EXPECT_EQ(csv_rows(csv), 1);
  EXPECT_NE(csv.find(", 1.000000, 0.000000, 1.000000, 1.000000, 1.000000,"), std::string::npos) << csv;
  EXPECT_TRUE(fs::exists(at("zero.svg")));

  const json m = json::parse(slurp(at("zero.manifest.json")));
  for (const char* key : {"command", "args", "seed", "version", "started", "seconds", "outputs"})
    EXPECT_TRUE(m.contains(key)) << key;
  EXPECT_EQ(m["command"], "sweep");
  ASSERT_EQ(m["outputs"].size(), 2u);
  for (const auto& o : m["outputs"]) EXPECT_EQ(o["sha256"], cli::sha256_file(o["path"].get<std::string>()));
}

TEST_F(Cli, SweepRangeIsReproducible) {
  const std::vector<std::string> common{"--model", "local", "--n",   "2", "--k", "1", "--gammas", "0:0.5:0.1",
                                        "--m",     "1",     "--restarts", "5", "--seed", "7", "--max-iters", "8"};
  auto args = common;
  args.insert(args.begin(), "sweep");
  args.insert(args.end(), {"--out", at("a"), "--jobs", "1"});
  ASSERT_EQ(qecopt(args).code, 0);
  args = common;
  args.insert(args.begin(), "sweep");
  args.insert(args.end(), {"--out", at("b"), "--jobs", "3"});
  ASSERT_EQ(qecopt(args).code, 0);
  const std::string a = slurp(at("a.csv"));
  EXPECT_EQ(csv_rows(a), 6);
  EXPECT_EQ(a, slurp(at("b.csv")));
}

TEST_F(Cli, SweepAllQubitNoise) {
  const auto r = qecopt({"sweep", "--model", "weight", "--n", "3", "--k", "3", "--gammas", "0.2", "--restarts", "1",
                         "--max-iters", "3", "--out", at("w")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(at("w.csv")).find("0.200000, weight, 3, 3, 1, 1,"), std::string::npos);
}

TEST_F(Cli, OptimizeNoiselessEmitsValidCode) {
  const auto r = qecopt({"optimize", "--n", "2", "--gamma", "0", "--restarts", "1", "--out", at("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fidelity 1.000000"), std::string::npos) << r.out;
  const auto doc = load_code(at("c.json"));
  EXPECT_LE(validate(doc.code).worst_residual(), 1e-6);
  EXPECT_TRUE(validate(doc.code).passed());
  const std::string trace = slurp(at("c.trace.csv"));
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "iteration, block, objective, certified, slackness, sdp_iterations");
}

TEST_F(Cli, OptimizeAcceptsFixtureStart) {
  const auto r = qecopt({"optimize", "--n", "2", "--gamma", "0.3", "--init", "fixture:protocol2", "--max-iters", "3",
                         "--out", at("warm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string trace = slurp(at("warm.trace.csv"));
  EXPECT_NE(trace.find("0, start, 0.9192811"), std::string::npos) << trace;
}

TEST_F(Cli, OptimizeTwoOutcomesSchema) {
  const auto r = qecopt({"optimize", "--n", "2", "--gamma", "0.2", "--m", "2", "--restarts", "1", "--max-iters", "2",
                         "--out", at("m2")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(at("m2.json")));
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["decoders"].size(), 2u);
}

TEST_F(Cli, OptimizeStaticAndTwoRounds) {
  auto r = qecopt({"optimize", "--n", "1", "--gamma", "0.2", "--rounds", "0", "--restarts", "1", "--out", at("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(parse_code(slurp(at("s.json"))).is_static);
  r = qecopt({"optimize", "--n", "1", "--gamma", "0.2", "--rounds", "2", "--restarts", "1", "--max-iters", "3",
              "--out", at("l2")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_code(slurp(at("l2.json"))).code.check_rounds(), 2);
}

TEST_F(Cli, EvaluateProtocolTwoRoutesAgree) {
  ASSERT_EQ(qecopt({"fixture", "--name", "protocol2", "--out", at("p2")}).code, 0);
  const auto r = qecopt({"evaluate", "--code", at("p2.json"), "--gamma", "0.3", "--out", at("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(at("ev.json")));
  EXPECT_LE(j["difference"].get<double>(), 1e-9);
  EXPECT_NEAR(j["direct"].get<double>(), j["factorized"].get<double>(), 1e-9);
}

TEST_F(Cli, EvaluateIdentityCodeNoiseless) {
  ASSERT_EQ(qecopt({"fixture", "--name", "identity2", "--out", at("id")}).code, 0);
  const auto r = qecopt({"evaluate", "--code", at("id.json"), "--gamma", "0", "--out", at("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(slurp(at("ev.json")))["direct"].get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, EvaluateRejectsBadFiles) {
  std::ofstream(at("corrupt.json")) << "{\"kind\": \"strategic\", \"dims\": ";
  EXPECT_EQ(qecopt({"evaluate", "--code", at("corrupt.json"), "--out", at("e1")}).code, cli::kValidation);
  EXPECT_NE(qecopt({"evaluate", "--code", at("missing.json"), "--out", at("e2")}).code, 0);

  // a decoder that is not trace preserving fails validation unless forced
  ASSERT_EQ(qecopt({"fixture", "--name", "identity1", "--out", at("id")}).code, 0);
  json j = json::parse(slurp(at("id.json")));
  j["decoders"][0]["data"][0] = {2.0, 0.0};
  std::ofstream(at("broken.json")) << j.dump();
  EXPECT_EQ(qecopt({"evaluate", "--code", at("broken.json"), "--out", at("e3")}).code, cli::kValidation);
  EXPECT_EQ(qecopt({"evaluate", "--code", at("broken.json"), "--force", "--out", at("e4")}).code, 0);
}

TEST_F(Cli, InputsAreNeverOverwritten) {
  ASSERT_EQ(qecopt({"fixture", "--name", "protocol2", "--out", at("p2")}).code, 0);
  const std::string before = slurp(at("p2.json"));
  EXPECT_EQ(qecopt({"evaluate", "--code", at("p2.json"), "--out", at("p2")}).code, cli::kUsage);
  EXPECT_EQ(slurp(at("p2.json")), before);
}

TEST_F(Cli, PetzStaticNoiselessIsIdentity) {
  ASSERT_EQ(qecopt({"fixture", "--name", "trivial", "--out", at("t")}).code, 0);
  const auto r = qecopt({"petz", "--static", "--code", at("t.json"), "--gamma", "0", "--out", at("pz")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(at("pz.json")));
  EXPECT_LE(j["identity_distance"].get<double>(), 1e-10);
  EXPECT_NEAR(j["fidelity"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(parse_decoders(json{{"decoders", j["decoders"]}}.dump()).size(), 1u);
}

TEST_F(Cli, PetzTemporalOnProtocol) {
  ASSERT_EQ(qecopt({"fixture", "--name", "protocol2", "--out", at("p2")}).code, 0);
  const auto r = qecopt({"petz", "--code", at("p2.json"), "--gamma", "0.3", "--gauge", "diagonal", "--out", at("pz")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(slurp(at("pz.json")))["fidelity"].get<double>(), 0.866551, 1e-6);
}

TEST_F(Cli, CheckKlRepetitionBitFlip) {
  ASSERT_EQ(qecopt({"fixture", "--name", "repetition", "--out", at("rep")}).code, 0);
  auto r = qecopt({"checkkl", "--code", at("rep.json"), "--model", "flip", "--gamma", "0.05", "--out", at("kl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"correctable\": true"), std::string::npos) << r.out;
  r = qecopt({"checkkl", "--code", at("rep.json"), "--model", "local", "--gamma", "0.3", "--out", at("kl2")});
  EXPECT_FALSE(json::parse(slurp(at("kl2.json")))["correctable"].get<bool>());
}

TEST_F(Cli, BoundRandomBatch) {
  const auto r = qecopt({"bound", "--random-seeds", "0:19", "--out", at("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(at("b.json")));
  EXPECT_EQ(j["reports"].size(), 20u);
  EXPECT_TRUE(j["all_satisfied"].get<bool>());
  for (const auto& rep : j["reports"]) EXPECT_TRUE(rep["satisfied"].get<bool>());
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "epsilon, bound, achieved, vacuous");
}

TEST_F(Cli, BoundOnStoredCode) {
  ASSERT_EQ(qecopt({"fixture", "--name", "repetition", "--out", at("rep")}).code, 0);
  const auto r = qecopt({"bound", "--code", at("rep.json"), "--model", "flip", "--gamma", "0.05", "--out", at("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = json::parse(slurp(at("b.json")))["reports"][0];
  EXPECT_NEAR(rep["epsilon"].get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(rep["achieved"].get<double>(), 1.0, 1e-7);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(qecopt({}).code, cli::kUsage);
  EXPECT_EQ(qecopt({"sweep", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(qecopt({"sweep", "--gammas", "0:1:x", "--out", at("x")}).code, cli::kUsage);
  EXPECT_EQ(qecopt({"sweep", "--model", "other", "--gammas", "0", "--out", at("x")}).code, cli::kUsage);
  EXPECT_EQ(qecopt({"optimize", "--n", "5", "--gamma", "0.1", "--out", at("x")}).code, cli::kBudget);
  EXPECT_EQ(qecopt({"fixture", "--name", "nothing", "--out", at("x")}).code, cli::kUsage);
  EXPECT_EQ(qecopt({"--help"}).code, 0);
}
