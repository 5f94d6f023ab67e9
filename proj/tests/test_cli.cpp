#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "treealign/align.hpp"
#include "treealign/cli.hpp"
#include "treealign/ingest.hpp"
#include "treealign/perturb.hpp"

using namespace treealign;
using namespace treealign::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("treealign_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  static Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "treealign");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

std::string line_of(const SegmentTree& t) { return tree_to_json(t).dump() + "\n"; }

}  // namespace

TEST_F(Cli, EvalYourTurn) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()));
  const auto p = file("p.jsonl", line_of(your_turn_pred()));
  const Result r = call({"eval", "--gold", g, "--pred", p, "--json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["corpus"].get<double>(), struct_iou(your_turn_gold(), your_turn_pred()).score);
  EXPECT_EQ(j["config"]["label_mode"], "unlabeled");
}

TEST_F(Cli, EvalIdenticalFiles) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()) + line_of(your_turn_pred()));
  const Result r = call({"eval", "--gold", g, "--pred", g, "--corpus"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("corpus\t1.0\n"), std::string::npos) << r.out;
}

TEST_F(Cli, EvalOutputsAndFlags) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()));
  const auto p = file("p.jsonl", line_of(your_turn_pred()));
  const Result r = call({"eval", "--gold", g, "--pred", p, "--per-sentence", "--exclude-preterminals", "--labeled",
                         "--report", path("r.json"), "--alignments", path("a.jsonl"), "--out", path("o.txt"),
                         "--jobs", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string o = slurp(path("o.txt"));
  EXPECT_NE(o.find("0\t0.6666666666666666\t1\t2\n"), std::string::npos) << o;
  EXPECT_EQ(o.find("corpus"), std::string::npos);
  const Json report = Json::parse(slurp(path("r.json")));
  EXPECT_EQ(report["config"]["label_mode"], "exact_label");
  EXPECT_EQ(report["config"]["include_preterminals"], false);
  const Json al = Json::parse(slurp(path("a.jsonl")));
  EXPECT_EQ(al["pairs"].size(), 1u);
}

TEST_F(Cli, UsageErrors) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()));
  Result r = call({"eval", "--pred", g});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("--gold"), std::string::npos);
  EXPECT_EQ(call({}).code, cli::kUsageError);
  EXPECT_EQ(call({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(call({"eval", "--gold", g, "--pred", g, "--format", "xml"}).code, cli::kUsageError);
  EXPECT_EQ(call({"perturb", "--kind", "noise", "--delta", "0.5", "--seed", "1"}).code, cli::kUsageError);
  EXPECT_EQ(call({"--help"}).code, cli::kOk);
}

TEST_F(Cli, DataErrors) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()));
  const auto two = file("two.jsonl", line_of(your_turn_gold()) + line_of(your_turn_gold()));
  EXPECT_EQ(call({"eval", "--gold", g, "--pred", two}).code, cli::kDataError);
  EXPECT_EQ(call({"eval", "--gold", path("missing"), "--pred", g}).code, cli::kDataError);
}

TEST_F(Cli, ValidateListsViolations) {
  const auto bad = file("bad.jsonl",
                        R"({"label":"NP","start":0,"end":2,"children":[{"label":"DT","start":0,"end":1},{"label":"NN","start":0.5,"end":2}]})"
                        "\n");
  const Result r = call({"validate", "--trees", bad});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.out.find(":1: overlapping"), std::string::npos) << r.out;
  const auto good = file("good.jsonl", line_of(your_turn_gold()));
  EXPECT_EQ(call({"validate", "--trees", good}).code, cli::kOk);
}

TEST_F(Cli, Parseval) {
  const auto g = file("g.mrg", std::string(kCatGold) + "\n");
  const auto p = file("p.mrg", std::string(kCatPred) + "\n");
  const Result r = call({"parseval", "--gold", g, "--pred", p, "--json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["precision"].get<double>(), 0.75);
  EXPECT_EQ(j["recall"].get<double>(), 0.6);
  EXPECT_EQ(j["matched"], 3);
  const Result macro = call({"parseval", "--gold", g, "--pred", p, "--macro", "--unlabeled"});
  EXPECT_EQ(macro.code, cli::kOk);
  EXPECT_NE(macro.out.find("averaging\tmacro"), std::string::npos);
}

TEST_F(Cli, Segeval) {
  const auto ref = file("r.txt", "a 0.0 0.5\nb 0.5 1.0\nc 1.0 2.0\n");
  const auto hyp = file("h.txt", "a 0.0 0.51\nb 0.51 1.5\nc 1.5 2.0\n");
  const Result r = call({"segeval", "--ref", ref, "--hyp", hyp, "--json"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["f1"].get<double>(), 0.5);
  const Result m = call({"segeval", "--ref", ref, "--hyp", ref, "--miou", "--json"});
  EXPECT_EQ(Json::parse(m.out)["miou"].get<double>(), 1.0);
}

TEST_F(Cli, ProjectThenEval) {
  const auto trees = file("t.mrg", "(NP (PRP Your) (NN turn))\n");
  const auto bounds = file("b.txt", "Your 2.56 2.72\nturn 2.72 3.01\n");
  const Result r = call({"project", "--trees", trees, "--boundaries", bounds, "--out", path("g.jsonl")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto p = file("p.jsonl", line_of(your_turn_pred()));
  const Result e = call({"eval", "--gold", path("g.jsonl"), "--pred", p, "--json"});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  EXPECT_NEAR(Json::parse(e.out)["corpus"].get<double>(), 0.75, 1e-9);
  const Result words = call({"project", "--trees", trees, "--unit", "char"});
  EXPECT_EQ(Json::parse(words.out)["end"].get<double>(), 8.0);
  const auto wrong = file("w.txt", "Their 2.56 2.72\nturn 2.72 3.01\n");
  EXPECT_EQ(call({"project", "--trees", trees, "--boundaries", wrong}).code, cli::kDataError);
}

TEST_F(Cli, PerturbIsDeterministic) {
  const auto trees = file("t.jsonl", line_of(your_turn_pred()) + line_of(your_turn_gold()));
  for (const std::string kind : {"noise", "insert", "delete"}) {
    const Result a = call({"perturb", "--kind", kind, "--delta", "0.7", "--seed", "9", "--trees", trees,
                           "--manifest", path("m.jsonl")});
    const Result b = call({"perturb", "--kind", kind, "--delta", "0.7", "--seed", "9", "--trees", trees});
    ASSERT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    const Json m = Json::parse(slurp(path("m.jsonl")).substr(0, slurp(path("m.jsonl")).find('\n')));
    EXPECT_EQ(m["kind"], kind);
    EXPECT_EQ(m["stream_seed"].get<std::uint64_t>(), Rng::derive_seed(9, 0));
  }
  const Result zero = call({"perturb", "--kind", "noise", "--delta", "0", "--seed", "1", "--trees", trees});
  EXPECT_EQ(zero.out, line_of(your_turn_pred()) + line_of(your_turn_gold()));
  EXPECT_EQ(call({"perturb", "--kind", "noise", "--delta", "2", "--seed", "1", "--trees", trees}).code,
            cli::kUsageError);
}

TEST_F(Cli, Mbr) {
  const auto c = file("c.jsonl",
                      "[[[0,2]],[[0,1],[1,2]],[[0,1],[1,2]]]\n"
                      R"j({"id":"t","candidates":["(S (A a) (B b))","(S (X (A a) (B b)))","(S (A a) (B b))"]})j"
                      "\n");
  const Result r = call({"mbr", "--candidates", c});
  ASSERT_EQ(r.code, cli::kDataError);  // second line has trees but the loss is mIoU
  const auto spans = file("s.jsonl", "[[[0,2]],[[0,1],[1,2]],[[0,1],[1,2]]]\n");
  const Result s = call({"mbr", "--candidates", spans});
  ASSERT_EQ(s.code, cli::kOk) << s.err;
  EXPECT_EQ(s.out, "{\"index\":1}\n");
  const auto trees = file("t.jsonl", R"j({"id":"t","candidates":["(S (A a) (B b))","(S (X (A a) (B b)))","(S (A a) (B b))"]})j"
                                     "\n");
  const Result t = call({"mbr", "--candidates", trees, "--loss", "treef1"});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  EXPECT_EQ(t.out, "{\"id\":\"t\",\"index\":0}\n");
}

TEST_F(Cli, EpsilonFromEnvironment) {
  const auto g = file("g.jsonl", line_of(your_turn_gold()));
  ::setenv("TREEALIGN_EPSILON", "-1", 1);
  EXPECT_EQ(call({"eval", "--gold", g, "--pred", g}).code, cli::kUsageError);
  ::setenv("TREEALIGN_EPSILON", "1e-6", 1);
  EXPECT_EQ(call({"eval", "--gold", g, "--pred", g}).code, cli::kOk);
  EXPECT_EQ(coordinate_epsilon(), 1e-6);
  ::unsetenv("TREEALIGN_EPSILON");
  EXPECT_EQ(call({"eval", "--gold", g, "--pred", g}).code, cli::kOk);
  EXPECT_EQ(coordinate_epsilon(), 1e-9);
}
