#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "jrtp/jrtp.hpp"
#include "support.hpp"

using namespace jrtp;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(JRTP_CLI) + " " + args + " 2>/dev/null >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_to(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(JRTP_CLI) + " " + args + " 2>/dev/null >" + stdout_path;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(fixtures::slurp(path)); }

}  // namespace

TEST(Cli, GenerateSolveValidate) {
  fixtures::TempDir d;
  ASSERT_EQ(run("generate --n 15 --seed 4 --out " + d.file("i.json")), 0);
  ASSERT_EQ(run("--manifest " + d.file("m.json") + " solve --instance " + d.file("i.json") + " --out " +
                d.file("s.json")),
            0);
  const auto manifest = read_json(d.file("m.json"));
  EXPECT_EQ(manifest["command"], "solve");
  EXPECT_EQ(manifest["exit_code"], 0);
  EXPECT_TRUE(manifest["timings"].contains("solve_seconds"));
  EXPECT_EQ(manifest["config"]["seed"], 4);

  ASSERT_EQ(run_to("validate --instance " + d.file("i.json") + " --solution " + d.file("s.json"), d.file("v.json")), 0);
  const auto verdict = read_json(d.file("v.json"));
  EXPECT_EQ(verdict["ok"], true);
  EXPECT_EQ(verdict["objective"], read_json(d.file("s.json"))["objective"]);

  // A tampered objective fails validation with exit 1.
  auto sol = read_json(d.file("s.json"));
  sol["objective"] = sol["objective"].get<int>() + 1;
  std::ofstream(d.file("bad.json")) << sol.dump();
  ASSERT_EQ(run_to("validate --instance " + d.file("i.json") + " --solution " + d.file("bad.json"), d.file("v2.json")), 1);
  EXPECT_EQ(read_json(d.file("v2.json"))["violations"][0]["constraint"], "objective");
}

TEST(Cli, ExitCodes) {
  fixtures::TempDir d;
  EXPECT_EQ(run("solve --instance " + d.file("missing.json")), 2);
  EXPECT_EQ(run("validate --instance " + d.file("missing.json") + " --solution x"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("solve"), 2);
  std::ofstream(d.file("garbage.json")) << "{ not json";
  EXPECT_EQ(run("solve --instance " + d.file("garbage.json")), 2);

  auto inst = instance_to_json(fixtures::InstanceBuilder{}
                                   .rider({{{32.0, -81.1}, {32.05, -81.1}, {400, 420}, {420, 470}}})
                                   .build());
  inst["capacity"] = 0;
  std::ofstream(d.file("invalid.json")) << inst.dump();
  EXPECT_EQ(run("solve --instance " + d.file("invalid.json")), 1);
  ASSERT_EQ(run("generate --n 8 --out " + d.file("big.json")), 0);
  EXPECT_EQ(run("oracle --instance " + d.file("big.json")), 1);
  EXPECT_EQ(run("solve --instance " + d.file("big.json") + " --lp-backend external"), 2);
}

TEST(Cli, TimeLimitIsNotAnError) {
  fixtures::TempDir d;
  ASSERT_EQ(run("generate --n 100 --seed 1 --out " + d.file("i.json")), 0);
  ASSERT_EQ(run("solve --instance " + d.file("i.json") + " --time-limit 1 --out " + d.file("s.json")), 0);
  const auto sol = read_json(d.file("s.json"));
  EXPECT_EQ(sol["status"], "time_limit");
  EXPECT_EQ(run("validate --instance " + d.file("i.json") + " --solution " + d.file("s.json")), 0);
}

TEST(Cli, ReductionAndLabelPipeline) {
  fixtures::TempDir d;
  ASSERT_EQ(run("generate --n 12 --seed 2 --out " + d.file("i.json")), 0);
  ASSERT_EQ(run("graph dump --instance " + d.file("i.json") + " --out " + d.file("edges.csv")), 0);
  ASSERT_EQ(run("solve --instance " + d.file("i.json") + " --out " + d.file("s.json") + " --trace " + d.file("t.json")), 0);
  ASSERT_EQ(run("extract-labels --trace " + d.file("t.json") + " --class u50 --out " + d.file("sample.json")), 0);
  const auto sample = read_json(d.file("sample.json"));
  EXPECT_EQ(sample["label_class"], "u50");
  EXPECT_EQ(sample["labels"].size(), sample["edges"].size());
  ASSERT_EQ(run("export --instance " + d.file("i.json") + " --out " + d.file("x.json")), 0);
  EXPECT_FALSE(read_json(d.file("x.json")).contains("labels"));

  // Uniform scores: reduction keeps ties by (i, j).
  {
    std::ifstream in(d.file("edges.csv"));
    std::ofstream out(d.file("scores.csv"));
    std::string line;
    std::getline(in, line);
    out << "i,j,score\n";
    while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << ",0.5\n";
  }
  ASSERT_EQ(run("reduce --instance " + d.file("i.json") + " --scores " + d.file("scores.csv") + " --tau 30 --out " +
                d.file("r.csv")),
            0);
  ASSERT_EQ(run("solve --instance " + d.file("i.json") + " --scores " + d.file("scores.csv") + " --tau 30 --out " +
                d.file("rs.json")),
            0);
  EXPECT_EQ(run("validate --instance " + d.file("i.json") + " --solution " + d.file("rs.json")), 0);
  EXPECT_EQ(run("solve --instance " + d.file("i.json") + " --scores " + d.file("nope.csv")), 2);
}

TEST(Cli, SameSeedSameBytes) {
  fixtures::TempDir d;
  ASSERT_EQ(run("generate --n 20 --seed 9 --out " + d.file("a.json")), 0);
  ASSERT_EQ(run("generate --n 20 --seed 9 --out " + d.file("b.json")), 0);
  EXPECT_EQ(fixtures::slurp(d.file("a.json")), fixtures::slurp(d.file("b.json")));
  ASSERT_EQ(run("solve --instance " + d.file("a.json") + " --out " + d.file("s1.json")), 0);
  ASSERT_EQ(run("solve --instance " + d.file("a.json") + " --out " + d.file("s2.json")), 0);
  EXPECT_EQ(fixtures::slurp(d.file("s1.json")), fixtures::slurp(d.file("s2.json")));
}
