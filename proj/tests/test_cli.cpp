#include <sys/wait.h>

#include <array>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(RSTKNN_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = std::filesystem::temp_directory_path() /
          ("rstknn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "line.jsonl") << "{\"id\":\"a\",\"x\":0,\"y\":0,\"terms\":{}}\n"
                                         "{\"id\":\"b\",\"x\":1,\"y\":0,\"terms\":{}}\n"
                                         "{\"id\":\"c\",\"x\":10,\"y\":0,\"terms\":{}}\n";
  }
  void TearDown() override { std::filesystem::remove_all(dir); }

  std::string path(const char* name) const { return (dir / name).string(); }

  std::filesystem::path dir;
};

}  // namespace

TEST_F(Cli, QueryCollinear) {
  const std::string base = "query --dataset " + path("line.jsonl") + " --qx 0.4 --qy 0 --k 1 --alpha 1";
  const CliRun r = cli(base);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "a b\n");
  EXPECT_EQ(cli(base + " --mode oracle").out, "a b\n");
  EXPECT_EQ(cli(base + " --mode faulty2011").status, 0);
}

TEST_F(Cli, QueryFile) {
  std::ofstream(dir / "q.json") << "{\"x\":0.4,\"y\":0,\"terms\":{}}";
  const CliRun r = cli("query --dataset " + path("line.jsonl") + " --query-file " + path("q.json") +
                    " --k 1 --alpha 1");
  EXPECT_EQ(r.out, "a b\n");
}

TEST_F(Cli, UsageErrors) {
  const std::string base = "query --dataset " + path("line.jsonl") + " --qx 0.4 --qy 0";
  EXPECT_EQ(cli(base + " --k 0").status, 2);
  EXPECT_EQ(cli(base + " --alpha 2").status, 2);
  EXPECT_EQ(cli(base + " --mode fast").status, 2);
  EXPECT_EQ(cli("query --dataset " + path("line.jsonl")).status, 2);
  EXPECT_EQ(cli("gen --n 0").status, 2);
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("bogus").status, 2);
  EXPECT_EQ(cli("--help").status, 0);
}

TEST_F(Cli, ParseErrors) {
  std::ofstream(dir / "bad.jsonl") << "{\"id\":\"a\",\"x\":0,\"y\":0}\n{oops\n";
  EXPECT_EQ(cli("query --dataset " + path("bad.jsonl") + " --qx 0 --qy 0").status, 3);
  EXPECT_EQ(cli("query --dataset " + path("nope.jsonl") + " --qx 0 --qy 0").status, 3);
  EXPECT_EQ(cli("query --dataset " + path("line.jsonl") + " --qx 0 --qy 0 --qterms t1").status, 3);
}

TEST_F(Cli, GenIsDeterministic) {
  const CliRun a = cli("gen --seed 7 --n 6");
  const CliRun b = cli("gen --seed 7 --n 6");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 6);
  EXPECT_NE(cli("gen --seed 8 --n 6").out, a.out);
  EXPECT_EQ(cli("gen --seed 7 --n 6 --out " + path("g.jsonl")).status, 0);
  EXPECT_EQ(read_file(dir / "g.jsonl"), a.out);
}

TEST_F(Cli, TraceOutputs) {
  const std::string fx = ref::fixture("six_point").string();
  const CliRun r = cli("query --fixture " + fx + " --trace --out " + path("t.jsonl"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.substr(0, 6), "P0 P1\n");
  EXPECT_NE(r.out.find("| Steps | Actions"), std::string::npos);
  EXPECT_NE(r.out.find("Verify P2, Prune P2"), std::string::npos);
  const std::string jsonl = read_file(dir / "t.jsonl");
  EXPECT_EQ(jsonl.substr(0, 10), "{\"step\":1,");
  EXPECT_EQ(cli("query --fixture " + fx + " --trace").out, r.out);
}

TEST_F(Cli, CompareOnFixtures) {
  const CliRun r11 = cli("compare --fixture " + ref::fixture("faulty2011").string());
  EXPECT_EQ(r11.status, 0);
  EXPECT_NE(r11.out.find("correct     o0 o2 o6 o7 o9   extra: -   missing: -"), std::string::npos);
  EXPECT_NE(r11.out.find("faulty2011  o0 o2 o3 o6 o7 o9   extra: o3"), std::string::npos);

  const CliRun r14 = cli("compare --fixture " + ref::fixture("faulty2014").string());
  EXPECT_EQ(r14.status, 0);
  EXPECT_NE(r14.out.find("faulty2014  "), std::string::npos);
  EXPECT_NE(r14.out.find("extra: o06 o08"), std::string::npos);
}

TEST_F(Cli, CompareOnGeneratedData) {
  ASSERT_EQ(cli("gen --seed 3 --n 30 --out " + path("g.jsonl")).status, 0);
  for (int k = 1; k <= 4; ++k) {
    const CliRun r = cli("compare --dataset " + path("g.jsonl") + " --qx 50 --qy 60 --qterms t1=2,t3=4 --k " +
                      std::to_string(k) + " --alpha 0.4 --fanout 2");
    EXPECT_EQ(r.status, 0) << r.out;
  }
}

TEST_F(Cli, Search) {
  const CliRun found = cli("search --mode faulty2011 --seed 2024 --trials 50 --out " + path("fx"));
  EXPECT_EQ(found.status, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "fx" / "params.json"));
  EXPECT_EQ(cli("compare --fixture " + path("fx")).status, 0);
  EXPECT_EQ(cli("search --mode correct --seed 2024 --trials 50").status, 1);
}
