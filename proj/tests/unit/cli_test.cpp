#include <dagpath/dataset.hpp>
#include <dagpath/path.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dagpath_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of the CLI with stdout captured to `stdout_file`.
  int run(const std::string& args, const std::string& stdout_file = "") const {
    const std::string out = stdout_file.empty() ? file("stdout.txt") : stdout_file;
    const std::string cmd = std::string(DAGPATH_CLI) + " " + args + " > " + out + " 2> " + file("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void simulate_continuous(const std::string& stem, int seed = 3) const {
    ASSERT_EQ(run("simulate --family polytree --p 6 --n 150 --ivn-per-node 5 --seed " + std::to_string(seed) +
                  " --out " + file(stem + ".csv") + " --out-ivn " + file(stem + ".ivn") + " --out-truth " +
                  file(stem + ".truth")),
              0)
        << slurp(file("stderr.txt"));
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("learn --type continuous"), 1);
  EXPECT_EQ(run("simulate --family lattice --out " + file("x.csv")), 1);
  EXPECT_EQ(run("simulate --p 10 --n 5 --ivn-per-node 3 --out " + file("x.csv")), 1);
}

TEST_F(CliTest, BadInputExitsWithTwo) {
  EXPECT_EQ(run("learn --type continuous --data " + file("missing.csv") + " --out " + file("p.json")), 2);
  std::ofstream(file("nan.csv")) << "a,b\n1,2\n3,NA\n";
  EXPECT_EQ(run("learn --type continuous --data " + file("nan.csv") + " --out " + file("p.json")), 2);
  EXPECT_NE(slurp(file("stderr.txt")).find("impute"), std::string::npos);
  std::ofstream(file("bad.json")) << "{not json";
  EXPECT_EQ(run("select --path " + file("bad.json") + " --index 1 --out " + file("o.json")), 2);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
  simulate_continuous("a", 5);
  simulate_continuous("b", 5);
  EXPECT_EQ(slurp(file("a.csv")), slurp(file("b.csv")));
  EXPECT_EQ(slurp(file("a.ivn")), slurp(file("b.ivn")));
  EXPECT_EQ(slurp(file("a.truth")), slurp(file("b.truth")));
  simulate_continuous("c", 6);
  EXPECT_NE(slurp(file("a.csv")), slurp(file("c.csv")));
  EXPECT_EQ(slurp(file("a.csv")).substr(0, 12), "V1,V2,V3,V4,");
}

TEST_F(CliTest, LearnSelectExportPipeline) {
  simulate_continuous("d");
  const std::string data = "--data " + file("d.csv") + " --ivn " + file("d.ivn");
  ASSERT_EQ(run("learn --type continuous " + data + " --out " + file("path.json")), 0) << slurp(file("stderr.txt"));
  ASSERT_EQ(run("learn --type continuous " + data + " --out " + file("path2.json")), 0);
  std::ifstream in1(file("path.json")), in2(file("path2.json"));
  const dagpath::SolutionPath p1 = dagpath::read_path_json(in1);
  const dagpath::SolutionPath p2 = dagpath::read_path_json(in2);
  EXPECT_EQ(dagpath::path_to_json_without_timing(p1), dagpath::path_to_json_without_timing(p2));
  EXPECT_EQ(p1.n, 150u);
  EXPECT_EQ(p1[0].nedge, 0u);

  ASSERT_EQ(run("select --path " + file("path.json") + " --auto " + data + " --out " + file("sel.json"),
                file("sel.txt")),
            0);
  const int chosen = std::stoi(slurp(file("sel.txt")));
  EXPECT_GE(chosen, 1);
  EXPECT_LE(chosen, static_cast<int>(p1.size()));
  EXPECT_NE(slurp(file("sel.json")).find("\"selected_index\": " + std::to_string(chosen)), std::string::npos);

  ASSERT_EQ(run("select --path " + file("path.json") + " --index 2 --out " + file("two.json"), file("two.txt")), 0);
  EXPECT_EQ(slurp(file("two.txt")), "2\n");
  EXPECT_EQ(run("select --path " + file("path.json") + " --index 99 --out " + file("x.json")), 2);
  EXPECT_EQ(run("select --path " + file("path.json") + " --index 1 --edges 3 --out " + file("x.json")), 1);

  ASSERT_EQ(run("export --path " + file("path.json") + " --index " + std::to_string(chosen) + " --edges " +
                file("g.tsv") + " --dot " + file("g.dot") + " --adj-csv " + file("g.adj.csv")),
            0);
  EXPECT_EQ(slurp(file("g.dot")).rfind("digraph", 0), 0u);
  ASSERT_EQ(run("export --graph " + file("g.tsv") + " --data " + file("d.csv") + " --edges " + file("g2.tsv")), 0);
  EXPECT_EQ(slurp(file("g.tsv")), slurp(file("g2.tsv")));
}

TEST_F(CliTest, ParamsAndMatrices) {
  simulate_continuous("e");
  const std::string data = "--data " + file("e.csv") + " --ivn " + file("e.ivn");
  ASSERT_EQ(run("learn --type continuous " + data + " --lambdas-length 5 --out " + file("path.json")), 0);
  ASSERT_EQ(run("params --path " + file("path.json") + " " + data + " --out " + file("params.json")), 0)
      << slurp(file("stderr.txt"));
  EXPECT_NE(slurp(file("params.json")).find("\"coefs\""), std::string::npos);
  ASSERT_EQ(run("cov --path " + file("path.json") + " " + data + " --index 3 --out " + file("cov.csv")), 0);
  EXPECT_EQ(slurp(file("cov.csv")).substr(0, 4), ",V1,");
  ASSERT_EQ(run("prec --path " + file("path.json") + " " + data + " --out " + file("prec.csv")), 0);
  for (int m = 1; m <= 5; ++m) EXPECT_TRUE(fs::exists(file("prec_" + std::to_string(m) + ".csv"))) << m;
}

TEST_F(CliTest, DiscreteWithLevelsAndPrior) {
  ASSERT_EQ(run("simulate --type discrete --levels 3 --family scale-free --p 5 --edges 5 --n 200 --ivn-per-node 10 "
                "--out " +
                file("d.csv") + " --out-ivn " + file("d.ivn") + " --out-levels " + file("d.levels")),
            0)
      << slurp(file("stderr.txt"));
  std::ofstream(file("white.csv")) << "parent,child\nV1,V2\n";
  ASSERT_EQ(run("learn --type discrete --data " + file("d.csv") + " --ivn " + file("d.ivn") + " --levels " +
                file("d.levels") + " --whitelist " + file("white.csv") +
                " --roots V3 --lambdas-length 5 --out " + file("path.json")),
            0)
      << slurp(file("stderr.txt"));
  std::ifstream in(file("path.json"));
  const dagpath::SolutionPath path = dagpath::read_path_json(in);
  EXPECT_EQ(path.kind, dagpath::DataKind::discrete);
  for (const auto& est : path.estimates) {
    EXPECT_TRUE(est.dag.has_edge(0, 1));
    EXPECT_TRUE(est.dag.parents(2).empty());
  }
  std::ofstream(file("cyc.csv")) << "V1,V2\nV2,V1\n";
  EXPECT_EQ(run("learn --type discrete --data " + file("d.csv") + " --whitelist " + file("cyc.csv") + " --out " +
                file("x.json")),
            2);
}

}  // namespace
