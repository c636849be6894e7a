#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lmmk/pipeline/dataset.hpp"
#include "lmmk/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stdout is captured, stderr discarded.
CliRun run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(LMMK_CLI_PATH) + "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lmmk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    lmmk::SyntheticSpec spec;
    spec.per_class = 15;
    spec.noise = 3;
    const auto data = lmmk::make_gaussian_classes(spec, 5);
    std::ofstream x(dir_ / "x.csv"), y(dir_ / "y.csv");
    x.precision(17);
    for (lmmk::Index j = 0; j < data.features.cols(); ++j) x << (j ? "," : "") << "f" << j;
    x << '\n';
    y << "label\n";
    for (lmmk::Index i = 0; i < data.features.rows(); ++i) {
      for (lmmk::Index j = 0; j < data.features.cols(); ++j) x << (j ? "," : "") << data.features(i, j);
      x << '\n';
      y << "class" << data.labels[static_cast<std::size_t>(i)] << '\n';
    }
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string data_args() const {
    return "--features '" + (dir_ / "x.csv").string() + "' --labels '" + (dir_ / "y.csv").string() + "'";
  }
  std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvaluateWritesReport) {
  const CliRun r = run_cli("evaluate " + data_args() + " --reps 2 --lambda 0.2 --outer-iters 2");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["report"]["repetitions"].size(), 2u);
  EXPECT_EQ(doc["report"]["class_names"], (std::vector<std::string>{"class1", "class2", "class3"}));
  EXPECT_TRUE(doc["report"]["summary"].contains("mean_baseline_accuracy"));
  EXPECT_FALSE(doc.contains("model"));
}

TEST_F(CliTest, OutputIsIdenticalAcrossThreadCounts) {
  const std::string args = "evaluate " + data_args() + " --reps 2 --outer-iters 2";
  const CliRun one = run_cli(args, "LMMK_THREADS=1");
  const CliRun four = run_cli(args, "LMMK_THREADS=4");
  ASSERT_EQ(one.code, 0);
  ASSERT_EQ(four.code, 0);
  EXPECT_EQ(one.out, four.out);
}

TEST_F(CliTest, TrainThenPredictReproducesFirstRepetition) {
  ASSERT_EQ(run_cli("train " + data_args() + " --reps 1 --model-out " + path("model.json") + " --out " +
                    path("report.json"))
                .code,
            0);
  const CliRun p = run_cli("predict --model " + path("model.json") + " " + data_args());
  ASSERT_EQ(p.code, 0);
  const auto doc = nlohmann::json::parse(p.out);
  EXPECT_EQ(doc["predicted"].size(), 45u);
  EXPECT_GT(doc["accuracy"].get<double>(), 0.5);
}

TEST_F(CliTest, SweepWritesCsv) {
  const CliRun r = run_cli("sweep " + data_args() + " --reps 1 --param lambda --values 0,1 --csv " + path("s.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["points"].size(), 2u);
  EXPECT_TRUE(fs::exists(dir_ / "s.csv"));
}

TEST_F(CliTest, BuildKernelsWritesBinaryMatrices) {
  const CliRun r = run_cli("build-kernels " + data_args() + " --dir " + path("k"));
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["files"].size(), 5u);
  const auto m = lmmk::pipeline::read_matrix(doc["files"][0].get<std::string>());
  EXPECT_EQ(m.rows(), 45);
  EXPECT_EQ(m(3, 3), 1.0);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli("evaluate " + data_args() + " --mu 3").code, 2);
  EXPECT_EQ(run_cli("evaluate --nonsense").code, 2);
  EXPECT_EQ(run_cli("evaluate --features /nonexistent.csv --labels /nonexistent.csv").code, 3);
  std::ofstream(dir_ / "bad.csv") << "a,b\n1\n";
  EXPECT_EQ(run_cli("evaluate --features " + path("bad.csv") + " --labels " + path("y.csv")).code, 3);
  std::ofstream(dir_ / "cfg.json") << R"({"hyperparams": {"kk": 1}})";
  EXPECT_EQ(run_cli("evaluate --config " + path("cfg.json")).code, 2);
}
