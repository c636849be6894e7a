#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>

#include "lmmk/error.hpp"
#include "lmmk/kernelspace.hpp"
#include "lmmk/pipeline/config.hpp"
#include "lmmk/pipeline/experiment.hpp"
#include "lmmk/pipeline/reports.hpp"
#include "lmmk/pipeline/split.hpp"
#include "lmmk/synthetic.hpp"

using namespace lmmk;
using namespace lmmk::pipeline;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("lmmk_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& contents) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << contents;
    return p;
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

Dataset synthetic_dataset(std::uint64_t seed, int per_class = 20, int noise = 3) {
  SyntheticSpec spec;
  spec.per_class = per_class;
  spec.noise = noise;
  auto data = make_gaussian_classes(spec, seed);
  return dataset_from_features(std::move(data.features), std::move(data.labels), KernelMode::PerFeature);
}

RunConfig quick_config(int reps = 3) {
  RunConfig c;
  c.hp.lambda = 0.1;
  c.hp.outer_iters = 2;
  c.split.reps = reps;
  c.split.seed = 7;
  return c;
}

}  // namespace

TEST(Csv, NumericTable) {
  TempDir dir;
  std::vector<std::string> header;
  const Matrix m = read_numeric_csv(dir.file("a.csv", "x,y\n1,2.5\n-3,4e-2\n"), &header);
  EXPECT_EQ(header, (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(1, 0), -3.0);
  EXPECT_EQ(m(1, 1), 4e-2);
}

TEST(Csv, MalformedRowNamesTheLine) {
  TempDir dir;
  const auto p = dir.file("bad.csv", "x,y\n1,2\n3\n");
  try {
    read_numeric_csv(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Csv, NonNumericFieldNamesLineAndColumn) {
  TempDir dir;
  const auto p = dir.file("bad.csv", "x,y\n1,2\n3,abc\n");
  try {
    read_numeric_csv(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find(":3:2"), std::string::npos) << e.what();
  }
}

TEST(Csv, MissingFile) {
  EXPECT_EQ(code_of([] { read_numeric_csv("/nonexistent/lmmk.csv"); }), ErrorCode::IoError);
}

TEST(MatrixFiles, BinaryRoundTripAndAutodetect) {
  TempDir dir;
  Matrix m(2, 3);
  m << 1.0 / 3.0, -0.0, 1e-300, 2, 3, 4;
  write_matrix_binary(dir / "m.bin", m);
  const Matrix back = read_matrix(dir / "m.bin");
  ASSERT_EQ(back.rows(), 2);
  ASSERT_EQ(back.cols(), 3);
  EXPECT_EQ(back, m);
  write_matrix_csv(dir / "m.csv", m);
  EXPECT_EQ(read_matrix(dir / "m.csv"), m);
}

TEST(MatrixFiles, TruncatedBinary) {
  TempDir dir;
  std::string bytes(kMatrixMagic, 8);
  bytes += std::string("\x02\0\0\0\x02\0\0\0", 8);
  bytes += std::string(8, '\0');
  const auto p = dir.file("t.bin", bytes);
  EXPECT_EQ(code_of([&] { read_matrix(p); }), ErrorCode::ParseError);
}

TEST(Labels, SortedClassIdsAndLabelColumn) {
  TempDir dir;
  const auto set = read_labels(dir.file("l.csv", "id,label\n0,dog\n1,cat\n2,dog\n3,emu\n"));
  EXPECT_EQ(set.class_names, (std::vector<std::string>{"cat", "dog", "emu"}));
  EXPECT_EQ(set.ids, (Labels{2, 1, 2, 3}));
  EXPECT_EQ(map_labels({"emu", "cat"}, set.class_names), (Labels{3, 1}));
  EXPECT_EQ(code_of([&] { map_labels({"yak"}, set.class_names); }), ErrorCode::UnknownLabel);
}

TEST(Blocks, PrefixBeforeColon) {
  const auto blocks = blocks_from_header({"color:r", "color:g", "shape", "texture:a", "color:b"});
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].name, "color");
  EXPECT_EQ(blocks[0].columns, (std::vector<Index>{0, 1, 4}));
  EXPECT_EQ(blocks[1].name, "shape");
  EXPECT_EQ(blocks[2].columns, (std::vector<Index>{3}));
}

TEST(Ingest, PerFeatureDistancesAreAbsoluteDifferences) {
  TempDir dir;
  IngestSpec spec;
  spec.features = dir.file("x.csv", "a,b\n0,1\n2,5\n-1,3\n");
  spec.labels = dir.file("y.csv", "label\nu\nv\nu\n");
  const Dataset data = ingest(spec);
  ASSERT_EQ(data.n_kernels(), 2);
  EXPECT_EQ(data.kernel_names(), (std::vector<std::string>{"a", "b"}));
  // Rebuild the kernels and recover the distances through the bandwidth.
  const auto sk = build_kernels(data, {0, 1, 2});
  for (Index m = 0; m < 2; ++m) {
    const double delta = sk.recipe.bandwidths[static_cast<std::size_t>(m)];
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) {
        const double expected = std::abs(data.features(i, m) - data.features(j, m));
        EXPECT_NEAR(std::sqrt(-delta * std::log(sk.train.kernel(m)(i, j))), expected, 1e-12);
      }
  }
}

TEST(Ingest, PrecomputedKernelIsNormalizedOnLoad) {
  TempDir dir;
  Matrix raw(3, 3);
  raw << 4, 1, 0.5, 1, 1, 0.2, 0.5, 0.2, 1;
  write_matrix_binary(dir / "k.bin", raw);
  IngestSpec spec;
  spec.mode = KernelMode::Precomputed;
  spec.matrices = {dir / "k.bin"};
  spec.labels = dir.file("y.csv", "label\na\nb\na\n");
  const Dataset data = ingest(spec);
  const Matrix& k = data.matrices[0];
  for (Index i = 0; i < 3; ++i) {
    EXPECT_EQ(k(i, i), 1.0);
    for (Index j = 0; j < 3; ++j) EXPECT_NEAR(k(i, j), raw(i, j) / std::sqrt(raw(i, i) * raw(j, j)), 1e-15);
  }
  EXPECT_EQ(data.raw_diagonals[0](0), 4.0);
}

TEST(Ingest, ShapeAndConfigErrors) {
  TempDir dir;
  IngestSpec spec;
  spec.features = dir.file("x.csv", "a\n1\n2\n");
  spec.labels = dir.file("y.csv", "label\nu\nv\nu\n");
  EXPECT_EQ(code_of([&] { ingest(spec); }), ErrorCode::ShapeMismatch);
  spec.mode = KernelMode::Precomputed;
  EXPECT_EQ(code_of([&] { ingest(spec); }), ErrorCode::ConfigError);
  write_matrix_binary(dir / "k.bin", Matrix::Identity(2, 3));
  spec.matrices = {dir / "k.bin"};
  EXPECT_EQ(code_of([&] { ingest(spec); }), ErrorCode::ShapeMismatch);
}

TEST(Kernels, CrossKernelsMatchTrainingKernelsOnSharedPoints) {
  const Dataset data = synthetic_dataset(1, 10);
  std::vector<Index> train, test;
  for (Index i = 0; i < data.n_samples(); ++i) (i % 3 == 0 ? test : train).push_back(i);
  const auto sk = build_kernels(data, train, test);
  // A query equal to training point t reproduces row t of each kernel.
  const CrossKernelSet again = cross_from_features(sk.recipe, select_rows(data.features, {train[4]}));
  for (Index m = 0; m < sk.train.n_kernels(); ++m)
    for (Index j = 0; j < sk.train.n_samples(); ++j)
      EXPECT_NEAR(again.kernel(m)(0, j), sk.train.kernel(m)(4, j), 1e-15);
  const KernelSet rebuilt = train_kernels_from_recipe(sk.recipe);
  for (Index m = 0; m < sk.train.n_kernels(); ++m)
    EXPECT_EQ(rebuilt.kernel(m), sk.train.kernel(m));
}

TEST(Kernels, PrecomputedCrossNormalizationUsesTrainingDiagonals) {
  Matrix x(5, 2);
  x << 1, 0, 2, 1, 0, 3, 1, 1, 2, 2;
  const Matrix raw = x * x.transpose();
  Dataset data;
  data.mode = KernelMode::Precomputed;
  data.labels.ids = {1, 2, 1, 2, 1};
  data.matrices = {normalize_kernel(KernelMatrix(raw)).values()};
  data.raw_diagonals = {raw.diagonal()};
  data.matrix_names = {"lin"};
  const auto sk = build_kernels(data, {0, 1, 2}, {3, 4});
  const Matrix raw_cross = select_block(raw, {3, 4}, {0, 1, 2});
  const Vector self{{raw(3, 3), raw(4, 4)}};
  const CrossKernelSet cross = cross_from_matrices(sk.recipe, {raw_cross}, {self});
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_NEAR(cross.kernel(0)(i, j), sk.test->kernel(0)(i, j), 1e-15);
}

TEST(Kernels, ConstantFeatureIsFlaggedDegenerate) {
  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const Dataset data = dataset_from_features(x, {1, 1, 2, 2}, KernelMode::PerFeature);
  const auto sk = build_kernels(data, {0, 1, 2, 3});
  EXPECT_FALSE(sk.recipe.degenerate[0]);
  EXPECT_TRUE(sk.recipe.degenerate[1]);
  EXPECT_EQ(sk.train.kernel(1), Matrix::Ones(4, 4));
}

TEST(Split, SplitmixReferenceValues) {
  // Reference outputs of splitmix64 seeded with 0.
  std::uint64_t s = 0;
  EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(s), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(repetition_seed(0, 1), 0x6e789e6aa1b965f4ULL);
}

TEST(Split, StratifiedWithinOneSamplePerClass) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Labels labels;
    const int c = 2 + trial % 4;
    for (int k = 1; k <= c; ++k) labels.insert(labels.end(), 2 + (trial * 7 + k * 5) % 17, k);
    std::shuffle(labels.begin(), labels.end(), rng);
    const double frac = 0.2 + 0.15 * (trial % 5);
    const Split s = stratified_split(labels, frac, static_cast<std::uint64_t>(trial));
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
    EXPECT_EQ(s.train.size() + s.test.size(), labels.size());
    std::map<Label, int> total, in_train;
    for (Label l : labels) ++total[l];
    for (Index i : s.train) ++in_train[labels[static_cast<std::size_t>(i)]];
    for (auto [label, n] : total) {
      EXPECT_LE(std::abs(in_train[label] - frac * n), 1.0) << "class " << label;
      EXPECT_GE(in_train[label], 1);
      EXPECT_LE(in_train[label], n - 1);
    }
  }
}

TEST(Split, DeterministicPerSeed) {
  Labels labels;
  for (int i = 0; i < 60; ++i) labels.push_back(1 + i % 3);
  const Split a = stratified_split(labels, 0.5, 11);
  const Split b = stratified_split(labels, 0.5, 11);
  const Split c = stratified_split(labels, 0.5, 12);
  EXPECT_EQ(a.train, b.train);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, FoldsPartitionEachClass) {
  Labels labels;
  for (int i = 0; i < 31; ++i) labels.push_back(1 + i % 2);
  const auto folds = stratified_folds(labels, 3, 5);
  ASSERT_EQ(folds.size(), 3u);
  std::vector<int> seen(labels.size(), 0);
  for (const Split& f : folds) {
    EXPECT_EQ(f.train.size() + f.test.size(), labels.size());
    for (Index i : f.test) ++seen[static_cast<std::size_t>(i)];
    const auto ones = std::count_if(f.test.begin(), f.test.end(),
                                    [&](Index i) { return labels[static_cast<std::size_t>(i)] == 1; });
    EXPECT_GE(ones, 5);
    EXPECT_LE(ones, 6);
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
}

TEST(RunTrain, ByteIdenticalReruns) {
  const Dataset data = synthetic_dataset(2);
  RunConfig c = quick_config(1);
  EXPECT_EQ(to_json(run_train(data, c).report).dump(), to_json(run_train(data, c).report).dump());
}

TEST(RunTrain, ReportArithmetic) {
  const Dataset data = synthetic_dataset(3);
  const EvalReport r = run_train(data, quick_config(4)).report;
  ASSERT_EQ(r.reps.size(), 4u);
  double sum = 0.0, lo = 1.0, hi = 0.0;
  for (const auto& rep : r.reps) {
    sum += rep.accuracy;
    lo = std::min(lo, rep.accuracy);
    hi = std::max(hi, rep.accuracy);
    EXPECT_GE(rep.sparsity, 0);
    EXPECT_LE(rep.sparsity, static_cast<Index>(r.kernel_names.size()));
    EXPECT_EQ(rep.n_train + rep.n_test, static_cast<std::size_t>(data.n_samples()));
  }
  const double mean = sum / 4.0;
  EXPECT_NEAR(r.mean_accuracy, mean, 1e-15);
  EXPECT_GE(r.mean_accuracy, lo);
  EXPECT_LE(r.mean_accuracy, hi);
  double ss = 0.0;
  for (const auto& rep : r.reps) ss += (rep.accuracy - mean) * (rep.accuracy - mean);
  EXPECT_NEAR(r.std_accuracy, std::sqrt(ss / 3.0), 1e-15);
  EXPECT_EQ(r.mean_beta.size(), r.kernel_names.size());
}

TEST(RunTrain, LearnedBetaAtLeastBaselineOnSeparableData) {
  SyntheticSpec spec;
  spec.per_class = 30;
  spec.noise = 6;
  spec.radius = 4.0;
  auto raw = make_gaussian_classes(spec, 4);
  const Dataset data = dataset_from_features(raw.features, raw.labels, KernelMode::PerFeature);
  RunConfig c = quick_config(5);
  c.hp.lambda = 0.5;
  const EvalReport r = run_train(data, c).report;
  EXPECT_GE(r.mean_accuracy, r.mean_baseline_accuracy);
}

TEST(RunTrain, RepetitionFailureCarriesContext) {
  // Class 3 has two members, so every training split holds a singleton.
  Matrix x(10, 2);
  for (Index i = 0; i < 10; ++i) x.row(i) << static_cast<double>(i), static_cast<double>(i % 3);
  const Dataset data = dataset_from_features(x, {1, 1, 1, 1, 2, 2, 2, 2, 3, 3}, KernelMode::PerFeature);
  try {
    run_train(data, quick_config(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingletonClass);
    EXPECT_NE(std::string(e.what()).find("repetition 1"), std::string::npos) << e.what();
  }
}

TEST(RunTrain, InvalidSplit) {
  const Dataset data = synthetic_dataset(5, 6);
  RunConfig c = quick_config();
  c.split.train_fraction = 1.0;
  EXPECT_EQ(code_of([&] { run_train(data, c); }), ErrorCode::ConfigError);
  c.split.train_fraction = 0.5;
  c.split.reps = 0;
  EXPECT_EQ(code_of([&] { run_train(data, c); }), ErrorCode::ConfigError);
}

TEST(Sweep, LambdaZeroGridEqualsRunTrain) {
  const Dataset data = synthetic_dataset(6);
  RunConfig c = quick_config(2);
  const SweepReport s = run_sweep(data, c, {SweepParam::Lambda, {0.0}});
  ASSERT_EQ(s.points.size(), 1u);
  c.hp.lambda = 0.0;
  EXPECT_EQ(to_json(*s.points[0].report).dump(), to_json(run_train(data, c).report).dump());
}

TEST(Sweep, SumBetaNonIncreasingInLambda) {
  const Dataset data = synthetic_dataset(7);
  RunConfig c = quick_config(2);
  c.hp.outer_iters = 1;
  const SweepReport s = run_sweep(data, c, {SweepParam::Lambda, {0.0, 0.5, 2.0, 8.0}});
  for (std::size_t i = 1; i < s.points.size(); ++i)
    EXPECT_LE(s.points[i].report->mean_sum_beta, s.points[i - 1].report->mean_sum_beta + 1e-9);
}

TEST(Sweep, MuZeroZeroesBetaAndFlagsFallback) {
  const Dataset data = synthetic_dataset(8);
  const SweepReport s = run_sweep(data, quick_config(3), {SweepParam::Mu, {0.0}});
  const EvalReport& r = *s.points[0].report;
  for (const auto& rep : r.reps) {
    EXPECT_EQ(rep.sparsity, 0);
    EXPECT_TRUE(rep.uniform_fallback);
  }
  EXPECT_TRUE(r.any_fallback);
  EXPECT_TRUE(to_json(r)["summary"].contains("warning"));
}

TEST(Sweep, FailingPointIsRecordedAndSweepContinues) {
  const Dataset data = synthetic_dataset(9, 8);
  const SweepReport s = run_sweep(data, quick_config(1), {SweepParam::Mu, {1.5, 0.5}});
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_FALSE(s.points[0].report.has_value());
  EXPECT_EQ(s.points[0].error_code, ErrorCode::ConfigError);
  EXPECT_TRUE(s.points[1].report.has_value());
  const SweepReport frac = run_sweep(data, quick_config(1), {SweepParam::K, {1.5}});
  EXPECT_EQ(frac.points[0].error_code, ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { run_sweep(data, quick_config(1), {SweepParam::Lambda, {}}); }), ErrorCode::ConfigError);
}

TEST(Sweep, CsvColumns) {
  TempDir dir;
  const Dataset data = synthetic_dataset(10, 8);
  const SweepReport s = run_sweep(data, quick_config(1), {SweepParam::Lambda, {0.0, 1.0}});
  write_sweep_csv(dir / "s.csv", s);
  std::ifstream in(dir / "s.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "lambda,status,mean_accuracy,std_accuracy,mean_baseline_accuracy,mean_sparsity,mean_sum_beta");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Tune, SelectsFromGridAndIsDeterministic) {
  const Dataset data = synthetic_dataset(11, 15);
  RunConfig c = quick_config(1);
  TuneSpec spec;
  spec.ks = {1, 3};
  spec.mus = {0.5};
  spec.lambdas = {0.0, 1.0};
  const auto train = first_training_split(data, c.split);
  const TuneReport a = tune(data, train, c, spec);
  EXPECT_EQ(a.stage_k_mu.size(), 2u);
  EXPECT_EQ(a.stage_lambda.size(), 2u);
  EXPECT_TRUE(a.selected.k == 1 || a.selected.k == 3);
  EXPECT_TRUE(a.selected.lambda == 0.0 || a.selected.lambda == 1.0);
  EXPECT_EQ(to_json(a).dump(), to_json(tune(data, train, c, spec)).dump());
}

TEST(Bundle, RoundTrip) {
  const Dataset data = synthetic_dataset(12, 8);
  const TrainOutcome out = run_train(data, quick_config(1));
  const ModelBundle b{out.model, out.recipe, data.labels.class_names};
  const auto text = bundle_to_json(b).dump();
  const ModelBundle back = bundle_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(bundle_to_json(back).dump(), text);
}

TEST(Config, ParsesAndResolvesPaths) {
  const auto doc = nlohmann::json::parse(R"({
    "input": {"features": "x.csv", "labels": "/abs/y.csv", "kernel_mode": "per-representation"},
    "hyperparams": {"k": 2, "mu": 0.6, "lambda": 0.05},
    "split": {"train_fraction": 0.3, "reps": 4, "seed": 9},
    "sweep": {"param": "mu", "values": [0.5, 0.7]},
    "tune": {"folds": 4},
    "k_classify": 5
  })");
  const CliConfig c = config_from_json(doc, "/data");
  EXPECT_EQ(c.input.features, fs::path("/data/x.csv"));
  EXPECT_EQ(c.input.labels, fs::path("/abs/y.csv"));
  EXPECT_EQ(c.input.mode, KernelMode::PerRepresentation);
  EXPECT_EQ(c.run.hp.k, 2);
  EXPECT_EQ(c.run.split.reps, 4);
  EXPECT_EQ(c.run.split.seed, 9u);
  EXPECT_EQ(c.run.k_classify, 5);
  EXPECT_EQ(c.sweep.param, SweepParam::Mu);
  EXPECT_EQ(c.tune.folds, 4);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::json::parse(R"({"lamda": 1})"), "."); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::json::parse(R"({"split": {"fraction": 1}})"), "."); }),
            ErrorCode::ConfigError);
}
