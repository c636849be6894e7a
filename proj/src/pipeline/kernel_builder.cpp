#include "lmmk/pipeline/kernel_builder.hpp"

#include <spdlog/spdlog.h>

#include "lmmk/compute.hpp"
#include "lmmk/error.hpp"

namespace lmmk::pipeline {

namespace {

std::vector<double> column_of(const Matrix& m, Index c) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
  return out;
}

void check_indices(const std::vector<Index>& idx, Index n, const char* what) {
  for (Index i : idx)
    if (i < 0 || i >= n)
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " index " + std::to_string(i) + " out of range");
}

// Raw training and cross distances for base kernel m.
Matrix train_distance(const KernelRecipe& r, Index m) {
  if (r.mode == KernelMode::PerFeature) return omp::absolute_difference_distances(column_of(r.train_features, m));
  const auto& cols = r.blocks[static_cast<std::size_t>(m)].columns;
  std::vector<Index> all(static_cast<std::size_t>(r.train_features.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  return omp::euclidean_distances(select_block(r.train_features, all, cols));
}

Matrix cross_distance(const KernelRecipe& r, const Matrix& test, Index m) {
  if (r.mode == KernelMode::PerFeature)
    return omp::cross_absolute_difference_distances(column_of(test, m), column_of(r.train_features, m));
  const auto& cols = r.blocks[static_cast<std::size_t>(m)].columns;
  std::vector<Index> test_rows(static_cast<std::size_t>(test.rows()));
  for (std::size_t i = 0; i < test_rows.size(); ++i) test_rows[i] = static_cast<Index>(i);
  std::vector<Index> train_rows(static_cast<std::size_t>(r.train_features.rows()));
  for (std::size_t i = 0; i < train_rows.size(); ++i) train_rows[i] = static_cast<Index>(i);
  return omp::cross_euclidean_distances(select_block(test, test_rows, cols),
                                        select_block(r.train_features, train_rows, cols));
}

// Gaussian kernel with a bandwidth frozen on the training distances;
// records the bandwidth or the degenerate flag.
KernelMatrix freeze_gaussian(Matrix dist, const std::string& name, double& bandwidth, bool& degenerate) {
  const DistanceMatrix d(std::move(dist));
  try {
    bandwidth = compute_bandwidth(d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllZeroDistances) throw;
    spdlog::warn("representation '{}' has all-zero training distances; using a constant kernel", name);
    bandwidth = 0.0;
    degenerate = true;
    return KernelMatrix(Matrix::Ones(d.size(), d.size()));
  }
  degenerate = false;
  return gaussian_kernel(d, bandwidth);
}

Matrix cross_gaussian(const Matrix& dist, const KernelRecipe& r, Index m) {
  if (r.degenerate[static_cast<std::size_t>(m)]) return Matrix::Ones(dist.rows(), dist.cols());
  return gaussian_cross_kernel(dist, r.bandwidths[static_cast<std::size_t>(m)]);
}

std::vector<Vector> unit_self_values(Index d, Index n_test) {
  return std::vector<Vector>(static_cast<std::size_t>(d), Vector::Ones(n_test));
}

}  // namespace

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
  return out;
}

Matrix select_block(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
  return out;
}

SplitKernels build_kernels(const Dataset& data, const std::vector<Index>& train, const std::vector<Index>& test) {
  const Index n = data.n_samples();
  check_indices(train, n, "training");
  check_indices(test, n, "test");
  if (train.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two training samples");
  const Index d = data.n_kernels();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dataset has no base kernels");

  KernelRecipe recipe;
  recipe.mode = data.mode;
  recipe.kind = data.kind;
  recipe.names = data.kernel_names();
  recipe.bandwidths.assign(static_cast<std::size_t>(d), 0.0);
  recipe.degenerate.assign(static_cast<std::size_t>(d), false);
  recipe.train_indices = train;

  std::vector<KernelMatrix> kernels;
  kernels.reserve(static_cast<std::size_t>(d));
  std::vector<Matrix> cross;

  if (data.mode == KernelMode::Precomputed) {
    for (Index m = 0; m < d; ++m) {
      const Matrix& full = data.matrices[static_cast<std::size_t>(m)];
      const auto sm = static_cast<std::size_t>(m);
      if (data.kind == PrecomputedKind::Kernel) {
        Vector diag(static_cast<Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) diag(static_cast<Index>(i)) = data.raw_diagonals[sm](train[i]);
        recipe.train_diagonals.push_back(std::move(diag));
        kernels.emplace_back(select_block(full, train, train));
        if (!test.empty()) cross.push_back(select_block(full, test, train));
      } else {
        bool degenerate = false;
        kernels.push_back(freeze_gaussian(select_block(full, train, train), recipe.names[sm], recipe.bandwidths[sm],
                                          degenerate));
        recipe.degenerate[sm] = degenerate;
        if (!test.empty()) cross.push_back(cross_gaussian(select_block(full, test, train), recipe, m));
      }
    }
  } else {
    recipe.train_features = select_rows(data.features, train);
    recipe.feature_names = data.feature_names;
    recipe.blocks = data.blocks;
    const Matrix test_features = select_rows(data.features, test);
    for (Index m = 0; m < d; ++m) {
      const auto sm = static_cast<std::size_t>(m);
      bool degenerate = false;
      kernels.push_back(freeze_gaussian(train_distance(recipe, m), recipe.names[sm], recipe.bandwidths[sm], degenerate));
      recipe.degenerate[sm] = degenerate;
      if (!test.empty()) cross.push_back(cross_gaussian(cross_distance(recipe, test_features, m), recipe, m));
    }
  }

  SplitKernels out{KernelSet(std::move(kernels), recipe.names), std::nullopt, std::move(recipe)};
  if (!test.empty())
    out.test.emplace(std::move(cross), unit_self_values(d, static_cast<Index>(test.size())));
  return out;
}

CrossKernelSet cross_from_features(const KernelRecipe& recipe, const Matrix& test_features) {
  if (recipe.mode == KernelMode::Precomputed)
    throw Error(ErrorCode::ConfigError, "model was trained on precomputed matrices; supply cross matrices");
  if (test_features.cols() != recipe.train_features.cols())
    throw Error(ErrorCode::ShapeMismatch, "query rows have " + std::to_string(test_features.cols()) +
                                              " columns, training had " +
                                              std::to_string(recipe.train_features.cols()));
  const auto d = static_cast<Index>(recipe.names.size());
  std::vector<Matrix> cross;
  for (Index m = 0; m < d; ++m) cross.push_back(cross_gaussian(cross_distance(recipe, test_features, m), recipe, m));
  return CrossKernelSet(std::move(cross), unit_self_values(d, test_features.rows()));
}

CrossKernelSet cross_from_matrices(const KernelRecipe& recipe, const std::vector<Matrix>& cross,
                                   const std::vector<Vector>& self_values) {
  if (recipe.mode != KernelMode::Precomputed)
    throw Error(ErrorCode::ConfigError, "model was trained on raw features; supply a features file");
  const auto d = static_cast<Index>(recipe.names.size());
  const auto n_train = static_cast<Index>(recipe.train_indices.size());
  if (static_cast<Index>(cross.size()) != d)
    throw Error(ErrorCode::ShapeMismatch, std::to_string(cross.size()) + " cross matrices for " +
                                              std::to_string(d) + " base kernels");
  const Index n_test = cross.front().rows();
  for (const Matrix& c : cross)
    if (c.rows() != n_test || c.cols() != n_train)
      throw Error(ErrorCode::ShapeMismatch, "cross matrices must be " + std::to_string(n_test) + "x" +
                                                std::to_string(n_train));

  std::vector<Matrix> out;
  for (Index m = 0; m < d; ++m) {
    const auto sm = static_cast<std::size_t>(m);
    if (recipe.kind == PrecomputedKind::Distance) {
      if ((cross[sm].array() < 0.0).any() || !cross[sm].allFinite())
        throw Error(ErrorCode::ParseError, "cross distances must be finite and non-negative");
      out.push_back(cross_gaussian(cross[sm], recipe, m));
    } else {
      Vector self = Vector::Ones(n_test);
      if (!self_values.empty()) {
        if (self_values.size() != cross.size() || self_values[sm].size() != n_test)
          throw Error(ErrorCode::ShapeMismatch, "query self values do not match the cross matrices");
        self = self_values[sm];
      }
      const Vector& diag = recipe.train_diagonals[sm];
      out.push_back(normalize_cross_kernel(cross[sm], {diag.data(), static_cast<std::size_t>(diag.size())},
                                           {self.data(), static_cast<std::size_t>(self.size())}));
    }
  }
  return CrossKernelSet(std::move(out), unit_self_values(d, n_test));
}

KernelSet train_kernels_from_recipe(const KernelRecipe& recipe, const Dataset* precomputed) {
  const auto d = static_cast<Index>(recipe.names.size());
  std::vector<KernelMatrix> kernels;
  if (recipe.mode == KernelMode::Precomputed) {
    if (!precomputed || precomputed->mode != KernelMode::Precomputed)
      throw Error(ErrorCode::ConfigError, "precomputed models need the original training matrices");
    if (precomputed->n_kernels() != d)
      throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(d) + " training matrices");
    check_indices(recipe.train_indices, precomputed->n_samples(), "training");
    const SplitKernels rebuilt = build_kernels(*precomputed, recipe.train_indices);
    return rebuilt.train;
  }
  for (Index m = 0; m < d; ++m) {
    const auto sm = static_cast<std::size_t>(m);
    const Matrix dist = train_distance(recipe, m);
    if (recipe.degenerate[sm])
      kernels.emplace_back(Matrix::Ones(dist.rows(), dist.cols()));
    else
      kernels.push_back(gaussian_kernel(DistanceMatrix(dist), recipe.bandwidths[sm]));
  }
  return KernelSet(std::move(kernels), recipe.names);
}

}  // namespace lmmk::pipeline
