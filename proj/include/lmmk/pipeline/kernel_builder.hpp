#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmmk/kernelspace.hpp"
#include "lmmk/pipeline/dataset.hpp"

namespace lmmk::pipeline {

/// Everything needed to rebuild query-vs-train kernels after training.
struct KernelRecipe {
  KernelMode mode = KernelMode::PerFeature;
  PrecomputedKind kind = PrecomputedKind::Kernel;
  std::vector<std::string> names;
  /// Frozen Gaussian bandwidth per kernel; 0 where no bandwidth applies.
  std::vector<double> bandwidths;
  /// Representations whose training distances were all zero. They become
  /// constant all-ones kernels that add nothing to any distance.
  std::vector<bool> degenerate;
  std::vector<Index> train_indices;

  // Raw modes
  Matrix train_features;
  std::vector<std::string> feature_names;
  std::vector<Block> blocks;

  // Precomputed kernels: raw training diagonals for cross normalization.
  std::vector<Vector> train_diagonals;
};

struct SplitKernels {
  KernelSet train;
  std::optional<CrossKernelSet> test;
  KernelRecipe recipe;
};

/// Base kernels on the training rows with bandwidths frozen there, plus
/// test-vs-train cross kernels when test indices are given.
SplitKernels build_kernels(const Dataset& data, const std::vector<Index>& train,
                           const std::vector<Index>& test = {});

/// Cross kernels for new raw feature rows (same columns as training).
CrossKernelSet cross_from_features(const KernelRecipe& recipe, const Matrix& test_features);

/// Cross kernels from user-supplied N_test x N_train matrices, one per base
/// kernel. For kernel input, `self_values` holds raw K_m(z, z) per query
/// (empty means all ones).
CrossKernelSet cross_from_matrices(const KernelRecipe& recipe, const std::vector<Matrix>& cross,
                                   const std::vector<Vector>& self_values = {});

/// Training kernel set reconstructed from a recipe. Raw modes rebuild it
/// from the stored training rows; precomputed mode needs the original
/// matrices, from which the training block is cut again.
KernelSet train_kernels_from_recipe(const KernelRecipe& recipe, const Dataset* precomputed = nullptr);

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows);
Matrix select_block(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols);

}  // namespace lmmk::pipeline
