#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lmmk/kernelspace.hpp"
#include "lmmk/learner.hpp"

namespace lmmk {

struct NeighborSummary {
  std::vector<Index> indices;
  std::vector<double> distances;
};

struct PredictionReport {
  Labels predicted;
  /// Filled when ground truth is supplied.
  std::optional<double> accuracy;
  /// confusion[truth - 1][predicted - 1]; filled with accuracy.
  std::vector<std::vector<Index>> confusion;
  /// Per test point, when requested.
  std::vector<NeighborSummary> neighbors;
  /// The model had no non-zero weight and uniform weights were used.
  bool used_uniform_fallback = false;
};

struct PredictOptions {
  int k_classify = 0;  // 0 selects the model's training k
  bool keep_neighbors = false;
};

/// Majority vote among the k nearest training points under the learned
/// RKHS distance. Ties go to the class with the smallest summed neighbor
/// distance, then the smallest class id.
PredictionReport knn_predict(const TrainedModel& model, const CrossKernelSet& cross, const KernelSet& ks,
                             const PredictOptions& options = {},
                             std::optional<std::span<const Label>> truth = std::nullopt);

/// Same vote with explicit weights (the model's labels supply the votes).
PredictionReport knn_predict_with(const KernelWeights& weights, const Labels& train_labels,
                                  const CrossKernelSet& cross, const KernelSet& ks, int k_classify,
                                  bool keep_neighbors = false,
                                  std::optional<std::span<const Label>> truth = std::nullopt);

/// All-ones weights: kNN on the unweighted kernel combination (kNN-ave).
KernelWeights uniform_weights(Index d);

double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

/// c x c counts with rows indexed by truth and columns by prediction.
std::vector<std::vector<Index>> confusion_matrix(std::span<const Label> predicted, std::span<const Label> truth,
                                                 int n_classes);

}  // namespace lmmk
