#include "lmmk/classify.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "lmmk/compute.hpp"
#include "lmmk/error.hpp"

namespace lmmk {

KernelWeights uniform_weights(Index d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "uniform weights need d >= 1");
  return KernelWeights(std::vector<double>(static_cast<std::size_t>(d), 1.0));
}

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions vs " +
                                               std::to_string(truth.size()) + " labels");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::vector<std::vector<Index>> confusion_matrix(std::span<const Label> predicted, std::span<const Label> truth,
                                                 int n_classes) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "predictions and labels differ in length");
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n_classes),
                                      std::vector<Index>(static_cast<std::size_t>(n_classes), 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth[i] < 1 || truth[i] > n_classes || predicted[i] < 1 || predicted[i] > n_classes)
      throw Error(ErrorCode::UnknownLabel, "label outside 1.." + std::to_string(n_classes));
    ++out[static_cast<std::size_t>(truth[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)];
  }
  return out;
}

PredictionReport knn_predict_with(const KernelWeights& weights, const Labels& train_labels,
                                  const CrossKernelSet& cross, const KernelSet& ks, int k_classify,
                                  bool keep_neighbors, std::optional<std::span<const Label>> truth) {
  if (k_classify < 1) throw Error(ErrorCode::InvalidArgument, "k_classify must be >= 1");
  if (static_cast<Index>(train_labels.size()) != ks.n_samples())
    throw Error(ErrorCode::DimensionMismatch, "training labels do not match the kernel set");

  PredictionReport report;
  KernelWeights effective = weights;
  if (sparsity(weights) == 0) {
    spdlog::warn("all kernel weights are zero; falling back to uniform weights (kNN-ave)");
    effective = uniform_weights(ks.n_kernels());
    report.used_uniform_fallback = true;
  }
  const Matrix dist = test_distances(cross, ks, effective);
  const auto votes = omp::knn_vote(dist, train_labels, k_classify);

  report.predicted.reserve(votes.size());
  for (std::size_t t = 0; t < votes.size(); ++t) {
    report.predicted.push_back(votes[t].label);
    if (keep_neighbors) {
      NeighborSummary summary;
      summary.indices = votes[t].neighbors;
      for (Index i : votes[t].neighbors) summary.distances.push_back(dist(static_cast<Index>(t), i));
      report.neighbors.push_back(std::move(summary));
    }
  }
  if (truth) {
    report.accuracy = accuracy(report.predicted, *truth);
    Label n_classes = 0;
    for (Label l : train_labels) n_classes = std::max(n_classes, l);
    for (Label l : *truth) n_classes = std::max(n_classes, l);
    report.confusion = confusion_matrix(report.predicted, *truth, n_classes);
  }
  return report;
}

PredictionReport knn_predict(const TrainedModel& model, const CrossKernelSet& cross, const KernelSet& ks,
                             const PredictOptions& options, std::optional<std::span<const Label>> truth) {
  if (model.n_kernels() != ks.n_kernels())
    throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(model.n_kernels()) +
                                                  " weights, kernel set has " + std::to_string(ks.n_kernels()));
  const int k = options.k_classify > 0 ? options.k_classify : model.hyperparams.k;
  return knn_predict_with(model.weights, model.labels, cross, ks, k, options.keep_neighbors, truth);
}

}  // namespace lmmk
