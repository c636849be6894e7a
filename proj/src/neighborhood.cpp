#include "lmmk/neighborhood.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "lmmk/error.hpp"

namespace lmmk {

namespace {

void validate_inputs(const Matrix& distances, const Labels& labels, const NeighborhoodSpec& spec) {
  if (distances.rows() != distances.cols())
    throw Error(ErrorCode::ShapeMismatch, "neighbor distances must be square");
  if (distances.rows() != static_cast<Index>(labels.size()))
    throw Error(ErrorCode::DimensionMismatch, "distance matrix has " + std::to_string(distances.rows()) +
                                                  " rows but " + std::to_string(labels.size()) + " labels");
  if (spec.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  for (Label l : labels)
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "class ids must be >= 1");
}

}  // namespace

std::vector<Index> class_sizes(const Labels& labels) {
  Label max_label = 0;
  for (Label l : labels) max_label = std::max(max_label, l);
  std::vector<Index> sizes(static_cast<std::size_t>(max_label) + 1, 0);
  for (Label l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::vector<NeighborList> select_targets(const Matrix& distances, const Labels& labels,
                                         const NeighborhoodSpec& spec) {
  validate_inputs(distances, labels, spec);
  const auto sizes = class_sizes(labels);
  for (std::size_t c = 1; c < sizes.size(); ++c) {
    if (sizes[c] == 1 && !spec.allow_singletons) throw Error(ErrorCode::SingletonClass, "class " + std::to_string(c) + " has a single member");
    if (sizes[c] > 1 && sizes[c] < spec.k + 1)
      spdlog::warn("class {} has {} members; its anchors get {} targets instead of k={}", c, sizes[c],
                   sizes[c] - 1, spec.k);
  }
  return omp::nearest_by_label(distances, labels, spec.k, LabelFilter::Same);
}

std::vector<NeighborList> select_impostors(const Matrix& distances, const Labels& labels,
                                           const NeighborhoodSpec& spec) {
  validate_inputs(distances, labels, spec);
  const auto sizes = class_sizes(labels);
  const auto present = std::count_if(sizes.begin(), sizes.end(), [](Index s) { return s > 0; });
  if (present < 2) throw Error(ErrorCode::SingleClassDataset, "impostors need at least two classes");
  return omp::nearest_by_label(distances, labels, spec.k, LabelFilter::Different);
}

TripleSet build_triples(std::vector<NeighborList> targets, std::vector<NeighborList> impostors) {
  if (targets.size() != impostors.size())
    throw Error(ErrorCode::DimensionMismatch, "targets and impostors cover different anchors");
  TripleSet out;
  std::size_t count = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) count += targets[i].size() * impostors[i].size();
  out.triples.reserve(count);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (Index j : targets[i])
      for (Index l : impostors[i]) out.triples.push_back({static_cast<Index>(i), j, l});
  out.targets = std::move(targets);
  out.impostors = std::move(impostors);
  return out;
}

TripleSet make_triples(const Matrix& distances, const Labels& labels, const NeighborhoodSpec& spec) {
  auto targets = select_targets(distances, labels, spec);
  auto impostors = select_impostors(distances, labels, spec);
  return build_triples(std::move(targets), std::move(impostors));
}

}  // namespace lmmk
