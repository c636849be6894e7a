#include "lmmk/pipeline/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lmmk/error.hpp"

namespace lmmk::pipeline {

namespace {

void shuffle(std::vector<Index>& v, std::uint64_t& state) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(splitmix64(state) % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::map<Label, std::vector<Index>> members_by_class(const Labels& labels) {
  std::map<Label, std::vector<Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Index>(i));
  return members;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep) {
  std::uint64_t state = master;
  std::uint64_t out = 0;
  for (std::size_t r = 0; r <= rep; ++r) out = splitmix64(state);
  return out;
}

Split stratified_split(const Labels& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::ConfigError, "train fraction must lie in (0, 1)");
  std::uint64_t state = seed;
  Split split;
  for (auto& [label, members] : members_by_class(labels)) {
    shuffle(members, state);
    const auto n_c = static_cast<long>(members.size());
    long n_train = std::lround(train_fraction * static_cast<double>(n_c));
    n_train = n_c == 1 ? 1 : std::clamp(n_train, 1L, n_c - 1);
    split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
    split.test.insert(split.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<Split> stratified_folds(const Labels& labels, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorCode::ConfigError, "need at least 2 folds");
  if (static_cast<std::size_t>(n_folds) > labels.size())
    throw Error(ErrorCode::ConfigError, "more folds than samples");
  std::uint64_t state = seed;
  std::vector<int> fold_of(labels.size(), 0);
  int next = 0;
  for (auto& [label, members] : members_by_class(labels)) {
    shuffle(members, state);
    for (Index i : members) {
      fold_of[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % n_folds;
    }
  }
  std::vector<Split> folds(static_cast<std::size_t>(n_folds));
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int f = 0; f < n_folds; ++f)
      (fold_of[i] == f ? folds[static_cast<std::size_t>(f)].test : folds[static_cast<std::size_t>(f)].train)
          .push_back(static_cast<Index>(i));
  return folds;
}

Labels take(const Labels& labels, const std::vector<Index>& idx) {
  Labels out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace lmmk::pipeline
