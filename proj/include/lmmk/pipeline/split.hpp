#pragma once

#include <cstdint>
#include <vector>

#include "lmmk/matrix.hpp"

namespace lmmk::pipeline {

/// splitmix64 step: advances `state` by the golden-ratio increment and
/// returns the mixed value. Identical on every platform.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of repetition `rep`: the (rep + 1)-th splitmix64 output from the
/// master seed.
std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep);

struct Split {
  std::vector<Index> train;  // ascending
  std::vector<Index> test;   // ascending
};

/// Per class, round(fraction * n_c) samples clamped to [1, n_c - 1] go to
/// training (a singleton class goes entirely to training). Members are
/// shuffled by Fisher-Yates driven by splitmix64.
Split stratified_split(const Labels& labels, double train_fraction, std::uint64_t seed);

/// Stratified k-fold partition: each class is shuffled and dealt round-robin
/// over the folds, continuing where the previous class stopped. Fold f
/// holds out its own members.
std::vector<Split> stratified_folds(const Labels& labels, int n_folds, std::uint64_t seed);

Labels take(const Labels& labels, const std::vector<Index>& idx);

}  // namespace lmmk::pipeline
