#pragma once

#include <cstdint>

#include "lmmk/matrix.hpp"

namespace lmmk {

/// Gaussian classes: class c (1-based) is centred at radius * (cos, sin) of
/// 2 pi (c-1)/n_classes in the first two informative dimensions (further
/// informative dimensions get radius * cos of a shifted angle); all
/// remaining dimensions are pure N(0, 1) noise.
struct SyntheticSpec {
  int n_classes = 3;
  int per_class = 40;
  int informative = 2;
  int noise = 8;
  double radius = 2.5;
  double stddev = 1.0;
};

struct SyntheticData {
  Matrix features;  // (n_classes * per_class) x (informative + noise), class-major rows
  Labels labels;
};

SyntheticData make_gaussian_classes(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace lmmk
