#pragma once

// Data-parallel building blocks. Every function exists twice with the same
// signature: `serial::` is the straightforward reference kept for testing,
// `omp::` is the OpenMP version used by the library. Each output entry is
// computed by the same sequence of floating-point operations in both, so
// results are bit-identical for any thread count.

#include <span>
#include <vector>

#include "lmmk/matrix.hpp"

namespace lmmk {

/// k nearest candidates of one anchor, ordered by (distance, index).
using NeighborList = std::vector<Index>;

enum class LabelFilter { Same, Different };

struct Vote {
  Label label = 0;
  std::vector<Index> neighbors;  // (distance, index) order
};

#define LMMK_COMPUTE_DECLARATIONS                                                         \
  /* |x_i - x_j| for one feature column. */                                               \
  Matrix absolute_difference_distances(std::span<const double> column);                  \
  Matrix cross_absolute_difference_distances(std::span<const double> test,                \
                                             std::span<const double> train);              \
  /* Euclidean distance between rows. */                                                  \
  Matrix euclidean_distances(const Matrix& rows);                                         \
  Matrix cross_euclidean_distances(const Matrix& test, const Matrix& train);              \
  /* Row sums in column order, then the total in row order, diagonal excluded. */        \
  double off_diagonal_sum(const Matrix& values);                                          \
  /* exp(-d^2 / delta) elementwise. */                                                    \
  Matrix gaussian(const Matrix& dist, double delta);                                      \
  Matrix normalize(const Matrix& raw, std::span<const double> row_diagonal,               \
                   std::span<const double> col_diagonal);                                 \
  /* sum_m beta_m K_m, accumulated over m in order. */                                    \
  Matrix weighted_sum(std::span<const Matrix> kernels, std::span<const double> beta);     \
  /* sum_m beta_m (Krow_m(i) + Kcol_m(j) - 2 K_m(i,j)), accumulated over m in order. */   \
  Matrix rkhs_distances(std::span<const Matrix> kernels, std::span<const Vector> row_diag, \
                        std::span<const Vector> col_diag, std::span<const double> beta);  \
  /* Per anchor, the k nearest other samples passing the label filter. */                 \
  std::vector<NeighborList> nearest_by_label(const Matrix& dist, const Labels& labels,    \
                                             int k, LabelFilter filter);                  \
  /* Majority vote among the k nearest training points of each query row. */             \
  std::vector<Vote> knn_vote(const Matrix& test_dist, const Labels& train_labels, int k);

namespace serial {
LMMK_COMPUTE_DECLARATIONS
}  // namespace serial

namespace omp {
LMMK_COMPUTE_DECLARATIONS
}  // namespace omp

#undef LMMK_COMPUTE_DECLARATIONS

}  // namespace lmmk
