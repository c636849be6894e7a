// Reference implementations. Plain loops over every entry, no symmetry
// shortcuts, full sorts for neighbor selection.

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "lmmk/compute.hpp"

namespace lmmk::serial {

Matrix absolute_difference_distances(std::span<const double> column) {
  const auto n = static_cast<Index>(column.size());
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = std::abs(column[i] - column[j]);
  return out;
}

Matrix cross_absolute_difference_distances(std::span<const double> test,
                                           std::span<const double> train) {
  const auto nt = static_cast<Index>(test.size());
  const auto nr = static_cast<Index>(train.size());
  Matrix out(nt, nr);
  for (Index t = 0; t < nt; ++t)
    for (Index i = 0; i < nr; ++i) out(t, i) = std::abs(test[t] - train[i]);
  return out;
}

Matrix euclidean_distances(const Matrix& rows) { return cross_euclidean_distances(rows, rows); }

Matrix cross_euclidean_distances(const Matrix& test, const Matrix& train) {
  Matrix out(test.rows(), train.rows());
  for (Index t = 0; t < test.rows(); ++t) {
    for (Index i = 0; i < train.rows(); ++i) {
      double acc = 0.0;
      for (Index f = 0; f < test.cols(); ++f) {
        const double diff = test(t, f) - train(i, f);
        acc += diff * diff;
      }
      out(t, i) = std::sqrt(acc);
    }
  }
  return out;
}

double off_diagonal_sum(const Matrix& values) {
  double total = 0.0;
  for (Index i = 0; i < values.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < values.cols(); ++j)
      if (i != j) row += values(i, j);
    total += row;
  }
  return total;
}

Matrix gaussian(const Matrix& dist, double delta) {
  Matrix out(dist.rows(), dist.cols());
  for (Index i = 0; i < dist.rows(); ++i)
    for (Index j = 0; j < dist.cols(); ++j) {
      const double d = dist(i, j);
      out(i, j) = std::exp(-(d * d) / delta);
    }
  return out;
}

Matrix normalize(const Matrix& raw, std::span<const double> row_diagonal,
                 std::span<const double> col_diagonal) {
  Matrix out(raw.rows(), raw.cols());
  for (Index i = 0; i < raw.rows(); ++i)
    for (Index j = 0; j < raw.cols(); ++j)
      out(i, j) = raw(i, j) / std::sqrt(row_diagonal[i] * col_diagonal[j]);
  return out;
}

Matrix weighted_sum(std::span<const Matrix> kernels, std::span<const double> beta) {
  const Index rows = kernels.front().rows();
  const Index cols = kernels.front().cols();
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < kernels.size(); ++m) acc += beta[m] * kernels[m](i, j);
      out(i, j) = acc;
    }
  return out;
}

Matrix rkhs_distances(std::span<const Matrix> kernels, std::span<const Vector> row_diag,
                      std::span<const Vector> col_diag, std::span<const double> beta) {
  const Index rows = kernels.front().rows();
  const Index cols = kernels.front().cols();
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < kernels.size(); ++m)
        acc += beta[m] * (row_diag[m](i) + col_diag[m](j) - 2.0 * kernels[m](i, j));
      out(i, j) = acc;
    }
  return out;
}

std::vector<NeighborList> nearest_by_label(const Matrix& dist, const Labels& labels, int k,
                                           LabelFilter filter) {
  const Index n = dist.rows();
  std::vector<NeighborList> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> candidates;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const bool same = labels[j] == labels[i];
      if (same == (filter == LabelFilter::Same)) candidates.emplace_back(dist(i, j), j);
    }
    std::sort(candidates.begin(), candidates.end());
    const auto take = std::min(candidates.size(), static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < take; ++r) out[i].push_back(candidates[r].second);
  }
  return out;
}

std::vector<Vote> knn_vote(const Matrix& test_dist, const Labels& train_labels, int k) {
  std::vector<Vote> out(static_cast<std::size_t>(test_dist.rows()));
  for (Index t = 0; t < test_dist.rows(); ++t) {
    std::vector<std::pair<double, Index>> all;
    for (Index i = 0; i < test_dist.cols(); ++i) all.emplace_back(test_dist(t, i), i);
    std::sort(all.begin(), all.end());
    const auto take = std::min(all.size(), static_cast<std::size_t>(k));

    // label -> (votes, summed distance)
    std::map<Label, std::pair<int, double>> tally;
    for (std::size_t r = 0; r < take; ++r) {
      auto& entry = tally[train_labels[all[r].second]];
      entry.first += 1;
      entry.second += all[r].first;
      out[t].neighbors.push_back(all[r].second);
    }
    Label best = 0;
    int best_votes = -1;
    double best_sum = 0.0;
    for (const auto& [label, entry] : tally) {
      if (entry.first > best_votes || (entry.first == best_votes && entry.second < best_sum)) {
        best = label;
        best_votes = entry.first;
        best_sum = entry.second;
      }
    }
    out[t].label = best;
  }
  return out;
}

}  // namespace lmmk::serial
