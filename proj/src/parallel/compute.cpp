// OpenMP versions of the building blocks in compute.hpp. Square symmetric
// outputs compute the upper triangle and mirror it; reductions keep the
// reference order (row partials, then rows in order).

#include <algorithm>
#include <cmath>
#include <utility>

#include "lmmk/compute.hpp"

namespace lmmk::omp {

namespace {

// Rows are uneven for triangular loops.
constexpr int kChunk = 8;

bool closer(const std::pair<double, Index>& a, const std::pair<double, Index>& b) {
  return a.first < b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

Matrix absolute_difference_distances(std::span<const double> column) {
  const auto n = static_cast<Index>(column.size());
  Matrix out(n, n);
#pragma omp parallel for schedule(dynamic, kChunk)
  for (Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = std::abs(column[i] - column[j]);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

Matrix cross_absolute_difference_distances(std::span<const double> test,
                                           std::span<const double> train) {
  const auto nt = static_cast<Index>(test.size());
  const auto nr = static_cast<Index>(train.size());
  Matrix out(nt, nr);
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < nt; ++t)
    for (Index i = 0; i < nr; ++i) out(t, i) = std::abs(test[t] - train[i]);
  return out;
}

Matrix euclidean_distances(const Matrix& rows) {
  const Index n = rows.rows();
  Matrix out(n, n);
#pragma omp parallel for schedule(dynamic, kChunk)
  for (Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      // The reference computes (i,j) as sum of (x_i - x_j)^2; the square of
      // a negated difference is identical, so (j,i) may reuse it.
      double acc = 0.0;
      for (Index f = 0; f < rows.cols(); ++f) {
        const double diff = rows(i, f) - rows(j, f);
        acc += diff * diff;
      }
      const double d = std::sqrt(acc);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

Matrix cross_euclidean_distances(const Matrix& test, const Matrix& train) {
  Matrix out(test.rows(), train.rows());
#pragma omp parallel for schedule(static)
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
  std::vector<double> rows(static_cast<std::size_t>(values.rows()), 0.0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < values.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < values.cols(); ++j)
      if (i != j) row += values(i, j);
    rows[static_cast<std::size_t>(i)] = row;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

Matrix gaussian(const Matrix& dist, double delta) {
  Matrix out(dist.rows(), dist.cols());
#pragma omp parallel for schedule(static)
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
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < raw.rows(); ++i)
    for (Index j = 0; j < raw.cols(); ++j)
      out(i, j) = raw(i, j) / std::sqrt(row_diagonal[i] * col_diagonal[j]);
  return out;
}

Matrix weighted_sum(std::span<const Matrix> kernels, std::span<const double> beta) {
  const Index rows = kernels.front().rows();
  const Index cols = kernels.front().cols();
  Matrix out = Matrix::Zero(rows, cols);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    auto row = out.row(i);
    for (std::size_t m = 0; m < kernels.size(); ++m) {
      const auto src = kernels[m].row(i);
      for (Index j = 0; j < cols; ++j) row(j) += beta[m] * src(j);
    }
  }
  return out;
}

Matrix rkhs_distances(std::span<const Matrix> kernels, std::span<const Vector> row_diag,
                      std::span<const Vector> col_diag, std::span<const double> beta) {
  const Index rows = kernels.front().rows();
  const Index cols = kernels.front().cols();
  Matrix out = Matrix::Zero(rows, cols);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    auto row = out.row(i);
    for (std::size_t m = 0; m < kernels.size(); ++m) {
      const auto src = kernels[m].row(i);
      const double di = row_diag[m](i);
      const auto& dj = col_diag[m];
      const double b = beta[m];
      for (Index j = 0; j < cols; ++j) row(j) += b * (di + dj(j) - 2.0 * src(j));
    }
  }
  return out;
}

std::vector<NeighborList> nearest_by_label(const Matrix& dist, const Labels& labels, int k,
                                           LabelFilter filter) {
  const Index n = dist.rows();
  std::vector<NeighborList> out(static_cast<std::size_t>(n));
#pragma omp parallel
  {
    std::vector<std::pair<double, Index>> candidates;
#pragma omp for schedule(dynamic, kChunk)
    for (Index i = 0; i < n; ++i) {
      candidates.clear();
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool same = labels[j] == labels[i];
        if (same == (filter == LabelFilter::Same)) candidates.emplace_back(dist(i, j), j);
      }
      const auto take = std::min(candidates.size(), static_cast<std::size_t>(k));
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<Index>(take),
                        candidates.end(), closer);
      auto& list = out[static_cast<std::size_t>(i)];
      list.reserve(take);
      for (std::size_t r = 0; r < take; ++r) list.push_back(candidates[r].second);
    }
  }
  return out;
}

std::vector<Vote> knn_vote(const Matrix& test_dist, const Labels& train_labels, int k) {
  std::vector<Vote> out(static_cast<std::size_t>(test_dist.rows()));
  Label max_label = 0;
  for (Label l : train_labels) max_label = std::max(max_label, l);

#pragma omp parallel
  {
    std::vector<std::pair<double, Index>> all;
    std::vector<int> votes(static_cast<std::size_t>(max_label) + 1);
    std::vector<double> sums(static_cast<std::size_t>(max_label) + 1);
#pragma omp for schedule(static)
    for (Index t = 0; t < test_dist.rows(); ++t) {
      all.clear();
      for (Index i = 0; i < test_dist.cols(); ++i) all.emplace_back(test_dist(t, i), i);
      const auto take = std::min(all.size(), static_cast<std::size_t>(k));
      std::partial_sort(all.begin(), all.begin() + static_cast<Index>(take), all.end(), closer);

      std::fill(votes.begin(), votes.end(), 0);
      std::fill(sums.begin(), sums.end(), 0.0);
      auto& vote = out[static_cast<std::size_t>(t)];
      for (std::size_t r = 0; r < take; ++r) {
        const auto label = static_cast<std::size_t>(train_labels[all[r].second]);
        votes[label] += 1;
        sums[label] += all[r].first;
        vote.neighbors.push_back(all[r].second);
      }
      int best_votes = -1;
      double best_sum = 0.0;
      for (std::size_t label = 0; label < votes.size(); ++label) {
        if (votes[label] == 0) continue;
        if (votes[label] > best_votes || (votes[label] == best_votes && sums[label] < best_sum)) {
          vote.label = static_cast<Label>(label);
          best_votes = votes[label];
          best_sum = sums[label];
        }
      }
    }
  }
  return out;
}

}  // namespace lmmk::omp
