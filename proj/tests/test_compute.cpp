// The OpenMP kernels must reproduce the serial reference bit for bit at any
// thread count.

#include <gtest/gtest.h>

#include <random>

#include "lmmk/compute.hpp"
#include "lmmk/parallel.hpp"

using namespace lmmk;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Index r, Index c, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

Labels random_labels(std::mt19937_64& rng, Index n, int c) {
  std::uniform_int_distribution<int> u(1, c);
  Labels l(static_cast<std::size_t>(n));
  for (auto& x : l) x = u(rng);
  return l;
}

class ThreadCounts : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override { parallel::set_thread_limit(GetParam()); }
  void TearDown() override { parallel::set_thread_limit(1); }
};

void expect_identical(const Matrix& a, const Matrix& b) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) ASSERT_EQ(a(i, j), b(i, j)) << i << "," << j;
}

}  // namespace

TEST_P(ThreadCounts, Distances) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(rng, 37, 4), z = random_matrix(rng, 11, 4);
  std::vector<double> col(37), test(11);
  for (Index i = 0; i < 37; ++i) col[static_cast<std::size_t>(i)] = x(i, 2);
  for (Index i = 0; i < 11; ++i) test[static_cast<std::size_t>(i)] = z(i, 2);
  expect_identical(serial::absolute_difference_distances(col), omp::absolute_difference_distances(col));
  expect_identical(serial::cross_absolute_difference_distances(test, col),
                   omp::cross_absolute_difference_distances(test, col));
  expect_identical(serial::euclidean_distances(x), omp::euclidean_distances(x));
  expect_identical(serial::cross_euclidean_distances(z, x), omp::cross_euclidean_distances(z, x));
  EXPECT_EQ(serial::off_diagonal_sum(serial::euclidean_distances(x)),
            omp::off_diagonal_sum(omp::euclidean_distances(x)));
}

TEST_P(ThreadCounts, KernelsAndCombinations) {
  std::mt19937_64 rng(2);
  const Matrix dist = serial::euclidean_distances(random_matrix(rng, 29, 3));
  expect_identical(serial::gaussian(dist, 1.7), omp::gaussian(dist, 1.7));
  const Matrix raw = random_matrix(rng, 9, 13, 0.5, 2.0);
  std::vector<double> rd(9), cd(13);
  for (auto& v : rd) v = std::uniform_real_distribution<double>(1.0, 3.0)(rng);
  for (auto& v : cd) v = std::uniform_real_distribution<double>(1.0, 3.0)(rng);
  expect_identical(serial::normalize(raw, rd, cd), omp::normalize(raw, rd, cd));

  std::vector<Matrix> ks;
  std::vector<Vector> row_diag, col_diag;
  for (int m = 0; m < 5; ++m) {
    ks.push_back(random_matrix(rng, 21, 17));
    row_diag.push_back(Vector::Ones(21));
    col_diag.push_back(Vector::Ones(17));
  }
  const std::vector<double> beta{0.3, 0.0, 1.2, 2.5, 1e-3};
  expect_identical(serial::weighted_sum(ks, beta), omp::weighted_sum(ks, beta));
  expect_identical(serial::rkhs_distances(ks, row_diag, col_diag, beta),
                   omp::rkhs_distances(ks, row_diag, col_diag, beta));
}

TEST_P(ThreadCounts, NeighborSelectionAndVotes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix dist = serial::euclidean_distances(random_matrix(rng, 40, 2));
    // Coarse rounding creates many ties.
    dist = (dist.array() * 2.0).round() / 2.0;
    const Labels labels = random_labels(rng, 40, 3);
    for (int k : {1, 3, 6}) {
      EXPECT_EQ(serial::nearest_by_label(dist, labels, k, LabelFilter::Same),
                omp::nearest_by_label(dist, labels, k, LabelFilter::Same));
      EXPECT_EQ(serial::nearest_by_label(dist, labels, k, LabelFilter::Different),
                omp::nearest_by_label(dist, labels, k, LabelFilter::Different));
      const Matrix test = (random_matrix(rng, 15, 40, 0.0, 3.0).array() * 2.0).round() / 2.0;
      const auto a = serial::knn_vote(test, labels, k);
      const auto b = omp::knn_vote(test, labels, k);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t t = 0; t < a.size(); ++t) {
        EXPECT_EQ(a[t].label, b[t].label);
        EXPECT_EQ(a[t].neighbors, b[t].neighbors);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Compute, ThreadCounts, ::testing::Values(1, 2, 4));
