#include "lmmk/kernelspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "lmmk/compute.hpp"
#include "lmmk/error.hpp"

namespace lmmk {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kUnitDiagonalTolerance = 1e-12;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be non-empty and square, got " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

// Symmetrizes in place when asymmetry is within tolerance.
void symmetrize(Matrix& m, const char* what) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i + 1; j < m.cols(); ++j) {
      const double a = m(i, j);
      const double b = m(j, i);
      if (a == b) continue;
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) > kSymmetryTolerance * scale)
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not symmetric at (" +
                                                    std::to_string(i) + "," + std::to_string(j) + ")");
      const double mid = 0.5 * (a + b);
      m(i, j) = mid;
      m(j, i) = mid;
    }
}

void require_weights(const KernelSet& ks, const KernelWeights& w) {
  if (w.size() != ks.n_kernels())
    throw Error(ErrorCode::DimensionMismatch, "weights have length " + std::to_string(w.size()) +
                                                  ", kernel set has " + std::to_string(ks.n_kernels()));
}

void require_index(Index i, Index n, const char* what) {
  if (i < 0 || i >= n)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " index " + std::to_string(i) + " out of range [0," + std::to_string(n) + ")");
}

std::vector<Vector> diagonals(const KernelSet& ks) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(ks.n_kernels()));
  for (Index m = 0; m < ks.n_kernels(); ++m) out.push_back(ks.diagonal(m));
  return out;
}

}  // namespace

DistanceMatrix::DistanceMatrix(Matrix values) : values_(std::move(values)) {
  require_square(values_, "distance matrix");
  require_finite(values_, "distance matrix");
  for (Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_(i, i)) > kUnitDiagonalTolerance)
      throw Error(ErrorCode::InvalidArgument,
                  "distance matrix diagonal entry " + std::to_string(i) + " is not zero");
    values_(i, i) = 0.0;
  }
  if ((values_.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "distance matrix has negative entries");
  symmetrize(values_, "distance matrix");
}

KernelMatrix::KernelMatrix(Matrix values) : values_(std::move(values)) {
  require_square(values_, "kernel matrix");
  require_finite(values_, "kernel matrix");
  symmetrize(values_, "kernel matrix");
}

bool KernelMatrix::is_normalized() const {
  return ((values_.diagonal().array() - 1.0).abs() <= kUnitDiagonalTolerance).all();
}

KernelSet::KernelSet(std::vector<KernelMatrix> kernels, std::vector<std::string> names)
    : names_(std::move(names)) {
  if (kernels.empty()) throw Error(ErrorCode::InvalidArgument, "kernel set needs at least one kernel");
  if (names_.empty()) {
    for (std::size_t m = 0; m < kernels.size(); ++m) names_.push_back("k" + std::to_string(m));
  }
  if (names_.size() != kernels.size())
    throw Error(ErrorCode::DimensionMismatch, "kernel names and kernels differ in count");
  const Index n = kernels.front().size();
  kernels_.reserve(kernels.size());
  for (std::size_t m = 0; m < kernels.size(); ++m) {
    if (kernels[m].size() != n)
      throw Error(ErrorCode::DimensionMismatch, "kernel '" + names_[m] + "' has " +
                                                    std::to_string(kernels[m].size()) +
                                                    " samples, expected " + std::to_string(n));
    if (!kernels[m].is_normalized())
      throw Error(ErrorCode::InvalidArgument, "kernel '" + names_[m] + "' is not normalized");
    kernels_.push_back(kernels[m].values());
  }
}

CrossKernelSet::CrossKernelSet(std::vector<Matrix> kernels, std::vector<Vector> self_values)
    : kernels_(std::move(kernels)), self_values_(std::move(self_values)) {
  if (kernels_.empty()) throw Error(ErrorCode::InvalidArgument, "cross kernel set needs at least one kernel");
  if (self_values_.size() != kernels_.size())
    throw Error(ErrorCode::DimensionMismatch, "cross kernels and self values differ in count");
  for (std::size_t m = 0; m < kernels_.size(); ++m) {
    if (kernels_[m].rows() != kernels_.front().rows() || kernels_[m].cols() != kernels_.front().cols() ||
        self_values_[m].size() != kernels_[m].rows())
      throw Error(ErrorCode::DimensionMismatch, "cross kernel " + std::to_string(m) + " has inconsistent shape");
    if (!kernels_[m].allFinite() || !self_values_[m].allFinite())
      throw Error(ErrorCode::InvalidArgument, "cross kernel " + std::to_string(m) + " has non-finite entries");
  }
}

KernelWeights::KernelWeights(std::vector<double> beta, std::optional<double> zero_tolerance)
    : beta_(std::move(beta)) {
  for (double b : beta_)
    if (!std::isfinite(b) || b < 0.0)
      throw Error(ErrorCode::InvalidArgument, "kernel weights must be finite and non-negative");
  zero_tolerance_ = zero_tolerance.value_or(default_tolerance(beta_));
}

double KernelWeights::default_tolerance(std::span<const double> beta) {
  double largest = 1.0;
  for (double b : beta) largest = std::max(largest, b);
  return 1e-6 * largest;
}

double KernelWeights::sum() const { return std::accumulate(beta_.begin(), beta_.end(), 0.0); }

bool KernelWeights::all_zero() const {
  return std::all_of(beta_.begin(), beta_.end(), [](double b) { return b == 0.0; });
}

double compute_bandwidth(const DistanceMatrix& dist) {
  const Index n = dist.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "bandwidth needs at least 2 samples");
  const double total = omp::off_diagonal_sum(dist.values());
  if (total == 0.0) throw Error(ErrorCode::AllZeroDistances, "every off-diagonal distance is zero");
  return total / static_cast<double>(n * (n - 1));
}

KernelMatrix gaussian_kernel(const DistanceMatrix& dist, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCode::NonPositiveBandwidth, "bandwidth must be positive, got " + std::to_string(delta));
  return KernelMatrix(omp::gaussian(dist.values(), delta));
}

Matrix gaussian_cross_kernel(const Matrix& cross_dist, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCode::NonPositiveBandwidth, "bandwidth must be positive, got " + std::to_string(delta));
  if ((cross_dist.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "cross distances must be non-negative");
  return omp::gaussian(cross_dist, delta);
}

KernelMatrix normalize_kernel(const KernelMatrix& raw) {
  const Vector diag = raw.values().diagonal();
  for (Index i = 0; i < diag.size(); ++i)
    if (!(diag(i) > 0.0))
      throw Error(ErrorCode::NonPositiveDiagonal, "diagonal entry " + std::to_string(i) + " is " +
                                                      std::to_string(diag(i)));
  std::span<const double> d(diag.data(), static_cast<std::size_t>(diag.size()));
  Matrix out = omp::normalize(raw.values(), d, d);
  // sqrt(a*a) may differ from a in the last bit.
  out.diagonal().setOnes();
  return KernelMatrix(std::move(out));
}

Matrix normalize_cross_kernel(const Matrix& cross, std::span<const double> train_diagonal,
                              std::span<const double> test_self) {
  if (static_cast<Index>(train_diagonal.size()) != cross.cols() ||
      static_cast<Index>(test_self.size()) != cross.rows())
    throw Error(ErrorCode::DimensionMismatch, "cross kernel shape does not match diagonals");
  for (double v : train_diagonal)
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDiagonal, "training diagonal has a non-positive entry");
  for (double v : test_self)
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDiagonal, "query self value is non-positive");
  return omp::normalize(cross, test_self, train_diagonal);
}

KernelMatrix combine_kernels(const KernelSet& ks, const KernelWeights& w) {
  require_weights(ks, w);
  return KernelMatrix(omp::weighted_sum(ks.kernels(), w.beta()));
}

double rkhs_distance(const KernelSet& ks, const KernelWeights& w, Index i, Index j) {
  require_weights(ks, w);
  require_index(i, ks.n_samples(), "sample");
  require_index(j, ks.n_samples(), "sample");
  double acc = 0.0;
  for (Index m = 0; m < ks.n_kernels(); ++m) {
    const Matrix& k = ks.kernel(m);
    acc += w[m] * (k(i, i) + k(j, j) - 2.0 * k(i, j));
  }
  return acc;
}

double rkhs_distance_to_test(const CrossKernelSet& cross, const KernelSet& ks, const KernelWeights& w,
                             Index t, Index i) {
  require_weights(ks, w);
  if (cross.n_kernels() != ks.n_kernels() || cross.n_train() != ks.n_samples())
    throw Error(ErrorCode::DimensionMismatch, "cross kernels are not aligned with the training kernels");
  require_index(t, cross.n_test(), "test");
  require_index(i, ks.n_samples(), "training");
  double acc = 0.0;
  for (Index m = 0; m < ks.n_kernels(); ++m) {
    acc += w[m] * (cross.self_values()[static_cast<std::size_t>(m)](t) + ks.kernel(m)(i, i) -
                   2.0 * cross.kernel(m)(t, i));
  }
  return acc;
}

Matrix pairwise_distances(const KernelSet& ks, const KernelWeights& w) {
  require_weights(ks, w);
  const auto diag = diagonals(ks);
  return omp::rkhs_distances(ks.kernels(), diag, diag, w.beta());
}

Matrix test_distances(const CrossKernelSet& cross, const KernelSet& ks, const KernelWeights& w) {
  require_weights(ks, w);
  if (cross.n_kernels() != ks.n_kernels() || cross.n_train() != ks.n_samples())
    throw Error(ErrorCode::DimensionMismatch, "cross kernels are not aligned with the training kernels");
  const auto diag = diagonals(ks);
  return omp::rkhs_distances(cross.kernels(), cross.self_values(), diag, w.beta());
}

std::optional<double> min_eigenvalue(const KernelMatrix& k, Index max_size) {
  if (k.size() > max_size) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.values(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool check_psd(const KernelMatrix& k, const std::string& name, double tolerance) {
  const auto smallest = min_eigenvalue(k);
  if (!smallest) return true;
  if (*smallest < -tolerance) {
    spdlog::warn("kernel '{}' is not positive semidefinite (smallest eigenvalue {:.3e})", name, *smallest);
    return false;
  }
  return true;
}

}  // namespace lmmk
