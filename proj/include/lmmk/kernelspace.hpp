#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmmk/matrix.hpp"

namespace lmmk {

/// Pairwise dissimilarities for one representation. Symmetric, zero
/// diagonal, non-negative and finite; validated on construction.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  Matrix values_;
};

/// Square symmetric kernel matrix. Near-symmetric input (relative error
/// below 1e-9) is symmetrized exactly.
class KernelMatrix {
 public:
  explicit KernelMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

  /// Unit diagonal within 1e-12.
  bool is_normalized() const;

 private:
  Matrix values_;
};

/// d normalized base kernels over the same N training samples.
class KernelSet {
 public:
  KernelSet(std::vector<KernelMatrix> kernels, std::vector<std::string> names);

  Index n_kernels() const noexcept { return static_cast<Index>(kernels_.size()); }
  Index n_samples() const noexcept { return kernels_.front().rows(); }
  const Matrix& kernel(Index m) const { return kernels_[static_cast<std::size_t>(m)]; }
  std::span<const Matrix> kernels() const noexcept { return kernels_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Diagonal of kernel m (all ones for a valid set).
  Vector diagonal(Index m) const { return kernel(m).diagonal(); }

 private:
  std::vector<Matrix> kernels_;
  std::vector<std::string> names_;
};

/// Kernel values between N_test query points and the N_train training
/// samples, one matrix per base kernel, plus K_m(z, z) per query.
class CrossKernelSet {
 public:
  CrossKernelSet(std::vector<Matrix> kernels, std::vector<Vector> self_values);

  Index n_kernels() const noexcept { return static_cast<Index>(kernels_.size()); }
  Index n_test() const noexcept { return kernels_.front().rows(); }
  Index n_train() const noexcept { return kernels_.front().cols(); }
  const Matrix& kernel(Index m) const { return kernels_[static_cast<std::size_t>(m)]; }
  std::span<const Matrix> kernels() const noexcept { return kernels_; }
  std::span<const Vector> self_values() const noexcept { return self_values_; }

 private:
  std::vector<Matrix> kernels_;
  std::vector<Vector> self_values_;
};

/// Non-negative kernel weights (the diagonal of the feature-space metric).
class KernelWeights {
 public:
  /// Tolerance defaults to 1e-6 * max(max beta, 1).
  explicit KernelWeights(std::vector<double> beta,
                         std::optional<double> zero_tolerance = std::nullopt);

  std::span<const double> beta() const noexcept { return beta_; }
  Index size() const noexcept { return static_cast<Index>(beta_.size()); }
  double operator[](Index m) const { return beta_[static_cast<std::size_t>(m)]; }
  double zero_tolerance() const noexcept { return zero_tolerance_; }
  double sum() const;
  bool all_zero() const;

  static double default_tolerance(std::span<const double> beta);

 private:
  std::vector<double> beta_;
  double zero_tolerance_;
};

/// Mean of the off-diagonal entries. Throws AllZeroDistances when every
/// off-diagonal entry is zero.
double compute_bandwidth(const DistanceMatrix& dist);

/// K_ij = exp(-dist_ij^2 / delta).
KernelMatrix gaussian_kernel(const DistanceMatrix& dist, double delta);

/// Gaussian kernel between query points and training points using the
/// bandwidth frozen on the training set.
Matrix gaussian_cross_kernel(const Matrix& cross_dist, double delta);

/// K'_ij = K_ij / sqrt(K_ii K_jj).
KernelMatrix normalize_kernel(const KernelMatrix& raw);

/// Normalizes query-vs-train values with the raw training diagonal and raw
/// query self values. The normalized query self values are all 1.
Matrix normalize_cross_kernel(const Matrix& cross, std::span<const double> train_diagonal,
                              std::span<const double> test_self);

KernelMatrix combine_kernels(const KernelSet& ks, const KernelWeights& w);

/// sum_m beta_m (K_m(i,i) + K_m(j,j) - 2 K_m(i,j)).
double rkhs_distance(const KernelSet& ks, const KernelWeights& w, Index i, Index j);

/// sum_m beta_m (K_m(z,z) + K_m(x_i,x_i) - 2 K_m(z,x_i)).
double rkhs_distance_to_test(const CrossKernelSet& cross, const KernelSet& ks,
                             const KernelWeights& w, Index t, Index i);

/// All N x N training distances under w.
Matrix pairwise_distances(const KernelSet& ks, const KernelWeights& w);

/// All N_test x N_train query distances under w.
Matrix test_distances(const CrossKernelSet& cross, const KernelSet& ks, const KernelWeights& w);

/// Smallest eigenvalue, or nullopt when the matrix is larger than
/// `max_size` and the check is skipped.
std::optional<double> min_eigenvalue(const KernelMatrix& k, Index max_size = 2000);

/// Logs a warning when the smallest eigenvalue is below -tolerance.
/// Returns false only when the check ran and failed.
bool check_psd(const KernelMatrix& k, const std::string& name, double tolerance = 1e-8);

}  // namespace lmmk
