#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace lmmk {

/// Dense row-major storage used for every N x N and N_test x N_train array.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Index = std::ptrdiff_t;

/// Class ids are 1..c.
using Label = int;
using Labels = std::vector<Label>;

}  // namespace lmmk
