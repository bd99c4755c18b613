#pragma once

#include <Eigen/Dense>
#include <limits>

namespace mcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Reach of a flat set (e.g. a line segment).
inline constexpr double kInfiniteReach = std::numeric_limits<double>::infinity();

}  // namespace mcs
