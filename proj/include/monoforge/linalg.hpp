#pragma once

#include <Eigen/Dense>

namespace monoforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace monoforge
