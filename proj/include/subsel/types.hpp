#pragma once

#include <Eigen/Dense>

namespace subsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace subsel
