#pragma once

#include <Eigen/Dense>

namespace igt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Eigen::Index;

}  // namespace igt
