#pragma once

#include <Eigen/Dense>

namespace ibd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Max |M(i,j) - M(j,i)|.
inline double asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace ibd
