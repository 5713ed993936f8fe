#pragma once

#include <Eigen/Core>

namespace rmcds {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry; 0 for empty matrices.
inline double inf_norm(const Matrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

/// Entrywise l1 norm.
inline double l1_norm(const Matrix& x) { return x.cwiseAbs().sum(); }

}  // namespace rmcds
