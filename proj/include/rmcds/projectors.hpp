#pragma once

#include <stdexcept>

#include "rmcds/index_set.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/model.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

/// Tangent space {U R^T + Q V^T} to the rank-r manifold at U diag(s) V^T.
struct TangentSpace {
  Matrix U;  // n x r, orthonormal columns
  Matrix V;  // n x r, orthonormal columns

  Index n() const { return U.rows(); }
  Index r() const { return U.cols(); }
};

inline TangentSpace tangent_space(const LowRankModel& model) {
  return TangentSpace{model.U, model.V};
}

namespace detail {
inline void check_square(const TangentSpace& t, Index rows, Index cols) {
  if (rows != t.n() || cols != t.n())
    throw std::invalid_argument("projector: matrix shape does not match tangent space");
}
}  // namespace detail

/// Orthogonal projection onto T: U U^T X + X V V^T - U U^T X V V^T.
template <typename Derived>
Matrix project_tangent(const TangentSpace& t, const Eigen::MatrixBase<Derived>& x) {
  detail::check_square(t, x.rows(), x.cols());
  const Matrix utx = t.U.transpose() * x;        // r x n
  const Matrix xv = x * t.V;                     // n x r
  Matrix out = t.U * utx;                        // U U^T X
  out.noalias() += (xv - t.U * (utx * t.V)) * t.V.transpose();
  return out;
}

template <typename Derived>
Matrix project_tangent_complement(const TangentSpace& t,
                                  const Eigen::MatrixBase<Derived>& x) {
  return x - project_tangent(t, x);
}

/// Copies entries on the set, zeroes the rest.
template <typename Derived>
Matrix project_mask(const IndexSet& set, const Eigen::MatrixBase<Derived>& x) {
  Matrix dense = x;  // materialize once so set lookups are O(1)
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& [i, j] : set.pairs()) {
    if (i < 0 || j < 0 || i >= x.rows() || j >= x.cols())
      throw std::invalid_argument("project_mask: index outside matrix");
    out(i, j) = dense(i, j);
  }
  return out;
}

template <typename Derived>
Matrix project_mask(const SamplingMask& mask, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != mask.n || x.cols() != mask.n)
    throw std::invalid_argument("project_mask: matrix shape does not match mask");
  return project_mask(mask.observed, x);
}

template <typename Derived>
Matrix project_mask_complement(const IndexSet& set, const Eigen::MatrixBase<Derived>& x) {
  Matrix out = x;
  for (const auto& [i, j] : set.pairs()) {
    if (i < 0 || j < 0 || i >= x.rows() || j >= x.cols())
      throw std::invalid_argument("project_mask_complement: index outside matrix");
    out(i, j) = 0.0;
  }
  return out;
}

template <typename Derived>
Matrix project_mask_complement(const SamplingMask& mask,
                               const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != mask.n || x.cols() != mask.n)
    throw std::invalid_argument("project_mask_complement: shape mismatch");
  return project_mask_complement(mask.observed, x);
}

}  // namespace rmcds
