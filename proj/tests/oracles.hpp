// Test-only oracles: dense operator assembly, explicit-basis projectors, and
// brute-force norms. Everything here goes through Eigen decompositions, never
// through the library's estimators, so the two routes stay independent.
#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <functional>
#include <vector>

#include "rmcds/index_set.hpp"
#include "rmcds/projectors.hpp"
#include "rmcds/rng.hpp"
#include "rmcds/types.hpp"

namespace rmcds::test {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Index n) {
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

/// Applies the map to every basis matrix; column j is vec(op(E_j)).
inline Matrix assemble_operator(const std::function<Matrix(const Matrix&)>& op, Index n) {
  Matrix a(n * n, n * n);
  for (Index j = 0; j < n * n; ++j) {
    Matrix e = Matrix::Zero(n, n);
    e(j % n, j / n) = 1.0;  // column-major basis ordering
    a.col(j) = vec(op(e));
  }
  return a;
}

inline double dense_max_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((sym + sym.transpose()) / 2.0);
  return es.eigenvalues().maxCoeff();
}

/// max |eigenvalue| of a symmetric matrix == its operator norm.
inline double dense_sym_opnorm(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((sym + sym.transpose()) / 2.0);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double dense_spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Orthonormal basis (as columns of an n^2-by-dim matrix) of the span of the
/// given vectorized generators, via rank-revealing QR.
inline Matrix orthonormal_span(const Matrix& generators) {
  Eigen::ColPivHouseholderQR<Matrix> qr(generators);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(generators.rows(), rank);
  return q;
}

/// Generators of the tangent space {U R^T + Q V^T}: u_k e_j^T and e_i v_k^T.
inline Matrix tangent_generators(const TangentSpace& t) {
  const Index n = t.n(), r = t.r();
  Matrix g(n * n, 2 * n * r);
  Index col = 0;
  for (Index k = 0; k < r; ++k)
    for (Index j = 0; j < n; ++j) {
      Matrix m = Matrix::Zero(n, n);
      m.col(j) = t.U.col(k);
      g.col(col++) = vec(m);
    }
  for (Index k = 0; k < r; ++k)
    for (Index i = 0; i < n; ++i) {
      Matrix m = Matrix::Zero(n, n);
      m.row(i) = t.V.col(k).transpose();
      g.col(col++) = vec(m);
    }
  return g;
}

/// Explicit-basis projector onto T as an n^2-by-n^2 matrix.
inline Matrix dense_tangent_projector(const TangentSpace& t) {
  const Matrix q = orthonormal_span(tangent_generators(t));
  return q * q.transpose();
}

/// Explicit-basis projector onto T + O^perp.
inline Matrix dense_sum_space_projector(const TangentSpace& t, const IndexSet& o_set) {
  const Index n = t.n();
  const IndexSet oc = o_set.complement(n);
  const Matrix gen_t = tangent_generators(t);
  Matrix g(n * n, gen_t.cols() + oc.size());
  g.leftCols(gen_t.cols()) = gen_t;
  Index col = gen_t.cols();
  for (const auto& [i, j] : oc.pairs()) {
    Matrix e = Matrix::Zero(n, n);
    e(i, j) = 1.0;
    g.col(col++) = vec(e);
  }
  const Matrix q = orthonormal_span(g);
  return q * q.transpose();
}

}  // namespace rmcds::test
