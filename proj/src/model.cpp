#include "rmcds/model.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmcds/rng.hpp"

namespace rmcds {

Matrix orthonormalize_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  for (Index c = 0; c < q.cols(); ++c) {
    for (Index k = 0; k < q.rows(); ++k) {
      if (q(k, c) != 0.0) {
        if (q(k, c) < 0.0) q.col(c) = -q.col(c);
        break;
      }
    }
  }
  return q;
}

LowRankModel generate_low_rank(Index n, Index r, std::uint64_t seed) {
  if (r < 1 || r > n) throw std::invalid_argument("generate_low_rank: need 1 <= r <= n");
  Rng rng(seed);
  Matrix gu(n, r), gv(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) gu(i, j) = rng.normal();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) gv(i, j) = rng.normal();
  Vector sigma(r);
  for (Index k = 0; k < r; ++k) sigma(k) = rng.uniform(1.0, 2.0);
  std::sort(sigma.data(), sigma.data() + r, std::greater<double>());
  return LowRankModel{n, r, orthonormalize_columns(gu), std::move(sigma),
                      orthonormalize_columns(gv)};
}

IncoherenceReport incoherence(const LowRankModel& model) {
  const double row_u = model.U.rowwise().squaredNorm().maxCoeff();
  const double row_v = model.V.rowwise().squaredNorm().maxCoeff();
  const double n = static_cast<double>(model.n);
  const double r = static_cast<double>(model.r);
  IncoherenceReport rep;
  rep.nu = (n / r) * std::max(row_u, row_v);
  rep.uv_inf = (model.U * model.V.transpose()).cwiseAbs().maxCoeff();
  const double logn = std::log(n);
  const double bound = logn > 0.0 ? std::sqrt(rep.nu * r) / (n * std::sqrt(logn))
                                  : std::numeric_limits<double>::infinity();
  rep.passes_strong = rep.uv_inf <= bound;
  return rep;
}

}  // namespace rmcds
