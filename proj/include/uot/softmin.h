#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "uot/measures.h"

namespace uot {

// log sum_i exp(u_i), factoring out the largest term. Empty input gives -inf.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::ArrayBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  if (u.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar m = u.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((u - m).exp().sum());
}

// -eps log sum_i w_i exp(-h_i / eps), given log-weights.
template <typename DerivedW, typename DerivedH>
typename DerivedH::Scalar softmin(typename DerivedH::Scalar eps, const Eigen::MatrixBase<DerivedW>& log_weights,
                                  const Eigen::MatrixBase<DerivedH>& h) {
  return -eps * log_sum_exp(log_weights.array() - h.array() / eps);
}

// Smin_m(h) = -eps log <m, exp(-h / eps)>. Throws DomainError on the null measure.
double softmin(double eps, const DiscreteMeasure& m, const Vector& h);

}  // namespace uot
