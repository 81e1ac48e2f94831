#include "uot/measures.h"

#include <cmath>
#include <string>

#include "uot/errors.h"

namespace uot {

DiscreteMeasure::DiscreteMeasure(const Vector& weights, const Points& points) {
  if (weights.size() != points.rows())
    throw InvalidMeasure("weights and points differ in length: " + std::to_string(weights.size()) + " vs " +
                         std::to_string(points.rows()));
  Index kept = 0;
  for (Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidMeasure("weight " + std::to_string(i) + " is negative or not finite");
    if (w > 0.0) ++kept;
  }
  if (!points.allFinite()) throw InvalidMeasure("non-finite coordinate");

  weights_.resize(kept);
  points_.resize(kept, points.cols());
  Index k = 0;
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      weights_[k] = weights[i];
      points_.row(k) = points.row(i);
      ++k;
    }
  }
}

DiscreteMeasure DiscreteMeasure::null(Index dim) { return DiscreteMeasure(Vector(0), Points(0, dim)); }

DiscreteMeasure new_measure(const std::vector<double>& weights, const std::vector<std::vector<double>>& points) {
  if (weights.size() != points.size()) throw InvalidMeasure("weights and points differ in length");
  const Index n = static_cast<Index>(points.size());
  const Index d = points.empty() ? 0 : static_cast<Index>(points.front().size());
  Points pts(n, d);
  for (Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    if (static_cast<Index>(p.size()) != d) throw InvalidMeasure("point " + std::to_string(i) + " has inconsistent dimension");
    for (Index k = 0; k < d; ++k) pts(i, k) = p[static_cast<std::size_t>(k)];
  }
  return DiscreteMeasure(Eigen::Map<const Vector>(weights.data(), n), pts);
}

double total_mass(const DiscreteMeasure& m) { return m.weights().sum(); }

CostSpec CostSpec::sq_euclidean(double scale) {
  if (!(scale > 0.0)) throw DomainError("cost scale must be positive");
  return {Kind::SqEuclidean, 2.0, scale};
}

CostSpec CostSpec::euclidean_pow(double p, double scale) {
  if (!(p >= 1.0)) throw DomainError("cost exponent must be >= 1");
  if (!(scale > 0.0)) throw DomainError("cost scale must be positive");
  return {Kind::EuclideanPow, p, scale};
}

Vector CostSpec::grad_x(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
  const Vector diff = x - y;
  if (kind_ == Kind::SqEuclidean) return 2.0 * scale_ * diff;
  const double r = diff.norm();
  if (r == 0.0) {
    if (power_ == 1.0) throw DomainError("|x - y| is not differentiable at x = y");
    return Vector::Zero(x.size());
  }
  return scale_ * power_ * std::pow(r, power_ - 2.0) * diff;
}

double CostSpec::lipschitz(double diameter) const {
  if (kind_ == Kind::SqEuclidean) return 2.0 * scale_ * diameter;
  return scale_ * power_ * std::pow(diameter, power_ - 1.0);
}

CostMatrix cost_matrix(const Points& xs, const Points& ys, const CostSpec& c) {
  if (xs.rows() > 0 && ys.rows() > 0 && xs.cols() != ys.cols())
    throw DomainError("cost between points of dimension " + std::to_string(xs.cols()) + " and " +
                      std::to_string(ys.cols()));
  CostMatrix out(xs.rows(), ys.rows());
  for (Index j = 0; j < ys.rows(); ++j)
    for (Index i = 0; i < xs.rows(); ++i) out(i, j) = c(xs.row(i), ys.row(j));
  return out;
}

}  // namespace uot
