#pragma once

#include <Eigen/Core>
#include <vector>

namespace uot {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// One point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// entries(i, j) = C(x_i, y_j).
using CostMatrix = Eigen::MatrixXd;

// A finite nonnegative measure sum_i w_i delta_{x_i} on R^d.
//
// Zero-weight atoms are dropped at construction so every log-weight is finite.
// The empty measure (no atoms) is the null measure.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(const Vector& weights, const Points& points);

  static DiscreteMeasure null(Index dim = 0);

  const Vector& weights() const { return weights_; }
  const Points& points() const { return points_; }
  Index size() const { return weights_.size(); }
  Index dim() const { return points_.cols(); }
  bool is_null() const { return weights_.size() == 0; }

  Vector log_weights() const { return weights_.array().log().matrix(); }

  // Same support, new weights. Zero weights are stripped as usual.
  DiscreteMeasure with_weights(const Vector& weights) const { return {weights, points_}; }
  DiscreteMeasure with_points(const Points& points) const { return {weights_, points}; }

 private:
  Vector weights_;
  Points points_;
};

DiscreteMeasure new_measure(const std::vector<double>& weights, const std::vector<std::vector<double>>& points);

double total_mass(const DiscreteMeasure& m);

class CostSpec {
 public:
  enum class Kind { SqEuclidean, EuclideanPow };

  // scale * |x - y|^2
  static CostSpec sq_euclidean(double scale = 1.0);
  // scale * |x - y|^p, p >= 1
  static CostSpec euclidean_pow(double p, double scale = 1.0);

  Kind kind() const { return kind_; }
  double power() const { return power_; }
  double scale() const { return scale_; }

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) const {
    const double sq = (x - y).squaredNorm();
    if (kind_ == Kind::SqEuclidean) return scale_ * sq;
    return scale_ * std::pow(std::sqrt(sq), power_);
  }

  // Gradient of C(., y) at x. Throws DomainError for p = 1 at x = y.
  Vector grad_x(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;

  // Lipschitz constant on a set of the given diameter.
  double lipschitz(double diameter) const;

 private:
  CostSpec(Kind kind, double power, double scale) : kind_(kind), power_(power), scale_(scale) {}
  Kind kind_ = Kind::SqEuclidean;
  double power_ = 2.0;
  double scale_ = 1.0;
};

CostMatrix cost_matrix(const Points& xs, const Points& ys, const CostSpec& c);

}  // namespace uot
