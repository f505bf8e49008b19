#pragma once

#include "lirr/common.hpp"

#include <Eigen/Dense>

#include <vector>

namespace lirr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value. Closed forms for dimension <= 3, symmetric
/// eigensolver on the Gram matrix otherwise.
double operator_norm(const Matrix& m);

/// Smallest singular value (used for conditioning checks).
double smallest_singular_value(const Matrix& m);

/// A matrix stored as e^log_scale * unit, with the operator norm of unit kept
/// in [1/2, 2]. Long cocycle products grow like e^(n * exponent) and overflow
/// doubles within a few hundred steps without this.
class ScaledMatrix {
 public:
  ScaledMatrix() = default;
  explicit ScaledMatrix(const Matrix& m);

  static ScaledMatrix identity(int dimension);

  double log_scale() const { return log_scale_; }
  const Matrix& unit() const { return unit_; }
  int dimension() const { return static_cast<int>(unit_.rows()); }

  /// log of the operator norm of the represented matrix.
  double log_norm() const;
  /// The represented matrix; may overflow for large log_scale.
  Matrix value() const;

  /// this <- a * this
  ScaledMatrix& left_multiply(const Matrix& a);
  /// this <- a * this
  ScaledMatrix& left_multiply(const ScaledMatrix& a);

  ScaledMatrix power(const Index& exponent) const;
  ScaledMatrix inverse() const;

  friend ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b);

 private:
  void renormalize();

  double log_scale_ = 0.0;
  Matrix unit_;
};

/// All k-subsets of {0, ..., n-1} in lexicographic order.
std::vector<std::vector<int>> index_subsets(int n, int k);

double determinant(const Matrix& m);

/// The degree-th compound matrix: entries are the degree x degree minors,
/// rows and columns indexed by lexicographically ordered subsets. This is the
/// matrix of the induced map on the degree-fold exterior power.
Matrix compound_matrix(const Matrix& m, int degree);

std::int64_t binomial(int n, int k);

}  // namespace lirr
