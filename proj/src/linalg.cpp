#include "lirr/linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>

namespace lirr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Range: return "range";
    case ErrorCode::Overlap: return "overlap";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Index parse_index(const std::string& text) {
  if (text.find_first_not_of(" \t") == std::string::npos) throw Error(ErrorCode::Config, "not an integer: empty string");
  try {
    return Index(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "not an integer: '" + text + "'");
  }
}

namespace {

double gram_top_eigenvalue(const Matrix& m) {
  const Matrix gram = m.transpose() * m;
  if (gram.rows() == 3) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(Eigen::Matrix3d(gram), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2 && m.cols() == 2) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, s * s - 4.0 * det * det);
    return std::sqrt(0.5 * (s + std::sqrt(disc)));
  }
  return std::sqrt(std::max(0.0, gram_top_eigenvalue(m)));
}

double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

ScaledMatrix::ScaledMatrix(const Matrix& m) : unit_(m) { renormalize(); }

ScaledMatrix ScaledMatrix::identity(int dimension) {
  ScaledMatrix s;
  s.unit_ = Matrix::Identity(dimension, dimension);
  s.log_scale_ = 0.0;
  return s;
}

void ScaledMatrix::renormalize() {
  const double norm = operator_norm(unit_);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::Numerical, "scaled product lost its norm (zero or non-finite)");
  }
  if (norm < 0.5 || norm > 2.0) {
    unit_ /= norm;
    log_scale_ += std::log(norm);
  }
}

double ScaledMatrix::log_norm() const { return log_scale_ + std::log(operator_norm(unit_)); }

Matrix ScaledMatrix::value() const { return std::exp(log_scale_) * unit_; }

ScaledMatrix& ScaledMatrix::left_multiply(const Matrix& a) {
  unit_ = a * unit_;
  renormalize();
  return *this;
}

ScaledMatrix& ScaledMatrix::left_multiply(const ScaledMatrix& a) {
  unit_ = a.unit_ * unit_;
  log_scale_ += a.log_scale_;
  renormalize();
  return *this;
}

ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b) {
  ScaledMatrix out = b;
  out.left_multiply(a);
  return out;
}

ScaledMatrix ScaledMatrix::power(const Index& exponent) const {
  if (exponent < 0) return inverse().power(-exponent);
  ScaledMatrix result = identity(dimension());
  if (exponent == 0) return result;
  ScaledMatrix base = *this;
  const unsigned top = boost::multiprecision::msb(exponent);
  for (unsigned bit = 0; bit <= top; ++bit) {
    if (boost::multiprecision::bit_test(exponent, bit)) result.left_multiply(base);
    if (bit < top) base = base * base;
  }
  return result;
}

ScaledMatrix ScaledMatrix::inverse() const {
  ScaledMatrix out;
  out.unit_ = unit_.inverse();
  out.log_scale_ = -log_scale_;
  out.renormalize();
  return out;
}

std::vector<std::vector<int>> index_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> current(k);
  for (int i = 0; i < k; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[i] == n - k + i) --i;
    if (i < 0) break;
    ++current[i];
    for (int j = i + 1; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

double determinant(const Matrix& m) {
  switch (m.rows()) {
    case 0: return 1.0;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(2, 1) * m(1, 2)) -
             m(1, 0) * (m(0, 1) * m(2, 2) - m(2, 1) * m(0, 2)) +
             m(2, 0) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
    default: return m.partialPivLu().determinant();
  }
}

Matrix compound_matrix(const Matrix& m, int degree) {
  const int n = static_cast<int>(m.rows());
  if (degree < 1 || degree > n) {
    throw Error(ErrorCode::Range, "compound degree " + std::to_string(degree) +
                                      " outside [1, " + std::to_string(n) + "]");
  }
  if (degree == 1) return m;
  const auto subsets = index_subsets(n, degree);
  const auto size = static_cast<Eigen::Index>(subsets.size());
  Matrix out(size, size);
  Matrix minor(degree, degree);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) {
      for (int i = 0; i < degree; ++i)
        for (int j = 0; j < degree; ++j) minor(i, j) = m(subsets[r][i], subsets[c][j]);
      out(r, c) = determinant(minor);
    }
  }
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace lirr
