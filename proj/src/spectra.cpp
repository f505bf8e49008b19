#include "lirr/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>

namespace lirr {

PeriodicMeasure::PeriodicMeasure(Word word, bool allow_non_primitive)
    : word_(std::move(word)), primitive_(word_.is_primitive()) {
  if (word_.empty()) throw Error(ErrorCode::Config, "periodic measure needs a non-empty word");
  if (!primitive_ && !allow_non_primitive) {
    throw Error(ErrorCode::Config, "periodic word " + word_.to_string() + " is a proper power");
  }
}

LyapunovSpectrum::LyapunovSpectrum(std::vector<SpectrumEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::Precondition, "spectrum needs at least one exponent");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].multiplicity < 1) throw Error(ErrorCode::Precondition, "multiplicity must be >= 1");
    if (!std::isfinite(entries_[i].exponent)) throw Error(ErrorCode::Precondition, "exponent must be finite");
    if (i > 0 && !(entries_[i - 1].exponent < entries_[i].exponent))
      throw Error(ErrorCode::Precondition, "spectrum exponents must be strictly ascending");
    dimension_ += entries_[i].multiplicity;
  }
}

std::optional<double> LyapunovSpectrum::second() const {
  if (entries_.size() < 2) return std::nullopt;
  return entries_[entries_.size() - 2].exponent;
}

std::vector<double> LyapunovSpectrum::expanded_descending() const {
  std::vector<double> out;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) out.insert(out.end(), it->multiplicity, it->exponent);
  return out;
}

LyapunovSpectrum group_exponents(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<SpectrumEntry> out;
  double first = 0.0, sum = 0.0;
  int count = 0;
  for (double v : values) {
    if (count > 0 && std::abs(v - first) <= tol * std::max(1.0, std::abs(first))) {
      sum += v;
      ++count;
      continue;
    }
    if (count > 0) out.push_back({sum / count, count});
    first = sum = v;
    count = 1;
  }
  if (count > 0) out.push_back({sum / count, count});
  return LyapunovSpectrum(std::move(out));
}

ScaledMatrix period_matrix(const Cocycle& a, const PeriodicMeasure& mu) {
  return cocycle_product(a, mu.sequence(), Index(static_cast<std::int64_t>(mu.period())));
}

namespace {

std::vector<double> log_moduli(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "eigenvalue iteration did not converge");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double r = std::abs(es.eigenvalues()(i));
    if (!(r > 1e-300)) throw Error(ErrorCode::Config, "period matrix eigenvalue underflows");
    out.push_back(std::log(r));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

LyapunovSpectrum exact_spectrum(const Cocycle& a, const PeriodicMeasure& mu, double tol) {
  const ScaledMatrix forward = period_matrix(a, mu);
  // Eigenvalues small relative to the norm lose relative accuracy, so the
  // lower half of the spectrum is read from the inverse period matrix
  // (a product of inverse entries, not a numerical inverse).
  const std::int64_t p = static_cast<std::int64_t>(mu.period());
  const ScaledMatrix backward = cocycle_product(a, mu.sequence().shifted(p), Index(-p));
  const std::vector<double> up = log_moduli(forward.unit());
  std::vector<double> down = log_moduli(backward.unit());  // descending, i.e. ascending for the forward map
  const int m = a.dimension();
  std::vector<double> logs(m);
  const double mid = 0.5 * ((up.front() + forward.log_scale()) + (up.back() + forward.log_scale()));
  for (int i = 0; i < m; ++i) {
    const double from_forward = up[i] + forward.log_scale();
    const double from_backward = -(down[m - 1 - i] + backward.log_scale());
    logs[i] = from_forward >= mid ? from_forward : from_backward;
  }
  for (double& v : logs) v /= static_cast<double>(p);
  return group_exponents(std::move(logs), tol);
}

double max_lyapunov(const Cocycle& a, const PeriodicMeasure& mu, double tol) {
  return exact_spectrum(a, mu, tol).top();
}

double lambda_partial_sum(const LyapunovSpectrum& s, int i) {
  if (i < 1 || i > s.dimension()) {
    throw Error(ErrorCode::Range, "partial sum index " + std::to_string(i) + " outside [1, " +
                                      std::to_string(s.dimension()) + "]");
  }
  const auto e = s.expanded_descending();
  long double sum = 0.0L;
  for (int j = 0; j < i; ++j) sum += e[j];
  return static_cast<double>(sum);
}

SpectrumComparison compare_spectra(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol) {
  if (s1.dimension() != s2.dimension()) {
    throw Error(ErrorCode::Precondition, "cannot compare spectra of dimensions " + std::to_string(s1.dimension()) +
                                             " and " + std::to_string(s2.dimension()));
  }
  const auto e1 = s1.expanded_descending();
  const auto e2 = s2.expanded_descending();
  const int m = s1.dimension();
  SpectrumComparison out{true, true, true, std::nullopt};
  for (int i = 0; i < m; ++i)
    if (std::abs(e1[i] - e2[i]) > tol) out.pairs_equal = false;

  // Lambda_i(s1) = Lambda_i(s2) for all i iff the increments Lambda_i -
  // Lambda_{i-1} agree; the increments are compared so the tolerance keeps
  // the same meaning as on the exponent lists.
  long double l1 = 0.0L, l2 = 0.0L, prev1 = 0.0L, prev2 = 0.0L;
  for (int i = 1; i <= m; ++i) {
    l1 += e1[i - 1];
    l2 += e2[i - 1];
    const long double d1 = l1 - prev1, d2 = l2 - prev2;
    if (std::abs(static_cast<double>(d1) - static_cast<double>(d2)) > tol) out.partial_sums_equal = false;
    if (!out.first_lambda_difference && std::abs(l1 - l2) > static_cast<long double>(tol)) out.first_lambda_difference = i;
    prev1 = l1;
    prev2 = l2;
  }
  out.routes_agree = out.pairs_equal == out.partial_sums_equal;
  return out;
}

bool spectra_equal(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol) {
  const SpectrumComparison c = compare_spectra(s1, s2, tol);
  if (!c.routes_agree) throw Error(ErrorCode::Numerical, "pair and partial-sum spectrum comparisons disagree");
  return c.equal();
}

double epsilon0(const LyapunovSpectrum& s, double lambda, double alpha) {
  if (!(lambda > 0.0) || !(alpha > 0.0)) throw Error(ErrorCode::Precondition, "epsilon0 needs lambda > 0 and alpha > 0");
  const auto second = s.second();
  if (!second) return lambda * alpha;
  return std::min(lambda * alpha, 0.5 * (s.top() - *second));
}

double epsilon0(const Cocycle& a, const PeriodicMeasure& mu, double lambda, double alpha, double tol) {
  return epsilon0(exact_spectrum(a, mu, tol), lambda, alpha);
}

std::optional<int> select_exterior_degree(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol) {
  if (s1.dimension() != s2.dimension()) throw Error(ErrorCode::Precondition, "spectra of different dimensions");
  for (int i = 1; i <= s1.dimension(); ++i)
    if (std::abs(lambda_partial_sum(s1, i) - lambda_partial_sum(s2, i)) > tol) return i;
  return std::nullopt;
}

}  // namespace lirr
