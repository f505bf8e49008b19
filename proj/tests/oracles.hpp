#pragma once

// Brute-force references used by the tests. Nothing here calls into the
// library beyond element access, so agreement is a real cross-check.

#include "lirr/cocycle.hpp"
#include "lirr/symbolic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using lirr::Index;
using lirr::Matrix;
using lirr::SymbolSequence;

// d(f^i x, f^i y) by scanning outward; -1 if no difference within max_radius.
inline double distance(const SymbolSequence& x, const SymbolSequence& y, const Index& i, int max_radius,
                       double base = 2.0) {
  for (int k = 0; k <= max_radius; ++k)
    if (x[i + k] != y[i + k] || x[i - k] != y[i - k]) return std::pow(base, -k);
  return -1.0;
}

// |{i in [0, n) : d(f^i x, f^i y) < t}| with materialized windows.
inline long long density_count(const SymbolSequence& x, const SymbolSequence& y, long long n, double t,
                               double base = 2.0) {
  const int reach = static_cast<int>(std::ceil(std::log(1.0 / t) / std::log(base))) + 2;
  long long c = 0;
  for (long long i = 0; i < n; ++i) {
    const double d = distance(x, y, i, reach, base);
    if (d < t) ++c;  // includes "no difference seen", which is < t by choice of reach
  }
  return c;
}

inline bool exp_bowen(const SymbolSequence& x, const SymbolSequence& y, long long n, double delta, double lambda,
                      double base = 2.0) {
  for (long long i = 0; i <= n; ++i) {
    const double thr = delta * std::exp(-lambda * static_cast<double>(std::min(i, n - i)));
    const int reach = static_cast<int>(std::ceil(std::log(1.0 / thr) / std::log(base))) + 2;
    const double d = distance(x, y, i, reach, base);
    if (!(d < thr)) return false;
  }
  return true;
}

inline Matrix entry_at(const lirr::Cocycle& a, const SymbolSequence& x, long long i) {
  std::size_t code = 0;
  for (int j = -a.window_radius(); j <= a.window_radius(); ++j) code = code * a.alphabet_size() + x[i + j];
  return a.entry(code);
}

// A(f^{n-1}x) ... A(x) by plain multiplication.
inline Matrix product(const lirr::Cocycle& a, const SymbolSequence& x, long long n) {
  Matrix m = Matrix::Identity(a.dimension(), a.dimension());
  for (long long i = 0; i < n; ++i) m = entry_at(a, x, i) * m;
  return m;
}

inline double op_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// (1/p) log |eigenvalues| of the period matrix, descending, no grouping.
inline std::vector<double> periodic_exponents(const lirr::Cocycle& a, const lirr::Word& w) {
  const SymbolSequence x = SymbolSequence::periodic(w);
  const Matrix m = product(a, x, static_cast<long long>(w.length()));
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<double> out;
  for (int i = 0; i < m.rows(); ++i) out.push_back(std::log(std::abs(es.eigenvalues()(i))) / w.length());
  std::sort(out.rbegin(), out.rend());
  return out;
}

// m x m integer matrix with |det| >= 1, entries in [-3, 3].
inline Matrix random_integer_matrix(int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  for (;;) {
    Matrix a(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) a(r, c) = d(rng);
    if (std::abs(a.determinant()) >= 0.5) return a;
  }
}

inline lirr::Word random_word(int length, int q, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, q - 1);
  std::vector<lirr::Symbol> s;
  for (int i = 0; i < length; ++i) s.push_back(static_cast<lirr::Symbol>(d(rng)));
  return lirr::Word(std::move(s));
}

}  // namespace oracle
