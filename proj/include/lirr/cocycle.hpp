#pragma once

// Locally constant matrix cocycles over the full shift.

#include "lirr/linalg.hpp"
#include "lirr/symbolic.hpp"

#include <map>
#include <vector>

namespace lirr {

/// A(x) depends on the symbols x_{-w..w}. The table is indexed by the
/// (2w+1)-word read left to right as a base-q number.
class Cocycle {
 public:
  Cocycle(int alphabet_size, int dimension, int window_radius, std::vector<Matrix> table);

  /// Build from a word-keyed table; every (2w+1)-word must be present.
  static Cocycle from_words(int alphabet_size, int dimension, int window_radius,
                            const std::map<Word, Matrix>& entries);

  int alphabet_size() const { return alphabet_size_; }
  int dimension() const { return dimension_; }
  int window_radius() const { return window_radius_; }
  std::size_t table_size() const { return table_.size(); }

  const Matrix& entry(std::size_t code) const { return table_[code]; }
  const Matrix& inverse_entry(std::size_t code) const { return inverse_table_[code]; }

  std::size_t code_of(const Word& w) const;
  Word word_of(std::size_t code) const;
  std::size_t code_at(const SymbolSequence& x, const Index& i) const;

  /// A(f^i x)
  const Matrix& at(const SymbolSequence& x, const Index& i) const { return table_[code_at(x, i)]; }
  const Matrix& inverse_at(const SymbolSequence& x, const Index& i) const {
    return inverse_table_[code_at(x, i)];
  }

  /// C = max over the table of max(|A|, |A^-1|); at least 1.
  double bound_c() const { return bound_c_; }

  /// Locally constant cocycles are Lipschitz in the shift metric.
  double holder_exponent() const { return 1.0; }

 private:
  int alphabet_size_;
  int dimension_;
  int window_radius_;
  std::vector<Matrix> table_;
  std::vector<Matrix> inverse_table_;
  double bound_c_ = 1.0;
};

/// A(x, n) = A(f^{n-1}x) ... A(x) for n >= 0 and
/// A(x, -n) = A(f^{-n}x)^{-1} ... A(f^{-1}x)^{-1}. Runs inside periodic pieces
/// are raised to powers by squaring, so n may be astronomically large.
ScaledMatrix cocycle_product(const Cocycle& a, const SymbolSequence& x, const Index& n);

/// (1/n) log |A(x, n)|, n >= 1.
double finite_time_mle(const Cocycle& a, const SymbolSequence& x, const Index& n);

/// Cocycle of degree-th compound matrices, dimension C(m, degree).
Cocycle exterior_power(const Cocycle& a, int degree);

/// QR (Benettin) estimates of all m exponents over n steps after discarding
/// `transient` steps, sorted descending.
std::vector<double> benettin_spectrum(const Cocycle& a, const SymbolSequence& x, std::int64_t n,
                                      std::int64_t transient = 0);

}  // namespace lirr
