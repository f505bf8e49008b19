#pragma once

// Periodic-orbit measures and their exact Lyapunov spectra.

#include "lirr/cocycle.hpp"

#include <optional>
#include <vector>

namespace lirr {

/// The invariant measure equidistributed on the orbit of word^infinity.
class PeriodicMeasure {
 public:
  /// Non-primitive words are accepted only with allow_non_primitive.
  explicit PeriodicMeasure(Word word, bool allow_non_primitive = false);

  const Word& word() const { return word_; }
  std::size_t period() const { return word_.length(); }
  bool primitive() const { return primitive_; }
  SymbolSequence sequence() const { return SymbolSequence::periodic(word_); }

 private:
  Word word_;
  bool primitive_;
};

struct SpectrumEntry {
  double exponent;
  int multiplicity;
};

/// Distinct exponents ascending, with multiplicities summing to the dimension.
class LyapunovSpectrum {
 public:
  LyapunovSpectrum() = default;
  explicit LyapunovSpectrum(std::vector<SpectrumEntry> entries);

  const std::vector<SpectrumEntry>& entries() const { return entries_; }
  int dimension() const { return dimension_; }
  std::size_t distinct() const { return entries_.size(); }

  double top() const { return entries_.back().exponent; }
  /// Second largest distinct exponent; nullopt when there is only one.
  std::optional<double> second() const;

  /// All m exponents, descending, repeated by multiplicity.
  std::vector<double> expanded_descending() const;

 private:
  std::vector<SpectrumEntry> entries_;
  int dimension_ = 0;
};

/// Group values (any order) into a spectrum: neighbours within
/// tol * max(1, |value|) share a group.
LyapunovSpectrum group_exponents(std::vector<double> values, double tol);

/// A(x, p) for x = word^infinity.
ScaledMatrix period_matrix(const Cocycle& a, const PeriodicMeasure& mu);

/// (1/p) log |eigenvalues of A(x, p)|, grouped with relative tolerance tol.
LyapunovSpectrum exact_spectrum(const Cocycle& a, const PeriodicMeasure& mu, double tol = 1e-9);

double max_lyapunov(const Cocycle& a, const PeriodicMeasure& mu, double tol = 1e-9);

/// Sum of the i largest exponents counted with multiplicity.
double lambda_partial_sum(const LyapunovSpectrum& s, int i);

struct SpectrumComparison {
  bool pairs_equal;         // expanded exponent lists agree within tol
  bool partial_sums_equal;  // increments of the partial sums agree within tol
  bool routes_agree;
  /// First i (1-based) with |Lambda_i(s1) - Lambda_i(s2)| > tol.
  std::optional<int> first_lambda_difference;
  bool equal() const { return pairs_equal && partial_sums_equal; }
};

SpectrumComparison compare_spectra(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol);

/// Equality of spectra; throws Numerical if the two equivalent routes disagree.
bool spectra_equal(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol);

/// min{lambda * alpha, (top - second) / 2}, or lambda * alpha with one exponent.
double epsilon0(const LyapunovSpectrum& s, double lambda, double alpha);
double epsilon0(const Cocycle& a, const PeriodicMeasure& mu, double lambda, double alpha, double tol = 1e-9);

/// Least i with Lambda_i(s1) != Lambda_i(s2) within tol; nullopt if the
/// spectra are equal. The max exponent of the i-th exterior power then
/// separates the two measures.
std::optional<int> select_exterior_degree(const LyapunovSpectrum& s1, const LyapunovSpectrum& s2, double tol);

}  // namespace lirr
