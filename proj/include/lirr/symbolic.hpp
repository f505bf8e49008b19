#pragma once

// Two-sided full shift: sequences, the shift metric, Bowen balls and the
// splice operation that witnesses exponential specification by concatenation.

#include "lirr/common.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lirr {

using Symbol = std::uint32_t;

class Alphabet {
 public:
  explicit Alphabet(int size);

  int size() const { return size_; }
  bool contains(Symbol s) const { return s < static_cast<Symbol>(size_); }

 private:
  int size_;
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  /// Not a proper power of a shorter word.
  bool is_primitive() const;

  /// Symbols joined by commas, e.g. "0,1,1".
  std::string to_string() const;

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

/// d(x, y) = base^(-k), k = min{|n| : x_n != y_n}; d(x, x) = 0.
class ShiftMetric {
 public:
  explicit ShiftMetric(double base = 2.0);

  double base() const { return base_; }
  /// ln(base): the exponent for which exponential specification holds exactly.
  double natural_exponent() const { return log_base_; }

  double distance_at(std::int64_t k) const;

  /// Least j >= 0 with base^(-j) < t. d(x, y) < t iff x and y agree on
  /// indices |n| < j.
  int agreement_radius(double t) const;

  /// W(t) = ceil(log_base(1/t)) + 1 (at least 1): the comparison window for
  /// threshold t. Always >= agreement_radius(t).
  int window(double t) const;

 private:
  double base_;
  double log_base_;
};

/// One piece of a piecewise-periodic sequence: on [start, next piece start)
/// the symbol at i is pattern[(i - anchor) mod |pattern|].
struct SequencePiece {
  Index start;
  std::shared_ptr<const std::vector<Symbol>> pattern;
  Index anchor;

  std::size_t period() const { return pattern->size(); }
  Symbol at(const Index& i) const { return (*pattern)[floor_mod(i - anchor, period())]; }
};

enum class SequenceKind { Periodic, Spliced, FiniteSupport };

const char* to_string(SequenceKind kind);

/// A bi-infinite symbol sequence, stored as finitely many periodic pieces
/// covering all of Z. The first piece extends to -infinity and the last to
/// +infinity. Immutable; copies share the underlying patterns.
class SymbolSequence {
 public:
  SymbolSequence(SequenceKind kind, std::vector<SequencePiece> pieces);

  /// x_i = word[i mod p].
  static SymbolSequence periodic(const Word& word);
  static SymbolSequence constant(Symbol s);
  /// word placed at [start, start + |word|), fill elsewhere.
  static SymbolSequence finite_support(const Index& start, const Word& word, Symbol fill);

  Symbol at(const Index& i) const;
  Symbol operator[](const Index& i) const { return at(i); }

  /// f^n x, i.e. (f^n x)_i = x_{i+n}.
  SymbolSequence shifted(const Index& n) const;

  SequenceKind kind() const { return kind_; }
  std::span<const SequencePiece> pieces() const { return pieces_; }

  std::size_t piece_index(const Index& i) const;
  /// Exclusive end of piece k, or nullopt for the last piece.
  std::optional<Index> piece_end(std::size_t k) const;
  /// Start of piece k, or nullopt for the first piece.
  std::optional<Index> piece_start(std::size_t k) const;

  /// Symbols on the closed interval [lo, hi].
  std::vector<Symbol> window(const Index& lo, const Index& hi) const;

 private:
  SequenceKind kind_;
  std::vector<SequencePiece> pieces_;
};

/// First index in [lo, hi] where x and y differ.
std::optional<Index> first_difference(const SymbolSequence& x, const SymbolSequence& y,
                                      const Index& lo, const Index& hi);
/// Last index in [lo, hi] where x and y differ.
std::optional<Index> last_difference(const SymbolSequence& x, const SymbolSequence& y,
                                     const Index& lo, const Index& hi);
inline bool agree_on(const SymbolSequence& x, const SymbolSequence& y, const Index& lo,
                     const Index& hi) {
  return lo > hi || !first_difference(x, y, lo, hi).has_value();
}

/// Number of i in [lo, hi) with x and y agreeing on [i - r, i + r]. Exact;
/// long periodic stretches are counted per period.
Index count_agreement_windows(const SymbolSequence& x, const SymbolSequence& y, const Index& lo,
                              const Index& hi, std::int64_t r);

struct DistanceResult {
  double value;
  bool resolution_limited;  // no difference within the window; value is an upper bound
};

/// d(x, y) evaluated on |n| <= window.
DistanceResult shift_distance(const SymbolSequence& x, const SymbolSequence& y, int window,
                              const ShiftMetric& metric = ShiftMetric{});

/// d(f^i x, f^i y) exactly, scanning outward up to max_radius.
DistanceResult orbit_distance(const SymbolSequence& x, const SymbolSequence& y, const Index& i,
                              int max_radius, const ShiftMetric& metric = ShiftMetric{});

/// y in B_n(x, delta): d(f^i x, f^i y) < delta for 0 <= i <= n.
bool in_bowen_ball(const SymbolSequence& x, const SymbolSequence& y, const Index& n,
                   double delta, const ShiftMetric& metric = ShiftMetric{});

/// y in B_n(x, delta, lambda): d(f^i x, f^i y) < delta * e^(-lambda min{i, n-i})
/// for 0 <= i <= n.
bool in_exp_bowen_ball(const SymbolSequence& x, const SymbolSequence& y, const Index& n,
                       double delta, double lambda, const ShiftMetric& metric = ShiftMetric{});

/// The range [lo, hi] on which x and y must agree for y to lie in
/// B_n(x, delta, lambda); empty (lo > hi) when every threshold exceeds 1.
struct AgreementRange {
  Index lo;
  Index hi;
};
AgreementRange exp_bowen_agreement_range(const Index& n, double delta, double lambda,
                                         const ShiftMetric& metric);

/// y_{start + j} = source_{source_offset + j} on j in [-margin, length + margin].
struct SpliceBlock {
  Index start;
  Index length;
  SymbolSequence source;
  Index source_offset = 0;
};

using MarginFn = std::function<int(std::size_t index, const SpliceBlock& block)>;

/// Concatenate blocks over a constant fill. Blocks must have strictly
/// increasing starts and be disjoint after margin extension; otherwise an
/// Overlap error names the offending pair.
SymbolSequence splice(std::span<const SpliceBlock> blocks, Symbol fill, const MarginFn& margin);

}  // namespace lirr
