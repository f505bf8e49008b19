#include "lirr/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lirr {

Alphabet::Alphabet(int size) : size_(size) {
  if (size < 2) throw Error(ErrorCode::Config, "alphabet size must be >= 2, got " + std::to_string(size));
}

bool Word::is_primitive() const {
  const std::size_t n = symbols_.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = symbols_[i] == symbols_[i - d];
    if (repeats) return false;
  }
  return n > 0;
}

std::string Word::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(symbols_[i]);
  }
  return out;
}

ShiftMetric::ShiftMetric(double base) : base_(base), log_base_(std::log(base)) {
  if (!(base > 1.0)) throw Error(ErrorCode::Config, "metric base must exceed 1");
}

double ShiftMetric::distance_at(std::int64_t k) const { return std::pow(base_, -static_cast<double>(k)); }

int ShiftMetric::agreement_radius(double t) const {
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "distance threshold must be positive");
  int j = 0;
  while (distance_at(j) >= t) ++j;
  return j;
}

int ShiftMetric::window(double t) const {
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "distance threshold must be positive");
  int c = 0;
  while (distance_at(c) > t) ++c;
  return c + 1;
}

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Periodic: return "periodic";
    case SequenceKind::Spliced: return "spliced";
    case SequenceKind::FiniteSupport: return "finite-support";
  }
  return "unknown";
}

namespace {

std::shared_ptr<const std::vector<Symbol>> make_pattern(std::vector<Symbol> symbols) {
  return std::make_shared<const std::vector<Symbol>>(std::move(symbols));
}

}  // namespace

SymbolSequence::SymbolSequence(SequenceKind kind, std::vector<SequencePiece> pieces)
    : kind_(kind), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw Error(ErrorCode::Precondition, "sequence needs at least one piece");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (!pieces_[k].pattern || pieces_[k].pattern->empty())
      throw Error(ErrorCode::Precondition, "sequence piece with empty pattern");
    if (k >= 2 && !(pieces_[k - 1].start < pieces_[k].start))
      throw Error(ErrorCode::Precondition, "sequence pieces must have increasing starts");
  }
}

SymbolSequence SymbolSequence::periodic(const Word& word) {
  if (word.empty()) throw Error(ErrorCode::Config, "periodic word must be non-empty");
  return SymbolSequence(SequenceKind::Periodic, {SequencePiece{0, make_pattern(word.symbols()), 0}});
}

SymbolSequence SymbolSequence::constant(Symbol s) { return periodic(Word{s}); }

SymbolSequence SymbolSequence::finite_support(const Index& start, const Word& word, Symbol fill) {
  auto fill_pattern = make_pattern({fill});
  std::vector<SequencePiece> pieces{SequencePiece{0, fill_pattern, 0}};
  if (!word.empty()) {
    pieces.push_back(SequencePiece{start, make_pattern(word.symbols()), start});
    pieces.push_back(SequencePiece{start + static_cast<std::int64_t>(word.length()), fill_pattern, 0});
  }
  return SymbolSequence(SequenceKind::FiniteSupport, std::move(pieces));
}

std::size_t SymbolSequence::piece_index(const Index& i) const {
  // Last piece whose start is <= i; piece 0 has no lower bound.
  std::size_t lo = 0, hi = pieces_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].start <= i) lo = mid; else hi = mid;
  }
  return lo;
}

std::optional<Index> SymbolSequence::piece_end(std::size_t k) const {
  if (k + 1 >= pieces_.size()) return std::nullopt;
  return pieces_[k + 1].start;
}

std::optional<Index> SymbolSequence::piece_start(std::size_t k) const {
  if (k == 0) return std::nullopt;
  return pieces_[k].start;
}

Symbol SymbolSequence::at(const Index& i) const { return pieces_[piece_index(i)].at(i); }

SymbolSequence SymbolSequence::shifted(const Index& n) const {
  std::vector<SequencePiece> out = pieces_;
  for (auto& p : out) {
    p.start -= n;
    p.anchor -= n;
  }
  return SymbolSequence(kind_, std::move(out));
}

std::vector<Symbol> SymbolSequence::window(const Index& lo, const Index& hi) const {
  std::vector<Symbol> out;
  for (Index i = lo; i <= hi; ++i) out.push_back(at(i));
  return out;
}

namespace {

// Calls fn(seg_lo, seg_hi_exclusive, piece_x, piece_y) over the common
// refinement of both piece partitions restricted to [lo, hi). fn returns false
// to stop early.
template <class Fn>
void for_each_common_segment(const SymbolSequence& x, const SymbolSequence& y, const Index& lo,
                             const Index& hi, Fn&& fn) {
  std::size_t kx = x.piece_index(lo), ky = y.piece_index(lo);
  Index cur = lo;
  while (cur < hi) {
    Index end = hi;
    const auto ex = x.piece_end(kx);
    const auto ey = y.piece_end(ky);
    if (ex && *ex < end) end = *ex;
    if (ey && *ey < end) end = *ey;
    if (!fn(cur, end, x.pieces()[kx], y.pieces()[ky])) return;
    if (ex && *ex == end) ++kx;
    if (ey && *ey == end) ++ky;
    cur = end;
  }
}

// Same, visiting segments from the right end of [lo, hi) leftward.
template <class Fn>
void for_each_common_segment_reverse(const SymbolSequence& x, const SymbolSequence& y,
                                     const Index& lo, const Index& hi, Fn&& fn) {
  if (!(lo < hi)) return;
  std::size_t kx = x.piece_index(hi - 1), ky = y.piece_index(hi - 1);
  Index cur = hi;
  while (cur > lo) {
    Index begin = lo;
    const auto sx = x.piece_start(kx);
    const auto sy = y.piece_start(ky);
    if (sx && *sx > begin) begin = *sx;
    if (sy && *sy > begin) begin = *sy;
    if (!fn(begin, cur, x.pieces()[kx], y.pieces()[ky])) return;
    if (sx && *sx == begin) --kx;
    if (sy && *sy == begin) --ky;
    cur = begin;
  }
}

Index agreement_period(const SequencePiece& a, const SequencePiece& b) {
  return Index(std::lcm(static_cast<std::uint64_t>(a.period()), static_cast<std::uint64_t>(b.period())));
}

}  // namespace

std::optional<Index> first_difference(const SymbolSequence& x, const SymbolSequence& y,
                                      const Index& lo, const Index& hi) {
  std::optional<Index> found;
  if (lo > hi) return found;
  for_each_common_segment(x, y, lo, hi + 1, [&](const Index& a, const Index& b, const SequencePiece& px,
                                                const SequencePiece& py) {
    // The agreement pattern repeats with the lcm of both periods.
    Index stop = a + agreement_period(px, py);
    if (stop > b) stop = b;
    for (Index i = a; i < stop; ++i) {
      if (px.at(i) != py.at(i)) {
        found = i;
        return false;
      }
    }
    return true;
  });
  return found;
}

std::optional<Index> last_difference(const SymbolSequence& x, const SymbolSequence& y,
                                     const Index& lo, const Index& hi) {
  std::optional<Index> found;
  if (lo > hi) return found;
  for_each_common_segment_reverse(x, y, lo, hi + 1, [&](const Index& a, const Index& b,
                                                        const SequencePiece& px, const SequencePiece& py) {
    Index stop = b - agreement_period(px, py);
    if (stop < a) stop = a;
    for (Index i = b - 1; i >= stop; --i) {
      if (px.at(i) != py.at(i)) {
        found = i;
        return false;
      }
    }
    return true;
  });
  return found;
}

Index count_agreement_windows(const SymbolSequence& x, const SymbolSequence& y, const Index& lo,
                              const Index& hi, std::int64_t r) {
  if (!(lo < hi)) return 0;
  if (r < 0) return hi - lo;
  auto good = [&](const Index& i) { return agree_on(x, y, i - r, i + r); };
  Index count = 0;
  Index cur = lo;  // every i < cur is counted
  auto direct_until = [&](const Index& end) {
    for (; cur < end; ++cur)
      if (good(cur)) ++count;
  };
  // Inside a common segment [a, b), windows of i in [a + r, b - r) see one
  // periodic agreement pattern, so good(i) repeats with the lcm period.
  for_each_common_segment(x, y, lo - r, hi + r, [&](const Index& a, const Index& b, const SequencePiece& px,
                                                     const SequencePiece& py) {
    Index ilo = a + r, ihi = b - r;
    if (ilo < cur) ilo = cur;
    if (ihi > hi) ihi = hi;
    if (!(ilo < ihi)) return true;
    direct_until(ilo);
    const Index period = agreement_period(px, py);
    const Index length = ihi - ilo;
    if (length <= 2 * period) {
      direct_until(ihi);
      return true;
    }
    Index per_period = 0;
    for (Index i = ilo; i < ilo + period; ++i)
      if (good(i)) ++per_period;
    const Index reps = length / period;
    count += reps * per_period;
    cur = ilo + reps * period;
    direct_until(ihi);
    return true;
  });
  direct_until(hi);
  return count;
}

DistanceResult orbit_distance(const SymbolSequence& x, const SymbolSequence& y, const Index& i,
                              int max_radius, const ShiftMetric& metric) {
  const auto right = first_difference(x, y, i, i + max_radius);
  const auto left = last_difference(x, y, i - max_radius, i);
  std::optional<Index> k;
  if (right) k = *right - i;
  if (left && (!k || i - *left < *k)) k = i - *left;
  if (!k) return {metric.distance_at(max_radius + 1), true};
  return {metric.distance_at(k->convert_to<std::int64_t>()), false};
}

DistanceResult shift_distance(const SymbolSequence& x, const SymbolSequence& y, int window,
                              const ShiftMetric& metric) {
  if (window < 1) throw Error(ErrorCode::Precondition, "distance window must be >= 1");
  return orbit_distance(x, y, 0, window, metric);
}

bool in_bowen_ball(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double delta,
                   const ShiftMetric& metric) {
  if (!(delta > 0.0)) throw Error(ErrorCode::Precondition, "delta must be positive");
  if (n < 0) throw Error(ErrorCode::Precondition, "Bowen ball length must be >= 0");
  const int j = metric.agreement_radius(delta);
  if (j == 0) return true;
  return agree_on(x, y, Index(1 - j), n + (j - 1));
}

namespace {

// Agreement radius needed at distance m from the nearest block end.
Index exp_radius(const Index& m, double delta, double lambda, const ShiftMetric& metric, bool natural) {
  if (natural) {
    // base^(-j) < delta * base^(-m)  iff  j - m >= radius(delta)
    const int j0 = metric.agreement_radius(delta);
    return m + j0;
  }
  const long double t = static_cast<long double>(delta) * std::exp(-static_cast<long double>(lambda) * to_long_double(m));
  if (t > 1e-300L) return Index(metric.agreement_radius(static_cast<double>(t)));
  // Far below double range: radius = floor(log_b(1/t)) + 1 in extended precision.
  const long double logb_inv_t =
      (std::log(1.0L / delta) + static_cast<long double>(lambda) * to_long_double(m)) / std::log(static_cast<long double>(metric.base()));
  return Index(static_cast<long long>(std::floor(logb_inv_t))) + 1;
}

}  // namespace

AgreementRange exp_bowen_agreement_range(const Index& n, double delta, double lambda, const ShiftMetric& metric) {
  if (!(delta > 0.0) || !(lambda > 0.0))
    throw Error(ErrorCode::Precondition, "exponential Bowen ball needs delta > 0 and lambda > 0");
  if (n < 0) throw Error(ErrorCode::Precondition, "Bowen ball length must be >= 0");
  const bool natural = std::abs(lambda - metric.natural_exponent()) <= 1e-12 * metric.natural_exponent();

  // Thresholds delta*e^(-lambda m) exceed 1 (no constraint) for m below m_star.
  Index m_star = 0;
  if (delta > 1.0) {
    m_star = Index(static_cast<long long>(std::ceil(std::log(delta) / lambda)));
    while (m_star > 0 && exp_radius(m_star - 1, delta, lambda, metric, natural) >= 1) --m_star;
    while (exp_radius(m_star, delta, lambda, metric, natural) < 1) ++m_star;
  }
  const Index half_lo = n / 2;            // floor(n/2)
  const Index half_hi = n - n / 2;        // ceil(n/2)
  AgreementRange range{1, 0};
  bool any = false;
  // i - r_i + 1 and i + r_i - 1 are monotone on each half, so the extremes of
  // the union of windows sit at the ends of the active halves.
  for (const Index& i : {m_star, half_lo, half_hi, n - m_star}) {
    if (i < 0 || i > n) continue;
    const Index m = i < n - i ? i : n - i;
    if (m < m_star) continue;
    const Index r = exp_radius(m, delta, lambda, metric, natural);
    if (r < 1) continue;
    const Index lo = i - r + 1, hi = i + r - 1;
    if (!any || lo < range.lo) range.lo = lo;
    if (!any || hi > range.hi) range.hi = hi;
    any = true;
  }
  return range;
}

bool in_exp_bowen_ball(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double delta,
                       double lambda, const ShiftMetric& metric) {
  const AgreementRange range = exp_bowen_agreement_range(n, delta, lambda, metric);
  return agree_on(x, y, range.lo, range.hi);
}

SymbolSequence splice(std::span<const SpliceBlock> blocks, Symbol fill, const MarginFn& margin) {
  auto fill_pattern = std::make_shared<const std::vector<Symbol>>(std::vector<Symbol>{fill});
  std::vector<SequencePiece> pieces{SequencePiece{0, fill_pattern, 0}};

  std::optional<Index> previous_end;  // exclusive end of previous block incl. margin
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const SpliceBlock& block = blocks[b];
    if (block.length < 0) throw Error(ErrorCode::Precondition, "splice block with negative length");
    if (b > 0 && !(blocks[b - 1].start < block.start))
      throw Error(ErrorCode::Precondition, "splice block starts must be strictly increasing");
    const int w = margin(b, block);
    if (w < 0) throw Error(ErrorCode::Precondition, "negative splice margin");
    const Index lo = block.start - w;
    const Index hi = block.start + block.length + w + 1;  // exclusive
    if (previous_end && lo < *previous_end) {
      throw Error(ErrorCode::Overlap, "splice blocks " + std::to_string(b - 1) + " and " + std::to_string(b) +
                                          " overlap after margins (block " + std::to_string(b) + " needs index " +
                                          to_string(lo) + " but block " + std::to_string(b - 1) +
                                          " extends to " + to_string(*previous_end - 1) + ")");
    }
    // y_i = source_{offset + i - start} on [lo, hi).
    const SymbolSequence src = block.source.shifted(block.source_offset - block.start);
    const std::size_t first = src.piece_index(lo);
    for (std::size_t k = first; k < src.pieces().size(); ++k) {
      const SequencePiece& p = src.pieces()[k];
      const Index s = k == first ? lo : p.start;
      if (s >= hi) break;
      if (pieces.size() > 1 && pieces.back().start == s) pieces.pop_back();
      pieces.push_back(SequencePiece{s, p.pattern, p.anchor});
    }
    pieces.push_back(SequencePiece{hi, fill_pattern, 0});
    previous_end = hi;
  }
  return SymbolSequence(blocks.empty() ? SequenceKind::Periodic : SequenceKind::Spliced, std::move(pieces));
}

}  // namespace lirr
