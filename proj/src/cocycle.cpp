#include "lirr/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lirr {

Cocycle::Cocycle(int alphabet_size, int dimension, int window_radius, std::vector<Matrix> table)
    : alphabet_size_(alphabet_size), dimension_(dimension), window_radius_(window_radius), table_(std::move(table)) {
  Alphabet{alphabet_size};
  if (dimension < 1) throw Error(ErrorCode::Config, "cocycle dimension must be >= 1");
  if (window_radius < 0) throw Error(ErrorCode::Config, "cocycle window radius must be >= 0");
  std::size_t expected = 1;
  for (int i = 0; i < 2 * window_radius + 1; ++i) expected *= static_cast<std::size_t>(alphabet_size);
  if (table_.size() != expected) {
    throw Error(ErrorCode::Config, "cocycle table has " + std::to_string(table_.size()) + " entries, expected " +
                                       std::to_string(expected));
  }
  inverse_table_.reserve(table_.size());
  for (std::size_t c = 0; c < table_.size(); ++c) {
    const Matrix& m = table_[c];
    if (m.rows() != dimension || m.cols() != dimension) {
      throw Error(ErrorCode::Config, "cocycle entry for word " + word_of(c).to_string() + " is not " +
                                         std::to_string(dimension) + "x" + std::to_string(dimension));
    }
    if (!m.allFinite()) throw Error(ErrorCode::Config, "cocycle entry for word " + word_of(c).to_string() + " is not finite");
    const double smin = smallest_singular_value(m);
    const double smax = operator_norm(m);
    if (!(smin > 0.0) || smax / smin > 1e14) {
      throw Error(ErrorCode::Config, "cocycle entry for word " + word_of(c).to_string() + " is singular");
    }
    inverse_table_.push_back(m.inverse());
    bound_c_ = std::max({bound_c_, smax, 1.0 / smin});
  }
}

Cocycle Cocycle::from_words(int alphabet_size, int dimension, int window_radius,
                            const std::map<Word, Matrix>& entries) {
  Alphabet alphabet{alphabet_size};
  const std::size_t width = static_cast<std::size_t>(2 * window_radius + 1);
  std::size_t count = 1;
  for (std::size_t i = 0; i < width; ++i) count *= static_cast<std::size_t>(alphabet_size);
  for (const auto& [word, m] : entries) {
    if (word.length() != width)
      throw Error(ErrorCode::Config, "cocycle word " + word.to_string() + " has length " +
                                         std::to_string(word.length()) + ", expected " + std::to_string(width));
    for (Symbol s : word.symbols())
      if (!alphabet.contains(s)) throw Error(ErrorCode::Config, "cocycle word " + word.to_string() + " uses a symbol outside the alphabet");
  }
  std::vector<Matrix> table;
  table.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<Symbol> symbols(width);
    std::size_t rest = c;
    for (std::size_t i = width; i-- > 0;) {
      symbols[i] = static_cast<Symbol>(rest % alphabet_size);
      rest /= alphabet_size;
    }
    const Word w{symbols};
    const auto it = entries.find(w);
    if (it == entries.end()) throw Error(ErrorCode::Config, "missing cocycle entry for word " + w.to_string());
    table.push_back(it->second);
  }
  return Cocycle(alphabet_size, dimension, window_radius, std::move(table));
}

std::size_t Cocycle::code_of(const Word& w) const {
  std::size_t code = 0;
  for (Symbol s : w.symbols()) code = code * alphabet_size_ + s;
  return code;
}

Word Cocycle::word_of(std::size_t code) const {
  const std::size_t width = static_cast<std::size_t>(2 * window_radius_ + 1);
  std::vector<Symbol> symbols(width);
  for (std::size_t i = width; i-- > 0;) {
    symbols[i] = static_cast<Symbol>(code % alphabet_size_);
    code /= alphabet_size_;
  }
  return Word{symbols};
}

std::size_t Cocycle::code_at(const SymbolSequence& x, const Index& i) const {
  std::size_t code = 0;
  for (int j = -window_radius_; j <= window_radius_; ++j) {
    const Symbol s = x.at(i + j);
    if (s >= static_cast<Symbol>(alphabet_size_)) {
      throw Error(ErrorCode::Precondition, "symbol " + std::to_string(s) + " at index " + to_string(i + j) +
                                               " is outside the cocycle alphabet");
    }
    code = code * alphabet_size_ + s;
  }
  return code;
}

namespace {

// Product F_{count-1} ... F_0 with F_k the table (or inverse table) entry at
// position first + dir*k. Inside a periodic piece the factors repeat with the
// piece period, so long runs are handled as (remainder) * (period product)^q.
ScaledMatrix ordered_product(const Cocycle& a, const SymbolSequence& x, Index pos, int dir, Index count,
                             bool inverse) {
  const int w = a.window_radius();
  ScaledMatrix acc = ScaledMatrix::identity(a.dimension());
  auto factor = [&](const Index& p) -> const Matrix& { return inverse ? a.inverse_at(x, p) : a.at(x, p); };

  while (count > 0) {
    const std::size_t k = x.piece_index(pos);
    const auto start = x.piece_start(k);
    const auto end = x.piece_end(k);
    const bool inside = (!start || pos - w >= *start) && (!end || pos + w < *end);
    if (inside) {
      // Number of further positions (including pos) whose window stays inside.
      std::optional<Index> run;
      if (dir > 0 && end) run = *end - w - pos;
      if (dir < 0 && start) run = pos - w - *start + 1;
      Index length = run && *run < count ? *run : count;
      const std::size_t period = x.pieces()[k].period();
      if (length >= Index(2 * period)) {
        ScaledMatrix period_product = ScaledMatrix::identity(a.dimension());
        for (std::size_t j = 0; j < period; ++j) period_product.left_multiply(factor(pos + dir * static_cast<std::int64_t>(j)));
        const Index reps = length / period;
        const std::size_t rem = (length % period).convert_to<std::size_t>();
        ScaledMatrix block = period_product.power(reps);
        for (std::size_t j = 0; j < rem; ++j) block.left_multiply(factor(pos + dir * static_cast<std::int64_t>(j)));
        acc.left_multiply(block);
        pos += dir > 0 ? length : Index(-length);
        count -= length;
        continue;
      }
    }
    acc.left_multiply(factor(pos));
    pos += dir;
    --count;
  }
  return acc;
}

}  // namespace

ScaledMatrix cocycle_product(const Cocycle& a, const SymbolSequence& x, const Index& n) {
  if (n >= 0) return ordered_product(a, x, 0, +1, n, false);
  return ordered_product(a, x, -1, -1, -n, true);
}

double finite_time_mle(const Cocycle& a, const SymbolSequence& x, const Index& n) {
  if (n < 1) throw Error(ErrorCode::Precondition, "finite-time exponent needs n >= 1");
  const ScaledMatrix p = cocycle_product(a, x, n);
  return static_cast<double>(static_cast<long double>(p.log_norm()) / to_long_double(n));
}

Cocycle exterior_power(const Cocycle& a, int degree) {
  if (degree < 1 || degree > a.dimension()) {
    throw Error(ErrorCode::Range, "exterior degree " + std::to_string(degree) + " outside [1, " +
                                      std::to_string(a.dimension()) + "]");
  }
  if (degree == 1) return a;
  std::vector<Matrix> table;
  table.reserve(a.table_size());
  for (std::size_t c = 0; c < a.table_size(); ++c) table.push_back(compound_matrix(a.entry(c), degree));
  return Cocycle(a.alphabet_size(), static_cast<int>(binomial(a.dimension(), degree)), a.window_radius(),
                 std::move(table));
}

std::vector<double> benettin_spectrum(const Cocycle& a, const SymbolSequence& x, std::int64_t n,
                                      std::int64_t transient) {
  if (n < 1) throw Error(ErrorCode::Precondition, "Benettin spectrum needs n >= 1");
  if (transient < 0) throw Error(ErrorCode::Precondition, "transient must be >= 0");
  const int m = a.dimension();
  Matrix q = Matrix::Identity(m, m);
  std::vector<long double> sums(m, 0.0L);
  for (std::int64_t step = 0; step < transient + n; ++step) {
    const Matrix image = a.at(x, step) * q;
    Eigen::HouseholderQR<Matrix> qr(image);
    q = qr.householderQ() * Matrix::Identity(m, m);
    if (step >= transient) {
      const auto r = qr.matrixQR().diagonal();
      for (int i = 0; i < m; ++i) sums[i] += std::log(std::abs(static_cast<long double>(r(i))));
    }
  }
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = static_cast<double>(sums[i] / n);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace lirr
