#pragma once

// Oseledec frames at periodic points, the epsilon-Lyapunov scalar product,
// cones around the top subspace, and the checkers for the norm bound and
// cone lemmas.

#include "lirr/spectra.hpp"

#include <iosfwd>
#include <random>
#include <vector>

namespace lirr {

struct FrameBlock {
  Matrix basis;     // m x d, columns span the subspace
  double exponent;  // Lyapunov exponent on it
};

/// The Oseledec splitting at f^phase(x) for x = word^infinity, blocks in
/// ascending exponent order; the last block is E (maximal exponent) and the
/// others span F.
class LyapunovFrame {
 public:
  static LyapunovFrame at_periodic_point(const Cocycle& a, const Word& word, std::size_t phase,
                                         double tol = 1e-9);

  const Word& word() const { return word_; }
  std::size_t phase() const { return phase_; }
  SymbolSequence point() const;
  int dimension() const { return static_cast<int>(coords_.rows()); }
  const std::vector<FrameBlock>& blocks() const { return blocks_; }
  std::size_t top_index() const { return blocks_.size() - 1; }

  /// Coordinates of u in block b (length = block dimension).
  Vector coordinates(const Vector& u, std::size_t b) const;
  /// Component of u in block b.
  Vector component(const Vector& u, std::size_t b) const;
  /// Index of the block containing u, or nullopt if u has components in
  /// several blocks (relative tolerance 1e-9).
  std::optional<std::size_t> containing_block(const Vector& u) const;

  /// u = u_top + u_rest with u_top in E and u_rest in F.
  std::pair<Vector, Vector> split(const Vector& u) const;

 private:
  Word word_;
  std::size_t phase_ = 0;
  std::vector<FrameBlock> blocks_;
  Matrix coords_;  // inverse of the concatenated bases
};

struct SeriesOptions {
  double tail_tol = 1e-14;
  std::int64_t max_terms = 100000;  // per side
};

/// The epsilon-Lyapunov scalar product at one frame, with the per-block Gram
/// matrices of the series precomputed.
class LyapunovMetric {
 public:
  LyapunovMetric(const Cocycle& a, LyapunovFrame frame, double epsilon, SeriesOptions options = {});

  const LyapunovFrame& frame() const { return frame_; }
  double epsilon() const { return epsilon_; }

  /// Exactly 0 for vectors from different blocks. Both vectors must lie in
  /// single blocks.
  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& u) const;
  /// Full quadratic form: |u|^2 = u^T gram u.
  const Matrix& gram() const { return gram_; }
  const Matrix& block_gram(std::size_t b) const { return block_grams_[b]; }

  /// sup |u|_L / |u| over u != 0 (largest eigenvalue of the form).
  double k_epsilon() const { return k_epsilon_; }

  bool in_cone(const Vector& u) const;

 private:
  LyapunovFrame frame_;
  double epsilon_;
  std::vector<Matrix> block_grams_;
  Matrix gram_;
  double k_epsilon_ = 1.0;
};

/// Metrics at every phase of the orbit of word^infinity.
class OrbitMetrics {
 public:
  OrbitMetrics(const Cocycle& a, const Word& word, double epsilon, double tol = 1e-9, SeriesOptions options = {});

  std::size_t period() const { return metrics_.size(); }
  /// Metric at f^step(x).
  const LyapunovMetric& at(const Index& step) const { return metrics_[floor_mod(step, metrics_.size())]; }
  double top_exponent() const;
  /// max over phases of k_epsilon.
  double k_epsilon() const;

 private:
  std::vector<LyapunovMetric> metrics_;
};

/// Free-function form of the scalar product for a single frame.
double lyapunov_inner(const Cocycle& a, const LyapunovFrame& frame, double epsilon, const Vector& u,
                      const Vector& v, double tail_tol = 1e-14);

struct ConeStep {
  std::int64_t step;
  bool contained;
  double growth;  // min over samples of |(A u)'|_{i+1} / |u'|_i
  double margin;  // growth - e^(chi - 2 epsilon); >= 0 passes
};

struct ConeReport {
  std::vector<ConeStep> steps;
  bool pass = true;
  double worst_margin = 0.0;
  std::int64_t failures = 0;
};

/// Sample cone vectors at each of n steps along y, where step i is compared
/// with phase (phase0 + i) of the shadowed orbit. y is read from position
/// start.
ConeReport check_cone_growth(const Cocycle& a, const OrbitMetrics& metrics, const SymbolSequence& y,
                             const Index& start, std::int64_t phase0, std::int64_t n, int samples,
                             std::mt19937_64& rng);

void write_cone_csv(std::ostream& out, const ConeReport& report);

struct NormBoundReport {
  double log_norm;      // log |A(y, n)|
  double implied_c;     // (log|A(y,n)| - n(chi+eps) - log l) / (l delta^alpha)
  bool bound_holds;     // implied_c <= c_cap
  double rate_excess;   // (1/n) log|A(y,n)| - (chi + eps)
  double rate_bound;    // (l + log l) / n
  bool rate_holds;      // rate_excess <= rate_bound
};

/// c_cap defaults to delta^-alpha, i.e. implied_c * delta^alpha <= 1.
NormBoundReport check_norm_bound(const Cocycle& a, double chi, const SymbolSequence& y, const Index& n,
                                 double epsilon, double l, double delta, double alpha,
                                 std::optional<double> c_cap = std::nullopt);

}  // namespace lirr
