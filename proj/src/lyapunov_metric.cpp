#include "lirr/lyapunov_metric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

namespace lirr {

namespace {

constexpr double kInvarianceTol = 1e-9;
constexpr double kDefectiveCond = 1e10;

// Orthonormal basis of the generalized eigenspace of u for the given
// eigenvalues (conjugate pairs appear once with positive imaginary part).
Matrix generalized_eigenspace(const Matrix& u, const std::vector<std::complex<double>>& eigenvalues, int dim) {
  const int m = static_cast<int>(u.rows());
  const Matrix id = Matrix::Identity(m, m);
  Matrix q = id;
  for (const auto& l : eigenvalues) {
    if (l.imag() < 0.0) continue;
    if (l.imag() == 0.0) {
      q = (u - l.real() * id) * q;
    } else {
      q = (u * u - 2.0 * l.real() * u + std::norm(l) * id) * q;
    }
    const double n = q.norm();
    if (n > 0.0) q /= n;
  }
  Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

void check_block(const Matrix& u, const Matrix& v, const Word& word, std::size_t phase) {
  const Matrix restricted = v.transpose() * u * v;
  const double residual = (u * v - v * restricted).norm();
  if (residual > kInvarianceTol * std::max(1.0, u.norm())) {
    throw Error(ErrorCode::Numerical, "Oseledec subspace at phase " + std::to_string(phase) + " of " +
                                          word.to_string() + " is not invariant (residual " +
                                          std::to_string(residual) + ")");
  }
  if (restricted.rows() < 2) return;
  Eigen::EigenSolver<Matrix> es(restricted, true);
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
  const auto s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(cond <= kDefectiveCond)) {
    throw Error(ErrorCode::Numerical, "period matrix at phase " + std::to_string(phase) + " of " +
                                          word.to_string() + " is defective (nontrivial Jordan block)");
  }
}

}  // namespace

LyapunovFrame LyapunovFrame::at_periodic_point(const Cocycle& a, const Word& word, std::size_t phase, double tol) {
  const PeriodicMeasure mu(word, true);
  const LyapunovSpectrum spectrum = exact_spectrum(a, mu, tol);
  const std::int64_t p = static_cast<std::int64_t>(word.length());
  const SymbolSequence point = mu.sequence().shifted(static_cast<std::int64_t>(phase));
  const ScaledMatrix pm = cocycle_product(a, point, Index(p));
  const Matrix& u = pm.unit();

  Eigen::EigenSolver<Matrix> es(u, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "eigenvalue iteration did not converge");
  const auto& entries = spectrum.entries();
  std::vector<std::vector<std::complex<double>>> grouped(entries.size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> l = es.eigenvalues()(i);
    const double chi = (std::log(std::abs(l)) + pm.log_scale()) / static_cast<double>(p);
    std::size_t best = 0;
    for (std::size_t g = 1; g < entries.size(); ++g)
      if (std::abs(entries[g].exponent - chi) < std::abs(entries[best].exponent - chi)) best = g;
    grouped[best].push_back(l);
  }

  LyapunovFrame frame;
  frame.word_ = word;
  frame.phase_ = phase;
  const int m = a.dimension();
  Matrix all(m, m);
  int col = 0;
  for (std::size_t g = 0; g < entries.size(); ++g) {
    if (static_cast<int>(grouped[g].size()) != entries[g].multiplicity) {
      throw Error(ErrorCode::Numerical, "eigenvalue grouping at phase " + std::to_string(phase) +
                                            " does not match the spectrum multiplicities");
    }
    Matrix v = generalized_eigenspace(u, grouped[g], entries[g].multiplicity);
    check_block(u, v, word, phase);
    all.middleCols(col, v.cols()) = v;
    col += static_cast<int>(v.cols());
    frame.blocks_.push_back({std::move(v), entries[g].exponent});
  }
  Eigen::FullPivLU<Matrix> lu(all);
  if (!lu.isInvertible()) throw Error(ErrorCode::Numerical, "Oseledec subspaces are not complementary");
  frame.coords_ = lu.inverse();
  return frame;
}

SymbolSequence LyapunovFrame::point() const {
  return SymbolSequence::periodic(word_).shifted(static_cast<std::int64_t>(phase_));
}

Vector LyapunovFrame::coordinates(const Vector& u, std::size_t b) const {
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < b; ++i) offset += blocks_[i].basis.cols();
  return coords_.middleRows(offset, blocks_[b].basis.cols()) * u;
}

Vector LyapunovFrame::component(const Vector& u, std::size_t b) const {
  return blocks_[b].basis * coordinates(u, b);
}

std::optional<std::size_t> LyapunovFrame::containing_block(const Vector& u) const {
  const double scale = std::max(u.norm(), 1e-300);
  std::optional<std::size_t> found;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (coordinates(u, b).norm() > 1e-9 * scale) {
      if (found) return std::nullopt;
      found = b;
    }
  }
  return found ? found : std::optional<std::size_t>(0);
}

std::pair<Vector, Vector> LyapunovFrame::split(const Vector& u) const {
  Vector top = component(u, top_index());
  Vector rest = u - top;
  return {std::move(top), std::move(rest)};
}

namespace {

// m * sum_n e^{-eps|n|} W_n^T W_n with W_n = e^{-chi n} A(x, n) V.
//
// Iterating A directly lets rounding leak into faster blocks and the series
// blows up for lower blocks. Instead, with n = kp + r and P V = V B,
// A(x, n) V = A(x, r) V B^k, and B^k stays inside the block.
Matrix series_gram(const Cocycle& a, const SymbolSequence& x, std::size_t period, const Matrix& v, double chi,
                   double epsilon, const SeriesOptions& options) {
  const int m = a.dimension();
  const auto p = static_cast<std::int64_t>(period);
  // forward[r] = e^{-chi r} A(x, r) V, backward[r] = e^{chi r} A(x, -r) V
  std::vector<Matrix> forward{v}, backward{v};
  for (std::int64_t r = 1; r <= p; ++r) {
    forward.push_back(std::exp(-chi) * (a.at(x, r - 1) * forward.back()));
    backward.push_back(std::exp(chi) * (a.inverse_at(x, -r) * backward.back()));
  }
  const auto solver = v.completeOrthogonalDecomposition();
  const Matrix b_fwd = solver.solve(forward[p]);   // e^{-chi p} B
  const Matrix b_bwd = solver.solve(backward[p]);  // e^{chi p} B^-1

  Matrix sum = v.transpose() * v;
  for (int dir : {+1, -1}) {
    const std::vector<Matrix>& phase = dir > 0 ? forward : backward;
    const Matrix& step = dir > 0 ? b_fwd : b_bwd;
    Matrix bk = Matrix::Identity(v.cols(), v.cols());
    std::size_t quiet = 0;
    for (std::int64_t n = 1;; ++n) {
      if (n > options.max_terms) {
        throw Error(ErrorCode::Numerical, "Lyapunov series did not converge within " +
                                              std::to_string(options.max_terms) + " terms; frame and exponent mismatch");
      }
      const std::int64_t r = n % p;
      if (r == 0) bk = step * bk;
      const Matrix w = phase[r] * bk;
      const Matrix term = std::exp(-epsilon * static_cast<double>(n)) * (w.transpose() * w);
      sum += term;
      if (!sum.allFinite()) throw Error(ErrorCode::Numerical, "Lyapunov series diverged");
      if (term.trace() < options.tail_tol * sum.trace()) {
        if (++quiet >= period) break;
      } else {
        quiet = 0;
      }
    }
  }
  return static_cast<double>(m) * sum;
}

}  // namespace

LyapunovMetric::LyapunovMetric(const Cocycle& a, LyapunovFrame frame, double epsilon, SeriesOptions options)
    : frame_(std::move(frame)), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Precondition, "Lyapunov metric needs epsilon > 0");
  const SymbolSequence x = frame_.point();
  const int m = a.dimension();
  Matrix blockdiag = Matrix::Zero(m, m);
  Eigen::Index offset = 0;
  for (const FrameBlock& b : frame_.blocks()) {
    Matrix g = series_gram(a, x, frame_.word().length(), b.basis, b.exponent, epsilon, options);
    const Eigen::Index d = g.rows();
    blockdiag.block(offset, offset, d, d) = g;
    block_grams_.push_back(std::move(g));
    offset += d;
  }
  // coordinates of u in all blocks = C u with C the inverse of the bases
  Matrix c(m, m);
  offset = 0;
  for (std::size_t b = 0; b < frame_.blocks().size(); ++b) {
    const Eigen::Index d = frame_.blocks()[b].basis.cols();
    for (int j = 0; j < m; ++j) c.block(offset, j, d, 1) = frame_.coordinates(Vector::Unit(m, j), b);
    offset += d;
  }
  gram_ = c.transpose() * blockdiag * c;
  gram_ = 0.5 * (gram_ + gram_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_, Eigen::EigenvaluesOnly);
  k_epsilon_ = std::sqrt(std::max(1.0, es.eigenvalues().maxCoeff()));
}

double LyapunovMetric::inner(const Vector& u, const Vector& v) const {
  const auto bu = frame_.containing_block(u);
  const auto bv = frame_.containing_block(v);
  if (!bu || !bv) throw Error(ErrorCode::Precondition, "Lyapunov inner product needs vectors in single subspaces");
  if (*bu != *bv) return 0.0;
  return frame_.coordinates(u, *bu).dot(block_grams_[*bu] * frame_.coordinates(v, *bv));
}

double LyapunovMetric::norm(const Vector& u) const {
  double sum = 0.0;
  for (std::size_t b = 0; b < block_grams_.size(); ++b) {
    const Vector c = frame_.coordinates(u, b);
    sum += c.dot(block_grams_[b] * c);
  }
  return std::sqrt(std::max(0.0, sum));
}

bool LyapunovMetric::in_cone(const Vector& u) const {
  if (frame_.blocks().size() == 1) return true;
  const auto [top, rest] = frame_.split(u);
  return norm(rest) <= norm(top) * (1.0 + 1e-12);
}

OrbitMetrics::OrbitMetrics(const Cocycle& a, const Word& word, double epsilon, double tol, SeriesOptions options) {
  for (std::size_t phase = 0; phase < word.length(); ++phase)
    metrics_.emplace_back(a, LyapunovFrame::at_periodic_point(a, word, phase, tol), epsilon, options);
}

double OrbitMetrics::top_exponent() const {
  const auto& f = metrics_.front().frame();
  return f.blocks()[f.top_index()].exponent;
}

double OrbitMetrics::k_epsilon() const {
  double k = 1.0;
  for (const auto& m : metrics_) k = std::max(k, m.k_epsilon());
  return k;
}

double lyapunov_inner(const Cocycle& a, const LyapunovFrame& frame, double epsilon, const Vector& u, const Vector& v,
                      double tail_tol) {
  SeriesOptions options;
  options.tail_tol = tail_tol;
  return LyapunovMetric(a, frame, epsilon, options).inner(u, v);
}

ConeReport check_cone_growth(const Cocycle& a, const OrbitMetrics& metrics, const SymbolSequence& y,
                             const Index& start, std::int64_t phase0, std::int64_t n, int samples,
                             std::mt19937_64& rng) {
  if (samples < 1) throw Error(ErrorCode::Precondition, "cone audit needs at least one sample per step");
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  const double chi = metrics.top_exponent();
  ConeReport report;
  bool first = true;
  for (std::int64_t i = 0; i < n; ++i) {
    const LyapunovMetric& here = metrics.at(phase0 + i);
    const LyapunovMetric& next = metrics.at(phase0 + i + 1);
    const LyapunovFrame& frame = here.frame();
    const double floor = std::exp(chi - 2.0 * here.epsilon());
    const Matrix& step = a.at(y, start + i);
    ConeStep rec{i, true, INFINITY, 0.0};
    for (int s = 0; s < samples; ++s) {
      Vector top = Vector::Zero(frame.dimension());
      Vector rest = Vector::Zero(frame.dimension());
      for (std::size_t b = 0; b < frame.blocks().size(); ++b) {
        const Matrix& basis = frame.blocks()[b].basis;
        Vector c(basis.cols());
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = gauss(rng);
        (b == frame.top_index() ? top : rest) += basis * c;
      }
      // Ratio |u_rest| / |u_top| uniform in [0, 1], with the cone boundary
      // and the axis as the first two samples.
      const double ratio = s == 0 ? 1.0 : s == 1 ? 0.0 : unit(rng);
      const double rn = here.norm(rest);
      const double scale = rn > 0.0 ? ratio * here.norm(top) / rn : 0.0;
      const Vector u = top + scale * rest;
      const Vector image = step * u;
      if (!next.in_cone(image)) rec.contained = false;
      const double growth = next.norm(next.frame().split(image).first) / here.norm(top);
      rec.growth = std::min(rec.growth, growth);
    }
    rec.margin = rec.growth - floor;
    const bool ok = rec.contained && rec.margin >= 0.0;
    if (!ok) {
      report.pass = false;
      ++report.failures;
    }
    if (first || rec.margin < report.worst_margin) report.worst_margin = rec.margin;
    first = false;
    report.steps.push_back(rec);
  }
  return report;
}

void write_cone_csv(std::ostream& out, const ConeReport& report) {
  out << "step,flag,margin\n";
  char buf[64];
  for (const ConeStep& s : report.steps) {
    std::snprintf(buf, sizeof buf, "%.12g", s.margin);
    out << s.step << ',' << (s.contained && s.margin >= 0.0 ? 1 : 0) << ',' << buf << '\n';
  }
}

NormBoundReport check_norm_bound(const Cocycle& a, double chi, const SymbolSequence& y, const Index& n,
                                 double epsilon, double l, double delta, double alpha, std::optional<double> c_cap) {
  if (n < 1) throw Error(ErrorCode::Precondition, "norm bound needs n >= 1");
  if (!(l >= 1.0)) throw Error(ErrorCode::Precondition, "norm bound needs l >= 1");
  const long double nn = to_long_double(n);
  const double log_norm = cocycle_product(a, y, n).log_norm();
  const long double excess = static_cast<long double>(log_norm) - nn * (chi + epsilon) - std::log(static_cast<long double>(l));
  NormBoundReport r{};
  r.log_norm = log_norm;
  r.implied_c = static_cast<double>(excess / (l * std::pow(static_cast<long double>(delta), alpha)));
  r.bound_holds = r.implied_c <= c_cap.value_or(std::pow(delta, -alpha));
  r.rate_excess = static_cast<double>(static_cast<long double>(log_norm) / nn - (chi + epsilon));
  r.rate_bound = static_cast<double>((l + std::log(static_cast<long double>(l))) / nn);
  r.rate_holds = r.rate_excess <= r.rate_bound;
  return r;
}

}  // namespace lirr
