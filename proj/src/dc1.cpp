#include "lirr/dc1.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace lirr {

Index closeness_count(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double t,
                      const ShiftMetric& metric) {
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "density threshold must be positive");
  if (n < 1) throw Error(ErrorCode::Precondition, "density needs n >= 1");
  // d(f^i x, f^i y) < t  iff  agreement on |j| < radius(t) around i.
  const int j = metric.agreement_radius(t);
  return count_agreement_windows(x, y, 0, n, j - 1);
}

double closeness_density(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double t,
                         const ShiftMetric& metric) {
  const Index c = closeness_count(x, y, n, t, metric);
  return static_cast<double>(to_long_double(c) / to_long_double(n));
}

Distality distality_constant(const Word& word, const ShiftMetric& metric) {
  if (word.empty()) throw Error(ErrorCode::Precondition, "distality needs a non-empty word");
  const SymbolSequence x = SymbolSequence::periodic(word);
  const SymbolSequence fx = x.shifted(1);
  const int p = static_cast<int>(word.length());
  double zeta = INFINITY;
  for (int i = 0; i < p; ++i) {
    const DistanceResult d = orbit_distance(x, fx, i, p, metric);
    zeta = std::min(zeta, d.resolution_limited ? 0.0 : d.value);
  }
  return {zeta, zeta == 0.0};
}

namespace {

double ratio(const Index& num, const Index& den) {
  return static_cast<double>(to_long_double(num) / to_long_double(den));
}

using Wide = boost::multiprecision::checked_int512_t;

// Sign of count - xi * n, exactly (xi is a double, hence dyadic).
int compare_with_fraction(const Index& count, const Index& n, double xi) {
  int e = 0;
  const double f = std::frexp(xi, &e);
  const Wide num(static_cast<long long>(std::ldexp(f, 53)));
  const int shift = 53 - e;
  if (shift < 0 || shift > 200) throw Error(ErrorCode::Numerical, "xi outside the exact comparison range");
  const Wide lhs = Wide(count) << shift;
  const Wide rhs = num * Wide(n);
  return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

void check_compatible(const ConstructedPoint& p, const ConstructedPoint& q) {
  if (p.schedule_ptr() != q.schedule_ptr() && p.schedule().stages() != q.schedule().stages())
    throw Error(ErrorCode::Precondition, "DC1 pair built from different schedules");
  if (p.x_word() != q.x_word() || p.z_word() != q.z_word() || p.stages() != q.stages())
    throw Error(ErrorCode::Precondition, "DC1 pair built from different x, z or stage counts");
}

}  // namespace

Dc1Report dc1_report(const ConstructedPoint& p_point, const ConstructedPoint& q_point, const std::vector<double>& t_list,
                     double kappa) {
  check_compatible(p_point, q_point);
  const Schedule& s = p_point.schedule();
  const ShiftMetric metric(s.params().metric_base);
  const Distality dist = distality_constant(p_point.x_word(), metric);
  if (!(kappa < dist.zeta)) {
    throw Error(ErrorCode::Precondition, "kappa = " + std::to_string(kappa) + " must be below zeta = " +
                                             std::to_string(dist.zeta));
  }
  if (!(kappa > 0.0)) throw Error(ErrorCode::Precondition, "kappa must be positive");

  Dc1Report report{};
  report.zeta = dist.zeta;
  std::vector<int> p = p_point.p(), q = q_point.p();
  const std::size_t len = std::max(p.size(), q.size());
  p.resize(len, 0);
  q.resize(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    if (p[i] != q[i]) {
      report.first_difference = static_cast<int>(i) + 1;
      break;
    }
  }
  report.distinct = report.first_difference != 0;

  const SymbolSequence& gp = p_point.sequence();
  const SymbolSequence& gq = q_point.sequence();
  for (double t : t_list) {
    DensityTrace trace;
    trace.threshold = t;
    char buf[64];
    std::snprintf(buf, sizeof buf, "high t=%.12g", t);
    trace.label = t == 0.0 ? "high t=4delta" : buf;
    trace.extreme = 0.0;
    for (const Checkpoint& c : p_point.checkpoints(CheckpointKind::High)) {
      const double tk = t == 0.0 ? 4.0 * s.delta(c.k + 1) : t;
      const Index count = closeness_count(gp, gq, c.time, tk, metric);
      const double value = ratio(count, c.time);
      // The shared x-block copies agree on its margin W; windows wider than
      // that may lose up to 2 (r - W) positions at the block edges.
      const int r = metric.agreement_radius(tk) - 1;
      const int excess = std::max(0, r - s.window(c.k + 1));
      const double slack = ratio(Index(2 * excess), c.time);
      const double bound = 1.0 - s.xi(c.k + 1);
      // count + 2 excess >= (1 - xi) n, i.e. n - count - 2 excess <= xi n
      const bool ok = compare_with_fraction(c.time - count - 2 * excess, c.time, s.xi(c.k + 1)) <= 0;
      trace.rows.push_back({c.k, c.time, value, bound, slack, ok});
      trace.pass = trace.pass && ok;
      trace.extreme = std::max(trace.extreme, value);
    }
    report.pass = report.pass && trace.pass;
    report.upper.push_back(std::move(trace));
  }

  char buf[64];
  std::snprintf(buf, sizeof buf, "distal kappa=%.12g", kappa);
  report.lower.label = buf;
  report.lower.threshold = kappa;
  report.lower.extreme = 1.0;
  if (!report.distinct) {
    report.lower.pass = false;
    report.pass = false;
    return report;
  }
  const int sdiff = report.first_difference;
  // Inside the s-th x-block the points copy f^{p_s}x and f^{q_s}x, which are
  // zeta apart; the difference realizing zeta lies within log_b(1/zeta).
  const int reach = static_cast<int>(std::ceil(std::log(1.0 / dist.zeta) / metric.natural_exponent() - 1e-12));
  for (const Checkpoint& c : p_point.checkpoints(CheckpointKind::Distal, sdiff)) {
    const Index count = closeness_count(gp, gq, c.time, kappa, metric);
    const double value = ratio(count, c.time);
    const int excess = std::max(0, reach - s.window(c.k + 1));
    const double slack = ratio(Index(2 * excess), c.time);
    const double bound = s.xi(c.k + 1);
    const bool ok = compare_with_fraction(count - 2 * excess, c.time, bound) <= 0;
    report.lower.rows.push_back({c.k, c.time, value, bound, slack, ok});
    report.lower.pass = report.lower.pass && ok;
    report.lower.extreme = std::min(report.lower.extreme, value);
  }
  report.pass = report.pass && report.lower.pass;
  return report;
}

DivergenceTrace divergence_report(const Cocycle& a, const ConstructedPoint& g, const DivergenceParams& params) {
  if (!(params.tau > 0.0)) throw Error(ErrorCode::Precondition, "tau must be positive");
  if (!(params.epsilon > 0.0)) throw Error(ErrorCode::Precondition, "epsilon must be positive");
  if (!(params.l >= 1.0)) throw Error(ErrorCode::Precondition, "l must be >= 1");
  DivergenceTrace out;
  out.degenerate = std::abs(params.a - params.b) <= params.degenerate_tol * std::max(1.0, std::abs(params.a));
  if (!out.degenerate && !(params.a - 2.0 * params.tau > params.b + params.tau)) {
    throw Error(ErrorCode::Precondition, "measures too close: a - 2 tau = " + std::to_string(params.a - 2.0 * params.tau) +
                                             " does not exceed b + tau = " + std::to_string(params.b + params.tau));
  }
  const Schedule& s = g.schedule();
  const double log_c = std::log(a.bound_c());
  const double log_l = std::log(params.l);
  const SymbolSequence& y = g.sequence();

  bool rows_pass = true;
  for (const Checkpoint& c : g.checkpoints(CheckpointKind::Low)) {
    const double value = finite_time_mle(a, y, c.time);
    // Pi(k) arbitrary steps, then L steps along z.
    const long double num = to_long_double(s.pi(c.k)) * log_c + params.l + log_l;
    const double slack = static_cast<double>(num / to_long_double(c.time));
    const double bound = params.b + params.tau;
    const bool ok = value <= bound + slack;
    out.low.push_back({c.k, c.time, value, bound, slack, ok});
    rows_pass = rows_pass && ok;
  }
  for (const Checkpoint& c : g.checkpoints(CheckpointKind::High)) {
    const double value = finite_time_mle(a, y, c.time);
    const long double num = to_long_double(s.pi_ki(c.k, 1)) * (log_c + std::max(params.a - 2.0 * params.epsilon, 0.0)) +
                            std::log(std::sqrt(2.0L) * params.l);
    const double slack = static_cast<double>(num / to_long_double(c.time));
    const double bound = params.a - 2.0 * params.tau;
    const bool ok = value >= bound - slack;
    out.high.push_back({c.k, c.time, value, bound, slack, ok});
    rows_pass = rows_pass && ok;
  }
  if (out.low.empty() || out.high.empty()) throw Error(ErrorCode::Precondition, "point has no checkpoints");

  out.limsup_estimate = -INFINITY;
  out.liminf_estimate = INFINITY;
  for (const auto& r : out.low) {
    out.limsup_estimate = std::max(out.limsup_estimate, r.value);
    out.max_slack = std::max(out.max_slack, r.slack);
  }
  for (const auto& r : out.high) {
    out.liminf_estimate = std::min(out.liminf_estimate, r.value);
    out.max_slack = std::max(out.max_slack, r.slack);
  }
  out.gap = out.liminf_estimate - out.limsup_estimate;
  out.required_gap = (params.a - params.b) - 3.0 * params.tau - out.max_slack;
  if (out.degenerate) {
    out.divergent = false;
    out.verdict = "no divergence";
    out.pass = rows_pass;
  } else {
    out.divergent = out.gap > 0.0 && out.gap >= out.required_gap;
    out.verdict = out.divergent ? "divergent" : "inconclusive";
    out.pass = rows_pass && out.divergent;
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "k,time,value,bound,pass,slack\n";
  char v[64], b[64], sl[64];
  for (const TraceRow& r : rows) {
    std::snprintf(v, sizeof v, "%.12g", r.value);
    std::snprintf(b, sizeof b, "%.12g", r.bound);
    std::snprintf(sl, sizeof sl, "%.12g", r.slack);
    out << r.k << ',' << to_string(r.time) << ',' << v << ',' << b << ',' << (r.pass ? 1 : 0) << ',' << sl << '\n';
  }
}

}  // namespace lirr
