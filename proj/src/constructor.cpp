#include "lirr/constructor.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <climits>
#include <cmath>

namespace lirr {

namespace {

using Wide = boost::multiprecision::checked_int512_t;

// Boundaries stay below 2^kIndexCap so sums of a few of them fit in Index.
constexpr unsigned kIndexCap = 248;

struct Dyadic {
  Wide numerator;
  Wide denominator;  // power of two
};

// Exact value of a double in (0, 1).
Dyadic exact(double xi) {
  int e = 0;
  const double f = std::frexp(xi, &e);  // xi = f 2^e, f in [1/2, 1)
  Wide num(static_cast<long long>(std::ldexp(f, 53)));
  int shift = 53 - e;
  while (shift > 0 && (num & 1) == 0) {
    num >>= 1;
    --shift;
  }
  if (shift > 400) throw Error(ErrorCode::Config, "xi value too small to represent exactly");
  return {num, Wide(1) << shift};
}

// Least multiple of period strictly exceeding pi (1/xi - 1).
Wide least_length(const Wide& pi, const Dyadic& xi, std::size_t period) {
  const Wide bound = pi * (xi.denominator - xi.numerator);  // L * num > bound
  const Wide l0 = bound / xi.numerator + 1;
  const Wide per(static_cast<long long>(period));
  return (l0 + per - 1) / per * per;
}

// pi / (pi + len) < xi
bool density_condition(const Index& pi, const Index& len, const Dyadic& xi) {
  return Wide(pi) * xi.denominator < xi.numerator * (Wide(pi) + Wide(len));
}

bool fits(const Wide& v) { return v >= 0 && (v == 0 || boost::multiprecision::msb(v) < kIndexCap); }

}  // namespace

XiRule XiRule::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::Config, "geometric xi ratio must lie in (0, 1)");
  return XiRule(Kind::Geometric, ratio, {});
}

XiRule XiRule::explicit_values(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::Config, "explicit xi list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0))
      throw Error(ErrorCode::Config, "xi_" + std::to_string(i + 1) + " must lie in (0, 1)");
    if (i > 0 && !(values[i] < values[i - 1]))
      throw Error(ErrorCode::Config, "xi must be strictly decreasing (xi_" + std::to_string(i + 1) +
                                         " >= xi_" + std::to_string(i) + ")");
  }
  return XiRule(Kind::Explicit, 0.0, std::move(values));
}

double XiRule::operator()(int k) const {
  if (k < 1) throw Error(ErrorCode::Range, "xi index must be >= 1");
  switch (kind_) {
    case Kind::Power2: return std::ldexp(1.0, -k);
    case Kind::Geometric: return std::pow(ratio_, k);
    case Kind::Explicit:
      if (k > static_cast<int>(values_.size()))
        throw Error(ErrorCode::Range, "xi_" + std::to_string(k) + " not given by the explicit list");
      return values_[k - 1];
  }
  return 0.0;
}

int XiRule::available() const {
  return kind_ == Kind::Explicit ? static_cast<int>(values_.size()) : INT_MAX;
}

double Schedule::delta(int k) const { return std::ldexp(params_.delta, -k); }

int Schedule::window(int k) const { return ShiftMetric(params_.metric_base).window(delta(k)); }

const Index& Schedule::gap(int k) const {
  if (k < 1 || k > static_cast<int>(gaps_.size())) throw Error(ErrorCode::Range, "gap index " + std::to_string(k) + " out of range");
  return gaps_[k - 1];
}

double Schedule::xi(int k) const { return params_.xi(k); }

const Index& Schedule::L(int k) const {
  if (k < 1 || k > static_cast<int>(l_.size())) throw Error(ErrorCode::Range, "L index " + std::to_string(k) + " out of range");
  return l_[k - 1];
}

const Index& Schedule::H(int j) const {
  if (j < 1 || j > static_cast<int>(h_.size())) throw Error(ErrorCode::Range, "H index " + std::to_string(j) + " out of range");
  return h_[j - 1];
}

const Index& Schedule::sigma(int k) const {
  if (k < 0 || k > stages_) throw Error(ErrorCode::Range, "Sigma(" + std::to_string(k) + ") out of range");
  return sigma_[k];
}

Index Schedule::pi(int k) const {
  if (k < 0 || k >= stages_) throw Error(ErrorCode::Range, "Pi(" + std::to_string(k) + ") out of range");
  return sigma_[k] + gaps_[k];
}

Index Schedule::sigma_ki(int k, int i) const {
  if (k < 0 || k >= stages_) throw Error(ErrorCode::Range, "Sigma(" + std::to_string(k) + ", i) out of range");
  if (i < 1 || i > k + 1) throw Error(ErrorCode::Range, "block index " + std::to_string(i) + " outside [1, " + std::to_string(k + 1) + "]");
  Index out = l_[k] + Index(i) * gaps_[k];
  for (int j = 1; j < i; ++j) out += h_[h_index(k, j) - 1];
  return out;
}

Index Schedule::pi_ki(int k, int i) const { return pi(k) + sigma_ki(k, i); }

bool Schedule::verify_conditions() const {
  for (int k = 0; k < stages_; ++k) {
    const Dyadic x = exact(xi(k + 1));
    if (!density_condition(pi(k), l_[k], x)) return false;
    for (int i = 1; i <= k + 1; ++i)
      if (!density_condition(pi_ki(k, i), h_[h_index(k, i) - 1], x)) return false;
  }
  return true;
}

Schedule make_schedule(const ScheduleParams& params) {
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw Error(ErrorCode::Config, "delta must lie in (0, 1)");
  if (params.k_max < 1) throw Error(ErrorCode::Config, "k_max must be >= 1");
  if (params.x_period < 1 || params.z_period < 1) throw Error(ErrorCode::Config, "periods must be >= 1");
  const int wanted = params.k_max + 1;
  if (params.xi.available() < wanted) {
    throw Error(ErrorCode::Config, "xi rule defines " + std::to_string(params.xi.available()) + " terms, " +
                                       std::to_string(wanted) + " needed");
  }
  for (int k = 2; k <= wanted; ++k) {
    if (!(params.xi(k) < params.xi(k - 1)))
      throw Error(ErrorCode::Config, "xi must be strictly decreasing (xi_" + std::to_string(k) + " >= xi_" +
                                         std::to_string(k - 1) + ")");
  }
  for (int k = 1; k <= wanted; ++k)
    if (!(params.xi(k) > 0.0 && params.xi(k) < 1.0)) throw Error(ErrorCode::Config, "xi_" + std::to_string(k) + " must lie in (0, 1)");

  Schedule s;
  s.params_ = params;
  const ShiftMetric metric(params.metric_base);
  s.sigma_.push_back(0);
  for (int stage = 1; stage <= wanted; ++stage) {
    const int k = stage - 1;
    Index gap;
    if (!params.gaps.empty()) {
      if (stage > static_cast<int>(params.gaps.size()))
        throw Error(ErrorCode::Config, "explicit gap list has no N_" + std::to_string(stage));
      if (params.gaps[stage - 1] < 1) throw Error(ErrorCode::Config, "gaps must be >= 1");
      gap = params.gaps[stage - 1];
    } else {
      gap = 2 * metric.window(std::ldexp(params.delta, -stage)) + 1;
    }
    const Dyadic x = exact(params.xi(stage));
    std::vector<Index> hs;
    bool ok = true;
    Wide running = Wide(s.sigma_[k]) + Wide(gap);  // Pi(k)
    Wide l = least_length(running, x, params.z_period);
    running += l;
    ok = fits(running);
    for (int i = 1; ok && i <= stage; ++i) {
      running += Wide(gap);  // Pi(k, i)
      const Wide h = least_length(running, x, params.x_period);
      running += h;
      ok = fits(running);
      if (ok) hs.push_back(Index(h));
    }
    if (!ok) {
      s.partial_ = true;
      break;
    }
    s.gaps_.push_back(gap);
    s.l_.push_back(Index(l));
    s.h_.insert(s.h_.end(), hs.begin(), hs.end());
    s.sigma_.push_back(Index(running));
    s.stages_ = stage;
  }
  if (s.stages_ < 2) throw Error(ErrorCode::Range, "schedule overflows before the first checkpoint stage");
  if (!s.verify_conditions()) throw Error(ErrorCode::Numerical, "schedule failed its density-condition check");
  return s;
}

BlockBoundaries boundaries(const Schedule& s, int k, std::optional<int> i) {
  BlockBoundaries b{s.sigma(k), std::nullopt, std::nullopt, std::nullopt};
  if (k < s.stages()) b.pi = s.pi(k);
  if (i) {
    b.sigma_ki = s.sigma_ki(k, *i);
    b.pi_ki = s.pi_ki(k, *i);
  }
  return b;
}

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Initial: return "initial";
    case BlockKind::Z: return "z";
    case BlockKind::X: return "x";
    case BlockKind::Gap: return "gap";
  }
  return "unknown";
}

namespace {

struct StagedBlock {
  SpliceBlock block;
  int stage;
  BlockKind kind;
  int index;
  int shift;
};

std::vector<StagedBlock> layout(const Schedule& s, const Word& x, const Word& z, const std::vector<int>& p, int stages,
                                Symbol fill) {
  std::vector<StagedBlock> out;
  const SymbolSequence xs = SymbolSequence::periodic(x);
  const SymbolSequence zs = SymbolSequence::periodic(z);
  out.push_back({SpliceBlock{0, 0, SymbolSequence::constant(fill), 0}, 1, BlockKind::Initial, 0, 0});
  for (int stage = 1; stage <= stages; ++stage) {
    const int k = stage - 1;
    out.push_back({SpliceBlock{s.pi(k), s.L(stage), zs, 0}, stage, BlockKind::Z, 0, 0});
    for (int i = 1; i <= stage; ++i) {
      const int shift = p[i - 1];
      out.push_back({SpliceBlock{s.pi_ki(k, i), s.H(Schedule::h_index(k, i)), xs, shift}, stage, BlockKind::X, i, shift});
    }
  }
  return out;
}

void check_margins(const Schedule& s, int stages) {
  for (int stage = 1; stage <= stages; ++stage) {
    const Index w = s.window(stage);
    const Index before = stage == 1 ? w : Index(s.window(stage - 1));
    Index need = w + before + 1;
    if (2 * w + 1 > need) need = 2 * w + 1;
    if (s.gap(stage) < need) {
      throw Error(ErrorCode::Config, "gap N_" + std::to_string(stage) + " = " + to_string(s.gap(stage)) +
                                         " is too small for copy margins W = " + to_string(w) +
                                         "; need at least " + to_string(need));
    }
  }
}

}  // namespace

ConstructedPoint build_point(const Word& x, const Word& z, std::shared_ptr<const Schedule> schedule, std::vector<int> p,
                             BuildOptions options) {
  if (!schedule) throw Error(ErrorCode::Precondition, "build_point needs a schedule");
  const Schedule& s = *schedule;
  if (x.length() != s.params().x_period || z.length() != s.params().z_period) {
    throw Error(ErrorCode::Precondition, "x and z periods must match the schedule");
  }
  int stages = options.stages > 0 ? options.stages : s.stages();
  if (options.horizon) {
    stages = 0;
    for (int k = 1; k <= s.stages(); ++k) {
      if (s.sigma(k) >= *options.horizon) {
        stages = k;
        break;
      }
    }
    if (stages == 0) {
      throw Error(ErrorCode::Range, "horizon " + to_string(*options.horizon) + " exceeds the schedule (Sigma(" +
                                        std::to_string(s.stages()) + ") = " + to_string(s.sigma(s.stages())) + ")");
    }
  }
  if (stages > s.stages()) {
    throw Error(ErrorCode::Range, "requested " + std::to_string(stages) + " stages, schedule has " +
                                      std::to_string(s.stages()));
  }
  if (p.empty() || p[0] != 0) throw Error(ErrorCode::Precondition, "p must start with p_1 = 0");
  for (int v : p)
    if (v != 0 && v != 1) throw Error(ErrorCode::Precondition, "p must be a binary sequence");
  if (static_cast<int>(p.size()) < stages) p.resize(stages, 0);
  check_margins(s, stages);

  const auto staged = layout(s, x, z, p, stages, options.fill);
  std::vector<SpliceBlock> blocks;
  for (const auto& b : staged) blocks.push_back(b.block);
  auto margin = [&](std::size_t idx, const SpliceBlock&) { return s.window(staged[idx].stage); };

  ConstructedPoint cp;
  cp.sequence_ = splice(blocks, options.fill, margin);
  cp.schedule_ = std::move(schedule);
  cp.p_ = std::move(p);
  cp.x_ = x;
  cp.z_ = z;
  cp.fill_ = options.fill;
  cp.stages_ = stages;

  std::optional<Index> covered;  // exclusive end of the previous copy range
  for (const auto& b : staged) {
    const int w = s.window(b.stage);
    const Index lo = b.block.start - w;
    if (covered && *covered < lo) cp.provenance_.push_back({b.stage, BlockKind::Gap, 0, 0, *covered, lo, 0});
    cp.provenance_.push_back({b.stage, b.kind, b.index, b.shift, b.block.start, b.block.start + b.block.length, w});
    covered = b.block.start + b.block.length + w + 1;
  }
  return cp;
}

std::vector<Checkpoint> ConstructedPoint::checkpoints(CheckpointKind kind, int s) const {
  const Schedule& sch = *schedule_;
  const int top = std::min(sch.k_max(), stages_ - 1);
  std::vector<Checkpoint> out;
  if (kind == CheckpointKind::Distal && s < 2) throw Error(ErrorCode::Range, "distal checkpoints need s >= 2");
  for (int k = 1; k <= top; ++k) {
    switch (kind) {
      case CheckpointKind::Low: out.push_back({k, sch.pi(k) + sch.L(k + 1)}); break;
      case CheckpointKind::High: out.push_back({k, sch.pi_ki(k, 1) + sch.H(Schedule::h_index(k, 1))}); break;
      case CheckpointKind::Distal:
        if (k >= s - 1) out.push_back({k, sch.pi_ki(k, s) + sch.H(Schedule::h_index(k, s))});
        break;
    }
  }
  return out;
}

std::vector<Checkpoint> checkpoints(const ConstructedPoint& cp, CheckpointKind kind, int s) {
  return cp.checkpoints(kind, s);
}

ContainmentAudit audit_containment(const ConstructedPoint& cp) {
  const Schedule& s = cp.schedule();
  const ShiftMetric metric(s.params().metric_base);
  const double lambda = metric.natural_exponent();
  const SymbolSequence xs = SymbolSequence::periodic(cp.x_word());
  const SymbolSequence zs = SymbolSequence::periodic(cp.z_word());
  const SymbolSequence& g = cp.sequence();
  ContainmentAudit audit;
  for (const ProvenanceEntry& e : cp.provenance()) {
    if (e.kind == BlockKind::Gap) continue;
    SymbolSequence target = SymbolSequence::constant(cp.fill());
    if (e.kind == BlockKind::Z) target = zs;
    if (e.kind == BlockKind::X) target = xs.shifted(e.shift);
    const Index len = e.end - e.start;
    const SymbolSequence y = g.shifted(e.start);
    const double d = s.delta(e.stage);
    ContainmentCheck c{e.stage, e.kind, e.index, e.start, len, in_exp_bowen_ball(target, y, len, d, lambda, metric),
                       in_exp_bowen_ball(target, y, len, 2.0 * d, lambda, metric)};
    audit.pass = audit.pass && c.at_delta && c.at_double_delta;
    audit.blocks.push_back(std::move(c));
  }
  for (int stage = 1; stage <= cp.stages(); ++stage) {
    SymbolSequence previous = SymbolSequence::constant(cp.fill());
    if (stage > 1) {
      BuildOptions o;
      o.stages = stage - 1;
      o.fill = cp.fill();
      previous = build_point(cp.x_word(), cp.z_word(), cp.schedule_ptr(), cp.p(), o).sequence();
    }
    BuildOptions o;
    o.stages = stage;
    o.fill = cp.fill();
    const SymbolSequence current =
        stage == cp.stages() ? g : build_point(cp.x_word(), cp.z_word(), cp.schedule_ptr(), cp.p(), o).sequence();
    const bool holds = in_exp_bowen_ball(previous, current, s.sigma(stage - 1), s.delta(stage), lambda, metric);
    audit.pass = audit.pass && holds;
    audit.prefixes.push_back({stage, holds});
  }
  return audit;
}

}  // namespace lirr
