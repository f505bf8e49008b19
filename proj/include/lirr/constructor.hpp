#pragma once

// Schedule generation and the stage-by-stage construction of irregular points
// g(p): each stage shadows z for L steps, then x shifted by p_i for H steps,
// with block lengths large enough that the newest block dominates every
// running average.

#include "lirr/symbolic.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lirr {

/// Strictly decreasing xi_k in (0, 1), k >= 1.
class XiRule {
 public:
  enum class Kind { Power2, Geometric, Explicit };

  static XiRule power2() { return XiRule(Kind::Power2, 0.5, {}); }
  /// xi_k = ratio^k
  static XiRule geometric(double ratio);
  /// xi_1, xi_2, ... given explicitly; stages beyond the list are unavailable.
  static XiRule explicit_values(std::vector<double> values);

  Kind kind() const { return kind_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(int k) const;
  /// Number of defined terms (unbounded rules report INT32_MAX).
  int available() const;

 private:
  XiRule(Kind kind, double ratio, std::vector<double> values)
      : kind_(kind), ratio_(ratio), values_(std::move(values)) {}
  Kind kind_;
  double ratio_;
  std::vector<double> values_;
};

struct ScheduleParams {
  XiRule xi = XiRule::power2();
  std::size_t x_period = 1;
  std::size_t z_period = 1;
  double delta = 0.125;
  /// Checkpoint stages wanted; stages 1..k_max+1 are materialized.
  int k_max = 6;
  double metric_base = 2.0;
  /// Optional explicit gap lengths N_1, N_2, ...; default 2 W(delta_k) + 1.
  std::vector<std::int64_t> gaps;
};

/// Block boundary arithmetic. Stage s = k + 1 places, after Sigma(k):
///   gap N_s, z-block L_s at Pi(k), then for i = 1..s a gap N_s and an
///   x-block H_{k(k+1)/2+i} at Pi(k, i).
/// Sigma(k + 1) is the end of the last x-block of stage k + 1.
class Schedule {
 public:
  const ScheduleParams& params() const { return params_; }
  /// Stages 1..stages() are available.
  int stages() const { return stages_; }
  /// Largest k with checkpoints, i.e. stages() - 1.
  int k_max() const { return stages_ - 1; }
  /// True when index overflow stopped the schedule before the requested k_max.
  bool partial() const { return partial_; }

  double delta(int k) const;
  int window(int k) const;  // W(delta_k)
  const Index& gap(int k) const;   // N_k
  double xi(int k) const;
  const Index& L(int k) const;     // 1-based
  const Index& H(int j) const;     // 1-based, j <= stages(stages()+1)/2
  std::size_t h_count() const { return h_.size(); }

  const Index& sigma(int k) const;           // k in [0, stages()]
  Index pi(int k) const;                     // k in [0, stages() - 1]
  Index sigma_ki(int k, int i) const;        // i in [1, k + 1]
  Index pi_ki(int k, int i) const;
  /// Index into H of x-block i at stage k + 1.
  static int h_index(int k, int i) { return k * (k + 1) / 2 + i; }

  /// Re-check the density conditions Pi/(Pi + len) < xi_{k+1} exactly.
  bool verify_conditions() const;

 private:
  friend Schedule make_schedule(const ScheduleParams& params);
  ScheduleParams params_;
  int stages_ = 0;
  bool partial_ = false;
  std::vector<Index> gaps_;   // N_1..N_stages
  std::vector<Index> l_;      // L_1..
  std::vector<Index> h_;      // H_1..
  std::vector<Index> sigma_;  // Sigma(0)..Sigma(stages)
};

Schedule make_schedule(const ScheduleParams& params);

struct BlockBoundaries {
  Index sigma;
  std::optional<Index> pi;
  std::optional<Index> sigma_ki;
  std::optional<Index> pi_ki;
};

BlockBoundaries boundaries(const Schedule& s, int k, std::optional<int> i = std::nullopt);

enum class BlockKind { Initial, Z, X, Gap };
const char* to_string(BlockKind kind);

struct ProvenanceEntry {
  int stage;
  BlockKind kind;
  int index;       // i for x-blocks, 0 otherwise
  int shift;       // p_i for x-blocks
  Index start;
  Index end;       // exclusive
  int margin;      // copy margin on each side (0 for gaps)
};

enum class CheckpointKind { Low, High, Distal };

struct Checkpoint {
  int k;
  Index time;
};

struct BuildOptions {
  /// Stages to materialize; 0 means all available (or as fixed by horizon).
  int stages = 0;
  /// If set, materialize through the least stage whose Sigma reaches it.
  std::optional<Index> horizon;
  Symbol fill = 1;
};

class ConstructedPoint {
 public:
  const SymbolSequence& sequence() const { return sequence_; }
  const Schedule& schedule() const { return *schedule_; }
  std::shared_ptr<const Schedule> schedule_ptr() const { return schedule_; }
  const std::vector<int>& p() const { return p_; }
  const Word& x_word() const { return x_; }
  const Word& z_word() const { return z_; }
  Symbol fill() const { return fill_; }
  int stages() const { return stages_; }
  const std::vector<ProvenanceEntry>& provenance() const { return provenance_; }

  /// Checkpoint times for k = 1..min(k_max, stages - 1); distal needs s >= 2
  /// and only lists k >= s - 1.
  std::vector<Checkpoint> checkpoints(CheckpointKind kind, int s = 0) const;

 private:
  friend ConstructedPoint build_point(const Word&, const Word&, std::shared_ptr<const Schedule>, std::vector<int>,
                                      BuildOptions);
  SymbolSequence sequence_ = SymbolSequence::constant(0);
  std::shared_ptr<const Schedule> schedule_;
  std::vector<int> p_;
  Word x_, z_;
  Symbol fill_ = 0;
  int stages_ = 0;
  std::vector<ProvenanceEntry> provenance_;
};

/// p holds p_1, p_2, ... in {0, 1}; p_1 must be 0 and missing terms are 0.
ConstructedPoint build_point(const Word& x, const Word& z, std::shared_ptr<const Schedule> schedule,
                             std::vector<int> p, BuildOptions options);

std::vector<Checkpoint> checkpoints(const ConstructedPoint& cp, CheckpointKind kind, int s = 0);

struct ContainmentCheck {
  int stage;
  BlockKind kind;
  int index;
  Index start;
  Index length;
  bool at_delta;         // in the exponential Bowen ball of radius delta_s
  bool at_double_delta;  // radius 2 delta_s
};

struct PrefixCheck {
  int stage;       // g_stage vs g_{stage-1} on Sigma(stage-1)
  bool holds;
};

struct ContainmentAudit {
  std::vector<ContainmentCheck> blocks;
  std::vector<PrefixCheck> prefixes;
  bool pass = true;
};

/// Every copied block lies in its exponential Bowen ball (lambda = ln base),
/// and each stage stays in B_{Sigma(k)}(g_k, delta_{k+1}, lambda).
ContainmentAudit audit_containment(const ConstructedPoint& cp);

}  // namespace lirr
