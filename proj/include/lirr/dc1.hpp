#pragma once

// Closeness densities, DC1 pair checks at checkpoint times, and the
// finite-time exponent divergence report.

#include "lirr/cocycle.hpp"
#include "lirr/constructor.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lirr {

/// (1/n) |{i in [0, n) : d(f^i x, f^i y) < t}|, exact.
double closeness_density(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double t,
                         const ShiftMetric& metric = ShiftMetric{});
/// The count behind closeness_density.
Index closeness_count(const SymbolSequence& x, const SymbolSequence& y, const Index& n, double t,
                      const ShiftMetric& metric = ShiftMetric{});

struct Distality {
  double zeta;
  bool degenerate;  // fixed point: the pair x, fx is not distal
};

/// min over i in [0, p) of d(f^i x, f^{i+1} x) for x = word^infinity.
Distality distality_constant(const Word& word, const ShiftMetric& metric = ShiftMetric{});

/// One row of a trace: (k, time, value, bound, pass).
struct TraceRow {
  int k;
  Index time;
  double value;
  double bound;
  double slack;
  bool pass;
};

struct DensityTrace {
  std::string label;  // "high t=..." or "distal kappa=..."
  double threshold;   // t or kappa; 0 means t = 4 delta_{k+1} per row
  std::vector<TraceRow> rows;
  double extreme;     // max density over high rows, min over distal rows
  bool pass = true;
};

struct Dc1Report {
  bool distinct;      // p != q
  int first_difference;  // s (1-based), 0 if not distinct
  double zeta;
  std::vector<DensityTrace> upper;  // one per t
  DensityTrace lower;                // distal checkpoints at kappa
  bool pass = true;
};

/// t_list entries equal to 0 mean t = 4 delta_{k+1} at stage k. Requires
/// kappa < zeta of x.
Dc1Report dc1_report(const ConstructedPoint& p_point, const ConstructedPoint& q_point, const std::vector<double>& t_list,
                     double kappa);

struct DivergenceTrace {
  std::vector<TraceRow> low;
  std::vector<TraceRow> high;
  double limsup_estimate = 0.0;  // max over low values
  double liminf_estimate = 0.0;  // min over high values
  double gap = 0.0;              // liminf_estimate - limsup_estimate
  double required_gap = 0.0;     // (a - b) - 3 tau - max slack
  double max_slack = 0.0;
  bool degenerate = false;       // a == b: nothing to separate
  bool divergent = false;
  bool pass = true;              // every row passes and the verdict matches
  std::string verdict;
};

struct DivergenceParams {
  double a;        // top exponent of the measure shadowed by x-blocks
  double b;        // top exponent of the measure shadowed by z-blocks
  double tau;
  double epsilon;
  double l;        // Pesin-block constant, >= 1
  double degenerate_tol = 1e-9;
};

/// Finite-time maximal exponents at the low and high checkpoints of g.
DivergenceTrace divergence_report(const Cocycle& a, const ConstructedPoint& g, const DivergenceParams& params);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace lirr
