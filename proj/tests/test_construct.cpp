#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lirr/dc1.hpp"
#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>

using namespace lirr;

namespace {

std::shared_ptr<const Schedule> desk_schedule(int k_max = 6) {
  ScheduleParams sp;
  sp.x_period = 2;
  sp.z_period = 1;
  sp.k_max = k_max;
  return std::make_shared<const Schedule>(make_schedule(sp));
}

Cocycle desk() {
  Matrix a0(2, 2);
  a0 << 4, 0, 0, 0.25;
  return Cocycle(2, 2, 0, {a0, Matrix::Identity(2, 2)});
}

// (1/n) log |A(y, n)| by stepwise multiplication with renormalization.
double brute_mle(const Cocycle& a, const SymbolSequence& y, long long n) {
  Matrix m = Matrix::Identity(a.dimension(), a.dimension());
  double log_scale = 0.0;
  for (long long i = 0; i < n; ++i) {
    m = oracle::entry_at(a, y, i) * m;
    const double s = m.cwiseAbs().maxCoeff();
    m /= s;
    log_scale += std::log(s);
  }
  return (log_scale + std::log(oracle::op_norm(m))) / static_cast<double>(n);
}

// num / den < xi exactly; xi is a double, so a dyadic rational.
bool ratio_below(const Index& num, const Index& den, double xi) {
  using boost::multiprecision::cpp_int;
  int e = 0;
  const double f = std::frexp(xi, &e);
  const cpp_int mant(static_cast<long long>(std::ldexp(f, 53)));
  return (cpp_int(num) << (53 - e)) < mant * cpp_int(den);
}

}  // namespace

TEST_CASE("desk schedule values") {
  const auto s = desk_schedule();
  CHECK(s->stages() == 7);
  CHECK(s->k_max() == 6);
  CHECK_FALSE(s->partial());
  CHECK(s->L(2) == 250);
  CHECK(s->pi(1) == 83);
  for (int k = 1; k <= s->stages(); ++k) {
    CHECK(s->delta(k) == doctest::Approx(0.125 / std::pow(2.0, k)));
    CHECK(s->gap(k) == 2 * k + 9);
    CHECK(s->xi(k) == doctest::Approx(std::pow(0.5, k)));
  }
  CHECK(s->verify_conditions());
}

TEST_CASE("schedule conditions recomputed exactly") {
  for (auto rule : {XiRule::power2(), XiRule::geometric(0.7)}) {
    ScheduleParams sp;
    sp.xi = rule;
    sp.x_period = 3;
    sp.z_period = 2;
    sp.k_max = 4;
    const Schedule s = make_schedule(sp);
    for (int k = 0; k < s.stages(); ++k) {
      const int st = k + 1;
      // L_{k+1} is a multiple of |z| and Pi(k) / (Pi(k) + L_{k+1}) < xi_{k+1}
      CHECK(s.L(st) % 2 == 0);
      if (k >= 1) {
        CHECK(ratio_below(s.pi(k), s.pi(k) + s.L(st), s.xi(st)));
      }
      for (int i = 1; i <= k + 1; ++i) {
        const Index& h = s.H(Schedule::h_index(k, i));
        CHECK(h % 3 == 0);
        CHECK(ratio_below(s.pi_ki(k, i), s.pi_ki(k, i) + h, s.xi(st)));
      }
      // Pi(k) = Sigma(k) + N_{k+1}
      CHECK(s.pi(k) == s.sigma(k) + s.gap(st));
    }
  }
}

TEST_CASE("schedules beyond the index range are partial") {
  const Schedule s = make_schedule([] {
    ScheduleParams sp;
    sp.x_period = 2;
    sp.k_max = 9;
    return sp;
  }());
  CHECK(s.partial());
  CHECK(s.stages() < 10);
  CHECK(s.verify_conditions());
}

TEST_CASE("constructed points copy their sources") {
  const auto sched = desk_schedule(3);
  const Word x{0, 1}, z{1};
  const auto g = build_point(x, z, sched, {0, 1, 1, 0}, {});
  const auto xs = SymbolSequence::periodic(x);
  const auto zs = SymbolSequence::periodic(z);
  Index prev_end = -1;
  for (const auto& e : g.provenance()) {
    CHECK(e.start >= prev_end);
    prev_end = e.end;
    if (e.kind == BlockKind::Gap || e.kind == BlockKind::Initial) continue;
    const auto& src = e.kind == BlockKind::X ? xs : zs;
    // the copy covers the block and its margins
    const long long lo = (e.start - e.margin).convert_to<long long>();
    const long long hi = (e.end + e.margin).convert_to<long long>();
    for (long long i = lo; i <= std::min(hi, lo + 3000); ++i)
      CHECK(g.sequence()[i] == src[i - e.start.convert_to<long long>() + e.shift]);
  }
  CHECK(audit_containment(g).pass);
}

TEST_CASE("build errors and stage selection") {
  const auto sched = desk_schedule(3);
  CHECK_THROWS_AS(build_point(Word{0, 1}, Word{1}, sched, {1, 0}, {}), Error);
  CHECK_THROWS_AS(build_point(Word{0, 1}, Word{1}, sched, {0, 2}, {}), Error);
  BuildOptions o;
  o.horizon = 1000;
  const auto g = build_point(Word{0, 1}, Word{1}, sched, {0}, o);
  CHECK(g.stages() == 2);
  CHECK(sched->sigma(2) >= 1000);
  CHECK(sched->sigma(1) < 1000);
  // a short p is padded with zeros
  CHECK(g.p().size() >= 2);
}

TEST_CASE("closeness densities match brute force") {
  const auto sched = desk_schedule(3);
  const auto g1 = build_point(Word{0, 1}, Word{1}, sched, {0, 1, 0, 1}, {});
  const auto g2 = build_point(Word{0, 1}, Word{1}, sched, {0, 0, 1, 1}, {});
  for (double t : {1.5, 0.5, 0.25, 0.03, 0.001}) {
    for (long long n : {1LL, 70LL, 333LL, 1386LL, 6000LL}) {
      CHECK(closeness_count(g1.sequence(), g2.sequence(), n, t) ==
            oracle::density_count(g1.sequence(), g2.sequence(), n, t));
    }
  }
  // trivial examples
  const auto a = SymbolSequence::constant(0), b = SymbolSequence::constant(1);
  CHECK(closeness_density(a, b, 100, 0.5) == 0.0);
  CHECK(closeness_density(a, a, 100, 0.5) == 1.0);
  CHECK_THROWS_AS(closeness_density(a, b, 100, 0.0), Error);
  // monotone in t
  double prev = 0.0;
  for (double t : {0.001, 0.01, 0.1, 0.5, 1.0, 2.0}) {
    const double d = closeness_density(g1.sequence(), g2.sequence(), 5000, t);
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("distality constants") {
  CHECK(distality_constant(Word{0, 1}).zeta == 1.0);
  // x and fx agree at coordinate 0 but not at 1
  CHECK(distality_constant(Word{0, 0, 1}).zeta == 0.5);
  const auto d = distality_constant(Word{0});
  CHECK(d.zeta == 0.0);
  CHECK(d.degenerate);
  CHECK(distality_constant(Word{0, 0, 1, 1}).zeta == doctest::Approx(0.5));
}

TEST_CASE("DC1 report on the desk instance") {
  const auto sched = desk_schedule();
  const auto g1 = build_point(Word{0, 1}, Word{1}, sched, {0, 1, 0, 1, 1, 0, 1}, {});
  const auto g2 = build_point(Word{0, 1}, Word{1}, sched, {0, 0, 1, 1, 1, 0, 1}, {});
  const Dc1Report r = dc1_report(g1, g2, {0.0, 0.5}, 0.5);
  CHECK(r.distinct);
  CHECK(r.first_difference == 2);
  CHECK(r.pass);
  REQUIRE(r.upper.size() == 2);
  CHECK(r.lower.rows.size() == 6);
  for (const auto& row : r.lower.rows) CHECK(row.value <= row.bound);
  for (const auto& row : r.upper[0].rows) CHECK(row.value >= row.bound);
  // the first high row is small enough for brute force
  const auto& row = r.upper[0].rows.front();
  const long long n = row.time.convert_to<long long>();
  const double t = 4.0 * sched->delta(row.k + 1);
  CHECK(row.value == doctest::Approx(static_cast<double>(oracle::density_count(g1.sequence(), g2.sequence(), n, t)) / n));

  const Dc1Report same = dc1_report(g1, g1, {0.0}, 0.5);
  CHECK_FALSE(same.distinct);
  CHECK_FALSE(same.pass);
  for (const auto& rr : same.upper[0].rows) CHECK(rr.value == 1.0);
  CHECK_THROWS_AS(dc1_report(g1, g2, {0.0}, 1.0), Error);
}

TEST_CASE("divergence report") {
  const auto sched = desk_schedule();
  const Cocycle a = desk();
  const auto g = build_point(Word{0, 1}, Word{1}, sched, {0, 1, 1, 0, 1, 0, 0}, {});
  const DivergenceTrace t = divergence_report(a, g, {std::log(2.0), 0.0, 0.15, 0.1, 10.0});
  CHECK(t.verdict == "divergent");
  CHECK(t.pass);
  CHECK(t.gap >= 0.2);
  CHECK(t.low.back().slack < 0.05);
  CHECK(t.high.back().slack < 0.05);
  // the k = 1 rows are short enough to multiply out
  CHECK(t.low.front().value ==
        doctest::Approx(brute_mle(a, g.sequence(), t.low.front().time.convert_to<long long>())).epsilon(1e-10));
  CHECK(t.high.front().value ==
        doctest::Approx(brute_mle(a, g.sequence(), t.high.front().time.convert_to<long long>())).epsilon(1e-10));
  // the slack reproduces (Pi(k) log C + l + log l) / n
  const auto& r = t.low.front();
  CHECK(r.slack == doctest::Approx((83.0 * std::log(4.0) + 10.0 + std::log(10.0)) / 333.0));

  const Cocycle id(2, 2, 0, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)});
  const DivergenceTrace d = divergence_report(id, g, {0.0, 0.0, 0.15, 0.1, 1.0});
  CHECK(d.degenerate);
  CHECK(d.verdict == "no divergence");
  for (const auto& row : d.low) CHECK(row.value == 0.0);
  CHECK_THROWS_AS(divergence_report(a, g, {0.5, 0.1, 0.15, 0.1, 10.0}), Error);
}

TEST_CASE("trace CSV") {
  std::ostringstream out;
  write_trace_csv(out, {{1, 333, 0.1, 0.15, 0.02, true}});
  CHECK(out.str() == "k,time,value,bound,pass,slack\n1,333,0.1,0.15,1,0.02\n");
}
