#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lirr/spectra.hpp"
#include "oracles.hpp"

#include <map>

using namespace lirr;

namespace {

Cocycle desk() {
  Matrix a0(2, 2);
  a0 << 4, 0, 0, 0.25;
  return Cocycle(2, 2, 0, {a0, Matrix::Identity(2, 2)});
}

Cocycle random_cocycle(int q, int m, int w, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (int i = 0; i < 2 * w + 1; ++i) n *= q;
  std::vector<Matrix> table;
  for (std::size_t c = 0; c < n; ++c) table.push_back(oracle::random_integer_matrix(m, rng));
  return Cocycle(q, m, w, table);
}

}  // namespace

TEST_CASE("table validation") {
  std::map<Word, Matrix> entries;
  entries[Word{0}] = Matrix::Identity(2, 2);
  try {
    Cocycle::from_words(2, 2, 0, entries);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("missing cocycle entry for word 1") != std::string::npos);
  }
  entries[Word{1}] = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(Cocycle::from_words(2, 2, 0, entries), Error);
  entries[Word{1}] = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(Cocycle::from_words(2, 2, 0, entries), Error);
  CHECK_THROWS_AS(Cocycle(2, 2, 0, {Matrix::Identity(2, 2)}), Error);
}

TEST_CASE("bound C covers norms and inverse norms") {
  const Cocycle a = desk();
  CHECK(a.bound_c() == doctest::Approx(4.0));
  CHECK(a.holder_exponent() == 1.0);
}

TEST_CASE("products agree with plain multiplication") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 3, w = trial % 2;
    const Cocycle a = random_cocycle(2, m, w, rng);
    const auto x = trial % 2 ? SymbolSequence::periodic(oracle::random_word(5, 2, rng))
                             : SymbolSequence::finite_support(3, oracle::random_word(9, 2, rng), 1);
    for (long long n : {0LL, 1LL, 7LL, 20LL}) {
      const Matrix ref = oracle::product(a, x, n);
      const ScaledMatrix p = cocycle_product(a, x, n);
      const Matrix got = p.unit() * std::exp(p.log_scale());
      CHECK((got - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
      // A(x, -n) = A(f^-n x)^-1 ... A(f^-1 x)^-1; inverting the forward
      // product instead loses too many digits once entries pass 2^53
      Matrix back = Matrix::Identity(m, m);
      for (long long i = 1; i <= n; ++i) back = oracle::entry_at(a, x, -i).inverse() * back;
      const ScaledMatrix q = cocycle_product(a, x, -n);
      const Matrix got_back = q.unit() * std::exp(q.log_scale());
      CHECK((got_back - back).norm() <= 1e-9 * std::max(1.0, back.norm()));
      if (n <= 7) {
        const Matrix fwd = oracle::product(a, x.shifted(-n), n);
        CHECK((got_back * fwd - Matrix::Identity(m, m)).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("huge periodic products stay finite") {
  const Cocycle a = desk();
  const auto x = SymbolSequence::periodic(Word{0, 1});
  const Index n = parse_index("100000000000000000000000000000000000000");
  CHECK(finite_time_mle(a, x, n) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(finite_time_mle(a, x, 1) == doctest::Approx(std::log(4.0)));
  CHECK(finite_time_mle(a, x, 2) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(finite_time_mle(a, x, 0), Error);
}

TEST_CASE("exterior powers are compound matrices") {
  Matrix m(3, 3);
  m << 1, 2, 0, 0, 1, 3, 4, 0, 1;
  const Matrix c2 = compound_matrix(m, 2);
  CHECK(c2.rows() == 3);
  // (1,2) minor of rows {0,1}, cols {0,1}
  CHECK(c2(0, 0) == doctest::Approx(1.0));
  CHECK(compound_matrix(m, 3)(0, 0) == doctest::Approx(m.determinant()));
  // Cauchy-Binet
  Matrix n(3, 3);
  n << 2, 1, 1, 0, 1, 0, 1, 1, 3;
  CHECK((compound_matrix(m * n, 2) - compound_matrix(m, 2) * compound_matrix(n, 2)).norm() < 1e-12);
  CHECK(binomial(4, 2) == 6);
  const Cocycle a = desk();
  CHECK_THROWS_AS(exterior_power(a, 3), Error);
  CHECK_THROWS_AS(exterior_power(a, 0), Error);
  const Cocycle e2 = exterior_power(a, 2);
  CHECK(e2.dimension() == 1);
  CHECK(e2.entry(0)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("exact spectra") {
  const Cocycle a = desk();
  const auto nu = exact_spectrum(a, PeriodicMeasure(Word{0, 1}));
  REQUIRE(nu.distinct() == 2);
  CHECK(std::abs(nu.entries()[0].exponent + std::log(2.0)) < 1e-12);
  CHECK(std::abs(nu.entries()[1].exponent - std::log(2.0)) < 1e-12);
  const auto om = exact_spectrum(a, PeriodicMeasure(Word{1}));
  REQUIRE(om.distinct() == 1);
  CHECK(om.entries()[0].multiplicity == 2);
  CHECK(std::abs(om.top()) < 1e-12);
  CHECK_THROWS_AS(PeriodicMeasure(Word{0, 1, 0, 1}), Error);
  CHECK_NOTHROW(PeriodicMeasure(Word{0, 1, 0, 1}, true));

  // rotation matrix: complex pair shares its modulus
  Matrix r(2, 2);
  r << 0, -2, 2, 0;
  const Cocycle rot(2, 2, 0, {r, r});
  const auto s = exact_spectrum(rot, PeriodicMeasure(Word{0}));
  REQUIRE(s.distinct() == 1);
  CHECK(s.entries()[0].multiplicity == 2);
  CHECK(s.top() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("exact spectra match eigenvalues of random period matrices") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + trial % 4;
    const Cocycle a = random_cocycle(2, m, trial % 2, rng);
    const Word w = oracle::random_word(1 + trial % 6, 2, rng);
    const auto expected = oracle::periodic_exponents(a, w);
    const auto got = exact_spectrum(a, PeriodicMeasure(w, true)).expanded_descending();
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-8));
  }
}

TEST_CASE("Benettin estimates") {
  const Cocycle a = desk();
  const auto b = benettin_spectrum(a, SymbolSequence::periodic(Word{0, 1}), 10000);
  REQUIRE(b.size() == 2);
  CHECK(std::abs(b[0] - std::log(2.0)) < 1e-6);
  CHECK(std::abs(b[1] + std::log(2.0)) < 1e-6);

  // non-normal period matrix: converges after a transient
  Matrix u(2, 2);
  u << 2, 5, 0, 0.5;
  const Cocycle c(2, 2, 0, {u, u});
  const auto e = benettin_spectrum(c, SymbolSequence::periodic(Word{0}), 10000, 10000);
  CHECK(std::abs(e[0] - std::log(2.0)) < 1e-6);
  CHECK(std::abs(e[1] + std::log(2.0)) < 1e-6);
}

TEST_CASE("grouping and partial sums") {
  const auto s = group_exponents({0.5, 0.5 + 1e-12, -1.0, 2.0}, 1e-9);
  REQUIRE(s.distinct() == 3);
  CHECK(s.entries()[1].multiplicity == 2);
  CHECK(s.dimension() == 4);
  CHECK(lambda_partial_sum(s, 1) == doctest::Approx(2.0));
  CHECK(lambda_partial_sum(s, 3) == doctest::Approx(3.0));
  CHECK(lambda_partial_sum(s, 4) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lambda_partial_sum(s, 5), Error);
  CHECK_THROWS_AS(lambda_partial_sum(s, 0), Error);
  CHECK(*s.second() == doctest::Approx(0.5));
}

TEST_CASE("spectrum comparison and degree selection") {
  const LyapunovSpectrum a({{-1.0, 1}, {1.0, 1}});
  const LyapunovSpectrum b({{0.0, 2}});
  const LyapunovSpectrum c({{-1.0 + 1e-7, 1}, {1.0, 1}});
  CHECK_FALSE(spectra_equal(a, b, 1e-9));
  CHECK(spectra_equal(a, a, 1e-9));
  CHECK(spectra_equal(a, c, 1e-6));
  CHECK_FALSE(spectra_equal(a, c, 1e-8));
  CHECK(*select_exterior_degree(a, b, 1e-9) == 1);
  CHECK_FALSE(select_exterior_degree(a, a, 1e-9).has_value());

  // Lambda_1 equal, Lambda_2 differs
  const LyapunovSpectrum n({{0.0, 1}, {std::log(2.0), 1}});
  const LyapunovSpectrum o({{-std::log(2.0), 1}, {std::log(2.0), 1}});
  CHECK(*select_exterior_degree(n, o, 1e-9) == 2);
  CHECK(epsilon0(o, std::log(2.0), 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(epsilon0(n, std::log(2.0), 1.0) == doctest::Approx(std::log(2.0) / 2));
  CHECK(epsilon0(b, std::log(2.0), 1.0) == doctest::Approx(std::log(2.0)));
}
