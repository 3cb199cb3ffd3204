#include "doctest.h"
#include "forge/abelian.hpp"

using namespace forge;

namespace {
FiniteAbelianGroup grp(std::initializer_list<long> ds) {
  std::vector<Int> v;
  for (long d : ds) v.emplace_back(d);
  return FiniteAbelianGroup(v);
}
}  // namespace

TEST_CASE("group construction and basics") {
  CHECK(FiniteAbelianGroup().is_trivial());
  CHECK(FiniteAbelianGroup().order() == 1);
  CHECK(grp({2, 4}).order() == 8);
  CHECK(grp({2, 4}).is_m_torsion(Int(4)));
  CHECK(!grp({2, 4}).is_m_torsion(Int(2)));
  CHECK_THROWS(grp({4, 2}));   // chain violated
  CHECK_THROWS(grp({1, 2}));   // factor below 2
  CHECK_THROWS(grp({2, 3}));   // 2 does not divide 3
}

TEST_CASE("direct sums") {
  CHECK(grp({2}).direct_sum(grp({3})) == grp({6}));
  CHECK(grp({2}).direct_sum(grp({2})) == grp({2, 2}));
  CHECK(grp({2, 4}).direct_sum(grp({3})) == grp({2, 12}));
  CHECK(grp({6}).direct_sum(grp({4})) == grp({2, 12}));
  CHECK(FiniteAbelianGroup().direct_sum(grp({5})) == grp({5}));
}

TEST_CASE("m_rank on the frozen examples") {
  CHECK(m_rank(FiniteAbelianGroup(), Int(5)) == 0);
  CHECK(m_rank(grp({2, 4}), Int(2)) == 2);
  CHECK(m_rank(grp({2, 4}), Int(4)) == 1);
  CHECK(m_rank(grp({6, 12}), Int(6)) == 2);
  CHECK_THROWS(m_rank(grp({2}), Int(1)));
}

TEST_CASE("p_power_rank") {
  CHECK(p_power_rank(grp({2, 4}), Int(2), 1) == 2);
  CHECK(p_power_rank(grp({9}), Int(3), 2) == 1);
  CHECK(p_power_rank(grp({5}), Int(2), 1) == 0);
  CHECK_THROWS(p_power_rank(grp({4}), Int(4), 1));  // p not prime
  for (long p : {2L, 3L, 5L}) {
    for (unsigned e = 1; (1u << e) <= 32; ++e) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), Int(p).get_mpz_t(), e);
      if (pe > 32) break;
      CHECK(p_power_rank(grp({2, 6, 36}), Int(p), e) ==
            m_rank(grp({2, 6, 36}), pe));
    }
  }
}

TEST_CASE("smith normal form of relation matrices") {
  CHECK(smith_normal_form(IntMatrix::from_rows({{Int(2), Int(0)}, {Int(0), Int(4)}}, 2)) ==
        grp({2, 4}));
  CHECK(smith_normal_form(IntMatrix::from_rows({{Int(2), Int(0)}, {Int(0), Int(3)}}, 2)) ==
        grp({6}));
  CHECK(smith_normal_form(IntMatrix::from_rows({{Int(1), Int(0)}, {Int(0), Int(1)}}, 2))
            .is_trivial());
  CHECK_THROWS_AS(smith_normal_form(IntMatrix::from_rows({{Int(2), Int(4)}}, 2)),
                  std::domain_error);
  /* negative entries and a non-diagonal shape */
  CHECK(smith_normal_form(IntMatrix::from_rows(
            {{Int(-4), Int(2)}, {Int(2), Int(8)}, {Int(6), Int(6)}}, 2)) == grp({2, 18}));
}

TEST_CASE("smith decomposition transforms") {
  IntMatrix m = IntMatrix::from_rows({{Int(6), Int(4)}, {Int(2), Int(8)}}, 2);
  SmithDecomposition s = smith_decomposition(m);
  REQUIRE(s.diag.size() == 2);
  CHECK(s.diag[0] == 2);
  CHECK(s.diag[1] == 20);
  /* u * m * v must reproduce the diagonal */
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) {
      Int acc = 0;
      for (size_t a = 0; a < 2; ++a)
        for (size_t b = 0; b < 2; ++b) acc += s.u.at(i, a) * m.at(a, b) * s.v.at(b, j);
      CHECK(acc == (i == j ? s.diag[i] : Int(0)));
    }
}

TEST_CASE("SNF idempotence on invariant factors") {
  for (auto g : {grp({2, 4}), grp({3, 3, 9}), grp({2, 6, 36}), grp({8})}) {
    const auto& d = g.invariant_factors();
    IntMatrix m(d.size(), d.size());
    for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    CHECK(smith_normal_form(m) == g);
  }
}

TEST_CASE("brute force m-rank agrees with the formula") {
  CHECK(brute_force_m_rank(grp({2, 2}), Int(2)) == 2);
  CHECK(brute_force_m_rank(grp({4}), Int(2)) == 1);
  CHECK(brute_force_m_rank(grp({3, 9}), Int(9)) == 1);
  for (auto g : {grp({2, 4}), grp({6, 12}), grp({2, 2, 2}), grp({3, 9}), grp({30}),
                 FiniteAbelianGroup()})
    for (long m = 2; m <= 24; ++m)
      CHECK(brute_force_m_rank(g, Int(m)) == m_rank(g, Int(m)));
  CHECK_THROWS_AS(brute_force_m_rank(grp({2, 2, 2, 2, 131072}), Int(2)), budget_exceeded);
}

TEST_CASE("sampled exact sequences satisfy Lagrange") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto g = grp({2, 4, 8});
    auto w = sample_exact_sequence(g, seed);
    CHECK(w.subgroup_structure().order() * w.quotient.order() == g.order());
  }
  auto t = sample_exact_sequence(FiniteAbelianGroup(), 7);
  CHECK(t.ambient.is_trivial());
  CHECK(t.quotient.is_trivial());
}

TEST_CASE("rank lemma on witnesses") {
  /* hand-built split sequence: A = (2) inside B = (2,2), C = (2) */
  SubquotientWitness w;
  w.ambient = grp({2, 2});
  w.sub_generators = {{Int(1), Int(0)}};
  w.quotient = grp({2});
  auto v = check_rank_lemma(w, Int(2));
  CHECK(v.inequality_holds);
  CHECK(v.equality_expected);
  CHECK(v.equality_holds);

  /* A = 2Z/4 = (2) inside B = (4), C = (2): fine for m = 4, rejected for m = 2 */
  SubquotientWitness w2;
  w2.ambient = grp({4});
  w2.sub_generators = {{Int(2)}};
  w2.quotient = grp({2});
  auto v2 = check_rank_lemma(w2, Int(4));
  CHECK(v2.inequality_holds);   // rk_4(4)=1 >= rk_4(2)+rk_4(2) = 0
  CHECK(!v2.equality_expected);
  CHECK(!v2.equality_holds);
  CHECK_THROWS_AS(check_rank_lemma(w2, Int(2)), std::invalid_argument);

  for (uint64_t seed = 0; seed < 200; ++seed) {
    auto g = grp({2, 4, 4});
    auto w3 = sample_exact_sequence(g, seed);
    auto v3 = check_rank_lemma(w3, Int(4));
    CHECK(v3.inequality_holds);
    if (v3.equality_expected) CHECK(v3.equality_holds);
  }
}

TEST_CASE("monotonicity of m_rank under sub and quotient") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto g = grp({2, 2, 6});
    auto w = sample_exact_sequence(g, seed);
    for (long m : {2L, 6L}) {
      CHECK(m_rank(w.subgroup_structure(), Int(m)) <= m_rank(g, Int(m)));
      CHECK(m_rank(w.quotient, Int(m)) <= m_rank(g, Int(m)));
    }
  }
}
