#include <doctest.h>

#include <thread>
#include <vector>

#include "forge/classgroup.hpp"
#include "forge/curves.hpp"
#include "forge/numeric.hpp"
#include "forge/specialize.hpp"

using namespace forge;

namespace {

struct Pipeline {
  CurveFamily fam;
  RescaledModel model;
};

Pipeline pipeline(int m) {
  CurveFamily fam = build_family(m, Rat(2));
  RescaledModel model = rescale_with_map(odd_model(fam).g, 2);
  return {fam, model};
}

Rat rq(long n, long d) { return Rat(n) / Rat(d); }

}  // namespace

TEST_CASE("status names") {
  CHECK(to_string(SpecStatus::ok) == "ok");
  CHECK(to_string(SpecStatus::degenerate_zero) == "degenerate_zero");
  CHECK(to_string(SpecStatus::degenerate_square) == "degenerate_square");
  CHECK(to_string(SpecStatus::factor_budget_exceeded) ==
        "factor_budget_exceeded");
}

TEST_CASE("bad prime set") {
  CHECK(bad_prime_set(build_family(2, Rat(2))) == std::vector<Int>{2, 3});
  CHECK(bad_prime_set(build_family(3, Rat(2))) == std::vector<Int>{2, 3});
  CHECK(bad_prime_set(build_family(2, Rat(5))) == std::vector<Int>{2, 3, 5});
  CHECK(bad_prime_set(build_family(5, Rat(2))) == std::vector<Int>{2, 3, 5});
}

TEST_CASE("shifted value and its valuations") {
  auto [fam, model] = pipeline(2);
  Rat q = shifted_value(model.model, 6, 1);
  CHECK(q == rq(13775, 216));
  /* leading -1 and integer coefficients: v_p = -deg at every p | M */
  for (long t : {1L, 2L, 7L, -4L}) {
    Rat qt = shifted_value(model.model, 6, t);
    CHECK(p_valuation(qt, 2) == -3);
    CHECK(p_valuation(qt, 3) == -3);
  }
  CHECK(p_valuation(q, 5) == 2);

  auto [fam3, model3] = pipeline(3);
  Rat q3 = shifted_value(model3.model, 6, 1);
  CHECK(p_valuation(q3, 2) == -5);
  CHECK(p_valuation(q3, 3) == -5);

  /* M = 1 is allowed and hits integer points */
  CHECK(shifted_value(model.model, 1, 5) == 0);  // x0 = 6 is a root
  CHECK_THROWS_AS(shifted_value(model.model, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(shifted_value(model.model, -6, 1), std::invalid_argument);
}

TEST_CASE("total ramification check") {
  auto [fam, model] = pipeline(2);
  Rat q = shifted_value(model.model, 6, 1);
  CHECK(total_ramification_check(q, 2, 2));
  CHECK(total_ramification_check(q, 3, 2));
  CHECK_FALSE(total_ramification_check(q, 5, 2));  // v_5 = 2, gcd(2,2) = 2
  CHECK(total_ramification_check(rq(-1, 32), 2, 2));
  CHECK_FALSE(total_ramification_check(rq(-1, 16), 2, 2));
  CHECK(total_ramification_check(rq(7, 1), 7, 2));
  CHECK(total_ramification_check(rq(-1, 243), 3, 2));   // v = -5
  CHECK_FALSE(total_ramification_check(Rat(8), 2, 3));  // v = 3 = n
  CHECK(total_ramification_check(rq(4, 1), 2, 3));      // gcd(2, 3) = 1
  CHECK_THROWS_AS(total_ramification_check(Rat(0), 2, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(total_ramification_check(Rat(5), 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(total_ramification_check(Rat(5), 1, 2),
                  std::invalid_argument);
}

TEST_CASE("squarefree decomposition") {
  CHECK(squarefree_decompose(15004) == std::pair<Int, Int>{31, 22});
  CHECK(squarefree_decompose(-95) == std::pair<Int, Int>{-95, 1});
  CHECK(squarefree_decompose(1) == std::pair<Int, Int>{1, 1});
  CHECK(squarefree_decompose(-1) == std::pair<Int, Int>{-1, 1});
  CHECK(squarefree_decompose(360) == std::pair<Int, Int>{10, 6});
  CHECK(squarefree_decompose(-360) == std::pair<Int, Int>{-10, 6});
  CHECK_THROWS_AS(squarefree_decompose(0), std::invalid_argument);

  /* recomposition property */
  for (long n : {2L, 48L, 9973L, 104976L, -777600L, 123456789L}) {
    auto [d0, s] = squarefree_decompose(n);
    CHECK(d0 * s * s == n);
  }

  /* a semiprime beyond the trial bound needs rho; a one-step cap cannot */
  Int hard = Int("10000000019") * Int("10000000033");
  CHECK_THROWS_AS(squarefree_decompose(hard, factor_budget{1}),
                  budget_exceeded);
  CHECK(squarefree_decompose(hard) == std::pair<Int, Int>{hard, 1});
}

TEST_CASE("squarefree decomposition memo is thread safe") {
  std::vector<Int> inputs;
  for (long n = 2; n < 200; ++n) inputs.push_back(n * n * 91 - n);
  std::vector<std::thread> pool;
  std::vector<int> bad(8, 0);
  for (int w = 0; w < 8; ++w)
    pool.emplace_back([&, w] {
      for (const Int& n : inputs) {
        auto [d0, s] = squarefree_decompose(n);
        if (d0 * s * s != n) bad[w] = 1;
      }
    });
  for (auto& th : pool) th.join();
  for (int w = 0; w < 8; ++w) CHECK(bad[w] == 0);
}

TEST_CASE("fundamental discriminants") {
  CHECK(to_fundamental_discriminant(-95) == -95);
  CHECK(to_fundamental_discriminant(31) == 124);
  CHECK(to_fundamental_discriminant(-1) == -4);
  CHECK(to_fundamental_discriminant(2) == 8);
  CHECK(to_fundamental_discriminant(3) == 12);
  CHECK(to_fundamental_discriminant(-330) == -1320);
  CHECK(to_fundamental_discriminant(5) == 5);
  CHECK_THROWS_AS(to_fundamental_discriminant(0), std::invalid_argument);
  CHECK_THROWS_AS(to_fundamental_discriminant(1), std::invalid_argument);
}

TEST_CASE("specialization records, m = 2, M = 6") {
  auto [fam, model] = pipeline(2);

  SpecializationRecord r1 = specialize(fam, model, 6, 1);
  CHECK(r1.status == SpecStatus::ok);
  CHECK(r1.x0 == rq(7, 6));
  CHECK(r1.q == rq(13775, 216));
  CHECK(r1.d0 == 3306);
  CHECK(r1.s == 30);
  CHECK(r1.D == 13224);

  SpecializationRecord r6 = specialize(fam, model, 6, 6);
  CHECK(r6.x0 == rq(37, 6));
  CHECK(r6.q == rq(-2695, 216));
  CHECK(r6.d0 == -330);
  CHECK(r6.s == 42);
  CHECK(r6.D == -1320);

  SpecializationRecord r60 = specialize(fam, model, 6, 60);
  CHECK(r60.q == rq(-45944275, 216));
  CHECK(r60.d0 == -11026626);
  CHECK(r60.s == 30);
  CHECK(r60.D == -44106504);

  const std::vector<std::pair<long, Int>> frozen = {
      {2, 17112},        {3, 467976},    {4, 420024},   {5, 5160},
      {7, -563640},      {8, -1275144},  {9, -2230296}, {10, -138408},
      {11, -4995960},    {12, -6868680}, {26, -168},    {-1, 89544},
      {-3, -6360},       {-10, 4393560}, {-60, 1121739960}};
  for (const auto& [t, D] : frozen) {
    SpecializationRecord r = specialize(fam, model, 6, t);
    CHECK(r.status == SpecStatus::ok);
    CHECK(r.D == D);
    CHECK(r.d0 * r.s * r.s ==
          Int(r.q.get_num()) * Int(r.q.get_den()));
  }
}

TEST_CASE("specialization records, m = 3, M = 6") {
  auto [fam, model] = pipeline(3);

  SpecializationRecord r16 = specialize(fam, model, 6, 16);
  CHECK(r16.x0 == rq(97, 6));
  CHECK(r16.q == rq(-1081568893, 7776));
  CHECK(r16.d0 == Int("-6489413358"));
  CHECK(r16.s == 36);
  CHECK(r16.D == Int("-25957653432"));

  SpecializationRecord r60 = specialize(fam, model, 6, 60);
  CHECK(r60.d0 == Int("-20937981246"));
  CHECK(r60.s == 1476);
  CHECK(r60.D == Int("-83751924984"));

  const std::vector<std::pair<long, Int>> frozen = {
      {1, Int("2525015928")},    {2, Int("172195176")},
      {15, Int("3892071576")},   {17, Int("-68711201160")},
      {18, Int("-127330605528")}, {-1, Int("687154584")}};
  for (const auto& [t, D] : frozen) {
    SpecializationRecord r = specialize(fam, model, 6, t);
    CHECK(r.status == SpecStatus::ok);
    CHECK(r.D == D);
  }
}

TEST_CASE("degenerate specializations at M = 1") {
  auto [fam, model] = pipeline(2);

  SpecializationRecord rz = specialize(fam, model, 1, 5);  // x0 = 6, a root
  CHECK(rz.status == SpecStatus::degenerate_zero);
  CHECK(rz.q == 0);
  CHECK(rz.D == 0);

  SpecializationRecord rs = specialize(fam, model, 1, -1);  // q = 36
  CHECK(rs.status == SpecStatus::degenerate_square);
  CHECK(rs.x0 == 0);
  CHECK(rs.q == 36);
  CHECK(rs.d0 == 1);
  CHECK(rs.s == 6);
  CHECK(rs.D == 0);

  SpecializationRecord r4 = specialize(fam, model, 1, 4);  // x0 = 5
  CHECK(r4.status == SpecStatus::ok);
  CHECK(r4.q == 56);
  CHECK(r4.d0 == 14);
  CHECK(r4.s == 2);
  CHECK(r4.D == 56);
}

TEST_CASE("degenerate parameters are rare") {
  /* over x0 = 2..1001 the family m=2, c=2 degenerates far fewer than
     10 * sqrt(1000) times */
  auto [fam, model] = pipeline(2);
  int degenerate = 0;
  for (long t = 1; t <= 1000; ++t) {
    SpecializationRecord r = specialize(fam, model, 1, t);
    if (r.status != SpecStatus::ok) ++degenerate;
  }
  CHECK(degenerate <= 316);
}

TEST_CASE("factor budget bubbles into the record status") {
  auto [fam, model] = pipeline(2);
  Int M("10000019");  // prime beyond the trial-division bound
  SpecializationRecord starved = specialize(fam, model, M, 1, factor_budget{1});
  CHECK(starved.status == SpecStatus::factor_budget_exceeded);
  CHECK(starved.D == 0);

  SpecializationRecord full = specialize(fam, model, M, 1);
  CHECK(full.status == SpecStatus::ok);
  CHECK(full.s == 180000342);
  CHECK(mpz_divisible_p(full.d0.get_mpz_t(), M.get_mpz_t()));
  CHECK(mpz_divisible_p(full.D.get_mpz_t(), M.get_mpz_t()));
  CHECK(p_valuation(full.q, M) == -3);
}

TEST_CASE("specialize rejects malformed inputs") {
  auto [fam, model] = pipeline(2);
  CHECK_THROWS_AS(specialize(fam, model, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(specialize(fam, model, -6, 1), std::invalid_argument);
  /* an odd model that was never rescaled has leading != -1 */
  OddModel om = odd_model(fam);
  RescaledModel raw{om.g, 2, Rat(1), Rat(1)};
  CHECK_THROWS_AS(specialize(fam, raw, 6, 1), std::invalid_argument);
}

TEST_CASE("pullback classes, imaginary records") {
  auto [fam, model] = pipeline(2);

  SpecializationRecord r6 = specialize(fam, model, 6, 6);
  PullbackResult p6 = pullback_classes(fam, model, r6);
  CHECK(p6.admissible);
  CHECK(p6.obstruction.empty());
  CHECK(p6.gamma_plus == FormClass(Form(6, 0, 55)));
  CHECK(p6.gamma_minus == FormClass(Form(6, 0, 55)));
  CHECK_FALSE(p6.gamma_plus.is_principal());
  CHECK(power(p6.gamma_plus.representative(), 2).is_principal());

  /* the two-argument overload rebuilds the same rescaled model */
  PullbackResult p6b = pullback_classes(fam, r6);
  CHECK(p6b.gamma_plus == p6.gamma_plus);
  CHECK(p6b.gamma_minus == p6.gamma_minus);

  const std::vector<std::tuple<long, Form, Form>> frozen = {
      {7, Form(42, 0, 3355), Form(330, 0, 427)},
      {8, Form(78, 0, 4087), Form(366, 0, 871)},
      {9, Form(114, 0, 4891), Form(402, 0, 1387)},
      {10, Form(6, 0, 5767), Form(79, 0, 438)},
      {11, Form(186, 0, 6715), Form(474, 0, 2635)},
      {12, Form(222, 0, 7735), Form(510, 0, 3367)},
      {60, Form(78, 0, 141367), Form(2238, 0, 4927)}};
  for (const auto& [t, gp, gm] : frozen) {
    SpecializationRecord r = specialize(fam, model, 6, t);
    PullbackResult p = pullback_classes(fam, model, r);
    CHECK(p.admissible);
    CHECK(p.gamma_plus == FormClass(gp));
    CHECK(p.gamma_minus == FormClass(gm));
    CHECK(p.gamma_plus.representative().discriminant() == r.D);
    CHECK(power(p.gamma_plus.representative(), 2).is_principal());
    CHECK(power(p.gamma_minus.representative(), 2).is_principal());
    CHECK_FALSE(p.gamma_plus.is_principal());
    CHECK_FALSE(p.gamma_minus.is_principal());
  }

  /* t = 26 lands in the all-two-torsion group of discriminant -168, where
     the two branches necessarily agree */
  SpecializationRecord r26 = specialize(fam, model, 6, 26);
  CHECK(r26.D == -168);
  PullbackResult p26 = pullback_classes(fam, model, r26);
  CHECK(p26.admissible);
  CHECK(p26.gamma_plus == p26.gamma_minus);
  CHECK_FALSE(p26.gamma_plus.is_principal());
  CHECK(power(p26.gamma_plus.representative(), 2).is_principal());
}

TEST_CASE("pullback classes, real records") {
  auto [fam, model] = pipeline(2);

  SpecializationRecord r1 = specialize(fam, model, 6, 1);
  PullbackResult p1 = pullback_classes(fam, model, r1);
  CHECK(p1.admissible);
  CHECK(wide_class(p1.gamma_plus.representative()) ==
        wide_class(Form(19, 114, -3)));
  CHECK(wide_class(p1.gamma_minus.representative()) ==
        wide_class(Form(-2, 112, 85)));
  FormClass one1(principal_form(r1.D));
  CHECK(wide_class(p1.gamma_plus.representative()) != wide_class(one1.representative()));
  CHECK(wide_class(power(p1.gamma_plus.representative(), 2).representative()) ==
        wide_class(one1.representative()));

  SpecializationRecord r5 = specialize(fam, model, 6, 5);
  PullbackResult p5 = pullback_classes(fam, model, r5);
  CHECK(p5.admissible);
  CHECK(wide_class(p5.gamma_plus.representative()) ==
        wide_class(Form(-30, 60, 13)));
  CHECK(wide_class(p5.gamma_minus.representative()) ==
        wide_class(Form(-5, 70, 13)));
}

TEST_CASE("pullback classes, m = 3") {
  auto [fam, model] = pipeline(3);

  const std::vector<std::tuple<long, Form, Form>> frozen = {
      {16, Form(14647, -10792, 445042), Form(14647, 1430, 443089)},
      {17, Form(16171, 8830, 1063465), Form(16171, 590, 1062265)},
      {18, Form(17767, -1850, 1791721), Form(17767, -106, 1791673)}};
  for (const auto& [t, gp, gm] : frozen) {
    SpecializationRecord r = specialize(fam, model, 6, t);
    PullbackResult p = pullback_classes(fam, model, r);
    CHECK(p.admissible);
    CHECK(p.gamma_plus == FormClass(gp));
    CHECK(p.gamma_minus == FormClass(gm));
    /* order exactly three */
    CHECK_FALSE(p.gamma_plus.is_principal());
    CHECK_FALSE(power(p.gamma_plus.representative(), 2).is_principal());
    CHECK(power(p.gamma_plus.representative(), 3).is_principal());
    CHECK_FALSE(p.gamma_minus.is_principal());
    CHECK(power(p.gamma_minus.representative(), 3).is_principal());
  }

  /* real record: order three on both branches, seen through the wide group */
  SpecializationRecord rr = specialize(fam, model, 6, -1);
  CHECK(rr.D == Int("687154584"));
  PullbackResult pr = pullback_classes(fam, model, rr);
  CHECK(pr.admissible);
  FormClass onew = wide_class(principal_form(rr.D));
  CHECK(wide_class(pr.gamma_plus.representative()) != onew);
  CHECK(wide_class(power(pr.gamma_plus.representative(), 3).representative()) == onew);
  CHECK(wide_class(pr.gamma_minus.representative()) != onew);
  CHECK(wide_class(power(pr.gamma_minus.representative(), 3).representative()) == onew);
}

TEST_CASE("pullback admissibility screen") {
  auto [fam, model] = pipeline(2);

  /* x0 = 2: the even point 4 puts 2 in the support */
  SpecializationRecord r1 = specialize(fam, model, 1, 1);
  CHECK(r1.D == 5);
  PullbackResult p1 = pullback_classes(fam, model, r1);
  CHECK_FALSE(p1.admissible);
  CHECK(p1.obstruction == "prime 2 in the point support");

  /* x0 = 3: the even point 3 divides b^2 - 4c^2 = 9 */
  SpecializationRecord r2 = specialize(fam, model, 1, 2);
  CHECK(r2.D == 40);
  PullbackResult p2 = pullback_classes(fam, model, r2);
  CHECK_FALSE(p2.admissible);
  CHECK(p2.obstruction == "prime 3 divides b^2 - 4c^2");

  /* x0 = 9: even point 5/3 */
  SpecializationRecord r8 = specialize(fam, model, 1, 8);
  PullbackResult p8 = pullback_classes(fam, model, r8);
  CHECK_FALSE(p8.admissible);
  CHECK(p8.obstruction == "prime 3 divides b^2 - 4c^2");

  /* x0 = 5: admissible, and both classes already trivial in the wide group */
  SpecializationRecord r4 = specialize(fam, model, 1, 4);
  PullbackResult p4 = pullback_classes(fam, model, r4);
  CHECK(p4.admissible);
  FormClass onew = wide_class(principal_form(Int(56)));
  CHECK(wide_class(p4.gamma_plus.representative()) == onew);
  CHECK(wide_class(p4.gamma_minus.representative()) == onew);

  /* pullback demands an ok record */
  SpecializationRecord rz = specialize(fam, model, 1, 5);
  CHECK_THROWS_AS(pullback_classes(fam, model, rz), std::invalid_argument);
}

TEST_CASE("exceptional records") {
  auto [fam, model] = pipeline(2);

  SpecializationRecord r6 = specialize(fam, model, 6, 6);
  CHECK_FALSE(is_exceptional(r6, 2, class_group(r6.D)));  // rank 3 ambient

  /* wide class group of discriminant 56 is trivial: rank 0 < 1 */
  SpecializationRecord r4 = specialize(fam, model, 1, 4);
  CHECK(is_exceptional(r4, 2, class_group(r4.D)));

  CHECK_THROWS_AS(is_exceptional(r6, 2, class_group(Int(-168))),
                  std::invalid_argument);
  SpecializationRecord rz = specialize(fam, model, 1, 5);
  CHECK_THROWS_AS(is_exceptional(rz, 2, class_group(Int(-168))),
                  std::invalid_argument);
}
