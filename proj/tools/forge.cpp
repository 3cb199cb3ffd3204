#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/abelian.hpp"
#include "forge/classgroup.hpp"
#include "forge/curves.hpp"
#include "forge/numeric.hpp"
#include "forge/qform.hpp"
#include "forge/specialize.hpp"
#include "forge/survey.hpp"

using json = nlohmann::ordered_json;
using namespace forge;

/* Exit codes: 0 success, 1 usage error, 2 verification failure (or an
   internal invariant break), 3 budget exhaustion. */
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitBudget = 3;

std::string rat_str(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat parse_rational(const std::string& text) {
  try {
    Rat q(text);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational number: " + text);
  }
}

Int parse_integer(const std::string& text) {
  try {
    return Int(text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not an integer: " + text);
  }
}

json int_json(const Int& n) {
  if (n.fits_slong_p()) return json(static_cast<int64_t>(n.get_si()));
  return json(n.get_str());
}

json poly_json(const Polynomial& f) {
  json arr = json::array();
  for (const Rat& c : f.coefficients()) arr.push_back(rat_str(c));
  return arr;
}

std::string poly_str(const Polynomial& f) {
  std::string out = "[";
  const auto& cs = f.coefficients();
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ", ";
    out += rat_str(cs[i]);
  }
  return out + "]";
}

/* ---- survey option plumbing ------------------------------------------- */

struct SurveyFlags {
  int m = 2;
  std::string c = "2";
  long t_min = 0;
  long t_max = 0;
  std::string sign = "imag";
  std::string modulus_override;
  long budget_ms = 10000;
  int threads = 1;
};

void add_survey_flags(CLI::App* cmd, SurveyFlags& f, bool with_threads) {
  cmd->add_option("--m", f.m, "torsion order of the family (2..6)")
      ->required();
  cmd->add_option("--c", f.c, "family parameter c as a rational")
      ->capture_default_str();
  cmd->add_option("--t-min", f.t_min, "first parameter value")->required();
  cmd->add_option("--t-max", f.t_max, "last parameter value")->required();
  cmd->add_option("--sign", f.sign, "which discriminant sign to analyse")
      ->check(CLI::IsMember({"imag", "real"}))
      ->capture_default_str();
  cmd->add_option("--modulus-override", f.modulus_override,
                  "replace the shift modulus M");
  cmd->add_option("--budget-ms", f.budget_ms,
                  "factoring budget per value, in milliseconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_threads)
    cmd->add_option("--threads", f.threads, "worker thread count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

SurveyOptions to_options(const SurveyFlags& f) {
  SurveyOptions opt;
  opt.m = f.m;
  opt.c = parse_rational(f.c);
  opt.t_min = f.t_min;
  opt.t_max = f.t_max;
  opt.sign = f.sign == "real" ? SurveySign::real : SurveySign::imaginary;
  if (!f.modulus_override.empty())
    opt.modulus_override = parse_integer(f.modulus_override);
  opt.budget.rho_iteration_cap =
      static_cast<uint64_t>(f.budget_ms) * 1000;  // 10 s <-> default cap
  opt.threads = f.threads;
  return opt;
}

/* ---- family ------------------------------------------------------------ */

int run_family(int m, const std::string& c_text, bool emit_json) {
  CurveFamily fam = build_family(m, parse_rational(c_text));
  auto [plus, minus] = norm_identities(fam);
  OddModel om = odd_model(fam);
  RescaledModel rm = rescale_with_map(om.g, 2);
  Int M = 1;
  std::vector<Int> bad = bad_prime_set(fam);
  for (const Int& p : bad) M *= p;

  if (emit_json) {
    json j;
    j["m"] = fam.m;
    j["c"] = rat_str(fam.c);
    j["b"] = rat_str(fam.b);
    j["f"] = poly_json(fam.f);
    j["norm_identity_terms"] = {poly_json(plus), poly_json(minus)};
    j["odd_model"] = {{"degree", om.g.degree()},
                      {"genus", om.genus},
                      {"leading", rat_str(om.leading)},
                      {"coefficients", poly_json(om.g)}};
    j["rescaled_model"] = {{"coefficients", poly_json(rm.model)},
                           {"n", rm.n},
                           {"lambda", rat_str(rm.lambda)},
                           {"mu", rat_str(rm.mu)}};
    json primes = json::array();
    for (const Int& p : bad) primes.push_back(int_json(p));
    j["bad_primes"] = primes;
    j["M"] = int_json(M);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "family: m = " << fam.m << ", c = " << rat_str(fam.c)
              << ", b = " << rat_str(fam.b) << "\n";
    std::cout << "f = " << poly_str(fam.f) << "\n";
    std::cout << "norm identity terms: " << poly_str(plus) << " and "
              << poly_str(minus) << "\n";
    std::cout << "odd model (degree " << om.g.degree() << ", genus "
              << om.genus << ", leading " << rat_str(om.leading)
              << "): " << poly_str(om.g) << "\n";
    std::cout << "rescaled model: " << poly_str(rm.model)
              << ", x -> X/" << rat_str(rm.lambda) << ", y -> Y/"
              << rat_str(rm.mu) << "\n";
    std::cout << "bad primes:";
    for (const Int& p : bad) std::cout << " " << p.get_str();
    std::cout << "\nM = " << M.get_str() << "\n";
  }
  return kExitOk;
}

/* ---- survey and growth -------------------------------------------------- */

void print_summary(std::ostream& out, const SurveySummary& s) {
  out << "survey: m = " << s.m << ", c = " << rat_str(s.c)
      << ", M = " << s.modulus.get_str() << ", t = " << s.t_min << ".."
      << s.t_max << ", sign = " << to_string(s.sign) << "\n";
  out << "rows: total " << s.total << ", ok " << s.ok << ", degenerate "
      << s.degenerate << ", budget skipped " << s.budget_skipped << "\n";
  out << "analysed rows: exceptional " << s.exceptional << ", admissible "
      << s.admissible_pullbacks << ", confirmed " << s.pullback_confirmed
      << ", distinct fields " << s.distinct_discriminants << "\n";
  if (s.growth_defined)
    out << "growth exponent estimate (median): "
        << s.growth_exponent_estimate.get_d() << "\n";
  for (const auto& [X, n] : s.fields_below)
    out << "fields with |D| < " << X.get_str() << ": " << n << "\n";
}

int run_survey_verb(const SurveyFlags& flags, const std::string& out_path,
                    bool emit_json) {
  SurveyResult res = run_survey(to_options(flags));
  if (!out_path.empty()) {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open " + out_path);
    write_csv(file, res);
    if (emit_json)
      std::cout << summary_json(res.summary) << "\n";
    else
      print_summary(std::cout, res.summary);
  } else {
    write_csv(std::cout, res);
    if (emit_json)
      std::cerr << summary_json(res.summary) << "\n";
    else
      print_summary(std::cerr, res.summary);
  }
  return res.summary.budget_skipped > 0 ? kExitBudget : kExitOk;
}

int run_growth_verb(const SurveyFlags& flags, bool emit_json) {
  SurveyResult res = run_survey(to_options(flags));
  GrowthReport rep = growth_report(res.rows);
  if (emit_json) {
    json j;
    j["m"] = res.summary.m;
    j["c"] = rat_str(res.summary.c);
    j["M"] = int_json(res.summary.modulus);
    j["t_range"] = {res.summary.t_min, res.summary.t_max};
    j["ok"] = res.summary.ok;
    j["slope"] = rep.slope;
    json ladder = json::array();
    for (const auto& [X, n] : rep.fields_below)
      ladder.push_back({int_json(X), n});
    j["fields_below_X"] = ladder;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "growth: slope of log|D| against log|t| over " << res.summary.ok
              << " rows: " << rep.slope << "\n";
    for (const auto& [X, n] : rep.fields_below)
      std::cout << "fields with |D| < " << X.get_str() << ": " << n << "\n";
  }
  return res.summary.budget_skipped > 0 ? kExitBudget : kExitOk;
}

/* ---- class group verbs -------------------------------------------------- */

int run_classgroup_verb(const std::string& d_text, bool emit_json) {
  ClassGroupDescription cl = class_group(parse_integer(d_text));
  if (emit_json) {
    json j;
    j["D"] = int_json(cl.discriminant);
    j["h"] = int_json(cl.h);
    json factors = json::array();
    for (const Int& d : cl.structure.invariant_factors())
      factors.push_back(int_json(d));
    j["invariant_factors"] = factors;
    json gens = json::array();
    for (const auto& [form, coords] : cl.generators) {
      json g;
      g["form"] = {int_json(form.a), int_json(form.b), int_json(form.c)};
      json cs = json::array();
      for (const Int& x : coords) cs.push_back(int_json(x));
      g["coordinates"] = cs;
      gens.push_back(g);
    }
    j["generators"] = gens;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "D = " << cl.discriminant.get_str() << "\n";
    std::cout << "h = " << cl.h.get_str() << "\n";
    std::cout << "invariant factors:";
    for (const Int& d : cl.structure.invariant_factors())
      std::cout << " " << d.get_str();
    std::cout << "\n";
    for (const auto& [form, coords] : cl.generators) {
      std::cout << "generator (" << form.a.get_str() << ", "
                << form.b.get_str() << ", " << form.c.get_str()
                << ") coordinates";
      for (const Int& x : coords) std::cout << " " << x.get_str();
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int run_mrank_verb(const std::string& d_text, int m, bool emit_json) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  ClassGroupDescription cl = class_group(parse_integer(d_text));
  int rk = m_rank(cl.structure, Int(m));
  if (emit_json) {
    json j;
    j["D"] = int_json(cl.discriminant);
    j["m"] = m;
    j["h"] = int_json(cl.h);
    json factors = json::array();
    for (const Int& d : cl.structure.invariant_factors())
      factors.push_back(int_json(d));
    j["invariant_factors"] = factors;
    j["m_rank"] = rk;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "rk_" << m << " Cl(" << cl.discriminant.get_str()
              << ") = " << rk << " (h = " << cl.h.get_str() << ")\n";
  }
  return kExitOk;
}

/* ---- verification suites ------------------------------------------------ */

struct Property {
  explicit Property(std::string n) : name(std::move(n)) {}

  std::string name;
  long checked = 0;
  long failed = 0;
  std::vector<std::string> counterexamples;

  void count(bool ok, const std::string& witness) {
    ++checked;
    if (!ok) {
      ++failed;
      if (counterexamples.size() < 3) counterexamples.push_back(witness);
    }
  }
};

std::vector<long> divisors_above_one(long m) {
  std::vector<long> out;
  for (long d = 2; d <= m; ++d)
    if (m % d == 0) out.push_back(d);
  return out;
}

/* 1000 seeded m-torsion witnesses of the subgroup rank inequality */
std::vector<Property> suite_rank_lemma(uint64_t seed) {
  Property inequality{"rank inequality on exact sequences"};
  Property equality{"equality when the subgroup or quotient is free"};
  std::mt19937_64 rng(seed);
  const long torsion[] = {2, 3, 4, 6, 8, 9, 12};
  for (int i = 0; i < 1000; ++i) {
    long m = torsion[i % 7];
    std::vector<long> divs = divisors_above_one(m);
    FiniteAbelianGroup g;
    int parts = 1 + static_cast<int>(rng() % 4);
    std::string shape;
    for (int k = 0; k < parts; ++k) {
      long d = divs[rng() % divs.size()];
      g = g.direct_sum(FiniteAbelianGroup({Int(d)}));
      shape += (k ? "," : "(") + std::to_string(d);
    }
    shape += ")";
    uint64_t wseed = rng();
    SubquotientWitness w = sample_exact_sequence(g, wseed);
    RankLemmaVerdict v = check_rank_lemma(w, Int(m));
    std::string witness =
        "m=" + std::to_string(m) + " ambient=" + shape +
        " seed=" + std::to_string(wseed);
    inequality.count(v.inequality_holds, witness);
    if (v.equality_expected) equality.count(v.equality_holds, witness);
  }
  return {inequality, equality};
}

/* composition laws over a pool of forms per fixed discriminant */
std::vector<Property> suite_qform(uint64_t seed) {
  Property reduction{"reduction is idempotent and keeps the discriminant"};
  Property identity{"principal class is neutral"};
  Property inverse{"inverse composes to the principal class"};
  Property commutative{"composition commutes"};
  Property associative{"composition associates"};
  Property powers{"power matches iterated composition"};
  std::mt19937_64 rng(seed);

  const long discs[] = {-23, -47, -71, -95, -120, -163, -231, -420, -1320,
                        229, 316, 1260, 5160, 13224};
  for (long d : discs) {
    Int D(d);
    std::vector<Form> pool = {principal_form(D)};
    for (const Int& p : {Int(2), Int(3), Int(5), Int(7), Int(11), Int(13)}) {
      if (kronecker(D, p) == -1) continue;
      pool.push_back(prime_form(D, p, default_prime_root(D, p)));
    }
    for (int extra = 0; extra < 4; ++extra) {
      const Form& a = pool[rng() % pool.size()];
      const Form& b = pool[rng() % pool.size()];
      pool.push_back(compose(a, b).representative());
    }
    std::string where = "D=" + std::to_string(d);
    for (const Form& f : pool) {
      Form r = reduce(f);
      reduction.count(is_reduced(r) && reduce(r) == r &&
                          r.discriminant() == D,
                      where);
      identity.count(compose(f, principal_form(D)) == FormClass(f), where);
      inverse.count(compose(f, f.inverse()).is_principal(), where);
    }
    for (int trial = 0; trial < 12; ++trial) {
      const Form& a = pool[rng() % pool.size()];
      const Form& b = pool[rng() % pool.size()];
      const Form& c = pool[rng() % pool.size()];
      commutative.count(compose(a, b) == compose(b, a), where);
      associative.count(compose(compose(a, b).representative(), c) ==
                            compose(a, compose(b, c).representative()),
                        where);
      long k = 2 + static_cast<long>(rng() % 5);
      FormClass folded(principal_form(D));
      for (long i = 0; i < k; ++i)
        folded = compose(folded.representative(), a);
      powers.count(power(a, Int(k)) == folded, where);
    }
  }
  return {reduction, identity, inverse, commutative, associative, powers};
}

/* symbolic contracts of the family and its models, m <= 6 */
std::vector<Property> suite_identities() {
  Property collapse{"norm identities collapse to one term"};
  Property odd{"odd model degree, genus and leading coefficient"};
  Property rescale{"rescaled model is integral with leading -1"};
  for (int m = 2; m <= 6; ++m) {
    for (long c : {2L, 3L, 5L, -2L}) {
      std::string where = "m=" + std::to_string(m) + " c=" + std::to_string(c);
      CurveFamily fam = build_family(m, Rat(c));
      bool one_term = true;
      try {
        auto [plus, minus] = norm_identities(fam);
        for (const Polynomial* half : {&plus, &minus}) {
          int nonzero = 0;
          for (const Rat& coeff : half->coefficients())
            if (coeff != 0) ++nonzero;
          one_term = one_term && nonzero == 1 && half->degree() == m;
        }
      } catch (const std::logic_error&) {
        one_term = false;
      }
      collapse.count(one_term, where);

      OddModel om = odd_model(fam);
      odd.count(om.g.degree() == 2 * m - 1 && om.genus == m - 1 &&
                    om.leading == Rat(m) * (Rat(2) + fam.b) &&
                    om.g.is_integral() && discriminant(om.g) != 0,
                where);

      RescaledModel rm = rescale_with_map(om.g, 2);
      rescale.count(rm.model.leading() == -1 && rm.model.is_integral() &&
                        rm.model.degree() == 2 * m - 1 && rm.n == 2,
                    where);
    }
  }
  return {collapse, odd, rescale};
}

/* enumeration agreement for every fundamental discriminant in (-10^4, 0) */
std::vector<Property> suite_classgroup() {
  Property agree{"h equals the reduced form count"};
  Property product{"invariant factors multiply to h"};
  for (long d = -3; d > -10000; --d) {
    Int D(d);
    if (!is_fundamental_discriminant(D)) continue;
    std::string where = "D=" + std::to_string(d);
    ClassGroupDescription cl = class_group(D);
    agree.count(cl.h == Int(reduced_forms(D).size()), where);
    Int prod = 1;
    for (const Int& f : cl.structure.invariant_factors()) prod *= f;
    product.count(prod == cl.h, where);
  }
  return {agree, product};
}

/* the full pipeline on t = 1..20 for both families */
std::vector<Property> suite_pullback() {
  Property ramified{"shift primes divide D with valuation -(2m-1) in q"};
  Property principal{"pulled back classes have order dividing m"};
  for (int m : {2, 3}) {
    SurveyOptions opt;
    opt.m = m;
    opt.t_min = 1;
    opt.t_max = 20;
    SurveyResult res = run_survey(opt);
    for (const SurveyRow& row : res.rows) {
      if (row.rec.status != SpecStatus::ok) continue;
      std::string where =
          "m=" + std::to_string(m) + " t=" + std::to_string(row.rec.t);
      bool ram = true;
      for (const Int& p : prime_divisors(row.rec.modulus)) {
        ram = ram && row.rec.D % p == 0 &&
              p_valuation(row.rec.q, p) == -(2L * m - 1) &&
              total_ramification_check(row.rec.q, p, 2);
      }
      ramified.count(ram, where);
      if (row.admissible) principal.count(row.power_principal, where);
    }
  }
  return {ramified, principal};
}

int run_verify_verb(const std::string& suite, uint64_t seed, bool emit_json) {
  std::vector<Property> props;
  if (suite == "lemma25")
    props = suite_rank_lemma(seed);
  else if (suite == "qform")
    props = suite_qform(seed);
  else if (suite == "identities")
    props = suite_identities();
  else if (suite == "classgroup")
    props = suite_classgroup();
  else if (suite == "pullback")
    props = suite_pullback();
  else
    throw std::invalid_argument("unknown suite: " + suite);

  bool pass = true;
  for (const Property& p : props) pass = pass && p.failed == 0;

  if (emit_json) {
    json j;
    j["suite"] = suite;
    j["pass"] = pass;
    json list = json::array();
    for (const Property& p : props) {
      json e;
      e["name"] = p.name;
      e["checked"] = p.checked;
      e["failures"] = p.failed;
      e["pass"] = p.failed == 0;
      if (!p.counterexamples.empty()) e["counterexamples"] = p.counterexamples;
      list.push_back(e);
    }
    j["properties"] = list;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const Property& p : props) {
      if (p.failed == 0) {
        std::cout << "PASS " << p.name << " (" << p.checked << " checks)\n";
      } else {
        std::cout << "FAIL " << p.name << " (" << p.failed << "/" << p.checked
                  << " failed)\n";
        for (const std::string& w : p.counterexamples)
          std::cout << "  counterexample: " << w << "\n";
      }
    }
    std::cout << "suite " << suite << ": " << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadratic field surveys driven by torsion curve families"};
  app.require_subcommand(1);

  int fam_m = 2;
  std::string fam_c = "2";
  bool fam_json = false;
  CLI::App* family = app.add_subcommand("family", "print a family's models");
  family->add_option("--m", fam_m, "torsion order")->required();
  family->add_option("--c", fam_c, "family parameter")->capture_default_str();
  family->add_flag("--json", fam_json, "emit JSON");

  SurveyFlags survey_flags;
  std::string survey_out;
  bool survey_json = false;
  CLI::App* survey = app.add_subcommand("survey", "run the pipeline over a t range");
  add_survey_flags(survey, survey_flags, true);
  survey->add_option("--out", survey_out, "write the CSV here");
  survey->add_flag("--json", survey_json, "emit the summary as JSON");

  std::string cg_d;
  bool cg_json = false;
  CLI::App* cg = app.add_subcommand("classgroup", "class group of a fundamental discriminant");
  cg->add_option("D", cg_d, "fundamental discriminant")->required();
  cg->add_flag("--json", cg_json, "emit JSON");

  std::string mr_d;
  int mr_m = 2;
  bool mr_json = false;
  CLI::App* mr = app.add_subcommand("mrank", "m-rank of a class group");
  mr->add_option("D", mr_d, "fundamental discriminant")->required();
  mr->add_option("--m", mr_m, "torsion order")->capture_default_str();
  mr->add_flag("--json", mr_json, "emit JSON");

  std::string verify_suite;
  uint64_t verify_seed = 0;
  bool verify_json = false;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", verify_suite, "one of lemma25, qform, identities, classgroup, pullback")
      ->required()
      ->check(CLI::IsMember({"lemma25", "qform", "identities", "classgroup", "pullback"}));
  verify->add_option("--seed", verify_seed, "seed for the sampled suites")
      ->capture_default_str();
  verify->add_flag("--json", verify_json, "emit JSON");

  SurveyFlags growth_flags;
  bool growth_json = false;
  CLI::App* growth = app.add_subcommand("growth", "discriminant growth report over a t range");
  add_survey_flags(growth, growth_flags, true);
  growth->add_flag("--json", growth_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (family->parsed()) return run_family(fam_m, fam_c, fam_json);
    if (survey->parsed())
      return run_survey_verb(survey_flags, survey_out, survey_json);
    if (cg->parsed()) return run_classgroup_verb(cg_d, cg_json);
    if (mr->parsed()) return run_mrank_verb(mr_d, mr_m, mr_json);
    if (verify->parsed())
      return run_verify_verb(verify_suite, verify_seed, verify_json);
    if (growth->parsed()) return run_growth_verb(growth_flags, growth_json);
  } catch (const budget_exceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "internal invariant failed: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitUsage;
}
