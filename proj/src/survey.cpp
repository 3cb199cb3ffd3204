#include "forge/survey.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "forge/abelian.hpp"
#include "forge/curves.hpp"

namespace forge {

std::string to_string(SurveySign sign) {
  return sign == SurveySign::imaginary ? "imaginary" : "real";
}

namespace {

/* ---- wide principality for indefinite forms -------------------------- */

/* Odd prime divisors of D, or empty when the factoring budget runs out
   (empty just disables the character screen below, it is never wrong). */
std::vector<Int> odd_divisors_of(const Int& D, const factor_budget& budget) {
  std::vector<Int> odd;
  try {
    for (const Int& p : prime_divisors(D, budget))
      if (p != 2) odd.push_back(p);
  } catch (const budget_exceeded&) {
    odd.clear();
  }
  return odd;
}

/* Genus character screen: a form in the wide principal class represents
   values v coprime to D whose character vector (kronecker(v, p))_p over the
   odd p | D is either all +1 (principal cycle) or (kronecker(-1, p))_p (the
   sign-flipped cycle).  Any other vector certifies wide non-principality,
   which spares a trip around an O(sqrt(D)) cycle. */
bool characters_rule_out_principal(const Form& f, const Int& D,
                                   const std::vector<Int>& odd_primes) {
  if (odd_primes.empty()) return false;
  Int v = 0;
  for (int x = 0; x <= 8 && v == 0; ++x) {
    for (int y = -8; y <= 8; ++y) {
      if (x == 0 && y <= 0) continue;
      Int w = f.a * x * x + f.b * x * y + f.c * y * y;
      if (w != 0 && gcd(w, D) == 1) {
        v = w;
        break;
      }
    }
  }
  if (v == 0) return false;  // no coprime value found, stay inconclusive
  bool all_plus = true;
  bool flip = true;
  for (const Int& p : odd_primes) {
    int chi = kronecker(v, p);
    if (chi != 1) all_plus = false;
    if (chi != kronecker(Int(-1), p)) flip = false;
  }
  return !all_plus && !flip;
}

/* f is wide principal iff its own reduced cycle meets |a| = 1.  Walk the
   cycle without materialising it; the screen above handles the common
   negative case without walking at all. */
bool wide_principal(const Form& f, const Int& D,
                    const std::vector<Int>& odd_primes) {
  if (characters_rule_out_principal(f, D, odd_primes)) return false;
  Form start = reduce(f);
  Form g = start;
  do {
    if (g.a == 1 || g.a == -1) return true;
    g = rho_step(g);
  } while (!(g == start));
  return false;
}

/* Least divisor d of m with g^d (wide) principal; 0 when g^m is not. */
int wide_order_dividing(const FormClass& g, int m, const Int& D,
                        const std::vector<Int>& odd_primes) {
  for (int d = 1; d <= m; ++d) {
    if (m % d != 0) continue;
    Form rep = power(g.representative(), Int(d)).representative();
    if (wide_principal(rep, D, odd_primes)) return d;
  }
  return 0;
}

/* ---- order and subgroup certificates for definite forms -------------- */

int order_dividing(const FormClass& g, int m) {
  for (int d = 1; d <= m; ++d)
    if (m % d == 0 && power(g.representative(), Int(d)).is_principal())
      return d;
  return 0;
}

/* Size of { gp^i gm^j : 0 <= i, j < m }; m^2 certifies m-rank >= 2. */
long closure_size(const FormClass& gp, const FormClass& gm, int m) {
  std::set<FormClass> seen;
  for (int i = 0; i < m; ++i) {
    FormClass left = power(gp.representative(), Int(i));
    for (int j = 0; j < m; ++j)
      seen.insert(compose(left, power(gm.representative(), Int(j))));
  }
  return static_cast<long>(seen.size());
}

/* ---- per-row verdict -------------------------------------------------- */

int rank_target(const Int& D) { return D < 0 ? 2 : 1; }

SurveyRow make_row(const CurveFamily& fam, const RescaledModel& model,
                   const Int& M, long t, const SurveyOptions& opt) {
  SurveyRow row;
  row.rec = specialize(fam, model, M, t, opt.budget);
  if (row.rec.status != SpecStatus::ok) return row;

  PullbackResult pb = pullback_classes(fam, model, row.rec);
  row.admissible = pb.admissible;
  row.obstruction = pb.obstruction;

  // certificate on the pulled-back classes; cheap for D < 0, for D > 0 the
  // character screen keeps the cycle walks to the principal confirmations
  int ord_plus = 0;
  int ord_minus = 0;
  if (row.admissible) {
    if (row.rec.D < 0) {
      ord_plus = order_dividing(pb.gamma_plus, opt.m);
      ord_minus = order_dividing(pb.gamma_minus, opt.m);
      if (closure_size(pb.gamma_plus, pb.gamma_minus, opt.m) ==
          static_cast<long>(opt.m) * opt.m)
        row.cert_rank = 2;
      else if (ord_plus > 0 && ord_minus > 0 &&
               std::lcm(ord_plus, ord_minus) == opt.m)
        row.cert_rank = 1;
      else
        row.cert_rank = 0;
    } else {
      std::vector<Int> odd = odd_divisors_of(row.rec.D, opt.budget);
      ord_plus = wide_order_dividing(pb.gamma_plus, opt.m, row.rec.D, odd);
      ord_minus = wide_order_dividing(pb.gamma_minus, opt.m, row.rec.D, odd);
      row.cert_rank = (ord_plus > 0 && ord_minus > 0 &&
                       std::lcm(ord_plus, ord_minus) == opt.m)
                          ? 1
                          : 0;
    }
    row.power_principal = ord_plus > 0 && ord_minus > 0;
  }

  try {
    ClassGroupDescription cl = class_group(row.rec.D);
    row.truth_route = true;
    row.h = cl.h;
    row.invariant_factors = cl.structure.invariant_factors();
    row.rk_m = m_rank(cl.structure, Int(opt.m));
    row.exceptional = is_exceptional(row.rec, opt.m, cl) ? 1 : 0;
  } catch (const budget_exceeded&) {
    // past the computation ceilings; a certificate can still refute
    // exceptionality, but nothing here can confirm it
    if (row.admissible && row.cert_rank >= rank_target(row.rec.D))
      row.exceptional = 0;
  }
  return row;
}

/* ---- aggregation ------------------------------------------------------ */

bool sign_matches(const SurveyRow& row, SurveySign sign) {
  return sign == SurveySign::imaginary ? row.rec.D < 0 : row.rec.D > 0;
}

std::vector<std::pair<Int, long>> ladder(const std::set<Int>& discs) {
  std::vector<std::pair<Int, long>> out;
  if (discs.empty()) return out;
  Int top = 0;
  for (const Int& D : discs) top = std::max(top, Int(abs(D)));
  for (Int X = 10;; X *= 10) {
    long n = 0;
    for (const Int& D : discs)
      if (abs(D) < X) ++n;
    out.emplace_back(X, n);
    if (X > top) break;
  }
  return out;
}

double log_abs(const Int& n) {
  signed long exp2 = 0;
  double d = mpz_get_d_2exp(&exp2, n.get_mpz_t());
  return std::log(std::fabs(d)) + static_cast<double>(exp2) * std::log(2.0);
}

SurveySummary summarise(const SurveyOptions& opt, const Int& M,
                        const std::vector<SurveyRow>& rows) {
  SurveySummary s;
  s.m = opt.m;
  s.c = opt.c;
  s.modulus = M;
  s.t_min = opt.t_min;
  s.t_max = opt.t_max;
  s.sign = opt.sign;

  std::set<Int> discs;
  std::vector<double> ratios;
  long abs_lo = std::min(std::labs(opt.t_min), std::labs(opt.t_max));
  long abs_hi = std::max(std::labs(opt.t_min), std::labs(opt.t_max));
  long half = (abs_lo + abs_hi + 1) / 2;

  for (const SurveyRow& row : rows) {
    ++s.total;
    switch (row.rec.status) {
      case SpecStatus::ok:
        ++s.ok;
        break;
      case SpecStatus::degenerate_zero:
      case SpecStatus::degenerate_square:
        ++s.degenerate;
        continue;
      case SpecStatus::factor_budget_exceeded:
        ++s.budget_skipped;
        continue;
    }
    if (!sign_matches(row, opt.sign)) continue;
    if (row.exceptional == 1) ++s.exceptional;
    if (row.admissible) {
      ++s.admissible_pullbacks;
      if (row.power_principal) ++s.pullback_confirmed;
    }
    discs.insert(row.rec.D);
    long at = std::labs(row.rec.t);
    if (at >= half && at >= 2 && abs(row.rec.D) >= 2)
      ratios.push_back(log_abs(row.rec.D) / std::log(double(at)));
  }

  s.distinct_discriminants = static_cast<long>(discs.size());
  s.fields_below = ladder(discs);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    s.growth_exponent_estimate = Rat(ratios[(ratios.size() - 1) / 2]);
    s.growth_defined = true;
  }

  if (s.total != s.ok + s.degenerate + s.budget_skipped ||
      s.exceptional > s.ok || s.pullback_confirmed > s.admissible_pullbacks ||
      s.admissible_pullbacks > s.ok)
    throw std::logic_error("survey counters violate their invariants");
  return s;
}

std::string rat_text(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat rat_parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos)
    throw std::invalid_argument("rational field needs num/den: " + text);
  return Rat(Int(text.substr(0, slash))) / Rat(Int(text.substr(slash + 1)));
}

SpecStatus status_parse(const std::string& text) {
  for (SpecStatus s : {SpecStatus::ok, SpecStatus::degenerate_zero,
                       SpecStatus::degenerate_square,
                       SpecStatus::factor_budget_exceeded})
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown status: " + text);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

SurveyResult run_survey(const SurveyOptions& opt) {
  if (opt.m < 2 || opt.m > 6)
    throw std::invalid_argument("survey needs 2 <= m <= 6");
  if (opt.t_min > opt.t_max)
    throw std::invalid_argument("empty t range");
  if (opt.threads < 1)
    throw std::invalid_argument("thread count must be positive");
  if (opt.modulus_override && *opt.modulus_override < 1)
    throw std::invalid_argument("modulus override must be positive");

  CurveFamily fam = build_family(opt.m, opt.c);
  RescaledModel model = rescale_with_map(odd_model(fam).g, 2);
  Int M = 1;
  if (opt.modulus_override) {
    M = *opt.modulus_override;
  } else {
    for (const Int& p : bad_prime_set(fam)) M *= p;
  }

  size_t count = static_cast<size_t>(opt.t_max - opt.t_min + 1);
  std::vector<SurveyRow> rows(count);
  std::atomic<long> next{opt.t_min};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;

  auto work = [&]() {
    for (;;) {
      long t = next.fetch_add(1);
      if (t > opt.t_max) break;
      try {
        rows[static_cast<size_t>(t - opt.t_min)] =
            make_row(fam, model, M, t, opt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  if (opt.threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < opt.threads; ++i) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SurveyResult result;
  result.summary = summarise(opt, M, rows);
  result.rows = std::move(rows);
  return result;
}

std::string csv_header() {
  return "t,M,x0,q,d0,s,D,status,h,invariant_factors,rk_m,admissible,"
         "exceptional";
}

std::string csv_row(const SurveyRow& row) {
  const SpecializationRecord& r = row.rec;
  std::string out = std::to_string(r.t);
  out += ',';
  out += r.modulus.get_str();
  out += ',';
  out += rat_text(r.x0);
  out += ',';
  out += rat_text(r.q);
  out += ',';
  out += r.d0.get_str();
  out += ',';
  out += r.s.get_str();
  out += ',';
  out += r.D.get_str();
  out += ',';
  out += to_string(r.status);
  out += ',';
  if (row.truth_route) {
    out += row.h.get_str();
    out += ',';
    for (size_t i = 0; i < row.invariant_factors.size(); ++i) {
      if (i) out += ';';
      out += row.invariant_factors[i].get_str();
    }
    out += ',';
    out += std::to_string(row.rk_m);
  } else {
    out += ",,";
  }
  out += ',';
  if (r.status == SpecStatus::ok) out += row.admissible ? '1' : '0';
  out += ',';
  if (row.exceptional >= 0) out += row.exceptional ? '1' : '0';
  return out;
}

void write_csv(std::ostream& out, const SurveyResult& result) {
  out << csv_header() << '\n';
  for (const SurveyRow& row : result.rows) out << csv_row(row) << '\n';
}

std::vector<SurveyRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw std::invalid_argument("missing or mangled header line");
  std::vector<SurveyRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split(line, ',');
    if (f.size() != 13)
      throw std::invalid_argument("expected 13 columns, got " +
                                  std::to_string(f.size()));
    SurveyRow row;
    row.rec.t = std::stol(f[0]);
    row.rec.modulus = Int(f[1]);
    row.rec.x0 = rat_parse(f[2]);
    row.rec.q = rat_parse(f[3]);
    row.rec.d0 = Int(f[4]);
    row.rec.s = Int(f[5]);
    row.rec.D = Int(f[6]);
    row.rec.status = status_parse(f[7]);
    if (!f[8].empty()) {
      row.truth_route = true;
      row.h = Int(f[8]);
      for (const std::string& part : split(f[9], ';'))
        if (!part.empty()) row.invariant_factors.emplace_back(part);
      row.rk_m = std::stoi(f[10]);
    }
    row.admissible = f[11] == "1";
    if (!f[12].empty()) row.exceptional = std::stoi(f[12]);
    rows.push_back(std::move(row));
  }
  return rows;
}

long count_distinct_fields(const std::vector<SurveyRow>& rows) {
  std::set<Int> discs;
  for (const SurveyRow& row : rows)
    if (row.rec.status == SpecStatus::ok) discs.insert(row.rec.D);
  return static_cast<long>(discs.size());
}

GrowthReport growth_report(const std::vector<SurveyRow>& rows) {
  std::set<Int> discs;
  std::vector<std::pair<double, double>> pts;  // (log|t|, log|D|)
  long ok = 0;
  for (const SurveyRow& row : rows) {
    if (row.rec.status != SpecStatus::ok) continue;
    ++ok;
    discs.insert(row.rec.D);
    long at = std::labs(row.rec.t);
    if (at >= 2 && abs(row.rec.D) >= 2)
      pts.emplace_back(std::log(double(at)), log_abs(row.rec.D));
  }
  if (ok < 10)
    throw std::invalid_argument("growth report needs at least 10 ok records");
  if (pts.size() < 2)
    throw std::invalid_argument("growth report needs spread in t");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pts.size());
  double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw std::invalid_argument("growth report needs spread in t");

  GrowthReport report;
  report.slope = (n * sxy - sx * sy) / denom;
  report.fields_below = ladder(discs);
  return report;
}

std::string summary_json(const SurveySummary& s) {
  nlohmann::ordered_json j;
  j["m"] = s.m;
  j["c"] = s.c.get_den() == 1
               ? s.c.get_num().get_str()
               : s.c.get_num().get_str() + "/" + s.c.get_den().get_str();
  if (s.modulus.fits_slong_p())
    j["M"] = static_cast<int64_t>(s.modulus.get_si());
  else
    j["M"] = s.modulus.get_str();
  j["t_range"] = {s.t_min, s.t_max};
  j["sign"] = to_string(s.sign);
  j["total"] = s.total;
  j["ok"] = s.ok;
  j["degenerate"] = s.degenerate;
  j["budget_skipped"] = s.budget_skipped;
  j["exceptional"] = s.exceptional;
  j["admissible_pullbacks"] = s.admissible_pullbacks;
  j["pullback_confirmed"] = s.pullback_confirmed;
  j["distinct_discriminants"] = s.distinct_discriminants;
  if (s.growth_defined)
    j["growth_exponent_estimate"] = s.growth_exponent_estimate.get_d();
  else
    j["growth_exponent_estimate"] = nullptr;
  nlohmann::ordered_json ladder_json = nlohmann::ordered_json::array();
  for (const auto& [X, n] : s.fields_below) {
    nlohmann::ordered_json entry = nlohmann::ordered_json::array();
    if (X.fits_slong_p())
      entry.push_back(static_cast<int64_t>(X.get_si()));
    else
      entry.push_back(X.get_str());
    entry.push_back(n);
    ladder_json.push_back(entry);
  }
  j["fields_below_X"] = ladder_json;
  return j.dump(2);
}

}  // namespace forge
