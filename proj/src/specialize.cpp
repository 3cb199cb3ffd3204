#include "forge/specialize.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>

namespace forge {

namespace {

Int floor_mod(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Rat rat_pow(const Rat& base, int e) {
  Rat out(1);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

std::vector<Int> rational_support(const Rat& q, const factor_budget& budget = {}) {
  std::vector<Int> out = prime_divisors(Int(q.get_num()), budget);
  std::vector<Int> den = prime_divisors(Int(q.get_den()), budget);
  out.insert(out.end(), den.begin(), den.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::shared_mutex sf_mutex;
std::map<Int, std::pair<Int, Int>> sf_cache;

}  // namespace

std::string to_string(SpecStatus s) {
  switch (s) {
    case SpecStatus::ok: return "ok";
    case SpecStatus::degenerate_zero: return "degenerate_zero";
    case SpecStatus::degenerate_square: return "degenerate_square";
    case SpecStatus::factor_budget_exceeded: return "factor_budget_exceeded";
  }
  throw std::logic_error("unknown status");
}

std::vector<Int> bad_prime_set(const CurveFamily& fam) {
  Rat disc = discriminant(odd_model(fam).g);
  if (disc == 0) throw std::logic_error("odd model with vanishing discriminant");
  return rational_support(disc);
}

Rat shifted_value(const Polynomial& f, const Int& M, const Int& t) {
  if (M < 1) throw std::invalid_argument("shift modulus must be positive");
  return evaluate(f, Rat(t * M + 1) / Rat(M));
}

bool total_ramification_check(const Rat& q, const Int& p, int n) {
  if (q == 0) throw std::invalid_argument("ramification check at zero");
  if (n < 2) throw std::invalid_argument("curve exponent must be >= 2");
  if (p < 2) throw std::invalid_argument("p must be a prime");
  long v = p_valuation(q, p);
  if (v < 0) v = -v;
  return std::gcd(v, static_cast<long>(n)) == 1;
}

std::pair<Int, Int> squarefree_decompose(const Int& N, const factor_budget& budget) {
  if (N == 0) throw std::invalid_argument("squarefree part of zero");
  {
    std::shared_lock lock(sf_mutex);
    auto it = sf_cache.find(N);
    if (it != sf_cache.end()) return it->second;
  }
  factorization fac = factorize(N, budget);
  Int d0(1), s(1);
  for (const auto& [p, e] : fac.factors) {
    if (e & 1u) d0 *= p;
    Int half;
    mpz_pow_ui(half.get_mpz_t(), p.get_mpz_t(), e / 2);
    s *= half;
  }
  if (N < 0) d0 = -d0;
  std::pair<Int, Int> result{d0, s};
  std::unique_lock lock(sf_mutex);
  sf_cache.emplace(N, result);
  return result;
}

Int to_fundamental_discriminant(const Int& d0) {
  if (d0 == 0 || d0 == 1)
    throw std::invalid_argument("degenerate squarefree part");
  return floor_mod(d0, 4) == 1 ? d0 : 4 * d0;
}

SpecializationRecord specialize(const CurveFamily& fam,
                                const RescaledModel& model, const Int& M,
                                long t, const factor_budget& budget) {
  if (fam.m < 2) throw std::invalid_argument("malformed family");
  if (M < 1) throw std::invalid_argument("shift modulus must be positive");
  if (!model.model.is_integral() || model.model.leading() != -1)
    throw std::invalid_argument("model must be rescaled to leading -1");

  SpecializationRecord rec;
  rec.t = t;
  rec.modulus = M;
  rec.x0 = Rat(Int(t) * M + 1) / Rat(M);
  rec.q = evaluate(model.model, rec.x0);
  if (rec.q == 0) {
    rec.status = SpecStatus::degenerate_zero;
    return rec;
  }
  Int N = Int(rec.q.get_num()) * Int(rec.q.get_den());
  try {
    std::tie(rec.d0, rec.s) = squarefree_decompose(N, budget);
  } catch (const budget_exceeded&) {
    rec.status = SpecStatus::factor_budget_exceeded;
    return rec;
  }
  if (rec.d0 == 1) {
    rec.status = SpecStatus::degenerate_square;
    return rec;
  }
  rec.D = to_fundamental_discriminant(rec.d0);
  rec.status = SpecStatus::ok;

  /* every prime of M totally ramifies, so it must reach the discriminant */
  for (const Int& p : prime_divisors(M)) {
    if (!total_ramification_check(rec.q, p, model.n) ||
        !mpz_divisible_p(rec.D.get_mpz_t(), p.get_mpz_t()))
      throw std::logic_error("shift prime escaped the discriminant");
  }
  return rec;
}

PullbackResult pullback_classes(const CurveFamily& fam,
                                const RescaledModel& model,
                                const SpecializationRecord& rec) {
  if (rec.status != SpecStatus::ok)
    throw std::invalid_argument("pullback needs an ok record");
  if (fam.m < 2) throw std::invalid_argument("malformed family");
  const Int& D = rec.D;
  FormClass one(principal_form(D));
  auto fail = [&](const std::string& why) {
    return PullbackResult{one, one, false, why};
  };

  if (rec.x0 == 0) return fail("shift point at zero");
  Rat x0e = (rec.x0 + model.lambda) / rec.x0;
  if (x0e == 0) return fail("even coordinate degenerates");
  Rat q_even = evaluate(fam.f, x0e);
  if (q_even == 0)
    throw std::logic_error("even value vanishes on an ok record");

  /* q and q_even share a square class; their common squarefree part is d0 */
  Int Ne = Int(q_even.get_num()) * Int(q_even.get_den());
  if (!mpz_divisible_p(Ne.get_mpz_t(), rec.d0.get_mpz_t()))
    throw std::logic_error("even value leaves the square class");
  Int ratio;
  mpz_divexact(ratio.get_mpz_t(), Ne.get_mpz_t(), rec.d0.get_mpz_t());
  if (ratio <= 0 || !is_perfect_square(ratio))
    throw std::logic_error("even value leaves the square class");
  Int s_even = isqrt(ratio);
  /* alpha(+-) = A(+-) - u sqrt(d0) with u > 0 */
  Rat u = Rat(s_even) / Rat(Int(q_even.get_den()));

  struct SupportPrime {
    Int p;
    long v;
  };
  std::vector<SupportPrime> support;
  try {
    for (const Int& p : prime_divisors(Int(x0e.get_num())))
      support.push_back({p, p_valuation(x0e, p)});
    for (const Int& p : prime_divisors(Int(x0e.get_den())))
      support.push_back({p, p_valuation(x0e, p)});
  } catch (const budget_exceeded&) {
    return fail("factor budget exceeded on the point support");
  }

  Rat split_poly = fam.b * fam.b - 4 * fam.c * fam.c;
  if (split_poly == 0) return fail("b^2 = 4c^2 kills the norm identities");
  for (const auto& sp : support) {
    if (sp.p == 2) return fail("prime 2 in the point support");
    if (p_valuation(split_poly, sp.p) != 0)
      return fail("prime " + sp.p.get_str() + " divides b^2 - 4c^2");
    if (sp.v > 0 && p_valuation(q_even, sp.p) != 0)
      return fail("prime " + sp.p.get_str() + " meets the square root support");
  }

  /* the screened-out part of (alpha) is generated by the primes of c -+ 1;
     non-split primes force it principal, split ones obstruct the argument */
  for (int sign : {1, -1}) {
    Rat residual_base = fam.c + sign;
    if (residual_base == 0) return fail("family parameter c = -+1");
    std::vector<Int> residual;
    try {
      residual = rational_support(residual_base);
    } catch (const budget_exceeded&) {
      return fail("factor budget exceeded on residual primes");
    }
    for (const Int& p : residual)
      if (kronecker(D, p) == 1)
        return fail("split residual prime " + p.get_str());
  }

  Rat xm = rat_pow(x0e, fam.m);
  Rat a_plus = xm + fam.c;
  Rat a_minus = xm - fam.c;
  if (a_plus == 0 || a_minus == 0)
    return fail("evaluation point collides with a branch point");

  Int w = D == rec.d0 ? 1 : 2;
  auto gamma_for = [&](const Rat& A) {
    FormClass acc = one;
    for (const auto& sp : support) {
      Int r = floor_mod(
          w * p_unit_mod(A, sp.p) * mod_inverse(p_unit_mod(u, sp.p), sp.p),
          sp.p);
      if (floor_mod(r * r - D, sp.p) != 0)
        throw std::logic_error("matched root fails r^2 = D mod p");
      Int broot = r;
      if ((broot - D) % 2 != 0) broot += sp.p;  // p odd: align parity with D
      Int e = sp.v < 0 ? Int(-sp.v) : Int(sp.v);
      acc = compose(acc, power(prime_form(D, sp.p, broot), e));
    }
    return acc;
  };

  return PullbackResult{gamma_for(a_plus), gamma_for(a_minus), true, ""};
}

PullbackResult pullback_classes(const CurveFamily& fam,
                                const SpecializationRecord& rec) {
  return pullback_classes(fam, rescale_with_map(odd_model(fam).g, 2), rec);
}

bool is_exceptional(const SpecializationRecord& rec, int m,
                    const ClassGroupDescription& cl) {
  if (rec.status != SpecStatus::ok)
    throw std::invalid_argument("exceptional test needs an ok record");
  if (cl.discriminant != rec.D)
    throw std::invalid_argument("class group does not match the record");
  int target = rec.D < 0 ? 2 : 1;
  return m_rank(cl.structure, Int(m)) < target;
}

}  // namespace forge
