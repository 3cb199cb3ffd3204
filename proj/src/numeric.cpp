#include "forge/numeric.hpp"

#include <algorithm>
#include <map>

namespace forge {

Int isqrt(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative number");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_perfect_square(const Int& n) {
  if (n < 0) return false;
  return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

unsigned p_valuation(Int n, const Int& p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  if (p < 2) throw std::invalid_argument("valuation base must be >= 2");
  unsigned v = 0;
  Int q, r;
  for (;;) {
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    if (r != 0) break;
    n = q;
    ++v;
  }
  return v;
}

long p_valuation(const Rat& q, const Int& p) {
  if (q == 0) throw std::invalid_argument("valuation of zero");
  long vn = static_cast<long>(p_valuation(Int(q.get_num()), p));
  long vd = static_cast<long>(p_valuation(Int(q.get_den()), p));
  return vn - vd;
}

Int p_unit_mod(const Rat& q, const Int& p) {
  Int num = q.get_num(), den = q.get_den();
  if (num == 0) throw std::invalid_argument("unit part of zero");
  while (mpz_divisible_p(num.get_mpz_t(), p.get_mpz_t())) num /= p;
  while (mpz_divisible_p(den.get_mpz_t(), p.get_mpz_t())) den /= p;
  Int r = (num % p) * mod_inverse(den, p) % p;
  if (r < 0) r += p;
  return r;
}

Int mod_inverse(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    throw std::invalid_argument("not invertible");
  return r;
}

int kronecker(const Int& a, const Int& n) {
  return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

bool is_probable_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

Int sqrt_mod_p(const Int& a, const Int& p) {
  /* Tonelli-Shanks.  p odd prime, (a|p) != -1. */
  Int a0 = a % p;
  if (a0 < 0) a0 += p;
  if (a0 == 0) return 0;
  if (kronecker(a0, p) != 1) throw std::invalid_argument("not a quadratic residue");
  if (p % 4 == 3) {
    Int r;
    Int e = (p + 1) / 4;
    mpz_powm(r.get_mpz_t(), a0.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r;
  }
  // write p-1 = q * 2^s with q odd
  Int q = p - 1;
  unsigned s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  // find a non-residue
  Int z = 2;
  while (kronecker(z, p) != -1) ++z;
  Int m = s;
  Int c, t, r;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a0.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  Int e = (q + 1) / 2;
  mpz_powm(r.get_mpz_t(), a0.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
  while (t != 1) {
    Int tt = t;
    unsigned i = 0;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Int b = c;
    for (Int j = 0; j < m - i - 1; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

const std::vector<uint32_t>& small_primes() {
  static const std::vector<uint32_t> primes = [] {
    const uint32_t bound = 1000000;
    std::vector<bool> composite(bound + 1, false);
    std::vector<uint32_t> out;
    for (uint32_t i = 2; i <= bound; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (uint64_t j = uint64_t(i) * i; j <= bound; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

namespace {

/* Brent's variant of Pollard rho.  Returns a nontrivial factor of n
   (n composite, odd, not a perfect power of interest) or throws on budget. */
Int rho_brent(const Int& n, uint64_t iteration_cap, unsigned long seed) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(seed);
  for (;;) {
    Int y = rng.get_z_range(n - 3) + 2;
    Int cc = rng.get_z_range(n - 1) + 1;
    Int x = y, ys = y, q = 1, g = 1;
    uint64_t r = 1, iters = 0;
    const uint64_t batch = 128;
    while (g == 1) {
      x = y;
      for (uint64_t i = 0; i < r; ++i) y = (y * y + cc) % n;
      uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        uint64_t lim = std::min(batch, r - k);
        for (uint64_t i = 0; i < lim; ++i) {
          y = (y * y + cc) % n;
          Int d = x - y;
          if (d < 0) d = -d;
          q = q * d % n;
          if (q == 0) q = 1;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
        iters += lim;
        if (iters > iteration_cap) throw budget_exceeded("factor budget exceeded");
      }
      r *= 2;
    }
    if (g == n) {
      // backtrack
      do {
        ys = (ys * ys + cc) % n;
        Int d = x - ys;
        if (d < 0) d = -d;
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
    seed += 1;  // rare: retry with a new polynomial
  }
}

void factor_rec(const Int& n, std::map<Int, unsigned>& out, const factor_budget& budget,
                unsigned long seed) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out[n] += 1;
    return;
  }
  if (is_perfect_square(n)) {
    Int r = isqrt(n);
    factor_rec(r, out, budget, seed);
    factor_rec(r, out, budget, seed + 1);
    return;
  }
  Int d = rho_brent(n, budget.rho_iteration_cap, seed);
  factor_rec(d, out, budget, seed + 2);
  factor_rec(n / d, out, budget, seed + 3);
}

}  // namespace

factorization factorize(const Int& n, const factor_budget& budget) {
  if (n == 0) throw std::invalid_argument("factorize zero");
  Int m = abs(n);
  std::map<Int, unsigned> acc;
  for (uint32_t p : small_primes()) {
    if (m == 1) break;
    if (Int(p) * p > m) break;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      acc[Int(p)] += 1;
      m /= p;
    }
  }
  if (m > 1) {
    if (is_probable_prime(m))
      acc[m] += 1;
    else
      factor_rec(m, acc, budget, 0xf0a7u);
  }
  factorization f;
  f.factors.assign(acc.begin(), acc.end());
  return f;
}

std::vector<Int> prime_divisors(const Int& n, const factor_budget& budget) {
  std::vector<Int> out;
  for (auto& [p, e] : factorize(n, budget).factors) out.push_back(p);
  return out;
}

}  // namespace forge
