#ifndef FORGE_NUMERIC_HPP
#define FORGE_NUMERIC_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/* Arbitrary-precision integer and rational helpers shared by every module.
   Int/Rat are GMP classes; everything here is exact. */

namespace forge {

using Int = mpz_class;
using Rat = mpq_class;

/* floor of sqrt(n); n must be >= 0 */
Int isqrt(const Int& n);

bool is_perfect_square(const Int& n);

/* exact p-adic valuation of n != 0; p >= 2 */
unsigned p_valuation(Int n, const Int& p);

/* valuation of a nonzero rational: v(num) - v(den) */
long p_valuation(const Rat& q, const Int& p);

/* the p-free part of q reduced mod p, i.e. (q / p^v(q)) mod p.
   Needs p odd prime not dividing the reduced unit's denominator. */
Int p_unit_mod(const Rat& q, const Int& p);

Int mod_inverse(const Int& a, const Int& m);

/* Kronecker symbol (a|n) */
int kronecker(const Int& a, const Int& n);

bool is_probable_prime(const Int& n);

/* square root of a mod odd prime p; a must be a quadratic residue */
Int sqrt_mod_p(const Int& a, const Int& p);

const std::vector<uint32_t>& small_primes();  // all primes below 10^6

class budget_exceeded : public std::runtime_error {
 public:
  explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

/* Factoring budget: trial division over the shared sieve, then Brent-cycle
   rho with an iteration cap per composite.  Exhaustion throws budget_exceeded. */
struct factor_budget {
  uint64_t rho_iteration_cap = 10000000;
};

struct factorization {
  std::vector<std::pair<Int, unsigned>> factors;  // ascending primes
};

/* factors |n|; n must be nonzero.  Sign is the caller's business. */
factorization factorize(const Int& n, const factor_budget& budget = {});

/* distinct prime divisors of |n|, ascending */
std::vector<Int> prime_divisors(const Int& n, const factor_budget& budget = {});

}  // namespace forge

#endif
