#ifndef FORGE_SPECIALIZE_HPP
#define FORGE_SPECIALIZE_HPP

#include <string>
#include <utility>
#include <vector>

#include "forge/classgroup.hpp"
#include "forge/curves.hpp"
#include "forge/numeric.hpp"
#include "forge/qform.hpp"

/* Specialisation of the rescaled odd model at x0 = (tM+1)/M: every prime
   of M acquires valuation -deg and totally ramifies in Q(sqrt(q)), so the
   square root field never collapses and its discriminant is forced to
   absorb M.  The two algebraic numbers (x^m +- c) - y pull the curve's
   torsion classes back to explicit form classes gamma_plus/gamma_minus. */

namespace forge {

enum class SpecStatus {
  ok,
  degenerate_zero,
  degenerate_square,
  factor_budget_exceeded,
};

std::string to_string(SpecStatus s);

struct SpecializationRecord {
  long t = 0;
  Int modulus;       // M
  Rat x0;            // (tM+1)/M
  Rat q;             // value of the rescaled model at x0
  Int d0;            // squarefree part of num(q)*den(q); 0 unless usable
  Int s;             // num(q)*den(q) = s^2 * d0
  Int D;             // fundamental discriminant of Q(sqrt(q)); 0 unless ok
  SpecStatus status = SpecStatus::ok;
};

/* primes dividing the discriminant of the odd model, ascending; the shift
   modulus M is their product */
std::vector<Int> bad_prime_set(const CurveFamily& fam);

/* exact f((tM+1)/M); with integer coefficients and leading -1 every
   p | M sees valuation exactly -deg f */
Rat shifted_value(const Polynomial& f, const Int& M, const Int& t);

/* Eisenstein-type criterion: p totally ramifies in y^n = q whenever
   gcd(v_p(q), n) = 1 */
bool total_ramification_check(const Rat& q, const Int& p, int n);

/* N = s^2 * d0 with d0 squarefree carrying the sign of N; memoised */
std::pair<Int, Int> squarefree_decompose(const Int& N,
                                         const factor_budget& budget = {});

/* d0 itself when d0 = 1 mod 4, else 4*d0 */
Int to_fundamental_discriminant(const Int& d0);

SpecializationRecord specialize(const CurveFamily& fam,
                                const RescaledModel& model, const Int& M,
                                long t, const factor_budget& budget = {});

struct PullbackResult {
  FormClass gamma_plus;
  FormClass gamma_minus;
  bool admissible;
  std::string obstruction;  // empty when admissible
};

/* Pull the divisor classes of P - infinity and its conjugate back to
   Cl(rec.D).  Work happens on the even curve y^2 = f(x) at the bridged
   point x0e = (x0 + lambda)/x0: for each prime p of x0e's support that
   passes the coprimality screen (p odd, p coprime to b^2 - 4c^2, and the
   numerator primes clear of q's support), exactly one prime ideal above p
   divides alpha = (x0e^m +- c) - sqrt(q_even), pinned down by matching a
   square root of D mod p; gamma is the product of those prime forms raised
   to |v_p(x0e)|.  Admissibility additionally demands that the leftover
   primes of (c +- 1) be non-split, which makes the screened-out part of
   (alpha) principal and so gamma^m principal. */
PullbackResult pullback_classes(const CurveFamily& fam,
                                const RescaledModel& model,
                                const SpecializationRecord& rec);
PullbackResult pullback_classes(const CurveFamily& fam,
                                const SpecializationRecord& rec);

/* the record missed the target rank: 2 for imaginary D, 1 for real D */
bool is_exceptional(const SpecializationRecord& rec, int m,
                    const ClassGroupDescription& cl);

}  // namespace forge

#endif
