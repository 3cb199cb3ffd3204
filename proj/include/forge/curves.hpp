#ifndef FORGE_CURVES_HPP
#define FORGE_CURVES_HPP

#include <utility>
#include <vector>

#include "forge/numeric.hpp"

/* Exact rational polynomial arithmetic, the y^2 = x^{2m} + bx^m + c^2
   curve family with b = -1 - c^2, its odd-degree model through the rational
   point at x = 1, and the coordinate rescaling that pins the leading
   coefficient to -1. */

namespace forge {

/* dense coefficients, index = degree; the zero polynomial stores nothing */
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rat> ascending_coefficients);

  /* convenience for integer literals, lowest degree first */
  static Polynomial from_ints(const std::vector<long>& ascending);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  Rat coefficient(size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }
  const std::vector<Rat>& coefficients() const { return c_; }
  Rat leading() const { return c_.empty() ? Rat(0) : c_.back(); }
  bool is_integral() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(const Rat& k) const;
  bool operator==(const Polynomial& o) const { return c_ == o.c_; }

  Polynomial derivative() const;

 private:
  std::vector<Rat> c_;
};

Rat evaluate(const Polynomial& f, const Rat& x0);

/* quotient and remainder of exact rational division */
std::pair<Polynomial, Polynomial> divmod(const Polynomial& f, const Polynomial& g);

Rat resultant(Polynomial f, Polynomial g);
Rat discriminant(const Polynomial& f);

/* y^2 = f(x), f = x^{2m} + b x^m + c^2 with b = -1 - c^2, so that
   f(1) = 0 and f - (x^m -+ c)^2 = (b +- 2c) x^m with both b -+ 2c nonzero */
struct CurveFamily {
  int m = 0;
  Rat c;
  Rat b;
  Polynomial f;
};

/* c in {0, 1, -1} degenerates the family (c != 0, b^2 != 4c^2) */
CurveFamily build_family(int m, const Rat& c);

/* (f - (x^m + c)^2, f - (x^m - c)^2); throws logic_error if either fails
   to collapse to its single x^m term */
std::pair<Polynomial, Polynomial> norm_identities(const CurveFamily& fam);

struct OddModel {
  Polynomial g;  // degree 2m - 1; integral whenever the family is
  int genus = 0;
  Rat leading;   // g's top coefficient = h(1) = f'(1) = m(2 + b)
};

/* divide out the root at x = 1, then substitute x = 1 + 1/s and clear
   s-powers: g(s) = s^{2m-1} h(1 + 1/s) */
OddModel odd_model(const CurveFamily& fam);

/* y^n = model(X) isomorphic to y^n = f(x) with x = X / lambda,
   y = Y / mu; model has integer coefficients and leading -1 */
struct RescaledModel {
  Polynomial model;
  int n = 0;
  Rat lambda;
  Rat mu;
};

/* Substitute x -> x/d^alpha, y -> y/d^gamma with d = |leading| and minimal
   alpha, gamma >= 1 solving r*alpha - n*gamma = 1, then clear denominators
   by x -> x/w^n, y -> y/w^r, which the leading term never sees.  Requires
   gcd(r, n) = 1; a positive leading coefficient is flipped through y -> -y
   and so needs n odd. */
RescaledModel rescale_with_map(const Polynomial& f, int n);
Polynomial rescale_leading_minus_one(const Polynomial& f, int n);

}  // namespace forge

#endif
