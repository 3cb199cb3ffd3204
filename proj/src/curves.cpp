#include "forge/curves.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace forge {

namespace {

Rat rat_pow(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw std::invalid_argument("zero base with negative exponent");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat out(1);
  for (long i = 0; i < e; ++i) out *= base;
  return out;
}

/* multiply by x^k */
Polynomial shifted(const Polynomial& f, size_t k) {
  if (f.is_zero()) return f;
  std::vector<Rat> c(k, Rat(0));
  c.insert(c.end(), f.coefficients().begin(), f.coefficients().end());
  return Polynomial(std::move(c));
}

Polynomial monomial(const Rat& coeff, size_t deg) {
  std::vector<Rat> c(deg + 1, Rat(0));
  c[deg] = coeff;
  return Polynomial(std::move(c));
}

}  // namespace

Polynomial::Polynomial(std::vector<Rat> ascending_coefficients)
    : c_(std::move(ascending_coefficients)) {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Polynomial Polynomial::from_ints(const std::vector<long>& ascending) {
  std::vector<Rat> c;
  c.reserve(ascending.size());
  for (long v : ascending) c.emplace_back(v);
  return Polynomial(std::move(c));
}

bool Polynomial::is_integral() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](const Rat& q) { return q.get_den() == 1; });
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<Rat> c(std::max(c_.size(), o.c_.size()), Rat(0));
  for (size_t i = 0; i < c_.size(); ++i) c[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) c[i] += o.c_[i];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + (-o);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return Polynomial();
  std::vector<Rat> c(c_.size() + o.c_.size() - 1, Rat(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-() const { return scaled(Rat(-1)); }

Polynomial Polynomial::scaled(const Rat& k) const {
  std::vector<Rat> c(c_);
  for (Rat& q : c) q *= k;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<Rat> c(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * Rat(static_cast<long>(i));
  return Polynomial(std::move(c));
}

Rat evaluate(const Polynomial& f, const Rat& x0) {
  Rat acc(0);
  const auto& c = f.coefficients();
  for (size_t i = c.size(); i-- > 0;) acc = acc * x0 + c[i];
  return acc;
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& f, const Polynomial& g) {
  if (g.is_zero()) throw std::invalid_argument("division by zero polynomial");
  std::vector<Rat> rem(f.coefficients());
  int dg = g.degree();
  if (f.degree() < dg) return {Polynomial(), f};
  std::vector<Rat> quo(f.degree() - dg + 1, Rat(0));
  Rat lc = g.leading();
  for (int i = f.degree(); i >= dg; --i) {
    Rat q = rem[i] / lc;
    if (q == 0) continue;
    quo[i - dg] = q;
    for (int j = 0; j <= dg; ++j) rem[i - dg + j] -= q * g.coefficient(j);
  }
  return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
}

Rat resultant(Polynomial f, Polynomial g) {
  if (f.is_zero() || g.is_zero()) return Rat(0);
  Rat acc(1);
  if (f.degree() < g.degree()) {
    if ((f.degree() & 1) && (g.degree() & 1)) acc = -acc;
    std::swap(f, g);
  }
  while (g.degree() > 0) {
    Polynomial r = divmod(f, g).second;
    if (r.is_zero()) return Rat(0);
    long df = f.degree(), dg = g.degree(), dr = r.degree();
    if ((df & 1) && (dg & 1)) acc = -acc;
    acc *= rat_pow(g.leading(), df - dr);
    f = std::move(g);
    g = std::move(r);
  }
  return acc * rat_pow(g.leading(), f.degree());
}

Rat discriminant(const Polynomial& f) {
  long d = f.degree();
  if (d < 1) throw std::invalid_argument("discriminant needs degree >= 1");
  Rat res = resultant(f, f.derivative());
  Rat disc = res / f.leading();
  if (((d * (d - 1) / 2) & 1) != 0) disc = -disc;
  return disc;
}

CurveFamily build_family(int m, const Rat& c) {
  if (m < 2) throw std::invalid_argument("family exponent m must be >= 2");
  if (c == 0 || c == 1 || c == -1)
    throw std::invalid_argument("degenerate family parameter c");
  CurveFamily fam;
  fam.m = m;
  fam.c = c;
  fam.b = Rat(-1) - c * c;
  std::vector<Rat> coeffs(2 * static_cast<size_t>(m) + 1, Rat(0));
  coeffs[0] = c * c;
  coeffs[m] = fam.b;
  coeffs[2 * static_cast<size_t>(m)] = 1;
  fam.f = Polynomial(std::move(coeffs));
  return fam;
}

std::pair<Polynomial, Polynomial> norm_identities(const CurveFamily& fam) {
  size_t m = static_cast<size_t>(fam.m);
  Polynomial plus = monomial(Rat(1), m) + monomial(fam.c, 0);
  Polynomial minus = monomial(Rat(1), m) - monomial(fam.c, 0);
  Polynomial first = fam.f - plus * plus;
  Polynomial second = fam.f - minus * minus;
  if (first != monomial(fam.b - 2 * fam.c, m) ||
      second != monomial(fam.b + 2 * fam.c, m))
    throw std::logic_error("norm identity failed to collapse");
  return {first, second};
}

OddModel odd_model(const CurveFamily& fam) {
  if (fam.m < 2 || fam.f.degree() != 2 * fam.m)
    throw std::invalid_argument("malformed curve family");
  if (evaluate(fam.f, Rat(1)) != 0)
    throw std::invalid_argument("family curve has no root at x = 1");
  Polynomial x_minus_1 = Polynomial::from_ints({-1, 1});
  auto [h, rem] = divmod(fam.f, x_minus_1);
  if (!rem.is_zero() || h * x_minus_1 != fam.f)
    throw std::logic_error("exact division by x - 1 failed");
  Rat h1 = evaluate(h, Rat(1));
  if (h1 == 0) throw std::invalid_argument("degenerate family: double root at x = 1");

  /* g(s) = s^r h(1 + 1/s) = sum_j h_j s^{r-j} (s+1)^j, r = deg h = 2m - 1 */
  size_t r = static_cast<size_t>(h.degree());
  Polynomial g;
  Polynomial pow_s1 = Polynomial::from_ints({1});
  Polynomial s_plus_1 = Polynomial::from_ints({1, 1});
  for (size_t j = 0; j <= r; ++j) {
    if (h.coefficient(j) != 0)
      g = g + shifted(pow_s1, r - j).scaled(h.coefficient(j));
    if (j < r) pow_s1 = pow_s1 * s_plus_1;
  }
  if (g.degree() != static_cast<int>(r) || g.leading() != h1)
    throw std::logic_error("odd model degree bookkeeping failed");

  OddModel out;
  out.g = std::move(g);
  out.genus = (static_cast<int>(r) - 1) / 2;
  out.leading = h1;
  return out;
}

RescaledModel rescale_with_map(const Polynomial& f, int n) {
  if (n < 2) throw std::invalid_argument("curve exponent n must be >= 2");
  long r = f.degree();
  if (r < 1) throw std::invalid_argument("rescale needs positive degree");
  if (std::gcd(r, static_cast<long>(n)) != 1)
    throw std::invalid_argument("degree and exponent must be coprime");

  Polynomial work = f;
  bool flipped = false;
  if (work.leading() > 0) {
    if (n % 2 == 0)
      throw std::invalid_argument("positive leading coefficient with even exponent");
    work = -work;  // y -> -y
    flipped = true;
  }

  Rat d = -work.leading();
  long alpha = mod_inverse(Int(r % n), Int(n)).get_si();
  long gamma = (r * alpha - 1) / n;
  if (gamma == 0) {
    alpha += n;
    gamma = (r * alpha - 1) / n;
  }

  /* x -> x/d^alpha, y -> y/d^gamma: a_i picks up d^{n*gamma - i*alpha},
     which is d^{(r-i)alpha - 1} >= d^0 for i < r and d^{-1} at the top */
  std::vector<Rat> c(static_cast<size_t>(r) + 1, Rat(0));
  for (long i = 0; i <= r; ++i) {
    Rat a = work.coefficient(static_cast<size_t>(i));
    if (a != 0) c[static_cast<size_t>(i)] = a * rat_pow(d, (r - i) * alpha - 1);
  }

  /* clear denominators: x -> x/w^n, y -> y/w^r fixes the leading term */
  Int w(1);
  for (long i = 0; i < r; ++i) w = lcm(w, Int(c[static_cast<size_t>(i)].get_den()));
  if (w != 1)
    for (long i = 0; i < r; ++i)
      c[static_cast<size_t>(i)] *= rat_pow(Rat(w), n * (r - i));

  RescaledModel out;
  out.model = Polynomial(std::move(c));
  out.n = n;
  out.lambda = rat_pow(d, alpha) * rat_pow(Rat(w), n);
  out.mu = rat_pow(d, gamma) * rat_pow(Rat(w), r);
  if (flipped) out.mu = -out.mu;
  if (!out.model.is_integral() || out.model.leading() != -1)
    throw std::logic_error("rescaled model not integral with leading -1");
  return out;
}

Polynomial rescale_leading_minus_one(const Polynomial& f, int n) {
  return rescale_with_map(f, n).model;
}

}  // namespace forge
