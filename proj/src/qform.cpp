#include "forge/qform.hpp"

#include <stdexcept>
#include <tuple>

namespace forge {

namespace {

Int floor_mod(const Int& x, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int exact_div(const Int& n, const Int& d) {
  Int q;
  mpz_divexact(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

}  // namespace

Form::Form(Int a_in, Int b_in, Int c_in)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)) {
  const Int d = discriminant();
  if (floor_mod(d, 4) > 1) throw std::invalid_argument("discriminant not 0,1 mod 4");
  if (d >= 0 && is_perfect_square(d))
    throw std::invalid_argument("square discriminant");
  if (d < 0 && a < 0) throw std::invalid_argument("negative definite form");
}

bool Form::operator<(const Form& o) const {
  return std::tie(a, b, c) < std::tie(o.a, o.b, o.c);
}

bool is_reduced(const Form& f) {
  const Int d = f.discriminant();
  if (d < 0) {
    if (abs(f.b) > f.a || f.a > f.c) return false;
    if ((abs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
  }
  /* strict inequalities against the irrational sqrt(D) turn into these
     integer bounds via sD = floor(sqrt(D)) */
  const Int sD = isqrt(d);
  if (f.b < 1 || f.b > sD) return false;
  const Int two_abs_a = 2 * abs(f.a);
  return sD - f.b + 1 <= two_abs_a && two_abs_a <= sD + f.b;
}

Form rho_step(const Form& f) {
  const Int d = f.discriminant();
  if (d < 0) throw std::invalid_argument("rho step needs an indefinite form");
  const Int sD = isqrt(d);
  const Int ac = abs(f.c);
  Int r = floor_mod(-f.b, 2 * ac);
  if (ac > sD) {
    if (r > ac) r -= 2 * ac;  // window (-|c|, |c|]
  } else {
    Int q;  // window (sD - 2|c|, sD]; floor division, sD - r may be negative
    Int num = sD - r, den = 2 * ac;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    r += q * den;
  }
  return Form(f.c, r, exact_div(r * r - d, 4 * f.c));
}

Form reduce(Form f) {
  const Int d = f.discriminant();
  if (d < 0) {
    for (;;) {
      if (f.b > f.a || f.b <= -f.a) {
        Int r = floor_mod(f.b, 2 * f.a);
        if (r > f.a) r -= 2 * f.a;
        f.c = exact_div(r * r - d, 4 * f.a);
        f.b = r;
      }
      if (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        continue;
      }
      if (f.a == f.c && f.b < 0) f.b = -f.b;
      return f;
    }
  }
  for (int i = 0; i < (1 << 20); ++i) {
    if (is_reduced(f)) return f;
    f = rho_step(f);
  }
  throw std::logic_error("indefinite reduction did not terminate");
}

std::vector<Form> reduction_cycle(const Form& f) {
  if (f.discriminant() < 0)
    throw std::invalid_argument("cycles are defined for indefinite forms");
  const Form f0 = reduce(f);
  std::vector<Form> cyc{f0};
  for (Form g = rho_step(f0); g != f0; g = rho_step(g)) cyc.push_back(g);
  return cyc;
}

Form principal_form(const Int& D) {
  const Int r = floor_mod(D, 4);
  if (r > 1 || (D >= 0 && is_perfect_square(D)))
    throw std::invalid_argument("invalid discriminant");
  if (r == 0) return Form(1, 0, exact_div(-D, 4));
  return Form(1, 1, exact_div(1 - D, 4));
}

Form prime_form(const Int& D, const Int& p, const Int& root_choice) {
  if (floor_mod(D, 4) > 1 || (D >= 0 && is_perfect_square(D)))
    throw std::invalid_argument("invalid discriminant");
  if (!is_probable_prime(p)) throw std::invalid_argument("prime_form requires p prime");
  if (kronecker(D, p) == -1) throw std::domain_error("inert prime");
  if (floor_mod(root_choice * root_choice - D, 4 * p) != 0)
    throw std::invalid_argument("root_choice is not a square root of D mod 4p");
  return Form(p, root_choice, exact_div(root_choice * root_choice - D, 4 * p));
}

FormClass::FormClass(const Form& f) : rep_(reduce(f)) {
  // walk the cycle without materialising it; indefinite cycles can be long
  if (rep_.discriminant() > 0) {
    const Form start = rep_;
    for (Form g = rho_step(start); !(g == start); g = rho_step(g))
      if (g < rep_) rep_ = g;
  }
}

bool FormClass::is_principal() const {
  return *this == FormClass(principal_form(rep_.discriminant()));
}

size_t FormClassHash::operator()(const FormClass& fc) const {
  const Form& f = fc.representative();
  const uint64_t ha = mpz_fdiv_ui(f.a.get_mpz_t(), 0xfffffffbu);
  const uint64_t hb = mpz_fdiv_ui(f.b.get_mpz_t(), 0xfffffffbu);
  const uint64_t sa = f.a < 0 ? 1 : 0, sb = f.b < 0 ? 2 : 0;
  uint64_t h = (ha << 32) ^ hb ^ (sa | sb);
  h *= 0x9e3779b97f4a7c15ull;
  h ^= h >> 29;
  return static_cast<size_t>(h);
}

bool is_equivalent(const Form& f1, const Form& f2) {
  const Int d = f1.discriminant();
  if (d != f2.discriminant()) throw std::invalid_argument("discriminants differ");
  if (d < 0) return reduce(f1) == reduce(f2);
  const Form target = reduce(f2);
  const Form start = reduce(f1);
  Form g = start;
  do {
    if (g == target) return true;
    g = rho_step(g);
  } while (!(g == start));
  return false;
}

namespace {

/* a cycle representative with positive leading coefficient; the sign of a
   alternates around an indefinite cycle, so one rho step suffices */
Form positive_leading(const Form& f) {
  Form g = reduce(f);
  if (g.a < 0) g = rho_step(g);
  return g;
}

/* Gauss composition of united forms with a1, a2 > 0 */
Form compose_raw(Form f1, Form f2) {
  if (f1.a > f2.a) std::swap(f1, f2);
  const Int s = exact_div(f1.b + f2.b, 2);
  const Int n = f2.b - s;

  Int y1, d;
  if (f2.a % f1.a == 0) {
    y1 = 0;
    d = f1.a;
  } else {
    Int v;
    mpz_gcdext(d.get_mpz_t(), y1.get_mpz_t(), v.get_mpz_t(), f2.a.get_mpz_t(),
               f1.a.get_mpz_t());
  }

  Int x2, y2, d1;
  if (s % d == 0) {
    y2 = -1;
    x2 = 0;
    d1 = d;
  } else {
    Int v;
    mpz_gcdext(d1.get_mpz_t(), x2.get_mpz_t(), v.get_mpz_t(), s.get_mpz_t(),
               d.get_mpz_t());
    y2 = -v;
  }

  const Int v1 = exact_div(f1.a, d1);
  const Int v2 = exact_div(f2.a, d1);
  const Int r = floor_mod(y1 * y2 * n - x2 * f2.c, v1);
  const Int a3 = v1 * v2;
  const Int b3 = f2.b + 2 * v2 * r;
  const Int c3 = exact_div(f2.c * d1 + r * (f2.b + v2 * r), v1);
  return Form(a3, b3, c3);
}

}  // namespace

FormClass compose(const Form& f1, const Form& f2) {
  const Int d = f1.discriminant();
  if (d != f2.discriminant()) throw std::invalid_argument("discriminants differ");
  if (d < 0) return FormClass(compose_raw(f1, f2));
  return FormClass(compose_raw(positive_leading(f1), positive_leading(f2)));
}

FormClass compose(const FormClass& f1, const FormClass& f2) {
  return compose(f1.representative(), f2.representative());
}

FormClass power(const Form& f, const Int& n) {
  const FormClass identity(principal_form(f.discriminant()));
  if (n == 0) return identity;
  Form base = n < 0 ? f.inverse() : f;
  Int e = abs(n);
  FormClass acc = identity;
  FormClass sq(base);
  for (size_t bit = 0, top = mpz_sizeinbase(e.get_mpz_t(), 2); bit < top; ++bit) {
    if (mpz_tstbit(e.get_mpz_t(), bit)) acc = compose(acc, sq);
    if (bit + 1 < top) sq = compose(sq, sq);
  }
  return acc;
}

}  // namespace forge
