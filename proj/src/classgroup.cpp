#include "forge/classgroup.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace forge {

namespace {

Int floor_mod(const Int& x, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

bool squarefree(const Int& n) {
  for (const auto& [p, e] : factorize(n).factors)
    if (e > 1) return false;
  return true;
}

}  // namespace

bool is_fundamental_discriminant(const Int& D) {
  if (D == 0 || D == 1) return false;
  const Int r = floor_mod(D, 4);
  if (r == 1) return squarefree(D);
  if (r != 0) return false;
  const Int d0 = D / 4;
  const Int r0 = floor_mod(d0, 4);
  return (r0 == 2 || r0 == 3) && squarefree(d0);
}

FormClass wide_class(const Form& f) {
  FormClass cls(f);
  if (f.discriminant() < 0) return cls;
  FormClass flipped{Form(-f.a, f.b, -f.c)};
  return cls < flipped ? cls : flipped;
}

bool unit_norm_is_minus_one(const Int& D) {
  if (D < 0) throw std::invalid_argument("unit sign is a real quadratic question");
  const Form start = reduce(principal_form(D));
  Form g = start;
  do {
    if (g.a == -1) return true;
    g = rho_step(g);
  } while (!(g == start));
  return false;
}

std::vector<Form> reduced_forms(const Int& D) {
  if (floor_mod(D, 4) > 1 || (D >= 0 && is_perfect_square(D)))
    throw std::invalid_argument("invalid discriminant");
  std::vector<Form> out;

  if (D < 0) {
    if (-D > Int("4000000000000"))
      throw budget_exceeded("form enumeration above its size budget");
    const int64_t d = D.get_si();
    for (int64_t a = 1; 3 * a * a <= -d; ++a) {
      for (int64_t b = -a + 1; b <= a; ++b) {
        const int64_t num = b * b - d;
        if (num % (4 * a)) continue;
        const int64_t c = num / (4 * a);
        if (c < a) continue;
        if (b < 0 && (-b == a || a == c)) continue;
        if (std::gcd(std::gcd(a, b), c) != 1) continue;
        out.emplace_back(Int(a), Int(b), Int(c));
      }
    }
  } else {
    if (D > Int(100000000)) throw budget_exceeded("form enumeration above its size budget");
    const int64_t d = D.get_si();
    const int64_t sD = isqrt(D).get_si();
    std::set<std::tuple<int64_t, int64_t, int64_t>> seen;
    for (int64_t b = 1 + ((d ^ 1) & 1); b <= sD; b += 2) {
      const int64_t n = (d - b * b) / 4;  // = a * (-c) > 0 for reduced forms
      if (n <= 0) continue;
      for (int64_t u = 1; u * u <= n; ++u) {
        if (n % u) continue;
        for (int64_t av : {u, n / u})
          for (int64_t a : {av, -av}) {
            const int64_t c = -(n / a);
            if (std::gcd(std::gcd(a, b), c) != 1) continue;
            Form f{Int(a), Int(b), Int(c)};
            if (is_reduced(f) && seen.insert({a, b, c}).second) out.push_back(f);
          }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int default_prime_root(const Int& D, const Int& p) {
  if (!is_probable_prime(p)) throw std::invalid_argument("p must be prime");
  if (kronecker(D, p) == -1) throw std::domain_error("inert prime");
  if (p == 2) {
    const Int m8 = floor_mod(D, 8);
    if (m8 == 1) return 1;
    if (m8 == 0) return 0;
    return 2;  // D = 4 mod 8
  }
  const Int r = floor_mod(D, p) == 0 ? Int(0) : sqrt_mod_p(D, p);
  return floor_mod(r - D, 2) == 0 ? r : r + p;
}

namespace {

struct ClassGroupData {
  ClassGroupDescription desc;
  /* every class of the group, with coordinates in the invariant factors */
  std::unordered_map<FormClass, std::vector<Int>, FormClassHash> coords;
};

FormClass canonical(const Int& D, const Form& f) {
  return D > 0 ? wide_class(f) : FormClass(f);
}

struct ClosureState {
  std::unordered_map<FormClass, std::vector<int32_t>, FormClassHash> elements;
  std::vector<Form> essential;
  std::vector<std::vector<Int>> relations;  // row j: t_j e_j - coords(g_j^{t_j})
};

/* Discrete-log-free saturation: walk g, g^2, ... until the power lands in
   the current subgroup (relative order t), record the relation, then graft
   the t - 1 new cosets onto the element table. */
void add_generator(ClosureState& st, const Int& D, const Form& g, size_t cap) {
  FormClass cls = canonical(D, g);
  std::vector<FormClass> powers;
  FormClass pw = cls;
  while (st.elements.find(pw) == st.elements.end()) {
    powers.push_back(pw);
    pw = canonical(D, compose(pw.representative(), g).representative());
    if (powers.size() > cap) throw budget_exceeded("class group closure exceeded its budget");
  }
  const size_t t = powers.size() + 1;
  if (t == 1) return;  // generator already in the subgroup

  const size_t j = st.essential.size();
  st.essential.push_back(g);
  std::vector<Int> row(j + 1, 0);
  const auto& head = st.elements.at(pw);
  for (size_t i = 0; i < head.size(); ++i) row[i] = -Int(head[i]);
  row[j] = static_cast<long>(t);
  st.relations.push_back(std::move(row));

  std::vector<std::pair<Form, std::vector<int32_t>>> snapshot;
  snapshot.reserve(st.elements.size());
  for (const auto& [e, x] : st.elements) snapshot.emplace_back(e.representative(), x);
  for (size_t s = 1; s < t; ++s) {
    const Form& gs = powers[s - 1].representative();
    for (const auto& [base, x] : snapshot) {
      FormClass prod = canonical(D, compose(base, gs).representative());
      std::vector<int32_t> coords = x;
      coords.resize(j, 0);
      coords.push_back(static_cast<int32_t>(s));
      st.elements.emplace(std::move(prod), std::move(coords));
      if (st.elements.size() > cap)
        throw budget_exceeded("class group closure exceeded its budget");
    }
  }
}

ClassGroupData build_class_group(const Int& D, const ClassGroupLimits& limits) {
  ClosureState st;
  st.elements.emplace(canonical(D, principal_form(D)), std::vector<int32_t>{});

  const Int bound = D < 0 ? isqrt(-D / 3) : isqrt(D);
  if (bound >= 1000000) throw budget_exceeded("prime form generator bound too large");
  for (uint32_t p : small_primes()) {
    if (bound < static_cast<long>(p)) break;
    if (kronecker(D, p) == -1) continue;
    add_generator(st, D, prime_form(D, p, default_prime_root(D, p)), limits.closure_cap);
  }

  const size_t ecount = st.essential.size();
  IntMatrix rel(ecount, ecount);
  for (size_t i = 0; i < ecount; ++i)
    for (size_t k = 0; k < st.relations[i].size(); ++k) rel.at(i, k) = st.relations[i][k];
  SmithDecomposition sd = smith_decomposition(rel);

  Int order = 1;
  std::vector<size_t> keep;
  std::vector<Int> factors;
  for (size_t i = 0; i < sd.diag.size(); ++i) {
    order *= sd.diag[i];
    if (sd.diag[i] > 1) {
      keep.push_back(i);
      factors.push_back(sd.diag[i]);
    }
  }
  if (order != static_cast<long>(st.elements.size()))
    throw std::logic_error("closure relations are inconsistent with the element count");

  ClassGroupData data;
  data.desc.discriminant = D;
  data.desc.h = static_cast<long>(st.elements.size());
  data.desc.structure = FiniteAbelianGroup(factors);

  for (size_t j = 0; j < ecount; ++j) {
    std::vector<Int> c;
    for (size_t i : keep) c.push_back(floor_mod(sd.v.at(j, i), sd.diag[i]));
    data.desc.generators.emplace_back(st.essential[j], std::move(c));
  }

  for (const auto& [cls, x] : st.elements) {
    std::vector<Int> c;
    for (size_t i : keep) {
      Int acc = 0;
      for (size_t e = 0; e < x.size(); ++e) acc += Int(x[e]) * sd.v.at(e, i);
      c.push_back(floor_mod(acc, sd.diag[i]));
    }
    data.coords.emplace(cls, std::move(c));
  }

  /* oracle cross-check at desk scale: count classes without composition */
  const Int abs_d = abs(D);
  if (abs_d <= limits.enumeration_ceiling) {
    Int counted;
    if (D < 0) {
      counted = static_cast<long>(reduced_forms(D).size());
    } else {
      auto forms = reduced_forms(D);
      std::set<Form> remaining(forms.begin(), forms.end());
      counted = 0;
      while (!remaining.empty()) {
        const Form f0 = *remaining.begin();
        for (const Form& entry : {f0, Form(-f0.a, f0.b, -f0.c)})
          for (const Form& g : reduction_cycle(entry)) remaining.erase(g);
        ++counted;
      }
    }
    if (counted != data.desc.h)
      throw std::logic_error("class number mismatch between enumeration and closure");
  }
  return data;
}

std::shared_ptr<const ClassGroupData> get_data(const Int& D, const ClassGroupLimits& limits) {
  static std::shared_mutex mutex;
  static std::map<Int, std::shared_ptr<const ClassGroupData>> cache;

  {
    std::shared_lock lock(mutex);
    auto it = cache.find(D);
    if (it != cache.end()) return it->second;
  }
  if (!is_fundamental_discriminant(D))
    throw std::invalid_argument("non-fundamental discriminant");
  if (D < 0 && -D > limits.definite_ceiling)
    throw budget_exceeded("discriminant magnitude above the configured ceiling");
  if (D > 0 && D > limits.real_ceiling)
    throw budget_exceeded("real discriminant above the configured ceiling");

  auto data = std::make_shared<const ClassGroupData>(build_class_group(D, limits));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(D, std::move(data));
  return it->second;
}

}  // namespace

ClassGroupDescription class_group(const Int& D) { return class_group(D, ClassGroupLimits{}); }

ClassGroupDescription class_group(const Int& D, const ClassGroupLimits& limits) {
  return get_data(D, limits)->desc;
}

Int class_number(const Int& D) { return class_group(D).h; }

int class_rank(const Int& D, const Int& m) { return m_rank(class_group(D).structure, m); }

SClassGroup s_class_group(const Int& D, const std::vector<Int>& s_primes) {
  auto data = get_data(D, ClassGroupLimits{});
  SClassGroup out;
  out.base = data->desc;
  out.s_primes = s_primes;

  const auto& d = data->desc.structure.invariant_factors();
  std::vector<std::vector<Int>> rows;
  for (size_t i = 0; i < d.size(); ++i) {
    std::vector<Int> r(d.size(), 0);
    r[i] = d[i];
    rows.push_back(std::move(r));
  }
  for (const Int& p : s_primes) {
    if (!is_probable_prime(p)) throw std::invalid_argument("s_primes must be prime");
    if (kronecker(D, p) == -1) continue;  // inert primes contribute nothing
    const Form pf = prime_form(D, p, default_prime_root(D, p));
    rows.push_back(data->coords.at(canonical(D, pf)));
  }
  out.quotient = smith_normal_form(IntMatrix::from_rows(rows, d.size()));
  return out;
}

std::vector<Int> class_coordinates(const Int& D, const Form& f) {
  if (f.discriminant() != D)
    throw std::invalid_argument("form discriminant does not match");
  auto data = get_data(D, ClassGroupLimits{});
  auto it = data->coords.find(canonical(D, f));
  if (it == data->coords.end())
    throw std::logic_error("class missing from the closure table");
  return it->second;
}

}  // namespace forge
