#include "forge/abelian.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace forge {

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<Int> invariant_factors)
    : d_(std::move(invariant_factors)) {
  for (size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] < 2) throw std::invalid_argument("invariant factor below 2");
    if (i + 1 < d_.size() && d_[i + 1] % d_[i] != 0)
      throw std::invalid_argument("invariant factors violate divisibility chain");
  }
}

Int FiniteAbelianGroup::order() const {
  Int n = 1;
  for (const Int& d : d_) n *= d;
  return n;
}

bool FiniteAbelianGroup::is_m_torsion(const Int& m) const {
  for (const Int& d : d_)
    if (m % d != 0) return false;
  return true;
}

FiniteAbelianGroup FiniteAbelianGroup::direct_sum(const FiniteAbelianGroup& other) const {
  /* merge elementary divisors: per prime, pool the exponent partitions and
     rebuild invariant factors by pairing largest with largest */
  std::map<Int, std::vector<unsigned>> parts;
  for (const auto* g : {this, &other})
    for (const Int& d : g->d_)
      for (const auto& [p, e] : factorize(d).factors) parts[p].push_back(e);
  size_t k = 0;
  for (auto& [p, es] : parts) {
    std::sort(es.begin(), es.end(), std::greater<unsigned>());
    k = std::max(k, es.size());
  }
  std::vector<Int> out(k, 1);
  for (const auto& [p, es] : parts)
    for (size_t i = 0; i < es.size(); ++i) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), es[i]);
      out[i] *= pe;  // out[0] is the largest factor
    }
  std::reverse(out.begin(), out.end());
  return FiniteAbelianGroup(out);
}

int m_rank(const FiniteAbelianGroup& g, const Int& m) {
  if (m < 2) throw std::invalid_argument("m_rank requires m >= 2");
  const auto& d = g.invariant_factors();
  int rank = static_cast<int>(d.size());
  for (const auto& [p, e] : factorize(m).factors) {
    Int pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
    int count = 0;
    for (const Int& di : d)
      if (di % pe == 0) ++count;
    rank = std::min(rank, count);
  }
  return rank;
}

int p_power_rank(const FiniteAbelianGroup& g, const Int& p, unsigned e) {
  if (e < 1) throw std::invalid_argument("p_power_rank requires e >= 1");
  if (!is_probable_prime(p)) throw std::invalid_argument("p_power_rank requires p prime");
  Int pe;
  mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
  int count = 0;
  for (const Int& di : g.invariant_factors())
    if (di % pe == 0) ++count;
  return count;
}

Int element_order(const FiniteAbelianGroup& g, const std::vector<Int>& coords) {
  const auto& d = g.invariant_factors();
  if (coords.size() != d.size())
    throw std::invalid_argument("coordinate length does not match the group");
  Int ord = 1;
  for (size_t i = 0; i < d.size(); ++i) {
    Int gc = gcd(d[i], coords[i]);
    Int cyc = d[i] / gc;
    ord = lcm(ord, cyc);
  }
  return ord;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<Int>>& rows_in, size_t cols) {
  IntMatrix m(rows_in.size(), cols);
  for (size_t i = 0; i < rows_in.size(); ++i) {
    if (rows_in[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (size_t j = 0; j < cols; ++j) m.at(i, j) = rows_in[i][j];
  }
  return m;
}

namespace {

IntMatrix identity(size_t n) {
  IntMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

void swap_rows(IntMatrix& m, IntMatrix& u, size_t i, size_t j) {
  if (i == j) return;
  for (size_t c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
  for (size_t c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
}

void swap_cols(IntMatrix& m, IntMatrix& v, size_t i, size_t j) {
  if (i == j) return;
  for (size_t r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
  for (size_t r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
}

/* row_i -= q * row_k */
void row_axpy(IntMatrix& m, IntMatrix& u, size_t i, size_t k, const Int& q) {
  if (q == 0) return;
  for (size_t c = 0; c < m.cols; ++c) m.at(i, c) -= q * m.at(k, c);
  for (size_t c = 0; c < u.cols; ++c) u.at(i, c) -= q * u.at(k, c);
}

/* col_j -= q * col_k */
void col_axpy(IntMatrix& m, IntMatrix& v, size_t j, size_t k, const Int& q) {
  if (q == 0) return;
  for (size_t r = 0; r < m.rows; ++r) m.at(r, j) -= q * m.at(r, k);
  for (size_t r = 0; r < v.rows; ++r) v.at(r, j) -= q * v.at(r, k);
}

/* nearest-integer quotient, keeps remainders small during elimination */
Int round_div(const Int& a, const Int& b) {
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (2 * r > abs(b)) q += 1;
  return q;
}

}  // namespace

SmithDecomposition smith_decomposition(IntMatrix m) {
  const size_t rows = m.rows, cols = m.cols;
  SmithDecomposition out;
  out.u = identity(rows);
  out.v = identity(cols);
  const size_t steps = std::min(rows, cols);

  for (size_t k = 0; k < steps; ++k) {
    /* pivot: smallest absolute value in the active submatrix, then lowest
       index in row-major order */
    size_t pi = rows, pj = cols;
    for (size_t i = k; i < rows; ++i)
      for (size_t j = k; j < cols; ++j) {
        const Int& x = m.at(i, j);
        if (x == 0) continue;
        if (pi == rows || mpz_cmpabs(x.get_mpz_t(), m.at(pi, pj).get_mpz_t()) < 0) {
          pi = i;
          pj = j;
        }
      }
    if (pi == rows) break;  // submatrix is zero
    swap_rows(m, out.u, k, pi);
    swap_cols(m, out.v, k, pj);

    for (;;) {
      /* clear column k below the pivot, re-pivoting on nonzero remainders */
      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (size_t i = k + 1; i < rows; ++i) {
          if (m.at(i, k) == 0) continue;
          row_axpy(m, out.u, i, k, round_div(m.at(i, k), m.at(k, k)));
          if (m.at(i, k) != 0) {
            swap_rows(m, out.u, k, i);
            dirty = true;
          }
        }
        for (size_t j = k + 1; j < cols; ++j) {
          if (m.at(k, j) == 0) continue;
          col_axpy(m, out.v, j, k, round_div(m.at(k, j), m.at(k, k)));
          if (m.at(k, j) != 0) {
            swap_cols(m, out.v, k, j);
            dirty = true;
          }
        }
      }
      /* the pivot must divide every remaining entry; if not, fold the
         offending row in and eliminate again */
      bool divides = true;
      for (size_t i = k + 1; i < rows && divides; ++i)
        for (size_t j = k + 1; j < cols && divides; ++j)
          if (m.at(i, j) % m.at(k, k) != 0) {
            row_axpy(m, out.u, k, i, Int(-1));
            divides = false;
          }
      if (divides) break;
    }
    if (m.at(k, k) < 0) {
      for (size_t c = 0; c < cols; ++c) m.at(k, c) = -m.at(k, c);
      for (size_t c = 0; c < rows; ++c) out.u.at(k, c) = -out.u.at(k, c);
    }
  }

  out.diag.resize(steps);
  for (size_t k = 0; k < steps; ++k) out.diag[k] = m.at(k, k);
  return out;
}

FiniteAbelianGroup smith_normal_form(const IntMatrix& relations) {
  if (relations.cols == 0) return FiniteAbelianGroup();
  SmithDecomposition s = smith_decomposition(relations);
  size_t nonzero = 0;
  std::vector<Int> factors;
  for (const Int& d : s.diag)
    if (d != 0) {
      ++nonzero;
      if (d > 1) factors.push_back(d);
    }
  if (nonzero < relations.cols) throw std::domain_error("infinite group");
  return FiniteAbelianGroup(factors);
}

namespace {

/* elements of a group in invariant-factor coordinates; orders are capped at
   10^5 so narrow integers suffice */
using Elem = std::vector<int64_t>;

struct ElemHash {
  size_t operator()(const Elem& e) const {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int64_t x : e) {
      h ^= static_cast<uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

using ElemSet = std::unordered_set<Elem, ElemHash>;

Elem add_mod(const Elem& a, const Elem& b, const std::vector<int64_t>& mod) {
  Elem r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    r[i] = a[i] + b[i];
    if (r[i] >= mod[i]) r[i] -= mod[i];
  }
  return r;
}

std::vector<int64_t> small_factors(const FiniteAbelianGroup& g, const char* who) {
  if (g.order() > 100000) throw budget_exceeded(std::string(who) + ": group order above 10^5");
  std::vector<int64_t> mod;
  for (const Int& d : g.invariant_factors()) mod.push_back(d.get_si());
  return mod;
}

/* closure of a subgroup set under one more cyclic generator: append cosets
   H + j*z until j*z falls back into H */
void extend_by_cyclic(ElemSet& h, const Elem& z, const std::vector<int64_t>& mod) {
  std::vector<Elem> base(h.begin(), h.end());
  Elem w = z;
  while (h.find(w) == h.end()) {
    for (const Elem& b : base) h.insert(add_mod(b, w, mod));
    w = add_mod(w, z, mod);
  }
}

/* invariant factors of a subgroup given as an explicit element set, read off
   per-prime torsion counts: #{x : p^i x = 0} = p^(sum_j min(i, e_j)) */
FiniteAbelianGroup structure_from_elements(const ElemSet& elems,
                                           const std::vector<int64_t>& mod) {
  const Int n = static_cast<long>(elems.size());
  std::map<Int, std::vector<unsigned>> partitions;
  for (const auto& [p, e_total] : factorize(n).factors) {
    const int64_t ps = p.get_si();
    /* counts[i] = #{j : e_j >= i}, the conjugate partition */
    std::vector<unsigned> conj;
    unsigned prev_log = 0;
    for (unsigned i = 1;; ++i) {
      int64_t pi = 1;
      for (unsigned t = 0; t < i; ++t) pi *= ps;
      size_t cnt = 0;
      for (const Elem& x : elems) {
        bool killed = true;
        for (size_t c = 0; c < x.size() && killed; ++c)
          if ((x[c] * pi) % mod[c] != 0) killed = false;
        if (killed) ++cnt;
      }
      unsigned log = 0;
      for (size_t q = cnt; q > 1; q /= static_cast<size_t>(ps)) ++log;
      conj.push_back(log - prev_log);
      prev_log = log;
      if (log == e_total) break;
    }
    std::vector<unsigned> part;
    for (unsigned j = 0; j < conj[0]; ++j) {
      unsigned e = 0;
      for (unsigned c : conj)
        if (c > j) ++e;
      part.push_back(e);  // descending
    }
    partitions[p] = part;
  }
  size_t k = 0;
  for (const auto& [p, part] : partitions) k = std::max(k, part.size());
  std::vector<Int> out(k, 1);
  for (const auto& [p, part] : partitions)
    for (size_t i = 0; i < part.size(); ++i) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), part[i]);
      out[i] *= pe;
    }
  std::reverse(out.begin(), out.end());
  return FiniteAbelianGroup(out);
}

ElemSet close_generators(const std::vector<std::vector<Int>>& gens,
                         const std::vector<int64_t>& mod) {
  ElemSet h;
  h.insert(Elem(mod.size(), 0));
  for (const auto& g : gens) {
    Elem z(mod.size());
    for (size_t i = 0; i < mod.size(); ++i) {
      Int r = g[i] % mod[i];
      if (r < 0) r += mod[i];
      z[i] = r.get_si();
    }
    extend_by_cyclic(h, z, mod);
  }
  return h;
}

}  // namespace

int brute_force_m_rank(const FiniteAbelianGroup& g, const Int& m) {
  if (m < 2) throw std::invalid_argument("brute_force_m_rank requires m >= 2");
  if (m > g.order()) return 0;  // no element of order m
  const auto mod = small_factors(g, "brute_force_m_rank");
  const int64_t ms = m.get_si();
  const size_t k = mod.size();

  /* the m-torsion subgroup: coordinate i ranges over multiples of
     d_i / gcd(d_i, m) */
  std::vector<int64_t> step(k), count(k);
  for (size_t i = 0; i < k; ++i) {
    const int64_t gi = std::gcd(mod[i], ms);
    step[i] = mod[i] / gi;
    count[i] = gi;
  }

  ElemSet h;
  h.insert(Elem(k, 0));
  int rank = 0;

  /* greedy over all torsion elements: z of order m with <z> meeting the
     current subgroup trivially extends it by a free summand; one pass is
     exhaustive because the accumulated free subgroup is always a direct
     summand of the torsion module */
  Elem idx(k, 0), z(k, 0);
  for (;;) {
    bool zero = true;
    for (size_t i = 0; i < k; ++i) {
      z[i] = idx[i] * step[i];
      if (z[i] != 0) zero = false;
    }
    if (!zero) {
      bool free_join = true;
      Elem w = z;
      for (int64_t j = 1; j < ms && free_join; ++j) {
        if (h.find(w) != h.end()) free_join = false;
        w = add_mod(w, z, mod);
      }
      if (free_join) {
        ++rank;
        std::vector<Elem> base(h.begin(), h.end());
        w = z;
        for (int64_t j = 1; j < ms; ++j) {
          for (const Elem& b : base) h.insert(add_mod(b, w, mod));
          w = add_mod(w, z, mod);
        }
      }
    }
    size_t c = 0;
    while (c < k && ++idx[c] == count[c]) idx[c++] = 0;
    if (c == k) break;
  }
  return rank;
}

FiniteAbelianGroup SubquotientWitness::subgroup_structure() const {
  if (ambient.is_trivial() || sub_generators.empty()) return FiniteAbelianGroup();
  const auto mod = small_factors(ambient, "subgroup_structure");
  return structure_from_elements(close_generators(sub_generators, mod), mod);
}

SubquotientWitness sample_exact_sequence(const FiniteAbelianGroup& g, uint64_t seed) {
  SubquotientWitness w;
  w.ambient = g;
  if (g.is_trivial()) return w;
  const auto mod = small_factors(g, "sample_exact_sequence");
  const size_t k = mod.size();

  std::mt19937_64 rng(seed);
  const size_t picks = 1 + rng() % 3;
  for (size_t t = 0; t < picks; ++t) {
    std::vector<Int> x(k);
    for (size_t i = 0; i < k; ++i)
      x[i] = static_cast<long>(rng() % static_cast<uint64_t>(mod[i]));
    w.sub_generators.push_back(std::move(x));
  }

  /* quotient: relations of the ambient plus the chosen generators */
  IntMatrix rel(k + picks, k);
  for (size_t i = 0; i < k; ++i) rel.at(i, i) = mod[i];
  for (size_t t = 0; t < picks; ++t)
    for (size_t i = 0; i < k; ++i) rel.at(k + t, i) = w.sub_generators[t][i];
  w.quotient = smith_normal_form(rel);
  return w;
}

RankLemmaVerdict check_rank_lemma(const SubquotientWitness& w, const Int& m) {
  if (m < 2) throw std::invalid_argument("check_rank_lemma requires m >= 2");
  const FiniteAbelianGroup sub = w.subgroup_structure();
  if (!w.ambient.is_m_torsion(m) || !sub.is_m_torsion(m) || !w.quotient.is_m_torsion(m))
    throw std::invalid_argument("check_rank_lemma requires m-torsion groups");

  const int rb = m_rank(w.ambient, m);
  const int ra = m_rank(sub, m);
  const int rc = m_rank(w.quotient, m);

  const auto free_over_m = [&m](const FiniteAbelianGroup& a) {
    for (const Int& d : a.invariant_factors())
      if (d != m) return false;
    return true;
  };

  RankLemmaVerdict v;
  v.inequality_holds = rb >= ra + rc;
  v.equality_expected = free_over_m(sub) || free_over_m(w.quotient);
  v.equality_holds = rb == ra + rc;
  return v;
}

}  // namespace forge
