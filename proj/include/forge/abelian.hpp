#ifndef FORGE_ABELIAN_HPP
#define FORGE_ABELIAN_HPP

#include <cstdint>
#include <vector>

#include "forge/numeric.hpp"

/* Finite abelian groups in invariant-factor form, the m-rank calculus on
   them, and the exact-sequence rank inequality checker. */

namespace forge {

/* A finite abelian group Z/d1 x ... x Z/dk with d1 | d2 | ... | dk and
   every di >= 2.  The empty list is the trivial group.  The invariant
   factor list is the canonical key: two groups are isomorphic iff their
   lists are equal. */
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;

  /* validates the divisibility chain and di >= 2 */
  explicit FiniteAbelianGroup(std::vector<Int> invariant_factors);

  const std::vector<Int>& invariant_factors() const { return d_; }
  bool is_trivial() const { return d_.empty(); }
  Int order() const;
  bool is_m_torsion(const Int& m) const;  // every di divides m

  FiniteAbelianGroup direct_sum(const FiniteAbelianGroup& other) const;

  bool operator==(const FiniteAbelianGroup& o) const { return d_ == o.d_; }
  bool operator!=(const FiniteAbelianGroup& o) const { return d_ != o.d_; }

 private:
  std::vector<Int> d_;
};

/* largest r such that (Z/m)^r embeds into G; m >= 2.
   Computed as min over prime powers p^e || m of #{i : p^e | di}. */
int m_rank(const FiniteAbelianGroup& g, const Int& m);

/* #{i : p^e | di} for a prime p and e >= 1; equals m_rank(g, p^e) */
int p_power_rank(const FiniteAbelianGroup& g, const Int& p, unsigned e);

/* order of the element with the given cyclic coordinates:
   lcm_i d_i / gcd(d_i, x_i) */
Int element_order(const FiniteAbelianGroup& g, const std::vector<Int>& coords);

/* Dense integer matrix, row-major; rows are relations on `cols` generators. */
struct IntMatrix {
  size_t rows = 0, cols = 0;
  std::vector<Int> a;

  IntMatrix() = default;
  IntMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0) {}
  Int& at(size_t i, size_t j) { return a[i * cols + j]; }
  const Int& at(size_t i, size_t j) const { return a[i * cols + j]; }
  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows_in, size_t cols);
};

/* Smith normal form of `m` together with both transforms:
   u * m * v = diag(d), u and v unimodular.  diag entries are nonnegative
   and each divides the next.  With rows-as-relations the cokernel
   Z^cols / rowspace(m) is read off the diagonal, and a generator exponent
   row x maps to coordinates x * v in the cyclic factors. */
struct SmithDecomposition {
  std::vector<Int> diag;  // length min(rows, cols)
  IntMatrix u;            // rows x rows
  IntMatrix v;            // cols x cols
};

SmithDecomposition smith_decomposition(IntMatrix m);

/* The cokernel Z^cols / rowspace(relations) as a finite abelian group.
   Throws std::domain_error("infinite group") if the cokernel has free rank. */
FiniteAbelianGroup smith_normal_form(const IntMatrix& relations);

/* Oracle: greedy search for the largest r with (Z/m)^r inside G, working
   element by element in the m-torsion subgroup.  Independent of m_rank's
   divisor-count formula.  Refuses groups of order > 10^5. */
int brute_force_m_rank(const FiniteAbelianGroup& g, const Int& m);

/* A subgroup A of `ambient` given by generating vectors (coordinates in the
   ambient's cyclic factors) together with the quotient ambient/A.
   |A| * |quotient| = |ambient| always holds. */
struct SubquotientWitness {
  FiniteAbelianGroup ambient;
  std::vector<std::vector<Int>> sub_generators;
  FiniteAbelianGroup quotient;

  /* invariant factors of the subgroup the generators span */
  FiniteAbelianGroup subgroup_structure() const;
};

/* Deterministic per seed: picks up to 3 random cyclic subgroups of g, sums
   them, and derives the quotient.  Ambient order must be <= 10^5. */
SubquotientWitness sample_exact_sequence(const FiniteAbelianGroup& g, uint64_t seed);

/* Verdict of the rank inequality rk_m(B) >= rk_m(A) + rk_m(B/A) on a
   witness; equality_expected is set when the subgroup or the quotient is
   free over Z/m (trivial counts as free of rank 0). */
struct RankLemmaVerdict {
  bool inequality_holds = false;
  bool equality_expected = false;
  bool equality_holds = false;
};

/* Throws std::invalid_argument unless ambient, subgroup and quotient are
   all m-torsion. */
RankLemmaVerdict check_rank_lemma(const SubquotientWitness& w, const Int& m);

}  // namespace forge

#endif
