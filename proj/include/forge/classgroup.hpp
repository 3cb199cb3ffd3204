#ifndef FORGE_CLASSGROUP_HPP
#define FORGE_CLASSGROUP_HPP

#include <utility>
#include <vector>

#include "forge/abelian.hpp"
#include "forge/numeric.hpp"
#include "forge/qform.hpp"

/* Class groups of quadratic fields through binary quadratic forms.  For
   D > 0 the group computed is the ordinary (wide) class group: proper form
   classes are merged under (a,b,c) ~ (-a,b,-c).  That identification is a
   no-op exactly when the fundamental unit has norm -1, so applying it
   unconditionally always yields Cl(O_K). */

namespace forge {

struct ClassGroupDescription {
  Int discriminant;
  Int h;
  FiniteAbelianGroup structure;
  /* independent generators and their coordinates in the cyclic factors */
  std::vector<std::pair<Form, std::vector<Int>>> generators;
};

struct SClassGroup {
  ClassGroupDescription base;
  std::vector<Int> s_primes;
  FiniteAbelianGroup quotient;
};

struct ClassGroupLimits {
  Int definite_ceiling{1000000000};   // |D| bound for D < 0
  Int real_ceiling{1000000};          // D bound for D > 0 (cycle work per key)
  Int enumeration_ceiling{10000000};  // direct form count cross-check below this
  size_t closure_cap{1000000};        // abort closures past this many elements
};

bool is_fundamental_discriminant(const Int& D);

/* canonical ideal-class label: for D > 0 the lexicographically least form
   on the union of the cycles of f and its flip (-a, b, -c) */
FormClass wide_class(const Form& f);

/* true iff the principal cycle of D > 0 contains a form with a = -1,
   i.e. x^2 - D y^2 = -4 is solvable */
bool unit_norm_is_minus_one(const Int& D);

/* all reduced primitive forms of discriminant D; for D > 0 both signs of
   the leading coefficient appear.  Pure enumeration, no composition. */
std::vector<Form> reduced_forms(const Int& D);

/* a root b of b^2 = D mod 4p with 0 <= b < 2p, for non-inert p */
Int default_prime_root(const Int& D, const Int& p);

/* Results are memoised process-wide; concurrent calls are safe. */
ClassGroupDescription class_group(const Int& D);
ClassGroupDescription class_group(const Int& D, const ClassGroupLimits& limits);

Int class_number(const Int& D);
int class_rank(const Int& D, const Int& m);

/* quotient by the classes of the primes above each non-inert p in s_primes */
SClassGroup s_class_group(const Int& D, const std::vector<Int>& s_primes);

/* coordinates of f's class in class_group(D).structure; f must have
   discriminant D */
std::vector<Int> class_coordinates(const Int& D, const Form& f);

}  // namespace forge

#endif
