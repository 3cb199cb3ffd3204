#ifndef FORGE_QFORM_HPP
#define FORGE_QFORM_HPP

#include <cstddef>
#include <vector>

#include "forge/numeric.hpp"

/* Binary quadratic forms over arbitrary-precision integers: reduction for
   both signs of the discriminant, Gauss composition, prime forms, and
   canonical class labels. */

namespace forge {

/* a x^2 + b x y + c y^2 with discriminant b^2 - 4ac = 0 or 1 mod 4 and not
   a perfect square.  For D < 0 only positive definite forms (a > 0) are
   accepted; negative definite input is an error, not a sign convention. */
struct Form {
  Int a, b, c;

  Form(Int a_in, Int b_in, Int c_in);

  Int discriminant() const { return b * b - 4 * a * c; }

  /* inverse of the proper equivalence class */
  Form inverse() const { return Form(a, -b, c); }

  bool operator==(const Form&) const = default;
  bool operator<(const Form& o) const;  // lexicographic on (a, b, c)
};

/* definite: |b| <= a <= c with b >= 0 on the boundaries;
   indefinite: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b */
bool is_reduced(const Form& f);

Form reduce(Form f);

/* one step around the cycle of an indefinite form; D > 0 only */
Form rho_step(const Form& f);

/* all reduced forms on reduce(f)'s cycle, in traversal order; D > 0 only */
std::vector<Form> reduction_cycle(const Form& f);

/* (1, 0, -D/4) or (1, 1, (1-D)/4) */
Form principal_form(const Int& D);

/* (p, b, (b^2-D)/4p) representing a prime ideal above p, where b is a
   chosen root of b^2 = D mod 4p; the two roots give inverse classes.
   Throws domain_error("inert prime") when kronecker(D, p) = -1. */
Form prime_form(const Int& D, const Int& p, const Int& root_choice);

bool is_equivalent(const Form& f1, const Form& f2);

/* Canonical label of a proper equivalence class: the unique reduced form
   when D < 0, the lexicographically least cycle element when D > 0. */
class FormClass {
 public:
  explicit FormClass(const Form& f);

  const Form& representative() const { return rep_; }
  Int discriminant() const { return rep_.discriminant(); }
  bool is_principal() const;
  FormClass inverse() const { return FormClass(rep_.inverse()); }

  bool operator==(const FormClass& o) const { return rep_ == o.rep_; }
  bool operator<(const FormClass& o) const { return rep_ < o.rep_; }

 private:
  Form rep_;
};

struct FormClassHash {
  size_t operator()(const FormClass& fc) const;
};

FormClass compose(const Form& f1, const Form& f2);
FormClass compose(const FormClass& f1, const FormClass& f2);

/* n-fold composition at the class level; n = 0 gives the principal class,
   negative n goes through the inverse */
FormClass power(const Form& f, const Int& n);

}  // namespace forge

#endif
