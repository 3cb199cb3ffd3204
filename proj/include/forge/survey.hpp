#ifndef FORGE_SURVEY_HPP
#define FORGE_SURVEY_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "forge/numeric.hpp"
#include "forge/specialize.hpp"

/* Batch driver: run the specialisation pipeline over an integer range of t,
   attach a class-group verdict to every surviving record, and aggregate the
   counters a survey report needs.  Rows are computed by a dynamic thread
   queue but stored by t, so the output is byte-identical for any thread
   count.

   Each ok row carries one of two verdict routes.  When the class group fits
   under the computation ceilings we fill h, the invariant factors and the
   m-rank from the group itself (truth route).  Past the ceilings those
   columns stay empty and the verdict, if any, comes from a certificate on
   the pulled-back classes alone: the closure of the two generators has size
   m^2 (rank 2), or their orders have lcm exactly m (rank 1).  A certificate
   is a lower bound, never a disproof, so an inadmissible row past the
   ceilings has no verdict at all. */

namespace forge {

enum class SurveySign { imaginary, real };

std::string to_string(SurveySign sign);

struct SurveyOptions {
  int m = 2;
  Rat c = Rat(2);
  long t_min = 1;
  long t_max = 1;
  SurveySign sign = SurveySign::imaginary;
  std::optional<Int> modulus_override;  // replaces prod(bad_prime_set)
  factor_budget budget{};
  int threads = 1;
};

struct SurveyRow {
  SpecializationRecord rec;
  bool admissible = false;
  std::string obstruction;

  // truth route: class group computed, columns below are filled
  bool truth_route = false;
  Int h = 0;
  std::vector<Int> invariant_factors;
  int rk_m = -1;

  // certificate route bookkeeping (negative = not established)
  int cert_rank = -1;

  // 1 / 0 / -1 = yes / no / unknown
  int exceptional = -1;

  // both pulled-back classes have order dividing m (admissible rows only)
  bool power_principal = false;
};

struct SurveySummary {
  int m = 0;
  Rat c;
  Int modulus = 0;
  long t_min = 0;
  long t_max = 0;
  SurveySign sign = SurveySign::imaginary;

  // whole-range counters, one per row
  long total = 0;
  long ok = 0;
  long degenerate = 0;
  long budget_skipped = 0;

  // analysis counters over ok rows whose discriminant matches `sign`
  long exceptional = 0;
  long admissible_pullbacks = 0;
  long pullback_confirmed = 0;
  long distinct_discriminants = 0;

  Rat growth_exponent_estimate;
  bool growth_defined = false;
  std::vector<std::pair<Int, long>> fields_below;  // (X, #distinct |D| < X)
};

struct SurveyResult {
  SurveySummary summary;
  std::vector<SurveyRow> rows;  // ordered by t
};

/* pre: 2 <= m <= 6, t_min <= t_max, threads >= 1, override (if any) >= 1.
   Per-row failures never escape: they are recorded as status flags. */
SurveyResult run_survey(const SurveyOptions& opt);

std::string csv_header();
std::string csv_row(const SurveyRow& row);
void write_csv(std::ostream& out, const SurveyResult& result);

// inverse of write_csv on the row section; throws invalid_argument on
// malformed input.  parse_csv(write_csv(r)) reproduces every column.
std::vector<SurveyRow> parse_csv(std::istream& in);

// distinct fundamental discriminants among ok rows, any sign
long count_distinct_fields(const std::vector<SurveyRow>& rows);

struct GrowthReport {
  double slope = 0.0;
  std::vector<std::pair<Int, long>> fields_below;
};

/* Least-squares slope of log|D| against log|t| over the ok rows.
   pre: at least 10 ok rows, enough spread in t to fit a line. */
GrowthReport growth_report(const std::vector<SurveyRow>& rows);

// fixed key order, stable across runs
std::string summary_json(const SurveySummary& summary);

}  // namespace forge

#endif
