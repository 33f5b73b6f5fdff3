#ifndef STABLERED_PIPELINE_HPP
#define STABLERED_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "stablered/monodromy_bound.hpp"
#include "stablered/reduction.hpp"

namespace stablered {

struct JobSpec {
  Int p;
  int e = 1;
  std::vector<int64_t> residue_modulus;  // over F_p, ascending, monic
  std::string f_text;                    // polynomial in the documented grammar
  /* alternative to f_text: coefficients as matrices of rational strings */
  std::vector<std::vector<std::vector<std::string>>> f_coeffs;

  std::optional<Rat> precision_cap;
  long max_extension = 1024;
  int threads = 1;
  bool verbose = false;
  bool emit_fixture = false;
};

/* JSON round-trip of the job document */
JobSpec jobspec_from_json(const std::string& text);
std::string jobspec_to_json(const JobSpec& job);

/* Polynomial text grammar: sum of terms `c`, `c*X^i`, `X^i`; a coefficient
 * is a product of a rational `a` or `a/b`, `pi^j`, `u^i` factors.  The
 * variable may be written X or X0.  Whitespace-insensitive. */
Poly parse_poly(const std::string& text, const FieldPtr& F, Var var = Var::X0);

using ElemMatrix = std::vector<std::vector<std::string>>;  // k rows of e rational strings

struct RootSummary {
  long host_e = 0;
  long host_k = 0;
  std::string kind;        // "single" or "branch"
  long count = 1;          // roots described by this entry
  std::string value;       // display form (center for branches)
  ElemMatrix value_matrix; // canonical serialization
  std::string slope;       // "inf" for the zero root
  std::string gamma;       // "exact" when exact
  bool exact = false;
  int multiplicity = 1;
  int family = 0;
};

struct ComponentSummary {
  size_t class_size = 0;   // roots per class
  long n_classes = 1;      // parallel conjugate classes with this data
  std::string radius;
  std::vector<long> surviving;
  std::vector<std::pair<long, std::vector<int64_t>>> as_rhs;  // exponent -> residue coeffs
  long conductor = 0;
  long genus = 0;
  bool residues_up_to_unit = false;
  bool verified = false;
};

struct Report {
  JobSpec job;
  std::string f_echo;

  long n = 0, m = 0, r = 0, alpha = 0;
  Rat genus_c;
  bool small_m_warning = false;

  std::vector<std::string> L_coeffs;    // display form
  std::vector<ElemMatrix> L_matrix;     // canonical serialization
  std::vector<std::pair<std::string, long>> polygon;  // (slope, length)

  std::vector<RootSummary> roots;
  std::vector<ComponentSummary> components;
  ReductionTree tree;
  std::optional<int> reduction_type;
  MonodromyBoundReport bound;

  bool congruence_ok = false;
  bool ultrametric_ok = false;
  bool genus_sum_ok = false;
  bool all_verified = false;
  bool has_multiple_roots = false;

  std::vector<std::pair<std::string, double>> timings_ms;

  int exit_code = 0;
  std::string error_stage;
  std::string error_code;
  std::string error_message;
};

/* Full pipeline: validate -> taylor/decompose -> monodromy polynomial ->
 * roots -> reduction -> tree -> bound.  Never throws; failures are recorded
 * in the report with exit_code 1 (input rejected) or 2 (internal invariant
 * or precision trouble). */
Report run(const JobSpec& job);

std::string report_to_json(const Report& rep);
std::string tree_to_dot(const ReductionTree& tree);

}  // namespace stablered

#endif
