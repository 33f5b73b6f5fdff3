#ifndef STABLERED_ERRORS_HPP
#define STABLERED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stablered {

/* Error codes are split into two families: `input_error` covers anything a
 * caller can fix by changing the job (bad prime, non-equidistant branch
 * locus, parse failures), `internal_error` covers violated invariants and
 * exhausted precision/extension budgets.  The CLI maps the first family to
 * exit code 1 and the second to exit code 2.
 */
enum class errc {
  not_prime,
  reducible_modulus,
  non_integral,
  incompatible_extension,
  degree_divisible_by_p,
  multiplicity_divisible_by_p,
  not_equidistant,
  precondition_violation,
  non_polynomial_tail,
  degree_mismatch,
  non_integral_monodromy_polynomial,
  precision_cap_exceeded,
  escalation_limit,
  empty_tail,
  residue_field_too_small,
  non_unit_s0_at_center,
  inconsistent_radii_in_class,
  not_genus2_case,
  unrecognized_shape,
  parse_error,
  internal_invariant_violation,
};

const char* errc_name(errc c);
bool errc_is_input_error(errc c);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace stablered

#endif
