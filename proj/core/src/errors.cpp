#include "stablered/errors.hpp"

namespace stablered {

const char* errc_name(errc c) {
  switch (c) {
    case errc::not_prime: return "NotPrime";
    case errc::reducible_modulus: return "ReducibleModulus";
    case errc::non_integral: return "NonIntegral";
    case errc::incompatible_extension: return "IncompatibleExtension";
    case errc::degree_divisible_by_p: return "DegreeDivisibleByP";
    case errc::multiplicity_divisible_by_p: return "MultiplicityDivisibleByP";
    case errc::not_equidistant: return "NotEquidistant";
    case errc::precondition_violation: return "PreconditionViolation";
    case errc::non_polynomial_tail: return "NonPolynomialTail";
    case errc::degree_mismatch: return "DegreeMismatch";
    case errc::non_integral_monodromy_polynomial: return "NonIntegralMonodromyPolynomial";
    case errc::precision_cap_exceeded: return "PrecisionCapExceeded";
    case errc::escalation_limit: return "EscalationLimit";
    case errc::empty_tail: return "EmptyTail";
    case errc::residue_field_too_small: return "ResidueFieldTooSmall";
    case errc::non_unit_s0_at_center: return "NonUnitS0AtCenter";
    case errc::inconsistent_radii_in_class: return "InconsistentRadiiInClass";
    case errc::not_genus2_case: return "NotGenus2Case";
    case errc::unrecognized_shape: return "UnrecognizedShape";
    case errc::parse_error: return "ParseError";
    case errc::internal_invariant_violation: return "InternalInvariantViolation";
  }
  return "UnknownError";
}

bool errc_is_input_error(errc c) {
  switch (c) {
    case errc::not_prime:
    case errc::reducible_modulus:
    case errc::incompatible_extension:
    case errc::degree_divisible_by_p:
    case errc::multiplicity_divisible_by_p:
    case errc::not_equidistant:
    case errc::precondition_violation:
    case errc::parse_error:
      return true;
    default:
      return false;
  }
}

}  // namespace stablered
