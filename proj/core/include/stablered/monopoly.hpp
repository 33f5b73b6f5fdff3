#ifndef STABLERED_MONOPOLY_HPP
#define STABLERED_MONOPOLY_HPP

#include "stablered/decomp.hpp"
#include "stablered/poly.hpp"

namespace stablered {

/* S0, S1 and the monodromy polynomial L(Y) of f:
 *   f'/f = S1/S0 reduced, deg S0 = m, deg S1 = m-1,
 *   L = -A_{p^alpha} S0^{p^alpha} / (1/p choose p^{alpha-1})^p,
 * a polynomial with integral coefficients of degree p^alpha (m-1) congruent
 * to S1^{p^alpha} mod p.
 */
struct MonodromyData {
  Poly S0;  // monic, degree m
  Poly S1;  // degree m-1
  long m = 0;
  long alpha = 0;
  Poly L;
  Rat c_norm;  // (1/p choose p^{alpha-1})^p, or 1 when alpha = 0
};

/* S0, S1, m from f (g = gcd(f, f') divided out). */
MonodromyData logderiv_parts(const Poly& f);

/* Extract L from the normalized decomposition; DegreeMismatch /
 * NonIntegralMonodromyPolynomial are hard diagnostics, never silently
 * accepted. */
void monodromy_polynomial(const SpecialDecomposition& dec, MonodromyData& md);

/* all coefficients of L - S1^{p^alpha} have valuation >= 1 */
bool check_congruence(const MonodromyData& md);

}  // namespace stablered

#endif
