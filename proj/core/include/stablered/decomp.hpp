#ifndef STABLERED_DECOMP_HPP
#define STABLERED_DECOMP_HPP

#include <vector>

#include "stablered/poly.hpp"

namespace stablered {

/* v_p of the binomial coefficient (1/p choose t): -(t + [t/p] + [t/p^2] + ...) */
Rat binom_val(const Int& p, long t);
/* the coefficient itself, exactly */
Rat binom_exact(const Int& p, long t);

/* Combinatorics of the index set {1..n} under a ~ p^e a: M0 = {r+1..n} is a
 * minimal complete system of representatives and contains exactly one pure
 * power p^alpha. */
struct RepData {
  long n = 0;
  Int p;
  long r = 0;
  long alpha = 0;
  Int p_alpha;

  bool in_tail(long i) const { return i > r && i <= n; }
};

RepData min_reps(long n, const Int& p);

/* The special decomposition
 *   f(X+Y) = s0(Y) ( H(X,Y)^p - sum_{i=r+1}^n A_i(Y) X^i ),
 *   H = 1 + a_1(Y) X + ... + a_r(Y) X^r,
 * together with the normalized tail A_i = c_i N_i / s0^i.
 */
struct SpecialDecomposition {
  RepData rep;
  Poly s0;                    // f(Y)
  std::vector<Poly> s;        // s_0..s_n
  std::vector<RatFunc> head;  // a_1..a_r (empty when r = 0)
  std::vector<RatFunc> tail;  // A_{r+1}..A_n
  std::vector<FieldElement> tail_c;  // c_{r+1}..c_n (filled by normalize_tail)
  std::vector<Poly> tail_N;          // N_{r+1}..N_n, monic

  const RatFunc& A(long i) const;        // r+1 <= i <= n
  const FieldElement& c(long i) const;   // after normalize_tail
  const Poly& N(long i) const;           // after normalize_tail
  bool tail_normalized() const { return !tail_N.empty(); }
};

/* Power-series route (the production path): H from the binomial expansion of
 * (f(X+Y)/s0)^{1/p} truncated mod X^{r+1}. */
SpecialDecomposition special_decomposition(const Poly& f, const RepData& rep);

/* Independent recursive route (coefficient comparison, Lemma-style linear
 * solving); kept as a cross-check oracle. */
SpecialDecomposition special_decomposition_recursive(const Poly& f, const RepData& rep);

/* Fill c_i / N_i; every A_i s0^i must be a polynomial (NonPolynomialTail
 * signals an arithmetic bug upstream, not bad input). */
void normalize_tail(SpecialDecomposition& dec);

/* Exact identity check: f(X+Y) == s0 (H^p - sum A_i X^i), coefficientwise in
 * K(Y).  Used by tests and the property suite. */
bool decomposition_identity_holds(const Poly& f, const SpecialDecomposition& dec);

}  // namespace stablered

#endif
