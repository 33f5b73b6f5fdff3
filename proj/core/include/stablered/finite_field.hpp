#ifndef STABLERED_FINITE_FIELD_HPP
#define STABLERED_FINITE_FIELD_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stablered/rational.hpp"

namespace stablered {

/* F_{p^k} represented as F_p[u]/(modulus), modulus monic irreducible of
 * degree k.  Elements are coefficient vectors of length k with entries in
 * [0, p).  Primes here are small (the working primes of the pipeline), so
 * plain int64 arithmetic with one reduction per operation is enough.
 */
class FiniteField;
using FiniteFieldPtr = std::shared_ptr<const FiniteField>;

struct FFElem {
  std::vector<int64_t> c;  // length k, reduced mod p

  bool operator==(const FFElem& o) const { return c == o.c; }
  /* lexicographic on coefficient tuples; fixes enumeration order */
  bool operator<(const FFElem& o) const { return c < o.c; }
};

class FiniteField : public std::enable_shared_from_this<FiniteField> {
 public:
  /* modulus given in ascending degree, must be monic; irreducibility is
   * checked unless `trusted` is set. */
  static FiniteFieldPtr make(int64_t p, std::vector<int64_t> modulus, bool trusted = false);

  int64_t p() const { return p_; }
  int k() const { return k_; }
  Int order() const;  // p^k
  const std::vector<int64_t>& modulus() const { return modulus_; }

  FFElem zero() const;
  FFElem one() const;
  FFElem from_int(int64_t v) const;
  FFElem gen() const;  // the class of u
  FFElem from_coeffs(const std::vector<int64_t>& c) const;

  bool is_zero(const FFElem& a) const;
  FFElem add(const FFElem& a, const FFElem& b) const;
  FFElem sub(const FFElem& a, const FFElem& b) const;
  FFElem neg(const FFElem& a) const;
  FFElem mul(const FFElem& a, const FFElem& b) const;
  FFElem inv(const FFElem& a) const;
  FFElem pow(const FFElem& a, const Int& n) const;  // n >= 0
  FFElem frobenius(const FFElem& a) const;          // a^p
  /* unique d with d^p = a (Frobenius is bijective: d = a^{p^{k-1}}) */
  FFElem frobenius_inverse(const FFElem& a) const;
  bool is_pth_power(const FFElem&) const { return true; }  // always, in F_{p^k}

  /* degree of a over F_p = size of its Frobenius orbit */
  int degree_over_prime_field(const FFElem& a) const;

  std::string str(const FFElem& a) const;

 private:
  int64_t p_;
  int k_;
  std::vector<int64_t> modulus_;

  std::vector<int64_t> mul_raw(const std::vector<int64_t>& a, const std::vector<int64_t>& b) const;
};

/* Dense polynomials over F_{p^k}, ascending coefficients, no trailing zeros. */
struct FFPoly {
  FiniteFieldPtr F;
  std::vector<FFElem> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const FFElem& lc() const { return c.back(); }
};

FFPoly ffpoly_from(const FiniteFieldPtr& F, std::vector<FFElem> coeffs);
FFPoly ffpoly_from_ints(const FiniteFieldPtr& F, const std::vector<int64_t>& coeffs);
FFPoly ffpoly_zero(const FiniteFieldPtr& F);
FFPoly ffpoly_x(const FiniteFieldPtr& F);
FFPoly ffpoly_const(const FiniteFieldPtr& F, const FFElem& a);

bool ffpoly_eq(const FFPoly& a, const FFPoly& b);
FFPoly ffpoly_add(const FFPoly& a, const FFPoly& b);
FFPoly ffpoly_sub(const FFPoly& a, const FFPoly& b);
FFPoly ffpoly_mul(const FFPoly& a, const FFPoly& b);
FFPoly ffpoly_scale(const FFPoly& a, const FFElem& s);
FFPoly ffpoly_monic(const FFPoly& a);
void ffpoly_divrem(const FFPoly& a, const FFPoly& b, FFPoly& q, FFPoly& r);
FFPoly ffpoly_gcd(const FFPoly& a, const FFPoly& b);
FFPoly ffpoly_derivative(const FFPoly& a);
FFElem ffpoly_eval(const FFPoly& a, const FFElem& x);
FFPoly ffpoly_powmod(const FFPoly& base, const Int& n, const FFPoly& mod);

bool ffpoly_is_irreducible(const FFPoly& f);
bool ffpoly_is_squarefree(const FFPoly& f);

/* Full factorization into monic irreducibles (squarefree split, then
 * distinct-degree, then deterministic-seeded equal-degree splitting).
 * Result sorted by (degree, coefficient tuples) so runs are reproducible.
 */
struct FFFactor {
  FFPoly factor;
  int multiplicity;
};
std::vector<FFFactor> ffpoly_factor(const FFPoly& f);

/* Roots in the coefficient field, sorted canonically. */
std::vector<FFElem> ffpoly_roots(const FFPoly& f);

std::string ffpoly_str(const FFPoly& f, const std::string& var = "T");

}  // namespace stablered

#endif
