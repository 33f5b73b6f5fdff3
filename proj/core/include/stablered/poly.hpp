#ifndef STABLERED_POLY_HPP
#define STABLERED_POLY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stablered/numfield.hpp"

namespace stablered {

enum class Var : uint8_t { X, Y, X0, T };

const char* var_name(Var v);

/* Dense univariate polynomials over a FieldDescriptor.  Coefficients are
 * ascending, the leading coefficient is nonzero (zero polynomial = empty).
 * The variable tag is metadata; binary operations refuse to mix tags unless
 * one operand is constant.
 */
class Poly {
 public:
  Poly() = default;
  Poly(FieldPtr F, Var var) : F_(std::move(F)), var_(var) {}
  static Poly zero(const FieldPtr& F, Var var = Var::Y);
  static Poly constant(const FieldPtr& F, const FieldElement& c, Var var = Var::Y);
  static Poly from_coeffs(FieldPtr F, std::vector<FieldElement> coeffs, Var var = Var::Y);
  static Poly from_rationals(const FieldPtr& F, const std::vector<Rat>& coeffs, Var var = Var::Y);
  static Poly monomial(const FieldPtr& F, const FieldElement& c, long deg, Var var = Var::Y);

  const FieldPtr& field() const { return F_; }
  Var var() const { return var_; }
  Poly with_var(Var v) const;

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const FieldElement& lc() const;
  FieldElement coeff(long i) const;  // zero beyond the degree
  const std::vector<FieldElement>& coeffs() const { return c_; }
  long ord_zero() const;  // multiplicity of the root 0 (degree+1 convention: 0 for nonzero constant)

  bool operator==(const Poly& o) const;
  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const FieldElement& s) const;
  Poly operator*(const Rat& s) const;

  Poly derivative() const;
  Poly monic() const;
  Poly pow(long n) const;
  FieldElement eval(const FieldElement& x) const;
  /* all Taylor coefficients of this at a: b_t with P(a+Z) = sum b_t Z^t */
  std::vector<FieldElement> taylor_at(const FieldElement& a) const;
  /* P(s * Y) */
  Poly scale_var(const FieldElement& s) const;
  /* P(Y + a) */
  Poly shift_var(const FieldElement& a) const;
  /* P / Y^t (requires ord_zero >= t) */
  Poly shift_down(long t) const;

  /* minimum coefficient valuation (infinity for the zero polynomial) */
  Valuation content_valuation() const;
  bool is_integral() const;

  std::string str() const;

 private:
  FieldPtr F_;
  std::vector<FieldElement> c_;
  Var var_ = Var::Y;

  void trim();
  friend void poly_divrem(const Poly& a, const Poly& b, Poly& q, Poly& r);
};

void poly_divrem(const Poly& a, const Poly& b, Poly& q, Poly& r);
/* exact division; raises InternalInvariantViolation when the remainder is nonzero */
Poly poly_divexact(const Poly& a, const Poly& b);

/* monic gcd via the monic remainder sequence */
Poly poly_gcd(const Poly& a, const Poly& b);

/* Res(a,b) = lc(a)^{deg b} prod_{a(y)=0} b(y) */
FieldElement poly_resultant(const Poly& a, const Poly& b);

/* monic product of the distinct irreducible factors */
Poly squarefree_part(const Poly& a);

/* Yun decomposition (char 0): list of (monic factor, multiplicity) with
 * pairwise-coprime squarefree factors */
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& a);

/* Reduced rational functions: gcd(num, den) = 1, den monic. */
class RatFunc {
 public:
  RatFunc() = default;
  RatFunc(Poly num, Poly den);  // reduces
  static RatFunc from_poly(const Poly& p);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_poly() const { return den_.degree() == 0; }
  /* numerator scaled by the constant denominator; requires is_poly() */
  Poly as_poly() const;

  RatFunc operator+(const RatFunc& o) const;
  RatFunc operator-(const RatFunc& o) const;
  RatFunc operator*(const RatFunc& o) const;
  RatFunc operator*(const Rat& s) const;
  RatFunc operator-() const;
  bool operator==(const RatFunc& o) const;

  std::string str() const;

 private:
  Poly num_, den_;
};

/* Lower Newton polygon of a nonzero polynomial: convex hull vertices of
 * (i, v(a_i)) from the first nonzero coefficient up to the degree, slopes
 * strictly increasing; the zero root is carried separately by ord_zero.
 * Roots with valuation -slope occur with multiplicity = horizontal length.
 */
struct PolygonSegment {
  Rat slope;
  long length;
};

struct NewtonPolygon {
  std::vector<std::pair<long, Rat>> vertices;
  std::vector<PolygonSegment> segments;
  long ord_zero = 0;

  /* multiset of root valuations: (valuation, count); the ord_zero roots are
   * reported with infinite valuation */
  std::vector<std::pair<Valuation, long>> root_valuations() const;
};

NewtonPolygon newton_polygon(const Poly& a);

/* f(X + Y) = sum s_i(Y) X^i; input tagged X0 (or anything), output in Y. */
std::vector<Poly> taylor_shift(const Poly& f);

}  // namespace stablered

#endif
