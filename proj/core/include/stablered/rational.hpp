#ifndef STABLERED_RATIONAL_HPP
#define STABLERED_RATIONAL_HPP

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <string>

namespace stablered {

using Int = mpz_class;
using Rat = mpq_class;

/* p-adic valuation of a nonzero integer / rational, v(p) = 1. */
long padic_valuation(const Int& z, const Int& p);
long padic_valuation(const Rat& q, const Int& p);

/* z mod p^n as the representative in [0, p^n). */
Int mod_pow(const Int& z, const Int& p, unsigned long n);

/* Rationals serialize as "a" or "a/b" in base 10. */
Rat parse_rational(const std::string& text);
std::string format_rational(const Rat& q);

/* Extended valuation value: a rational or +infinity (valuation of zero).
 * Arithmetic follows the usual conventions (inf + x = inf, min(inf,x) = x).
 */
class Valuation {
 public:
  Valuation() : finite_(false) {}  // +infinity
  Valuation(const Rat& v) : finite_(true), v_(v) {}
  Valuation(long v) : finite_(true), v_(v) {}

  static Valuation infinity() { return Valuation(); }

  bool is_finite() const { return finite_; }
  const Rat& value() const;  // requires finite

  Valuation operator+(const Valuation& o) const;
  Valuation operator-() const;
  Valuation operator*(const Rat& s) const;
  friend Valuation min(const Valuation& a, const Valuation& b);

  bool operator==(const Valuation& o) const;
  bool operator<(const Valuation& o) const;
  bool operator<=(const Valuation& o) const { return *this == o || *this < o; }
  bool operator>(const Valuation& o) const { return !(*this <= o); }
  bool operator>=(const Valuation& o) const { return !(*this < o); }

  std::string str() const;

 private:
  bool finite_;
  Rat v_;
};

/* floor/ceil of a rational as an integer. */
Int rat_floor(const Rat& q);
Int rat_ceil(const Rat& q);

/* denominator of q in lowest terms (gmp keeps mpq_class canonical). */
Int rat_den(const Rat& q);

}  // namespace stablered

#endif
