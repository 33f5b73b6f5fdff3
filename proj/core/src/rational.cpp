#include "stablered/rational.hpp"

#include "stablered/errors.hpp"

namespace stablered {

long padic_valuation(const Int& z, const Int& p) {
  if (z == 0) fail(errc::internal_invariant_violation, "padic_valuation of zero integer");
  mpz_class tmp;
  return static_cast<long>(mpz_remove(tmp.get_mpz_t(), z.get_mpz_t(), p.get_mpz_t()));
}

long padic_valuation(const Rat& q, const Int& p) {
  if (q == 0) fail(errc::internal_invariant_violation, "padic_valuation of zero rational");
  long vn = q.get_num() == 0 ? 0 : padic_valuation(Int(q.get_num()), p);
  long vd = padic_valuation(Int(q.get_den()), p);
  return vn - vd;
}

Int mod_pow(const Int& z, const Int& p, unsigned long n) {
  Int m;
  mpz_pow_ui(m.get_mpz_t(), p.get_mpz_t(), n);
  Int r = z % m;
  if (r < 0) r += m;
  return r;
}

Rat parse_rational(const std::string& text) {
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
    fail(errc::parse_error, "bad rational '" + text + "'");
  if (q.get_den() == 0) fail(errc::parse_error, "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

const Rat& Valuation::value() const {
  if (!finite_) fail(errc::internal_invariant_violation, "value() of infinite valuation");
  return v_;
}

Valuation Valuation::operator+(const Valuation& o) const {
  if (!finite_ || !o.finite_) return infinity();
  return Valuation(v_ + o.v_);
}

Valuation Valuation::operator-() const {
  if (!finite_) fail(errc::internal_invariant_violation, "negating infinite valuation");
  return Valuation(Rat(-v_));
}

Valuation Valuation::operator*(const Rat& s) const {
  if (!finite_) return infinity();
  return Valuation(Rat(v_ * s));
}

Valuation min(const Valuation& a, const Valuation& b) { return a <= b ? a : b; }

bool Valuation::operator==(const Valuation& o) const {
  if (finite_ != o.finite_) return false;
  return !finite_ || v_ == o.v_;
}

bool Valuation::operator<(const Valuation& o) const {
  if (!finite_) return false;
  if (!o.finite_) return true;
  return v_ < o.v_;
}

std::string Valuation::str() const { return finite_ ? format_rational(v_) : "inf"; }

Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

Int rat_den(const Rat& q) { return q.get_den(); }

}  // namespace stablered
