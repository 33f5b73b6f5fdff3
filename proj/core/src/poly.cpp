#include "stablered/poly.hpp"

#include <algorithm>
#include <sstream>

#include "stablered/errors.hpp"

namespace stablered {

const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "X";
    case Var::Y: return "Y";
    case Var::X0: return "X0";
    case Var::T: return "T";
  }
  return "?";
}

namespace {
void check_vars(const Poly& a, const Poly& b) {
  if (a.degree() <= 0 || b.degree() <= 0) return;
  require(a.var() == b.var(), errc::precondition_violation,
          std::string("variable mismatch: ") + var_name(a.var()) + " vs " + var_name(b.var()));
}
}  // namespace

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Poly Poly::zero(const FieldPtr& F, Var var) { return Poly(F, var); }

Poly Poly::constant(const FieldPtr& F, const FieldElement& c, Var var) {
  Poly p(F, var);
  p.c_.push_back(c);
  p.trim();
  return p;
}

Poly Poly::from_coeffs(FieldPtr F, std::vector<FieldElement> coeffs, Var var) {
  Poly p(std::move(F), var);
  p.c_ = std::move(coeffs);
  p.trim();
  return p;
}

Poly Poly::from_rationals(const FieldPtr& F, const std::vector<Rat>& coeffs, Var var) {
  std::vector<FieldElement> c;
  c.reserve(coeffs.size());
  for (const auto& q : coeffs) c.emplace_back(F, q);
  return from_coeffs(F, std::move(c), var);
}

Poly Poly::monomial(const FieldPtr& F, const FieldElement& c, long deg, Var var) {
  Poly p(F, var);
  if (!c.is_zero()) {
    p.c_.assign(static_cast<size_t>(deg) + 1, FieldElement::zero(F));
    p.c_.back() = c;
  }
  return p;
}

Poly Poly::with_var(Var v) const {
  Poly p = *this;
  p.var_ = v;
  return p;
}

const FieldElement& Poly::lc() const {
  require(!c_.empty(), errc::precondition_violation, "leading coefficient of zero polynomial");
  return c_.back();
}

FieldElement Poly::coeff(long i) const {
  if (i < 0 || i >= static_cast<long>(c_.size())) return FieldElement::zero(F_);
  return c_[static_cast<size_t>(i)];
}

long Poly::ord_zero() const {
  for (size_t i = 0; i < c_.size(); ++i)
    if (!c_[i].is_zero()) return static_cast<long>(i);
  return 0;
}

bool Poly::operator==(const Poly& o) const { return c_ == o.c_; }

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& x : p.c_) x = -x;
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  check_vars(*this, o);
  Poly p(F_, degree() > 0 ? var_ : o.var_);
  p.c_.assign(std::max(c_.size(), o.c_.size()), FieldElement::zero(F_));
  for (size_t i = 0; i < c_.size(); ++i) p.c_[i] = c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) p.c_[i] = p.c_[i] + o.c_[i];
  p.trim();
  return p;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  check_vars(*this, o);
  Poly p(F_, degree() > 0 ? var_ : o.var_);
  if (is_zero() || o.is_zero()) return p;
  p.c_.assign(c_.size() + o.c_.size() - 1, FieldElement::zero(F_));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) {
      if (o.c_[j].is_zero()) continue;
      p.c_[i + j] = p.c_[i + j] + c_[i] * o.c_[j];
    }
  }
  p.trim();
  return p;
}

Poly Poly::operator*(const FieldElement& s) const {
  Poly p = *this;
  for (auto& x : p.c_) x = x * s;
  p.trim();
  return p;
}

Poly Poly::operator*(const Rat& s) const {
  Poly p = *this;
  for (auto& x : p.c_) x = x * s;
  p.trim();
  return p;
}

Poly Poly::derivative() const {
  Poly p(F_, var_);
  for (long i = 1; i <= degree(); ++i) p.c_.push_back(c_[static_cast<size_t>(i)] * Rat(i));
  p.trim();
  return p;
}

Poly Poly::monic() const {
  require(!is_zero(), errc::precondition_violation, "monic of zero polynomial");
  if (lc() == FieldElement::one(F_)) return *this;
  return *this * lc().inverse();
}

Poly Poly::pow(long n) const {
  require(n >= 0, errc::precondition_violation, "negative polynomial power");
  Poly result = constant(F_, FieldElement::one(F_), var_);
  Poly base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

FieldElement Poly::eval(const FieldElement& x) const {
  FieldElement r = FieldElement::zero(F_);
  for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

std::vector<FieldElement> Poly::taylor_at(const FieldElement& a) const {
  /* repeated in-place synthetic division by (Y - a); w[t] ends up as the
   * t-th Taylor coefficient */
  std::vector<FieldElement> w = c_;
  long n = degree();
  for (long t = 0; t <= n; ++t)
    for (long i = n - 1; i >= t; --i)
      w[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] + a * w[static_cast<size_t>(i) + 1];
  return w;
}

Poly Poly::scale_var(const FieldElement& s) const {
  Poly p = *this;
  FieldElement pw = FieldElement::one(F_);
  for (size_t i = 0; i < p.c_.size(); ++i) {
    if (i) pw = pw * s;
    p.c_[i] = p.c_[i] * pw;
  }
  p.trim();
  return p;
}

Poly Poly::shift_var(const FieldElement& a) const {
  return from_coeffs(F_, taylor_at(a), var_);
}

Poly Poly::shift_down(long t) const {
  require(ord_zero() >= t, errc::precondition_violation, "shift_down below ord_zero");
  Poly p(F_, var_);
  if (static_cast<long>(c_.size()) <= t) return p;
  p.c_.assign(c_.begin() + t, c_.end());
  return p;
}

Valuation Poly::content_valuation() const {
  Valuation best = Valuation::infinity();
  for (const auto& x : c_) best = min(best, x.valuation());
  return best;
}

bool Poly::is_integral() const {
  Valuation v = content_valuation();
  return !v.is_finite() || v.value() >= 0;
}

std::string Poly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (long i = 0; i <= degree(); ++i) {
    const auto& x = c_[static_cast<size_t>(i)];
    if (x.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << x.str() << ")";
    if (i == 1) os << "*" << var_name(var_);
    if (i > 1) os << "*" << var_name(var_) << "^" << i;
  }
  return os.str();
}

void poly_divrem(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  require(!b.is_zero(), errc::precondition_violation, "polynomial division by zero");
  check_vars(a, b);
  const auto& F = a.field();
  q = Poly::zero(F, a.var());
  r = a;
  if (a.degree() < b.degree()) return;
  FieldElement invlc = b.lc().inverse();
  q.c_.assign(static_cast<size_t>(a.degree() - b.degree()) + 1, FieldElement::zero(F));
  while (!r.is_zero() && r.degree() >= b.degree()) {
    long shift = r.degree() - b.degree();
    FieldElement coef = r.lc() * invlc;
    q.c_[static_cast<size_t>(shift)] = coef;
    for (long i = 0; i <= b.degree(); ++i)
      r.c_[static_cast<size_t>(i + shift)] =
          r.c_[static_cast<size_t>(i + shift)] - coef * b.c_[static_cast<size_t>(i)];
    r.trim();
  }
  q.trim();
}

Poly poly_divexact(const Poly& a, const Poly& b) {
  Poly q, r;
  poly_divrem(a, b, q, r);
  require(r.is_zero(), errc::internal_invariant_violation, "inexact polynomial division");
  return q;
}

Poly poly_gcd(const Poly& a, const Poly& b) {
  require(!(a.is_zero() && b.is_zero()), errc::precondition_violation, "gcd(0, 0)");
  Poly x = a, y = b;
  while (!y.is_zero()) {
    /* monic normalization each step keeps rational coordinates from blowing up */
    y = y.monic();
    Poly q, r;
    poly_divrem(x, y, q, r);
    x = y;
    y = r;
  }
  return x.monic();
}

FieldElement poly_resultant(const Poly& a, const Poly& b) {
  require(!a.is_zero() && !b.is_zero(), errc::precondition_violation, "resultant with zero input");
  const auto& F = a.field();
  Poly A = a, B = b;
  FieldElement acc = FieldElement::one(F);
  int sign = 1;
  /* monic remainder sequence; extracted leading coefficients feed acc.
   * Res(A, c*B1) = c^{deg A} Res(A, B1). */
  while (true) {
    int da = A.degree(), db = B.degree();
    if (db == 0) {
      FieldElement r = acc * B.coeff(0).pow(da);
      return sign < 0 ? -r : r;
    }
    if (da < db) {
      std::swap(A, B);
      if ((da % 2) && (db % 2)) sign = -sign;
      continue;
    }
    if (!(B.lc() == FieldElement::one(F))) {
      acc = acc * B.lc().pow(da);
      B = B.monic();
    }
    Poly q, R;
    poly_divrem(A, B, q, R);
    if (R.is_zero()) return FieldElement::zero(F);
    if ((da % 2) && (db % 2)) sign = -sign;
    A = std::move(B);
    B = std::move(R);
  }
}

Poly squarefree_part(const Poly& a) {
  require(!a.is_zero(), errc::precondition_violation, "squarefree part of zero");
  if (a.degree() == 0) return a.monic();
  Poly g = poly_gcd(a, a.derivative());
  return poly_divexact(a, g).monic();
}

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& a) {
  /* Yun's algorithm; valid in characteristic zero */
  std::vector<std::pair<Poly, int>> out;
  require(!a.is_zero(), errc::precondition_violation, "squarefree decomposition of zero");
  if (a.degree() == 0) return out;
  Poly f = a.monic();
  Poly fp = f.derivative();
  Poly g = poly_gcd(f, fp);
  Poly w = poly_divexact(f, g);
  Poly y = poly_divexact(fp, g);
  Poly z = y - w.derivative();
  int i = 1;
  while (w.degree() > 0) {
    Poly h = poly_gcd(w, z);
    if (h.degree() > 0) out.emplace_back(h, i);
    w = poly_divexact(w, h);
    y = poly_divexact(z, h);
    z = y - w.derivative();
    ++i;
  }
  return out;
}

/* ---------------- RatFunc ---------------- */

RatFunc::RatFunc(Poly num, Poly den) {
  require(!den.is_zero(), errc::precondition_violation, "rational function with zero denominator");
  if (num.is_zero()) {
    num_ = num;
    den_ = Poly::constant(den.field(), FieldElement::one(den.field()), den.var());
    return;
  }
  Poly g = poly_gcd(num, den);
  if (g.degree() > 0) {
    num = poly_divexact(num, g);
    den = poly_divexact(den, g);
  }
  FieldElement scale = den.lc().inverse();
  num_ = num * scale;
  den_ = den * scale;
}

RatFunc RatFunc::from_poly(const Poly& p) {
  return RatFunc(p, Poly::constant(p.field(), FieldElement::one(p.field()), p.var()));
}

Poly RatFunc::as_poly() const {
  require(is_poly(), errc::precondition_violation, "rational function is not a polynomial");
  return num_ * den_.coeff(0).inverse();
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
  return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
  return RatFunc(num_ * o.num_, den_ * o.den_);
}

RatFunc RatFunc::operator*(const Rat& s) const { return RatFunc(num_ * s, den_); }

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

bool RatFunc::operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }

std::string RatFunc::str() const {
  if (den_.degree() == 0 && den_.coeff(0) == FieldElement::one(den_.field())) return num_.str();
  return "(" + num_.str() + ") / (" + den_.str() + ")";
}

/* ---------------- Newton polygon ---------------- */

NewtonPolygon newton_polygon(const Poly& a) {
  require(!a.is_zero(), errc::precondition_violation, "Newton polygon of zero polynomial");
  NewtonPolygon np;
  np.ord_zero = a.ord_zero();
  std::vector<std::pair<long, Rat>> pts;
  for (long i = np.ord_zero; i <= a.degree(); ++i) {
    Valuation v = a.coeff(i).valuation();
    if (v.is_finite()) pts.emplace_back(i, v.value());
  }
  /* lower convex hull, left to right */
  std::vector<std::pair<long, Rat>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a1 = hull[hull.size() - 2];
      const auto& a2 = hull[hull.size() - 1];
      /* drop a2 if it lies on or above segment a1..pt */
      Rat lhs = (a2.second - a1.second) * Rat(pt.first - a1.first);
      Rat rhs = (pt.second - a1.second) * Rat(a2.first - a1.first);
      if (lhs >= rhs)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  np.vertices = hull;
  for (size_t t = 1; t < hull.size(); ++t) {
    Rat slope = (hull[t].second - hull[t - 1].second) / Rat(hull[t].first - hull[t - 1].first);
    np.segments.push_back(PolygonSegment{slope, hull[t].first - hull[t - 1].first});
  }
  return np;
}

std::vector<std::pair<Valuation, long>> NewtonPolygon::root_valuations() const {
  std::vector<std::pair<Valuation, long>> out;
  if (ord_zero > 0) out.emplace_back(Valuation::infinity(), ord_zero);
  for (const auto& s : segments) out.emplace_back(Valuation(Rat(-s.slope)), s.length);
  return out;
}

/* ---------------- Taylor shift ---------------- */

std::vector<Poly> taylor_shift(const Poly& f) {
  require(!f.is_zero(), errc::precondition_violation, "taylor_shift of zero polynomial");
  const auto& F = f.field();
  long n = f.degree();
  std::vector<Poly> s;
  s.reserve(static_cast<size_t>(n) + 1);
  /* s_i(Y) = sum_{j >= i} C(j, i) f_j Y^{j-i} */
  for (long i = 0; i <= n; ++i) {
    std::vector<FieldElement> coeffs;
    coeffs.reserve(static_cast<size_t>(n - i) + 1);
    for (long j = i; j <= n; ++j) {
      Int bin;
      mpz_bin_uiui(bin.get_mpz_t(), static_cast<unsigned long>(j), static_cast<unsigned long>(i));
      coeffs.push_back(f.coeff(j) * Rat(bin));
    }
    s.push_back(Poly::from_coeffs(F, std::move(coeffs), Var::Y));
  }
  return s;
}

}  // namespace stablered
