#include "stablered/numfield.hpp"

#include <algorithm>
#include <sstream>

#include "stablered/errors.hpp"

namespace stablered {

/* ---------------- small Q[x] toolbox (local) ---------------- */

namespace {

using QP = std::vector<Rat>;  // ascending, may carry trailing zeros until trimmed

void qp_trim(QP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int qp_deg(const QP& a) { return static_cast<int>(a.size()) - 1; }

QP qp_mul(const QP& a, const QP& b) {
  if (a.empty() || b.empty()) return {};
  QP c(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  qp_trim(c);
  return c;
}

QP qp_sub(const QP& a, const QP& b) {
  QP c(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  qp_trim(c);
  return c;
}

QP qp_add(const QP& a, const QP& b) {
  QP c(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  qp_trim(c);
  return c;
}

QP qp_scale(const QP& a, const Rat& s) {
  QP c(a);
  for (auto& x : c) x *= s;
  qp_trim(c);
  return c;
}

/* remainder of a modulo monic b */
QP qp_rem_monic(QP a, const QP& b) {
  int db = qp_deg(b);
  while (qp_deg(a) >= db) {
    Rat lead = a.back();
    int shift = qp_deg(a) - db;
    if (lead != 0)
      for (int i = 0; i <= db; ++i) a[static_cast<size_t>(i + shift)] -= lead * b[static_cast<size_t>(i)];
    a.pop_back();
    qp_trim(a);
  }
  return a;
}

void qp_divrem(const QP& a, const QP& b, QP& q, QP& r) {
  r = a;
  q.assign(a.size(), Rat(0));
  int db = qp_deg(b);
  Rat inv_lc = 1 / b.back();
  while (qp_deg(r) >= db) {
    int shift = qp_deg(r) - db;
    Rat coef = r.back() * inv_lc;
    q[static_cast<size_t>(shift)] = coef;
    for (int i = 0; i <= db; ++i) r[static_cast<size_t>(i + shift)] -= coef * b[static_cast<size_t>(i)];
    qp_trim(r);
  }
  qp_trim(q);
}

/* inverse of a modulo monic m (coprime) via extended Euclid over Q[x] */
QP qp_inv_mod(const QP& a0, const QP& m) {
  QP r0 = m, r1 = qp_rem_monic(a0, m);
  QP t0 = {}, t1 = {Rat(1)};
  while (!r1.empty()) {
    QP q, r2;
    qp_divrem(r0, r1, q, r2);
    QP t2 = qp_sub(t0, qp_mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (qp_deg(r0) != 0)
    fail(errc::internal_invariant_violation, "non-invertible element in Q[u]/(U)");
  return qp_scale(t0, 1 / r0[0]);
}

Rat qp_eval(const QP& a, const Rat& x) {
  Rat r(0);
  for (size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

/* Res(A, B) with the convention Res(A,B) = lc(A)^{deg B} prod_{A(y)=0} B(y). */
Rat qp_resultant(QP A, QP B) {
  qp_trim(A);
  qp_trim(B);
  if (A.empty() || B.empty())
    fail(errc::internal_invariant_violation, "resultant of zero polynomial");
  Rat acc(1);
  int sign = 1;
  while (true) {
    int da = qp_deg(A), db = qp_deg(B);
    if (db == 0) {
      Rat lcB = B[0];
      Rat r = acc;
      for (int i = 0; i < da; ++i) r *= lcB;
      return sign < 0 ? Rat(-r) : r;
    }
    if (da < db) {
      std::swap(A, B);
      if ((da % 2) && (db % 2)) sign = -sign;
      continue;
    }
    QP q, R;
    qp_divrem(A, B, q, R);
    int dr = R.empty() ? -1 : qp_deg(R);
    if (R.empty()) return Rat(0);
    Rat lcB = B.back();
    for (int i = 0; i < da - dr; ++i) acc *= lcB;
    if ((da % 2) && (db % 2)) sign = -sign;
    A = std::move(B);
    B = std::move(R);
  }
}

}  // namespace

/* ---------------- FieldDescriptor ---------------- */

FieldPtr FieldDescriptor::make(const Int& p, int e, const std::vector<int64_t>& residue_modulus) {
  std::vector<Int> lift;
  lift.reserve(residue_modulus.size());
  Int pz = p;
  for (int64_t c : residue_modulus) {
    Int v(static_cast<long>(c));
    v %= pz;
    if (v < 0) v += pz;
    lift.push_back(v);
  }
  if (!lift.empty()) lift.back() = 1;
  return make_with_lift(p, e, std::move(lift));
}

FieldPtr FieldDescriptor::make_with_lift(const Int& p, int e, std::vector<Int> lift_modulus,
                                         std::optional<Rat> precision_cap) {
  require(p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 40) != 0, errc::not_prime,
          "p = " + p.get_str() + " is not prime");
  require(e >= 1, errc::precondition_violation, "ramification index must be >= 1");
  while (!lift_modulus.empty() && lift_modulus.back() == 0) lift_modulus.pop_back();
  require(lift_modulus.size() >= 2, errc::reducible_modulus, "lift modulus must have degree >= 1");
  require(lift_modulus.back() == 1, errc::reducible_modulus, "lift modulus must be monic");

  auto F = std::shared_ptr<FieldDescriptor>(new FieldDescriptor());
  F->p_ = p;
  F->e_ = e;
  F->k_ = static_cast<int>(lift_modulus.size()) - 1;
  F->lift_modulus_ = std::move(lift_modulus);
  F->precision_cap_ = std::move(precision_cap);
  F->lambda_p_val_ = Rat(p) / Rat(p - 1);

  std::vector<int64_t> mod_p_coeffs;
  mod_p_coeffs.reserve(F->lift_modulus_.size());
  for (const auto& c : F->lift_modulus_) {
    Int r = c % p;
    if (r < 0) r += p;
    mod_p_coeffs.push_back(r.get_si());
  }
  F->residue_field_ = FiniteField::make(p.get_si(), mod_p_coeffs);  // checks irreducibility
  return F;
}

bool FieldDescriptor::same_as(const FieldDescriptor& o) const {
  return p_ == o.p_ && e_ == o.e_ && k_ == o.k_ && lift_modulus_ == o.lift_modulus_;
}

/* ---------------- FieldElement ---------------- */

namespace {
void check_same_field(const FieldElement& a, const FieldElement& b) {
  if (a.field().get() == b.field().get()) return;
  if (a.field() && b.field() && a.field()->same_as(*b.field())) return;
  fail(errc::precondition_violation, "field elements live in different fields");
}
}  // namespace

FieldElement::FieldElement(FieldPtr F, const Rat& r) {
  F_ = std::move(F);
  k_ = F_->k();
  e_ = F_->e();
  c_.assign(static_cast<size_t>(k_) * e_, Rat(0));
  c_[0] = r;
  c_[0].canonicalize();
}

FieldElement FieldElement::zero(const FieldPtr& F) { return FieldElement(F, Rat(0)); }
FieldElement FieldElement::one(const FieldPtr& F) { return FieldElement(F, Rat(1)); }

FieldElement FieldElement::u_gen(const FieldPtr& F) {
  FieldElement x = zero(F);
  if (F->k() == 1) {
    x.c_[0] = Rat(-F->lift_modulus()[0]);
  } else {
    x.c_[1] = 1;
  }
  return x;
}

FieldElement FieldElement::pi_pow(const FieldPtr& F, long t) {
  long e = F->e();
  long q = t >= 0 ? t / e : -((-t + e - 1) / e);
  long r = t - q * e;  // 0 <= r < e
  FieldElement x = zero(F);
  Rat pq(1);
  if (q >= 0) {
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), F->p().get_mpz_t(), static_cast<unsigned long>(q));
    pq = Rat(pw);
  } else {
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), F->p().get_mpz_t(), static_cast<unsigned long>(-q));
    pq = Rat(1) / Rat(pw);
  }
  x.c_[static_cast<size_t>(F->k()) * r] = pq;
  return x;
}

FieldElement FieldElement::from_coords(FieldPtr F, std::vector<Rat> coords) {
  FieldElement x;
  x.F_ = std::move(F);
  x.k_ = x.F_->k();
  x.e_ = x.F_->e();
  require(coords.size() == static_cast<size_t>(x.k_) * x.e_, errc::precondition_violation,
          "coordinate vector has wrong length");
  x.c_ = std::move(coords);
  for (auto& q : x.c_) q.canonicalize();
  return x;
}

FieldElement FieldElement::lift_residue(const FieldPtr& F, const FFElem& a) {
  FieldElement x = zero(F);
  for (int i = 0; i < F->k(); ++i) x.c_[static_cast<size_t>(i)] = Rat(static_cast<long>(a.c[static_cast<size_t>(i)]));
  return x;
}

bool FieldElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rat& r) { return r == 0; });
}

bool FieldElement::operator==(const FieldElement& o) const {
  check_same_field(*this, o);
  return c_ == o.c_;
}

FieldElement FieldElement::operator-() const {
  FieldElement r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same_field(*this, o);
  FieldElement r = *this;
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same_field(*this, o);
  FieldElement r = *this;
  for (size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

FieldElement FieldElement::operator*(const Rat& s) const {
  Rat sc = s;
  sc.canonicalize();
  FieldElement r = *this;
  for (auto& x : r.c_) x *= sc;
  return r;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same_field(*this, o);
  const int k = k_, e = e_;
  const auto& U = F_->lift_modulus();
  Rat pr(F_->p());

  /* bivariate product, then fold pi^e -> p, then reduce u-columns mod U */
  std::vector<Rat> prod(static_cast<size_t>(2 * k - 1) * (2 * e - 1), Rat(0));
  auto at = [&](int i, int j) -> Rat& { return prod[static_cast<size_t>(i + (2 * k - 1) * j)]; };
  for (int j1 = 0; j1 < e; ++j1)
    for (int i1 = 0; i1 < k; ++i1) {
      const Rat& a = c_[static_cast<size_t>(i1 + k * j1)];
      if (a == 0) continue;
      for (int j2 = 0; j2 < e; ++j2)
        for (int i2 = 0; i2 < k; ++i2) {
          const Rat& b = o.c_[static_cast<size_t>(i2 + k * j2)];
          if (b == 0) continue;
          at(i1 + i2, j1 + j2) += a * b;
        }
    }

  FieldElement r = zero(F_);
  for (int j = 0; j < 2 * e - 1; ++j) {
    int jr = j;
    Rat mul(1);
    if (jr >= e) {
      jr -= e;
      mul = pr;
    }
    /* u-column of degree <= 2k-2, reduce mod monic U */
    QP col(static_cast<size_t>(2 * k - 1));
    bool nz = false;
    for (int i = 0; i < 2 * k - 1; ++i) {
      col[static_cast<size_t>(i)] = at(i, j);
      if (col[static_cast<size_t>(i)] != 0) nz = true;
    }
    if (!nz) continue;
    qp_trim(col);
    if (k > 1 && qp_deg(col) >= k) {
      QP U2(U.size());
      for (size_t i = 0; i < U.size(); ++i) U2[i] = Rat(U[i]);
      col = qp_rem_monic(std::move(col), U2);
    } else if (k == 1) {
      /* constant modulus root: u = -U[0]; fold u-powers into the value */
      Rat root(-U[0]);
      Rat folded = qp_eval(col, root);
      col.assign(1, folded);
      qp_trim(col);
    }
    for (int i = 0; i < static_cast<int>(col.size()); ++i)
      r.c_[static_cast<size_t>(i + k * jr)] += mul * col[static_cast<size_t>(i)];
  }
  return r;
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) fail(errc::internal_invariant_violation, "inverse of zero field element");
  const int k = k_, e = e_;
  QP U(F_->lift_modulus().size());
  for (size_t i = 0; i < U.size(); ++i) U[i] = Rat(F_->lift_modulus()[i]);

  /* level-1 field: Q[u]/(U); elements are QP of degree < k */
  auto l1_mul = [&](const QP& a, const QP& b) {
    QP r = qp_mul(a, b);
    if (k > 1) return qp_rem_monic(std::move(r), U);
    /* k == 1: elements are plain rationals */
    return r;
  };
  auto l1_inv = [&](const QP& a) {
    if (k > 1) return qp_inv_mod(a, U);
    return QP{1 / a[0]};
  };

  /* level-2: extended Euclid of x(pi) against pi^e - p over the level-1 field */
  using L2 = std::vector<QP>;  // pi-coefficients
  auto l2_trim = [](L2& v) {
    while (!v.empty() && v.back().empty()) v.pop_back();
  };
  auto l2_mul = [&](const L2& a, const L2& b) {
    L2 r;
    if (a.empty() || b.empty()) return r;
    r.assign(a.size() + b.size() - 1, QP{});
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].empty()) continue;
      for (size_t j = 0; j < b.size(); ++j) {
        if (b[j].empty()) continue;
        r[i + j] = qp_add(r[i + j], l1_mul(a[i], b[j]));
      }
    }
    l2_trim(r);
    return r;
  };
  auto l2_sub = [&](const L2& a, const L2& b) {
    L2 r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = qp_sub(r[i], b[i]);
    l2_trim(r);
    return r;
  };
  auto l2_divrem = [&](const L2& a, const L2& b, L2& q, L2& r) {
    r = a;
    l2_trim(r);
    q.assign(a.size(), QP{});
    QP invlc = l1_inv(b.back());
    int db = static_cast<int>(b.size()) - 1;
    while (static_cast<int>(r.size()) - 1 >= db && !r.empty()) {
      int shift = static_cast<int>(r.size()) - 1 - db;
      QP coef = l1_mul(r.back(), invlc);
      q[static_cast<size_t>(shift)] = coef;
      for (int i = 0; i <= db; ++i) {
        if (b[static_cast<size_t>(i)].empty()) continue;
        r[static_cast<size_t>(i + shift)] =
            qp_sub(r[static_cast<size_t>(i + shift)], l1_mul(coef, b[static_cast<size_t>(i)]));
      }
      r.pop_back();
      l2_trim(r);
    }
    l2_trim(q);
  };

  /* modulus pi^e - p */
  L2 mod(static_cast<size_t>(e) + 1);
  mod[0] = QP{Rat(-F_->p())};
  mod[static_cast<size_t>(e)] = QP{Rat(1)};

  L2 x(static_cast<size_t>(e));
  for (int j = 0; j < e; ++j) {
    QP col(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) col[static_cast<size_t>(i)] = c_[static_cast<size_t>(i + k * j)];
    qp_trim(col);
    x[static_cast<size_t>(j)] = col;
  }
  l2_trim(x);

  L2 r0 = mod, r1 = x;
  L2 t0, t1;
  t1.assign(1, QP{Rat(1)});
  while (!r1.empty()) {
    L2 q, r2;
    l2_divrem(r0, r1, q, r2);
    L2 t2 = l2_sub(t0, l2_mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1)
    fail(errc::internal_invariant_violation, "element not invertible modulo pi^e - p");
  QP scale = l1_inv(r0[0]);
  FieldElement out = zero(F_);
  for (size_t j = 0; j < t0.size(); ++j) {
    QP col = l1_mul(t0[j], scale);
    for (size_t i = 0; i < col.size(); ++i) out.c_[i + static_cast<size_t>(k) * j] = col[i];
  }
  return out;
}

FieldElement FieldElement::pow(long n) const {
  FieldElement base = n < 0 ? inverse() : *this;
  unsigned long m = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  FieldElement result = one(F_);
  while (m > 0) {
    if (m & 1) result = result * base;
    m >>= 1;
    if (m) base = base * base;
  }
  return result;
}

Valuation FieldElement::valuation() const {
  Valuation best = Valuation::infinity();
  for (int j = 0; j < e_; ++j)
    for (int i = 0; i < k_; ++i) {
      const Rat& x = c_[static_cast<size_t>(i + k_ * j)];
      if (x == 0) continue;
      Rat v = Rat(padic_valuation(x, F_->p())) + Rat(j) / Rat(e_);
      Valuation vv(v);
      if (vv < best) best = vv;
    }
  return best;
}

FFElem FieldElement::residue() const {
  Valuation v = valuation();
  if (v.is_finite() && v.value() < 0)
    fail(errc::non_integral, "residue of element with negative valuation " + v.value().get_str());
  const auto& R = F_->residue_field();
  if (!v.is_finite() || v.value() > 0) return R->zero();
  std::vector<int64_t> cc(static_cast<size_t>(k_), 0);
  Int p = F_->p();
  for (int i = 0; i < k_; ++i) {
    const Rat& x = c_[static_cast<size_t>(i)];
    if (x == 0) continue;
    /* x = a/b with p not dividing b (v >= 0 here): residue = a b^{-1} mod p */
    Int num = x.get_num() % p;
    if (num < 0) num += p;
    Int den = x.get_den() % p;
    Int deninv;
    if (mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()) == 0)
      fail(errc::internal_invariant_violation, "denominator not invertible mod p");
    Int r = (num * deninv) % p;
    cc[static_cast<size_t>(i)] = r.get_si();
  }
  return R->from_coeffs(cc);
}

FieldElement FieldElement::truncate(const Rat& N) const {
  FieldElement r = *this;
  const Int& p = F_->p();
  for (int j = 0; j < e_; ++j) {
    Rat thr = N - Rat(j) / Rat(e_);
    for (int i = 0; i < k_; ++i) {
      Rat& x = r.c_[static_cast<size_t>(i + k_ * j)];
      if (x == 0) continue;
      long w = padic_valuation(x, p);
      if (Rat(w) >= thr) {
        x = 0;
        continue;
      }
      long digits = rat_ceil(thr - Rat(w)).get_si();
      /* x = p^w * n'/d' with p coprime to n', d' */
      Int n = x.get_num(), d = x.get_den();
      Int tmp;
      long wn = n == 0 ? 0 : static_cast<long>(mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
      if (n != 0 && wn > 0) n = tmp;
      long wd = static_cast<long>(mpz_remove(tmp.get_mpz_t(), d.get_mpz_t(), p.get_mpz_t()));
      if (wd > 0) d = tmp;
      Int pm;
      mpz_pow_ui(pm.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(digits));
      Int dinv;
      if (mpz_invert(dinv.get_mpz_t(), d.get_mpz_t(), pm.get_mpz_t()) == 0)
        fail(errc::internal_invariant_violation, "truncate: denominator not invertible");
      Int unit = (n * dinv) % pm;
      if (unit < 0) unit += pm;
      Rat nx(unit);
      if (w >= 0) {
        Int pw;
        mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(w));
        nx *= Rat(pw);
      } else {
        Int pw;
        mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(-w));
        nx /= Rat(pw);
      }
      x = nx;
    }
  }
  return r;
}

std::string FieldElement::str() const {
  std::ostringstream os;
  bool first = true;
  for (int j = 0; j < e_; ++j)
    for (int i = 0; i < k_; ++i) {
      const Rat& x = c_[static_cast<size_t>(i + k_ * j)];
      if (x == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << format_rational(x);
      if (i) os << "*u" << (i > 1 ? "^" + std::to_string(i) : "");
      if (j) os << "*pi" << (j > 1 ? "^" + std::to_string(j) : "");
    }
  if (first) os << "0";
  return os.str();
}

int FieldElement::compare(const FieldElement& a, const FieldElement& b) {
  for (size_t i = 0; i < a.c_.size(); ++i) {
    int c = cmp(a.c_[i], b.c_[i]);
    if (c) return c;
  }
  return 0;
}

/* ---------------- embeddings ---------------- */

FieldEmbedding::FieldEmbedding(FieldPtr from, FieldPtr to, long pi_power, FieldElement u_image)
    : from_(std::move(from)), to_(std::move(to)), pi_power_(pi_power), u_image_(std::move(u_image)) {
  u_pows_.push_back(FieldElement::one(to_));
  for (int i = 1; i < from_->k(); ++i) u_pows_.push_back(u_pows_.back() * u_image_);
  u_res_ = u_image_.residue();
}

FieldEmbedding FieldEmbedding::identity(const FieldPtr& F) {
  return FieldEmbedding(F, F, 1, FieldElement::u_gen(F));
}

namespace {
/* multiply an element by pi^t (0 <= t), folding pi^e -> p */
FieldElement mul_pi_shift(const FieldElement& x, long t) {
  const auto& F = x.field();
  if (t == 0) return x;
  return x * FieldElement::pi_pow(F, t);
}
}  // namespace

FieldElement FieldEmbedding::apply(const FieldElement& x) const {
  require(x.field()->same_as(*from_), errc::precondition_violation, "embedding applied to wrong field");
  FieldElement out = FieldElement::zero(to_);
  int kf = from_->k(), ef = from_->e();
  for (int j = 0; j < ef; ++j) {
    FieldElement row = FieldElement::zero(to_);
    bool nz = false;
    for (int i = 0; i < kf; ++i) {
      const Rat& c = x.coord(i, j);
      if (c == 0) continue;
      row = row + u_pows_[static_cast<size_t>(i)] * c;
      nz = true;
    }
    if (!nz) continue;
    out = out + mul_pi_shift(row, pi_power_ * j);
  }
  return out;
}

FFElem FieldEmbedding::apply_residue(const FFElem& a) const {
  const auto& R = to_->residue_field();
  FFElem out = R->zero();
  FFElem pw = R->one();
  for (int i = 0; i < from_->k(); ++i) {
    if (a.c[static_cast<size_t>(i)] != 0)
      out = R->add(out, R->mul(pw, R->from_int(a.c[static_cast<size_t>(i)])));
    if (i + 1 < from_->k()) pw = R->mul(pw, u_res_);
  }
  return out;
}

FieldEmbedding FieldEmbedding::compose(const FieldEmbedding& first, const FieldEmbedding& second) {
  require(first.to()->same_as(*second.from()), errc::precondition_violation,
          "embedding composition mismatch");
  return FieldEmbedding(first.from(), second.to(), first.pi_power() * second.pi_power(),
                        second.apply(first.u_image()));
}

/* ---------------- constructions ---------------- */

FieldPtr make_field(const Int& p, int e, const std::vector<int64_t>& residue_modulus) {
  return FieldDescriptor::make(p, e, residue_modulus);
}

std::pair<FieldPtr, FieldEmbedding> extend_ramification(const FieldPtr& F, int new_e) {
  require(new_e >= F->e() && new_e % F->e() == 0, errc::incompatible_extension,
          "new ramification index must be a multiple of the old one");
  if (new_e == F->e()) return {F, FieldEmbedding::identity(F)};
  FieldPtr G = FieldDescriptor::make_with_lift(F->p(), new_e, F->lift_modulus(), F->precision_cap());
  long t = new_e / F->e();
  FieldEmbedding emb(F, G, t, FieldElement::u_gen(G));
  return {G, emb};
}

std::pair<FieldPtr, FieldEmbedding> adjoin_residue_root(const FieldPtr& F, const FFPoly& phi) {
  require(phi.F.get() == F->residue_field().get() || phi.F->modulus() == F->residue_field()->modulus(),
          errc::precondition_violation, "phi must live over the residue field of F");
  int d = phi.degree();
  require(d >= 1, errc::precondition_violation, "phi must be nonconstant");
  if (d == 1) return {F, FieldEmbedding::identity(F)};
  require(ffpoly_is_irreducible(phi), errc::precondition_violation, "phi must be irreducible");

  const Int& p = F->p();
  int k = F->k();
  int kd = k * d;

  if (k == 1) {
    /* residue field is F_p: the new lift modulus is the canonical lift of
     * phi and the old (rational) generator embeds as a constant */
    std::vector<Int> lift;
    lift.reserve(static_cast<size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) lift.push_back(Int(static_cast<long>(phi.c[static_cast<size_t>(i)].c[0])));
    lift.back() = 1;
    FieldPtr G = FieldDescriptor::make_with_lift(p, F->e(), std::move(lift), F->precision_cap());
    FieldElement uimg(G, Rat(-F->lift_modulus()[0]));
    return {G, FieldEmbedding(F, G, 1, uimg)};
  }

  /* N = F_{p^k}[w]/(phi); find c with theta = w + c*u generating F_{p^{kd}} */
  const auto& R = F->residue_field();
  int64_t c_shift = -1;
  for (int64_t c = 0; c < 64; ++c) {
    /* theta as element of N, compute its Frobenius orbit size */
    FFPoly theta = ffpoly_from(phi.F, {R->mul(R->gen(), R->from_int(c)), R->one()});
    FFPoly fr = theta;
    Int pe(p);
    int orbit = 0;
    while (true) {
      fr = ffpoly_powmod(fr, pe, phi);
      ++orbit;
      if (ffpoly_eq(fr, theta)) break;
      if (orbit > kd) break;
    }
    if (orbit == kd) {
      c_shift = c;
      break;
    }
  }
  require(c_shift >= 0, errc::internal_invariant_violation, "no primitive shift found");

  /* integral lift G(u,w) of phi: coefficients as u-polynomials with entries in [0,p) */
  std::vector<QP> Gw(static_cast<size_t>(d) + 1);
  for (int b = 0; b <= d; ++b) {
    QP col;
    for (int i = 0; i < k; ++i) col.push_back(Rat(static_cast<long>(phi.c[static_cast<size_t>(b)].c[static_cast<size_t>(i)])));
    qp_trim(col);
    Gw[static_cast<size_t>(b)] = col;
  }
  Gw[static_cast<size_t>(d)] = QP{Rat(1)};

  QP U(F->lift_modulus().size());
  for (size_t i = 0; i < U.size(); ++i) U[i] = Rat(F->lift_modulus()[i]);

  /* chi(T) = Res_u(U(u), G(u, T - c u)), computed by interpolation at
   * T = 0..kd; chi is the exact minimal polynomial of theta = w + c u. */
  std::vector<Rat> xs, ys;
  for (int t = 0; t <= kd; ++t) {
    Rat tv(t);
    /* collapse w = tv - c*u: build the u-polynomial */
    QP acc{};            // result
    QP wpow{Rat(1)};     // (tv - c u)^b
    QP wbase{tv, Rat(-c_shift)};
    for (int b = 0; b <= d; ++b) {
      if (!Gw[static_cast<size_t>(b)].empty())
        acc = qp_add(acc, qp_mul(Gw[static_cast<size_t>(b)], wpow));
      if (b < d) wpow = qp_mul(wpow, wbase);
    }
    ys.push_back(acc.empty() ? Rat(0) : qp_resultant(U, acc));
    xs.push_back(tv);
  }
  /* Lagrange interpolation, degree kd */
  QP chi{};
  for (int s = 0; s <= kd; ++s) {
    QP li{Rat(1)};
    Rat denom(1);
    for (int t = 0; t <= kd; ++t) {
      if (t == s) continue;
      li = qp_mul(li, QP{-xs[static_cast<size_t>(t)], Rat(1)});
      denom *= xs[static_cast<size_t>(s)] - xs[static_cast<size_t>(t)];
    }
    chi = qp_add(chi, qp_scale(li, ys[static_cast<size_t>(s)] / denom));
  }
  require(qp_deg(chi) == kd && chi.back() == 1, errc::internal_invariant_violation,
          "tower minimal polynomial has wrong shape");
  std::vector<Int> lift;
  lift.reserve(chi.size());
  for (const auto& q : chi) {
    require(q.get_den() == 1, errc::internal_invariant_violation, "tower minimal polynomial not integral");
    lift.push_back(Int(q.get_num()));
  }
  FieldPtr Gfield = FieldDescriptor::make_with_lift(p, F->e(), std::move(lift), F->precision_cap());

  /* coordinates of u on the power basis of theta inside Q[u,w]/(U, G):
   * basis u^a w^b, multiplication by theta = w + c u, Gaussian elimination */
  const int dim = kd;
  auto idx = [&](int a, int b) { return a + k * b; };
  auto mul_theta = [&](const std::vector<Rat>& v) {
    /* w-shift plus c * u-shift, reduced mod G (monic in w) and U */
    std::vector<QP> cols(static_cast<size_t>(d) + 1);  // w-degree columns as u-polys
    for (int b = 0; b < d; ++b) {
      QP col;
      for (int a = 0; a < k; ++a) col.push_back(v[static_cast<size_t>(idx(a, b))]);
      qp_trim(col);
      cols[static_cast<size_t>(b)] = col;
    }
    std::vector<QP> out(static_cast<size_t>(d) + 1);
    /* w * x */
    for (int b = 0; b < d; ++b) out[static_cast<size_t>(b + 1)] = cols[static_cast<size_t>(b)];
    /* + c u * x */
    QP cu{Rat(0), Rat(c_shift)};
    for (int b = 0; b < d; ++b)
      out[static_cast<size_t>(b)] = qp_add(out[static_cast<size_t>(b)], qp_mul(cols[static_cast<size_t>(b)], cu));
    /* reduce w-degree d via G: w^d = -sum Gw[b] w^b */
    if (!out[static_cast<size_t>(d)].empty()) {
      QP top = out[static_cast<size_t>(d)];
      out[static_cast<size_t>(d)] = {};
      for (int b = 0; b < d; ++b) {
        QP t = qp_mul(top, Gw[static_cast<size_t>(b)]);
        out[static_cast<size_t>(b)] = qp_sub(out[static_cast<size_t>(b)], t);
      }
    }
    /* reduce u-degree via U */
    std::vector<Rat> res(static_cast<size_t>(dim), Rat(0));
    for (int b = 0; b < d; ++b) {
      QP col = out[static_cast<size_t>(b)];
      if (qp_deg(col) >= k) col = qp_rem_monic(std::move(col), U);
      for (int a = 0; a < static_cast<int>(col.size()); ++a) res[static_cast<size_t>(idx(a, b))] = col[static_cast<size_t>(a)];
    }
    return res;
  };

  std::vector<std::vector<Rat>> M(static_cast<size_t>(dim));  // columns: theta^t
  std::vector<Rat> cur(static_cast<size_t>(dim), Rat(0));
  cur[0] = 1;
  for (int t = 0; t < dim; ++t) {
    M[static_cast<size_t>(t)] = cur;
    if (t + 1 < dim) cur = mul_theta(cur);
  }
  /* solve M z = e_u for z (column-major Gaussian elimination) */
  std::vector<std::vector<Rat>> A(static_cast<size_t>(dim), std::vector<Rat>(static_cast<size_t>(dim) + 1, Rat(0)));
  for (int row = 0; row < dim; ++row)
    for (int col = 0; col < dim; ++col) A[static_cast<size_t>(row)][static_cast<size_t>(col)] = M[static_cast<size_t>(col)][static_cast<size_t>(row)];
  A[static_cast<size_t>(idx(1, 0))][static_cast<size_t>(dim)] = 1;  // rhs = u
  for (int col = 0, row = 0; col < dim && row < dim; ++col) {
    int piv = -1;
    for (int rr = row; rr < dim; ++rr)
      if (A[static_cast<size_t>(rr)][static_cast<size_t>(col)] != 0) {
        piv = rr;
        break;
      }
    if (piv < 0) fail(errc::internal_invariant_violation, "singular tower matrix");
    std::swap(A[static_cast<size_t>(piv)], A[static_cast<size_t>(row)]);
    Rat inv = 1 / A[static_cast<size_t>(row)][static_cast<size_t>(col)];
    for (int cc = col; cc <= dim; ++cc) A[static_cast<size_t>(row)][static_cast<size_t>(cc)] *= inv;
    for (int rr = 0; rr < dim; ++rr) {
      if (rr == row) continue;
      Rat fct = A[static_cast<size_t>(rr)][static_cast<size_t>(col)];
      if (fct == 0) continue;
      for (int cc = col; cc <= dim; ++cc)
        A[static_cast<size_t>(rr)][static_cast<size_t>(cc)] -= fct * A[static_cast<size_t>(row)][static_cast<size_t>(cc)];
    }
    ++row;
  }
  std::vector<Rat> z(static_cast<size_t>(dim));
  for (int t = 0; t < dim; ++t) z[static_cast<size_t>(t)] = A[static_cast<size_t>(t)][static_cast<size_t>(dim)];

  /* u_image = sum z_t u'^t in the flattened field */
  FieldElement uimg = FieldElement::zero(Gfield);
  {
    FieldElement upow = FieldElement::one(Gfield);
    FieldElement ugen = FieldElement::u_gen(Gfield);
    for (int t = 0; t < dim; ++t) {
      if (z[static_cast<size_t>(t)] != 0) uimg = uimg + upow * z[static_cast<size_t>(t)];
      if (t + 1 < dim) upow = upow * ugen;
    }
  }

  /* exactness check: U(u_image) must vanish identically */
  {
    FieldElement acc = FieldElement::zero(Gfield);
    for (size_t i = U.size(); i-- > 0;) acc = acc * uimg + FieldElement(Gfield, U[i]);
    require(acc.is_zero(), errc::internal_invariant_violation,
            "tower embedding is not exact: U(u_image) != 0");
  }

  return {Gfield, FieldEmbedding(F, Gfield, 1, uimg)};
}

std::pair<FieldPtr, FieldEmbedding> extend_field(const FieldPtr& F, int new_e,
                                                 const std::vector<int64_t>& new_residue_modulus) {
  require(new_e % F->e() == 0, errc::incompatible_extension,
          "old ramification index must divide the new one");
  int new_k = static_cast<int>(new_residue_modulus.size()) - 1;
  require(new_k >= 1 && new_k % F->k() == 0, errc::incompatible_extension,
          "old residue degree must divide the new one");

  /* same residue field: pure ramification step */
  bool same_mod = new_k == F->k();
  if (same_mod) {
    for (int i = 0; i <= new_k; ++i) {
      Int r = Int(static_cast<long>(new_residue_modulus[static_cast<size_t>(i)])) % F->p();
      if (r < 0) r += F->p();
      Int rl = F->lift_modulus()[static_cast<size_t>(i)] % F->p();
      if (rl < 0) rl += F->p();
      if (r != rl) {
        same_mod = false;
        break;
      }
    }
  }
  if (same_mod) return extend_ramification(F, new_e);

  if (F->k() == 1) {
    FieldPtr G = FieldDescriptor::make(F->p(), new_e, new_residue_modulus);
    FieldElement uimg(G, Rat(-F->lift_modulus()[0]));
    /* sanity: old residue generator must be a root of the old modulus in G
     * (it is a rational constant, nothing to lift) */
    return {G, FieldEmbedding(F, G, new_e / F->e(), uimg)};
  }

  fail(errc::incompatible_extension,
       "no exact embedding into an arbitrary residue modulus for k > 1; "
       "use adjoin_residue_root for internal escalation");
}

}  // namespace stablered
