#include "stablered/finite_field.hpp"

#include <algorithm>
#include <sstream>

#include "stablered/errors.hpp"

namespace stablered {

namespace {

int64_t mod_p(int64_t v, int64_t p) {
  int64_t r = v % p;
  return r < 0 ? r + p : r;
}

int64_t inv_mod_p(int64_t a, int64_t p) {
  // extended gcd
  int64_t t = 0, newt = 1, r = p, newr = mod_p(a, p);
  while (newr != 0) {
    int64_t q = r / newr;
    int64_t tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) fail(errc::internal_invariant_violation, "inverse of non-unit mod p");
  return mod_p(t, p);
}

void trim(std::vector<int64_t>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

/* deterministic splitting source; seeded per polynomial so factorizations
 * are stable across runs and platforms */
struct SplitRng {
  uint64_t s;
  explicit SplitRng(uint64_t seed) : s(seed ^ 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
};

uint64_t seed_of(const FFPoly& f) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<uint64_t>(f.F->p()));
  mix(static_cast<uint64_t>(f.F->k()));
  for (const auto& e : f.c)
    for (int64_t x : e.c) mix(static_cast<uint64_t>(x) + 0x100);
  return h;
}

}  // namespace

FiniteFieldPtr FiniteField::make(int64_t p, std::vector<int64_t> modulus, bool trusted) {
  require(p >= 2, errc::not_prime, "p must be >= 2");
  {
    Int zp(static_cast<long>(p));
    if (mpz_probab_prime_p(zp.get_mpz_t(), 40) == 0)
      fail(errc::not_prime, zp.get_str() + " is not prime");
  }
  for (auto& c : modulus) c = mod_p(c, p);
  trim(modulus);
  require(modulus.size() >= 2, errc::reducible_modulus, "residue modulus must have degree >= 1");
  require(modulus.back() == 1, errc::reducible_modulus, "residue modulus must be monic");

  if (!trusted && modulus.size() > 2) {
    /* irreducibility is a statement over the prime field */
    auto Fp = FiniteField::make(p, {0, 1}, true);
    FFPoly m = ffpoly_from_ints(Fp, modulus);
    if (!ffpoly_is_irreducible(m))
      fail(errc::reducible_modulus, "residue modulus is reducible over F_p");
  }

  auto F = std::shared_ptr<FiniteField>(new FiniteField());
  F->p_ = p;
  F->k_ = static_cast<int>(modulus.size()) - 1;
  F->modulus_ = std::move(modulus);
  return F;
}

Int FiniteField::order() const {
  Int q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(k_));
  return q;
}

FFElem FiniteField::zero() const { return FFElem{std::vector<int64_t>(k_, 0)}; }

FFElem FiniteField::one() const { return from_int(1); }

FFElem FiniteField::from_int(int64_t v) const {
  FFElem e = zero();
  e.c[0] = mod_p(v, p_);
  return e;
}

FFElem FiniteField::gen() const {
  if (k_ == 1) {
    // u is the root of the (linear) modulus: u = -mod[0]
    return from_int(-modulus_[0]);
  }
  FFElem e = zero();
  e.c[1] = 1;
  return e;
}

FFElem FiniteField::from_coeffs(const std::vector<int64_t>& c) const {
  std::vector<int64_t> v(c);
  for (auto& x : v) x = mod_p(x, p_);
  // reduce mod modulus
  while (static_cast<int>(v.size()) > k_) {
    int64_t lead = v.back();
    v.pop_back();
    if (lead == 0) continue;
    size_t off = v.size() - static_cast<size_t>(k_);
    for (int i = 0; i < k_; ++i) v[off + i] = mod_p(v[off + i] - lead * modulus_[i], p_);
  }
  v.resize(k_, 0);
  return FFElem{std::move(v)};
}

bool FiniteField::is_zero(const FFElem& a) const {
  return std::all_of(a.c.begin(), a.c.end(), [](int64_t x) { return x == 0; });
}

FFElem FiniteField::add(const FFElem& a, const FFElem& b) const {
  require(a.c.size() == static_cast<size_t>(k_) && b.c.size() == static_cast<size_t>(k_),
          errc::internal_invariant_violation, "residue elements from a different field");
  FFElem r = a;
  for (int i = 0; i < k_; ++i) r.c[i] = mod_p(r.c[i] + b.c[i], p_);
  return r;
}

FFElem FiniteField::sub(const FFElem& a, const FFElem& b) const {
  FFElem r = a;
  for (int i = 0; i < k_; ++i) r.c[i] = mod_p(r.c[i] - b.c[i], p_);
  return r;
}

FFElem FiniteField::neg(const FFElem& a) const {
  FFElem r = a;
  for (int i = 0; i < k_; ++i) r.c[i] = mod_p(-r.c[i], p_);
  return r;
}

std::vector<int64_t> FiniteField::mul_raw(const std::vector<int64_t>& a,
                                          const std::vector<int64_t>& b) const {
  std::vector<int64_t> prod(2 * k_ - 1, 0);
  for (int i = 0; i < k_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < k_; ++j) prod[i + j] = mod_p(prod[i + j] + a[i] * b[j], p_);
  }
  for (int d = 2 * k_ - 2; d >= k_; --d) {
    int64_t lead = prod[d];
    if (lead == 0) continue;
    prod[d] = 0;
    for (int i = 0; i < k_; ++i)
      prod[d - k_ + i] = mod_p(prod[d - k_ + i] - lead * modulus_[i], p_);
  }
  prod.resize(k_);
  return prod;
}

FFElem FiniteField::mul(const FFElem& a, const FFElem& b) const {
  require(a.c.size() == static_cast<size_t>(k_) && b.c.size() == static_cast<size_t>(k_),
          errc::internal_invariant_violation, "residue elements from a different field");
  if (k_ == 1) return FFElem{{mod_p(a.c[0] * b.c[0], p_)}};
  return FFElem{mul_raw(a.c, b.c)};
}

FFElem FiniteField::inv(const FFElem& a) const {
  if (is_zero(a)) fail(errc::internal_invariant_violation, "inverse of zero in F_{p^k}");
  if (k_ == 1) return FFElem{{inv_mod_p(a.c[0], p_)}};
  Int n = order() - 2;
  return pow(a, n);
}

FFElem FiniteField::pow(const FFElem& a, const Int& n) const {
  if (n == 0) return one();
  FFElem base = a, result = one();
  Int e = n;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = mul(result, base);
    e >>= 1;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

FFElem FiniteField::frobenius(const FFElem& a) const { return pow(a, Int(static_cast<long>(p_))); }

FFElem FiniteField::frobenius_inverse(const FFElem& a) const {
  FFElem r = a;
  for (int i = 0; i < k_ - 1; ++i) r = frobenius(r);
  return r;
}

int FiniteField::degree_over_prime_field(const FFElem& a) const {
  FFElem b = frobenius(a);
  int d = 1;
  while (!(b == a)) {
    b = frobenius(b);
    ++d;
  }
  return d;
}

std::string FiniteField::str(const FFElem& a) const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < k_; ++i) {
    if (i) os << ",";
    os << a.c[i];
  }
  os << "]";
  return os.str();
}

/* ---------------- polynomials ---------------- */

namespace {
void ffpoly_trim(FFPoly& f) {
  while (!f.c.empty() && f.F->is_zero(f.c.back())) f.c.pop_back();
}
}  // namespace

FFPoly ffpoly_from(const FiniteFieldPtr& F, std::vector<FFElem> coeffs) {
  FFPoly f{F, std::move(coeffs)};
  ffpoly_trim(f);
  return f;
}

FFPoly ffpoly_from_ints(const FiniteFieldPtr& F, const std::vector<int64_t>& coeffs) {
  std::vector<FFElem> c;
  c.reserve(coeffs.size());
  for (int64_t v : coeffs) c.push_back(F->from_int(v));
  return ffpoly_from(F, std::move(c));
}

FFPoly ffpoly_zero(const FiniteFieldPtr& F) { return FFPoly{F, {}}; }

FFPoly ffpoly_x(const FiniteFieldPtr& F) { return ffpoly_from(F, {F->zero(), F->one()}); }

FFPoly ffpoly_const(const FiniteFieldPtr& F, const FFElem& a) { return ffpoly_from(F, {a}); }

bool ffpoly_eq(const FFPoly& a, const FFPoly& b) { return a.c == b.c; }

FFPoly ffpoly_add(const FFPoly& a, const FFPoly& b) {
  const auto& F = a.F;
  std::vector<FFElem> c(std::max(a.c.size(), b.c.size()), F->zero());
  for (size_t i = 0; i < a.c.size(); ++i) c[i] = a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) c[i] = F->add(c[i], b.c[i]);
  return ffpoly_from(F, std::move(c));
}

FFPoly ffpoly_sub(const FFPoly& a, const FFPoly& b) {
  const auto& F = a.F;
  std::vector<FFElem> c(std::max(a.c.size(), b.c.size()), F->zero());
  for (size_t i = 0; i < a.c.size(); ++i) c[i] = a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) c[i] = F->sub(c[i], b.c[i]);
  return ffpoly_from(F, std::move(c));
}

FFPoly ffpoly_mul(const FFPoly& a, const FFPoly& b) {
  const auto& F = a.F;
  if (a.is_zero() || b.is_zero()) return ffpoly_zero(F);
  std::vector<FFElem> c(a.c.size() + b.c.size() - 1, F->zero());
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (F->is_zero(a.c[i])) continue;
    for (size_t j = 0; j < b.c.size(); ++j)
      c[i + j] = F->add(c[i + j], F->mul(a.c[i], b.c[j]));
  }
  return ffpoly_from(F, std::move(c));
}

FFPoly ffpoly_scale(const FFPoly& a, const FFElem& s) {
  const auto& F = a.F;
  std::vector<FFElem> c;
  c.reserve(a.c.size());
  for (const auto& x : a.c) c.push_back(F->mul(x, s));
  return ffpoly_from(F, std::move(c));
}

FFPoly ffpoly_monic(const FFPoly& a) {
  if (a.is_zero()) return a;
  return ffpoly_scale(a, a.F->inv(a.lc()));
}

void ffpoly_divrem(const FFPoly& a, const FFPoly& b, FFPoly& q, FFPoly& r) {
  const auto& F = a.F;
  if (b.is_zero()) fail(errc::internal_invariant_violation, "ffpoly division by zero");
  q = ffpoly_zero(F);
  r = a;
  if (a.degree() < b.degree()) return;
  FFElem invlc = F->inv(b.lc());
  q.c.assign(static_cast<size_t>(a.degree() - b.degree()) + 1, F->zero());
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int shift = r.degree() - b.degree();
    FFElem coef = F->mul(r.lc(), invlc);
    q.c[static_cast<size_t>(shift)] = coef;
    for (int i = 0; i <= b.degree(); ++i)
      r.c[static_cast<size_t>(i + shift)] =
          F->sub(r.c[static_cast<size_t>(i + shift)], F->mul(coef, b.c[static_cast<size_t>(i)]));
    ffpoly_trim(r);
  }
  ffpoly_trim(q);
}

FFPoly ffpoly_gcd(const FFPoly& a, const FFPoly& b) {
  FFPoly x = a, y = b;
  while (!y.is_zero()) {
    FFPoly q, r;
    ffpoly_divrem(x, y, q, r);
    x = y;
    y = r;
  }
  return ffpoly_monic(x);
}

FFPoly ffpoly_derivative(const FFPoly& a) {
  const auto& F = a.F;
  if (a.degree() <= 0) return ffpoly_zero(F);
  std::vector<FFElem> c;
  c.reserve(a.c.size() - 1);
  for (int i = 1; i <= a.degree(); ++i)
    c.push_back(F->mul(a.c[static_cast<size_t>(i)], F->from_int(i)));
  return ffpoly_from(F, std::move(c));
}

FFElem ffpoly_eval(const FFPoly& a, const FFElem& x) {
  const auto& F = a.F;
  FFElem r = F->zero();
  for (int i = a.degree(); i >= 0; --i) r = F->add(F->mul(r, x), a.c[static_cast<size_t>(i)]);
  return r;
}

FFPoly ffpoly_powmod(const FFPoly& base, const Int& n, const FFPoly& mod) {
  const auto& F = base.F;
  FFPoly result = ffpoly_const(F, F->one());
  FFPoly b = base;
  {
    FFPoly q, r;
    ffpoly_divrem(b, mod, q, r);
    b = r;
  }
  Int e = n;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) {
      FFPoly q, r;
      ffpoly_divrem(ffpoly_mul(result, b), mod, q, r);
      result = r;
    }
    e >>= 1;
    if (e > 0) {
      FFPoly q, r;
      ffpoly_divrem(ffpoly_mul(b, b), mod, q, r);
      b = r;
    }
  }
  return result;
}

bool ffpoly_is_irreducible(const FFPoly& f) {
  const auto& F = f.F;
  int n = f.degree();
  if (n <= 0) return false;
  if (n == 1) return true;
  Int q = F->order();
  // x^{q^n} == x mod f
  FFPoly x = ffpoly_x(F);
  Int qn = 1;
  for (int i = 0; i < n; ++i) qn *= q;
  FFPoly xq = ffpoly_powmod(x, qn, f);
  if (!ffpoly_eq(xq, x)) return false;
  // gcd(x^{q^{n/l}} - x, f) == 1 for every prime l | n
  for (int l = 2; l <= n; ++l) {
    if (n % l != 0) continue;
    bool lprime = true;
    for (int d = 2; d * d <= l; ++d)
      if (l % d == 0) lprime = false;
    if (!lprime) continue;
    Int qd = 1;
    for (int i = 0; i < n / l; ++i) qd *= q;
    FFPoly xqd = ffpoly_powmod(x, qd, f);
    FFPoly g = ffpoly_gcd(ffpoly_sub(xqd, x), f);
    if (g.degree() != 0) return false;
  }
  return true;
}

bool ffpoly_is_squarefree(const FFPoly& f) {
  if (f.degree() <= 0) return true;
  FFPoly g = ffpoly_gcd(f, ffpoly_derivative(f));
  return g.degree() == 0;
}

namespace {

/* split a product of distinct degree-d irreducibles */
void equal_degree_split(const FFPoly& f, int d, SplitRng& rng, std::vector<FFPoly>& out) {
  const auto& F = f.F;
  if (f.degree() == d) {
    out.push_back(ffpoly_monic(f));
    return;
  }
  Int q = F->order();
  int n = f.degree();
  FFPoly splitter = ffpoly_zero(F);
  while (true) {
    // random polynomial of degree < n
    std::vector<FFElem> rc;
    rc.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int64_t> cc(static_cast<size_t>(F->k()));
      for (auto& x : cc) x = static_cast<int64_t>(rng.next() % static_cast<uint64_t>(F->p()));
      rc.push_back(F->from_coeffs(cc));
    }
    FFPoly a = ffpoly_from(F, std::move(rc));
    if (a.degree() < 1) continue;
    FFPoly g = ffpoly_gcd(a, f);
    if (g.degree() > 0 && g.degree() < n) {
      splitter = g;
      break;
    }
    if (F->p() == 2) {
      // trace map: a + a^2 + a^4 + ... over F_{2^{k d}}
      FFPoly t = a, apow = a;
      long bits = static_cast<long>(F->k()) * d;
      for (long i = 1; i < bits; ++i) {
        FFPoly qq, rr;
        ffpoly_divrem(ffpoly_mul(apow, apow), f, qq, rr);
        apow = rr;
        t = ffpoly_add(t, apow);
      }
      g = ffpoly_gcd(t, f);
    } else {
      Int qd = 1;
      for (int i = 0; i < d; ++i) qd *= q;
      Int e = (qd - 1) / 2;
      FFPoly b = ffpoly_powmod(a, e, f);
      g = ffpoly_gcd(ffpoly_sub(b, ffpoly_const(F, F->one())), f);
    }
    if (g.degree() > 0 && g.degree() < n) {
      splitter = g;
      break;
    }
  }
  FFPoly q2, r2;
  ffpoly_divrem(f, splitter, q2, r2);
  if (!r2.is_zero()) fail(errc::internal_invariant_violation, "equal-degree split remainder");
  equal_degree_split(splitter, d, rng, out);
  equal_degree_split(q2, d, rng, out);
}

bool fffactor_less(const FFFactor& a, const FFFactor& b) {
  if (a.factor.degree() != b.factor.degree()) return a.factor.degree() < b.factor.degree();
  return a.factor.c < b.factor.c;
}

}  // namespace

namespace {

std::vector<FFFactor> merge_sorted_factors(std::vector<FFFactor> out) {
  std::sort(out.begin(), out.end(), fffactor_less);
  std::vector<FFFactor> merged;
  for (auto& x : out) {
    if (!merged.empty() && ffpoly_eq(merged.back().factor, x.factor))
      merged.back().multiplicity += x.multiplicity;
    else
      merged.push_back(x);
  }
  return merged;
}

/* f squarefree monic: distinct-degree + equal-degree */
std::vector<FFPoly> factor_squarefree(const FFPoly& sf, SplitRng& rng) {
  const auto& F = sf.F;
  std::vector<FFPoly> out;
  FFPoly w = sf;
  FFPoly x = ffpoly_x(F);
  FFPoly xq = x;
  Int q = F->order();
  int d = 0;
  while (w.degree() > 0) {
    ++d;
    if (2 * d > w.degree()) {
      out.push_back(ffpoly_monic(w));
      break;
    }
    xq = ffpoly_powmod(xq, q, w);
    FFPoly g = ffpoly_gcd(ffpoly_sub(xq, x), w);
    if (g.degree() > 0) {
      equal_degree_split(g, d, rng, out);
      FFPoly q2, r2;
      ffpoly_divrem(w, g, q2, r2);
      w = q2;
      if (w.degree() > 0) {
        FFPoly q3, r3;
        ffpoly_divrem(xq, w, q3, r3);
        xq = r3;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<FFFactor> ffpoly_factor(const FFPoly& f0) {
  const auto& F = f0.F;
  std::vector<FFFactor> out;
  if (f0.degree() <= 0) return out;
  FFPoly f = ffpoly_monic(f0);
  SplitRng rng(seed_of(f0));

  FFPoly der = ffpoly_derivative(f);
  if (der.is_zero()) {
    /* f = g(x^p); coefficients of g are the p-th roots of f's */
    std::vector<FFElem> g;
    for (int i = 0; i <= f.degree(); i += static_cast<int>(F->p()))
      g.push_back(F->frobenius_inverse(f.c[static_cast<size_t>(i)]));
    auto sub = ffpoly_factor(ffpoly_from(F, std::move(g)));
    for (auto& s : sub) s.multiplicity *= static_cast<int>(F->p());
    return merge_sorted_factors(std::move(sub));
  }

  /* squarefree part picks up every factor of multiplicity prime to p */
  FFPoly g0 = ffpoly_gcd(f, der);
  FFPoly sf, rem0;
  ffpoly_divrem(f, g0, sf, rem0);
  sf = ffpoly_monic(sf);

  for (auto& irr : factor_squarefree(sf, rng)) {
    int mult = 0;
    while (true) {
      FFPoly q, r;
      ffpoly_divrem(f, irr, q, r);
      if (!r.is_zero()) break;
      f = q;
      ++mult;
    }
    out.push_back(FFFactor{irr, mult});
  }

  /* whatever is left is a p-th power (factors with multiplicity divisible by p) */
  if (f.degree() > 0) {
    auto sub = ffpoly_factor(f);
    for (auto& s : sub) out.push_back(s);
  }
  return merge_sorted_factors(std::move(out));
}

std::vector<FFElem> ffpoly_roots(const FFPoly& f) {
  std::vector<FFElem> roots;
  for (const auto& fac : ffpoly_factor(f)) {
    if (fac.factor.degree() == 1) {
      // monic x + c -> root -c
      roots.push_back(f.F->neg(fac.factor.c[0]));
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::string ffpoly_str(const FFPoly& f, const std::string& var) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= f.degree(); ++i) {
    const auto& c = f.c[static_cast<size_t>(i)];
    if (f.F->is_zero(c)) continue;
    if (!first) os << " + ";
    first = false;
    os << f.F->str(c);
    if (i == 1) os << "*" << var;
    if (i > 1) os << "*" << var << "^" << i;
  }
  return os.str();
}

}  // namespace stablered
