#include "stablered/decomp.hpp"

#include <algorithm>

#include "stablered/errors.hpp"

namespace stablered {

Rat binom_val(const Int& p, long t) {
  if (t == 0) return Rat(0);
  Int acc(0);
  Int pw = p;
  Int tz(t);
  acc = tz;
  while (true) {
    Int q = tz / pw;
    if (q == 0) break;
    acc += q;
    pw *= p;
  }
  return Rat(-acc);
}

Rat binom_exact(const Int& p, long t) {
  Rat r(1);
  Rat invp = Rat(1) / Rat(p);
  for (long i = 0; i < t; ++i) {
    r *= invp - Rat(i);
    r /= Rat(i + 1);
  }
  return r;
}

RepData min_reps(long n, const Int& p) {
  require(n >= 1, errc::precondition_violation, "degree must be >= 1");
  require(Int(n) % p != 0, errc::degree_divisible_by_p, "p divides the degree n");
  RepData rd;
  rd.n = n;
  rd.p = p;
  rd.r = (n - 1) / p.get_si();
  rd.alpha = 0;
  rd.p_alpha = 1;
  while (rd.p_alpha * p <= n) {
    rd.p_alpha *= p;
    ++rd.alpha;
  }

  /* verify the representative property by enumeration: every x in {1..n}
   * is equivalent to exactly one element of M0 = {r+1..n} */
  auto prime_to_p_part = [&p](long x) {
    Int v(x);
    while (v % p == 0) v /= p;
    return v;
  };
  long pure_powers = 0;
  for (long x = 1; x <= n; ++x) {
    Int part = prime_to_p_part(x);
    long count = 0;
    for (long m0 = rd.r + 1; m0 <= n; ++m0)
      if (prime_to_p_part(m0) == part) ++count;
    require(count == 1, errc::internal_invariant_violation,
            "M0 is not a complete minimal system of representatives");
  }
  for (long m0 = rd.r + 1; m0 <= n; ++m0)
    if (prime_to_p_part(m0) == 1) {
      ++pure_powers;
      require(Int(m0) == rd.p_alpha, errc::internal_invariant_violation,
              "unexpected pure p-power in M0");
    }
  require(pure_powers == 1, errc::internal_invariant_violation, "M0 must contain one pure p-power");
  return rd;
}

const RatFunc& SpecialDecomposition::A(long i) const {
  require(rep.in_tail(i), errc::precondition_violation, "tail index out of range");
  return tail[static_cast<size_t>(i - rep.r - 1)];
}

const FieldElement& SpecialDecomposition::c(long i) const {
  require(tail_normalized() && rep.in_tail(i), errc::precondition_violation, "tail not normalized");
  return tail_c[static_cast<size_t>(i - rep.r - 1)];
}

const Poly& SpecialDecomposition::N(long i) const {
  require(tail_normalized() && rep.in_tail(i), errc::precondition_violation, "tail not normalized");
  return tail_N[static_cast<size_t>(i - rep.r - 1)];
}

namespace {

/* Fractions num / s0^pow: closed under the decomposition arithmetic, which
 * never needs a generic gcd. */
struct S0Frac {
  Poly num;
  long pow = 0;
};

struct S0Ctx {
  Poly s0;
  std::vector<Poly> s0_pows;  // s0^0, s0^1, ...

  const Poly& s0_pow(long t) {
    while (static_cast<long>(s0_pows.size()) <= t) s0_pows.push_back(s0_pows.back() * s0);
    return s0_pows[static_cast<size_t>(t)];
  }

  S0Frac lift(const S0Frac& a, long pow) {
    require(pow >= a.pow, errc::internal_invariant_violation, "s0-power lift downward");
    if (pow == a.pow) return a;
    return S0Frac{a.num * s0_pow(pow - a.pow), pow};
  }
  S0Frac add(const S0Frac& a, const S0Frac& b) {
    long pw = std::max(a.pow, b.pow);
    return S0Frac{lift(a, pw).num + lift(b, pw).num, pw};
  }
  S0Frac mul(const S0Frac& a, const S0Frac& b) { return S0Frac{a.num * b.num, a.pow + b.pow}; }
  S0Frac scale(const S0Frac& a, const Rat& s) { return S0Frac{a.num * s, a.pow}; }
  bool equal(const S0Frac& a, const S0Frac& b) {
    /* cross-multiplied equality */
    return a.num * s0_pow(b.pow) == b.num * s0_pow(a.pow);
  }
  RatFunc to_ratfunc(const S0Frac& a) { return RatFunc(a.num, s0_pow(a.pow)); }
};

using XPoly = std::vector<S0Frac>;  // coefficients in X, ascending

XPoly xp_mul_trunc(S0Ctx& ctx, const XPoly& a, const XPoly& b, long trunc_deg) {
  const auto& F = ctx.s0.field();
  XPoly r(static_cast<size_t>(std::min<long>(trunc_deg, static_cast<long>(a.size() + b.size()) - 2)) + 1,
          S0Frac{Poly::zero(F, Var::Y), 0});
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].num.is_zero()) continue;
    for (size_t j = 0; j < b.size() && i + j < r.size(); ++j) {
      if (b[j].num.is_zero()) continue;
      r[i + j] = ctx.add(r[i + j], ctx.mul(a[i], b[j]));
    }
  }
  return r;
}

XPoly xp_pow_trunc(S0Ctx& ctx, const XPoly& a, long n, long trunc_deg) {
  const auto& F = ctx.s0.field();
  XPoly result{S0Frac{Poly::constant(F, FieldElement::one(F)), 0}};
  XPoly base = a;
  long m = n;
  while (m > 0) {
    if (m & 1) result = xp_mul_trunc(ctx, result, base, trunc_deg);
    m >>= 1;
    if (m) base = xp_mul_trunc(ctx, base, base, trunc_deg);
  }
  return result;
}

void check_preconditions(const Poly& f, const RepData& rep) {
  require(!f.is_zero() && f.degree() == rep.n, errc::precondition_violation,
          "degree of f does not match the representative data");
  require(f.lc() == FieldElement::one(f.field()), errc::precondition_violation, "f must be monic");
  require(f.is_integral(), errc::precondition_violation, "f must have integral coefficients");
}

/* shared tail extraction: A_i = [X^i] H^p - s_i/s0 for i in M0, checking the
 * head identity [X^i] H^p = s_i/s0 for i <= r */
SpecialDecomposition assemble(const Poly& f, const RepData& rep, S0Ctx& ctx, const XPoly& H,
                              const std::vector<Poly>& s) {
  const auto& F = f.field();
  long n = rep.n, r = rep.r;

  XPoly Hp = xp_pow_trunc(ctx, H, rep.p.get_si(), n);

  SpecialDecomposition dec;
  dec.rep = rep;
  dec.s0 = s[0];
  dec.s = s;
  for (long i = 1; i <= r; ++i) dec.head.push_back(ctx.to_ratfunc(H[static_cast<size_t>(i)]));

  for (long i = 1; i <= r; ++i) {
    S0Frac si{s[static_cast<size_t>(i)], 1};
    S0Frac hi = static_cast<size_t>(i) < Hp.size() ? Hp[static_cast<size_t>(i)]
                                                   : S0Frac{Poly::zero(F, Var::Y), 0};
    require(ctx.equal(si, hi), errc::internal_invariant_violation,
            "H^p does not match f(X+Y)/s0 below X^{r+1}");
  }

  for (long i = r + 1; i <= n; ++i) {
    S0Frac hi = static_cast<size_t>(i) < Hp.size() ? Hp[static_cast<size_t>(i)]
                                                   : S0Frac{Poly::zero(F, Var::Y), 0};
    S0Frac Ai = ctx.add(hi, ctx.scale(S0Frac{s[static_cast<size_t>(i)], 1}, Rat(-1)));
    dec.tail.push_back(ctx.to_ratfunc(Ai));
  }
  return dec;
}

}  // namespace

SpecialDecomposition special_decomposition(const Poly& f, const RepData& rep) {
  check_preconditions(f, rep);
  const auto& F = f.field();
  long n = rep.n, r = rep.r;
  std::vector<Poly> s = taylor_shift(f);

  S0Ctx ctx;
  ctx.s0 = s[0];
  ctx.s0_pows = {Poly::constant(F, FieldElement::one(F), Var::Y)};

  XPoly H;
  if (r == 0) {
    H = {S0Frac{Poly::constant(F, FieldElement::one(F)), 0}};
  } else {
    XPoly F0(static_cast<size_t>(n) + 1, S0Frac{Poly::zero(F, Var::Y), 0});
    for (long i = 1; i <= n; ++i) F0[static_cast<size_t>(i)] = S0Frac{s[static_cast<size_t>(i)], 1};
    /* H = sum_t (1/p choose t) F0^t mod X^{r+1}; only t <= r contributes */
    H.assign(static_cast<size_t>(r) + 1, S0Frac{Poly::zero(F, Var::Y), 0});
    H[0] = S0Frac{Poly::constant(F, FieldElement::one(F)), 0};
    XPoly F0t{S0Frac{Poly::constant(F, FieldElement::one(F)), 0}};
    for (long t = 1; t <= r; ++t) {
      F0t = xp_mul_trunc(ctx, F0t, F0, r);
      Rat bt = binom_exact(rep.p, t);
      for (size_t i = 0; i < F0t.size() && i <= static_cast<size_t>(r); ++i)
        H[i] = ctx.add(H[i], ctx.scale(F0t[i], bt));
    }
  }
  return assemble(f, rep, ctx, H, s);
}

SpecialDecomposition special_decomposition_recursive(const Poly& f, const RepData& rep) {
  check_preconditions(f, rep);
  const auto& F = f.field();
  long r = rep.r;
  std::vector<Poly> s = taylor_shift(f);

  S0Ctx ctx;
  ctx.s0 = s[0];
  ctx.s0_pows = {Poly::constant(F, FieldElement::one(F), Var::Y)};

  /* solve for a_1, a_2, ... one at a time by comparing coefficients of
   * f(X+Y) = s0 H_l^p + p s0 a_{l+1} X^{l+1} (mod X^{l+2}) */
  XPoly H{S0Frac{Poly::constant(F, FieldElement::one(F)), 0}};
  Rat invp = Rat(1) / Rat(rep.p);
  for (long l = 0; l < r; ++l) {
    XPoly Hp = xp_pow_trunc(ctx, H, rep.p.get_si(), l + 1);
    S0Frac hcoef = static_cast<size_t>(l + 1) < Hp.size() ? Hp[static_cast<size_t>(l + 1)]
                                                          : S0Frac{Poly::zero(F, Var::Y), 0};
    S0Frac target{s[static_cast<size_t>(l + 1)], 1};
    S0Frac diff = ctx.add(target, ctx.scale(hcoef, Rat(-1)));
    H.push_back(ctx.scale(diff, invp));
  }
  return assemble(f, rep, ctx, H, s);
}

void normalize_tail(SpecialDecomposition& dec) {
  require(!dec.tail.empty() || dec.rep.r == dec.rep.n, errc::precondition_violation,
          "tail not computed");
  dec.tail_c.clear();
  dec.tail_N.clear();
  const auto& F = dec.s0.field();
  Poly s0p = Poly::constant(F, FieldElement::one(F), Var::Y);
  long pw = 0;
  for (long i = dec.rep.r + 1; i <= dec.rep.n; ++i) {
    const RatFunc& A = dec.A(i);
    while (pw < i) {
      s0p = s0p * dec.s0;
      ++pw;
    }
    Poly prod = A.num() * s0p;
    Poly quot, rem;
    poly_divrem(prod, A.den(), quot, rem);
    require(rem.is_zero(), errc::non_polynomial_tail,
            "A_i * s0^i is not a polynomial at i = " + std::to_string(i));
    require(!quot.is_zero(), errc::non_polynomial_tail,
            "tail coefficient vanishes identically at i = " + std::to_string(i));
    FieldElement ci = quot.lc();
    dec.tail_c.push_back(ci);
    dec.tail_N.push_back(quot * ci.inverse());
  }
}

bool decomposition_identity_holds(const Poly& f, const SpecialDecomposition& dec) {
  const auto& F = f.field();
  long n = dec.rep.n, r = dec.rep.r;
  /* build H^p - sum A_i X^i with RatFunc coefficients, multiply by s0 and
   * compare with the Taylor expansion */
  std::vector<RatFunc> H;
  H.push_back(RatFunc::from_poly(Poly::constant(F, FieldElement::one(F), Var::Y)));
  for (long i = 1; i <= r; ++i) H.push_back(dec.head[static_cast<size_t>(i - 1)]);

  std::vector<RatFunc> Hp{RatFunc::from_poly(Poly::constant(F, FieldElement::one(F), Var::Y))};
  long pp = dec.rep.p.get_si();
  for (long rep_i = 0; rep_i < pp; ++rep_i) {
    std::vector<RatFunc> nxt(std::min<size_t>(Hp.size() + H.size() - 1, static_cast<size_t>(n) + 1),
                             RatFunc::from_poly(Poly::zero(F, Var::Y)));
    for (size_t i = 0; i < Hp.size(); ++i)
      for (size_t j = 0; j < H.size() && i + j < nxt.size(); ++j)
        nxt[i + j] = nxt[i + j] + Hp[i] * H[j];
    Hp = std::move(nxt);
  }
  Hp.resize(static_cast<size_t>(n) + 1, RatFunc::from_poly(Poly::zero(F, Var::Y)));
  for (long i = r + 1; i <= n; ++i)
    Hp[static_cast<size_t>(i)] = Hp[static_cast<size_t>(i)] - dec.A(i);

  std::vector<Poly> s = taylor_shift(f);
  RatFunc s0 = RatFunc::from_poly(dec.s0);
  for (long i = 0; i <= n; ++i) {
    RatFunc lhs = RatFunc::from_poly(s[static_cast<size_t>(i)]);
    RatFunc rhs = s0 * Hp[static_cast<size_t>(i)];
    if (!(lhs == rhs)) return false;
  }
  return true;
}

}  // namespace stablered
