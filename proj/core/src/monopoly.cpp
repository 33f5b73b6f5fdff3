#include "stablered/monopoly.hpp"

#include "stablered/errors.hpp"

namespace stablered {

MonodromyData logderiv_parts(const Poly& f) {
  require(!f.is_zero(), errc::precondition_violation, "logderiv_parts of zero polynomial");
  MonodromyData md;
  Poly fp = f.derivative();
  Poly g = poly_gcd(f, fp);
  md.S0 = poly_divexact(f, g).with_var(Var::Y);
  md.S1 = poly_divexact(fp, g).with_var(Var::Y);
  md.m = md.S0.degree();
  require(md.S1.degree() == md.m - 1, errc::internal_invariant_violation,
          "deg S1 != m - 1 (is some multiplicity divisible by p?)");
  return md;
}

void monodromy_polynomial(const SpecialDecomposition& dec, MonodromyData& md) {
  md.alpha = dec.rep.alpha;
  const Int& p = dec.rep.p;
  if (md.alpha == 0) {
    md.c_norm = Rat(1);
  } else {
    Int pa1 = 1;
    for (long i = 0; i + 1 < md.alpha; ++i) pa1 *= p;  // p^{alpha-1}
    Rat b = binom_exact(p, pa1.get_si());
    md.c_norm = Rat(1);
    for (long i = 0; i < p.get_si(); ++i) md.c_norm *= b;
  }

  long ipa = dec.rep.p_alpha.get_si();
  const RatFunc& A = dec.A(ipa);
  Poly S0p = md.S0.pow(ipa);
  Poly num = A.num() * S0p;
  Poly quot, rem;
  poly_divrem(num, A.den(), quot, rem);
  require(rem.is_zero(), errc::non_integral_monodromy_polynomial,
          "A_{p^alpha} S0^{p^alpha} is not a polynomial");
  md.L = -(quot * (Rat(1) / md.c_norm));
  require(md.L.degree() == ipa * (md.m - 1), errc::degree_mismatch,
          "deg L = " + std::to_string(md.L.degree()) + ", expected " +
              std::to_string(ipa * (md.m - 1)));
  require(md.L.is_integral(), errc::non_integral_monodromy_polynomial,
          "L has a coefficient of negative valuation");
  /* for odd p the mod-p leading part of A_{p^alpha} comes out with the
   * opposite sign of the -A S0^{p^alpha}/c extraction; normalize so that
   * L == S1^{p^alpha} mod p holds (the sign does not move the zeros) */
  if (!check_congruence(md)) {
    md.L = -md.L;
    require(check_congruence(md), errc::internal_invariant_violation,
            "monodromy polynomial not congruent to +-S1^{p^alpha} mod p");
  }
}

bool check_congruence(const MonodromyData& md) {
  long pa = 1;
  for (long i = 0; i < md.alpha; ++i) pa *= md.L.field()->p().get_si();
  Poly diff = md.L - md.S1.pow(pa);
  Valuation v = diff.content_valuation();
  return !v.is_finite() || v.value() >= 1;
}

}  // namespace stablered
