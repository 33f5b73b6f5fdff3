#include <doctest.h>

#include <random>

#include "stablered/decomp.hpp"
#include "stablered/errors.hpp"

using namespace stablered;

namespace {

Poly mk(const FieldPtr& F, std::vector<long> c, Var v = Var::X0) {
  std::vector<Rat> q(c.begin(), c.end());
  return Poly::from_rationals(F, q, v);
}

}  // namespace

TEST_CASE("binom_val") {
  CHECK(binom_val(Int(2), 1) == Rat(-1));
  CHECK(binom_val(Int(2), 2) == Rat(-3));
  CHECK(binom_val(Int(5), 0) == Rat(0));
  /* agreement with the exact rational coefficient */
  for (long p : {2L, 3L, 5L})
    for (long t = 1; t <= 50; ++t) {
      Rat b = binom_exact(Int(p), t);
      REQUIRE(b != 0);
      CHECK(Rat(padic_valuation(b, Int(p))) == binom_val(Int(p), t));
    }
  CHECK(binom_exact(Int(2), 2) == Rat(-1, 8));
}

TEST_CASE("min_reps") {
  {
    RepData rd = min_reps(5, Int(2));
    CHECK(rd.r == 2);
    CHECK(rd.alpha == 2);
    CHECK(rd.p_alpha == 4);
  }
  {
    RepData rd = min_reps(4, Int(3));
    CHECK(rd.r == 1);
    CHECK(rd.p_alpha == 3);
  }
  {
    RepData rd = min_reps(1, Int(2));
    CHECK(rd.r == 0);
    CHECK(rd.p_alpha == 1);
    CHECK(rd.alpha == 0);
  }
  CHECK_THROWS_AS(min_reps(4, Int(2)), error);
}

TEST_CASE("special decomposition of 1 + X^3 at p = 2") {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = mk(F, {1, 0, 0, 1});
  RepData rd = min_reps(3, Int(2));
  SpecialDecomposition dec = special_decomposition(f, rd);

  Poly s0 = mk(F, {1, 0, 0, 1}, Var::Y);
  /* a1 = 3Y^2 / (2(1+Y^3)) */
  RatFunc a1(Poly::from_rationals(F, {Rat(0), Rat(0), Rat(3, 2)}, Var::Y), s0);
  CHECK(dec.head[0] == a1);
  /* A2 = -3Y(Y^3+4)/(4(1+Y^3)^2) */
  RatFunc A2(Poly::from_rationals(F, {Rat(0), Rat(-3), Rat(0), Rat(0), Rat(-3, 4)}, Var::Y),
             s0 * s0);
  CHECK(dec.A(2) == A2);
  /* A3 = -1/(1+Y^3) */
  RatFunc A3(Poly::from_rationals(F, {Rat(-1)}, Var::Y), s0);
  CHECK(dec.A(3) == A3);

  normalize_tail(dec);
  CHECK(dec.c(2) == FieldElement(F, Rat(-3, 4)));
  CHECK(dec.N(2) == mk(F, {0, 4, 0, 0, 1}, Var::Y));
  CHECK(dec.c(3) == FieldElement(F, Rat(-1)));
  CHECK(dec.N(3) == s0 * s0);

  CHECK(decomposition_identity_holds(f, dec));
}

TEST_CASE("special decomposition with r = 0") {
  auto F = make_field(Int(5), 1, {0, 1});
  Poly f = mk(F, {1, 0, 0, 1});
  RepData rd = min_reps(3, Int(5));
  CHECK(rd.r == 0);
  SpecialDecomposition dec = special_decomposition(f, rd);
  CHECK(dec.head.empty());
  /* A_i = -s_i / s0 */
  Poly s0 = mk(F, {1, 0, 0, 1}, Var::Y);
  CHECK(dec.A(1) == RatFunc(-mk(F, {0, 0, 3}, Var::Y), s0));
  CHECK(dec.A(2) == RatFunc(-mk(F, {0, 3}, Var::Y), s0));
  CHECK(dec.A(3) == RatFunc(-mk(F, {1}, Var::Y), s0));
  normalize_tail(dec);
  CHECK(dec.c(1) == FieldElement(F, Rat(-3)));
  CHECK(dec.N(1) == mk(F, {0, 0, 1}, Var::Y));
  CHECK(decomposition_identity_holds(f, dec));
}

TEST_CASE("identity for a genus-2 fixture") {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = mk(F, {1, 0, 0, 0, 1, 1});
  RepData rd = min_reps(5, Int(2));
  SpecialDecomposition dec = special_decomposition(f, rd);
  normalize_tail(dec);
  CHECK(decomposition_identity_holds(f, dec));
  /* A_n = -1/s0 forced by monicity */
  CHECK(dec.c(5) == FieldElement(F, Rat(-1)));
  CHECK(dec.N(5) == dec.s0.pow(4));
}

TEST_CASE("randomized decomposition properties") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (long p : {2L, 3L, 5L}) {
    for (int it = 0; it < 12; ++it) {
      auto F = make_field(Int(p), 1, {0, 1});
      int n = 2 + static_cast<int>(rng() % 8);
      if (n % p == 0) ++n;
      std::vector<Rat> c(static_cast<size_t>(n) + 1);
      for (auto& x : c) x = coef(rng);
      c.back() = 1;
      Poly f = Poly::from_rationals(F, c, Var::X0);
      RepData rd = min_reps(n, Int(p));
      SpecialDecomposition dec = special_decomposition(f, rd);
      normalize_tail(dec);

      /* exact identity */
      CHECK(decomposition_identity_holds(f, dec));

      /* two independent code paths agree */
      SpecialDecomposition rec = special_decomposition_recursive(f, rd);
      for (size_t i = 0; i < dec.head.size(); ++i) CHECK(dec.head[i] == rec.head[i]);
      for (long i = rd.r + 1; i <= rd.n; ++i) CHECK(dec.A(i) == rec.A(i));

      /* c_n = -1, N_n = s0^{n-1} */
      CHECK(dec.c(n) == FieldElement(F, Rat(-1)));
      CHECK(dec.N(n) == dec.s0.pow(n - 1));

      /* Lemma-H valuation of c_{p^alpha} */
      if (rd.alpha >= 1) {
        Int pa1 = rd.p_alpha / Int(p);
        Rat expect = Rat(p) * binom_val(Int(p), pa1.get_si());
        Valuation vc = dec.c(rd.p_alpha.get_si()).valuation();
        REQUIRE(vc.is_finite());
        CHECK(vc.value() == expect);
        CHECK(vc.value() <= 0);
      }
    }
  }
}
