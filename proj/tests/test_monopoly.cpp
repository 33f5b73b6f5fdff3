#include <doctest.h>

#include "stablered/errors.hpp"
#include "stablered/monopoly.hpp"

using namespace stablered;

namespace {

Poly mk(const FieldPtr& F, std::vector<long> c, Var v = Var::X0) {
  std::vector<Rat> q(c.begin(), c.end());
  return Poly::from_rationals(F, q, v);
}

MonodromyData full(const FieldPtr& F, const Poly& f, long n, const Int& p) {
  RepData rd = min_reps(n, p);
  SpecialDecomposition dec = special_decomposition(f, rd);
  normalize_tail(dec);
  MonodromyData md = logderiv_parts(f);
  monodromy_polynomial(dec, md);
  return md;
}

}  // namespace

TEST_CASE("logderiv_parts") {
  auto F = make_field(Int(2), 1, {0, 1});
  {
    MonodromyData md = logderiv_parts(mk(F, {1, 0, 0, 0, 1, 1}));
    CHECK(md.S1 == mk(F, {0, 0, 0, 4, 5}, Var::Y));
    CHECK(md.S0 == mk(F, {1, 0, 0, 0, 1, 1}, Var::Y));
    CHECK(md.m == 5);
  }
  {
    auto F3 = make_field(Int(3), 1, {0, 1});
    MonodromyData md = logderiv_parts(mk(F3, {1, 2, 1}));  // (1+X)^2
    CHECK(md.S1 == mk(F3, {2}, Var::Y));
    CHECK(md.S0 == mk(F3, {1, 1}, Var::Y));
    CHECK(md.m == 1);
  }
  {
    MonodromyData md = logderiv_parts(mk(F, {1, 1}));
    CHECK(md.S1 == mk(F, {1}, Var::Y));
    CHECK(md.S0 == mk(F, {1, 1}, Var::Y));
    CHECK(md.m == 1);
  }
  /* S0 monic, gcd(S0, S1) = 1, S1 f = S0 f' */
  Poly f = mk(F, {1, 0, 0, 1}) * mk(F, {1, 0, 0, 1}) * mk(F, {1, 1});
  MonodromyData md = logderiv_parts(f);
  CHECK(md.S0.lc() == FieldElement::one(F));
  CHECK(poly_gcd(md.S0, md.S1).degree() == 0);
  CHECK(md.S1 * f.with_var(Var::Y) == md.S0 * f.derivative().with_var(Var::Y));
}

TEST_CASE("monodromy polynomial fixtures") {
  auto F = make_field(Int(2), 1, {0, 1});
  {
    MonodromyData md = full(F, mk(F, {1, 0, 0, 1}), 3, Int(2));
    CHECK(md.L == mk(F, {0, 12, 0, 0, 3}, Var::Y));
    CHECK(md.c_norm == Rat(1, 4));
    CHECK(check_congruence(md));
  }
  {
    auto F5 = make_field(Int(5), 1, {0, 1});
    MonodromyData md = full(F5, mk(F5, {1, 0, 0, 1}), 3, Int(5));
    CHECK(md.alpha == 0);
    CHECK(md.L == mk(F5, {0, 0, 3}, Var::Y));  // L = S1 = 3Y^2
    CHECK(check_congruence(md));
  }
  {
    MonodromyData md = full(F, mk(F, {1, 0, 0, 0, 1, 1}), 5, Int(2));
    CHECK(md.L.degree() == 16);  // p^alpha (m-1) = 4 * 4
    CHECK(check_congruence(md));
  }
}

TEST_CASE("congruence check") {
  auto F = make_field(Int(2), 1, {0, 1});
  MonodromyData md = full(F, mk(F, {1, 0, 0, 1}), 3, Int(2));
  CHECK(check_congruence(md));
  /* difference -6Y^4 + 12Y has all valuations >= 1 */
  Poly diff = md.L - md.S1.pow(2);
  Valuation v = diff.content_valuation();
  CHECK(v.is_finite());
  CHECK(v.value() >= 1);
  /* corrupted L fails */
  MonodromyData bad = md;
  bad.L = md.L + Poly::from_rationals(F, {Rat(1)}, Var::Y);
  CHECK(!check_congruence(bad));
}
