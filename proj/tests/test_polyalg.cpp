#include <doctest.h>

#include <random>

#include "stablered/errors.hpp"
#include "stablered/poly.hpp"

using namespace stablered;

namespace {

FieldPtr q2() { return make_field(Int(2), 1, {0, 1}); }

Poly mk(const FieldPtr& F, std::vector<long> c, Var v = Var::Y) {
  std::vector<Rat> q(c.begin(), c.end());
  return Poly::from_rationals(F, q, v);
}

Poly random_poly(const FieldPtr& F, std::mt19937& rng, int deg, Var v = Var::Y) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::vector<Rat> c(static_cast<size_t>(deg) + 1);
  for (auto& x : c) x = coef(rng);
  c.back() = 1;
  return Poly::from_rationals(F, c, v);
}

/* independent bivariate expansion of f(X+Y): X-coefficients as Y-polys */
std::vector<Poly> expand_shift_oracle(const Poly& f) {
  const auto& F = f.field();
  /* (X+Y)^j computed by repeated convolution in the X-direction */
  std::vector<std::vector<Poly>> pows;  // pows[j][i] = coeff of X^i in (X+Y)^j
  pows.push_back({Poly::constant(F, FieldElement::one(F), Var::Y)});
  for (long j = 1; j <= f.degree(); ++j) {
    const auto& prev = pows.back();
    std::vector<Poly> cur(static_cast<size_t>(j) + 1, Poly::zero(F, Var::Y));
    Poly yy = mk(F, {0, 1});
    for (size_t i = 0; i < prev.size(); ++i) {
      cur[i + 1] = cur[i + 1] + prev[i];       // * X
      cur[i] = cur[i] + prev[i] * yy;          // * Y
    }
    pows.push_back(std::move(cur));
  }
  std::vector<Poly> out(static_cast<size_t>(f.degree()) + 1, Poly::zero(F, Var::Y));
  for (long j = 0; j <= f.degree(); ++j)
    for (size_t i = 0; i < pows[static_cast<size_t>(j)].size(); ++i)
      out[i] = out[i] + pows[static_cast<size_t>(j)][i] * f.coeff(j);
  return out;
}

}  // namespace

TEST_CASE("taylor_shift fixtures") {
  auto F = q2();
  {
    Poly f = mk(F, {0, 0, 1}, Var::X0);  // X^2
    auto s = taylor_shift(f);
    CHECK(s[0] == mk(F, {0, 0, 1}));
    CHECK(s[1] == mk(F, {0, 2}));
    CHECK(s[2] == mk(F, {1}));
  }
  {
    Poly f = mk(F, {1, 0, 0, 0, 1, 1}, Var::X0);  // 1 + X^4 + X^5
    auto s = taylor_shift(f);
    CHECK(s[4] == mk(F, {1, 5}));  // s_4 = 1 + 5Y
    auto oracle = expand_shift_oracle(f);
    for (size_t i = 0; i < s.size(); ++i) CHECK(s[i] == oracle[i]);
  }
  {
    Poly f = mk(F, {1, 0, 0, 1}, Var::X0);  // 1 + X^3
    auto s = taylor_shift(f);
    CHECK(s[1] == mk(F, {0, 0, 3}));
    CHECK(s[2] == mk(F, {0, 3}));
    CHECK(s[3] == mk(F, {1}));
  }
}

TEST_CASE("taylor_shift round trip on random polynomials") {
  auto F = make_field(Int(3), 2, {0, 1});
  std::mt19937 rng(5);
  for (int it = 0; it < 10; ++it) {
    Poly f = random_poly(F, rng, 2 + static_cast<int>(rng() % 11), Var::X0);
    auto s = taylor_shift(f);
    /* at Y = 0 the X-coefficients are f's coefficients */
    for (long i = 0; i <= f.degree(); ++i)
      CHECK(s[static_cast<size_t>(i)].eval(FieldElement::zero(F)) == f.coeff(i));
    /* at X = 0 the constant coefficient is f(Y) */
    CHECK(s[0] == f.with_var(Var::Y));
  }
}

TEST_CASE("gcd fixtures and properties") {
  auto F = q2();
  CHECK(poly_gcd(mk(F, {-1, 0, 1}), mk(F, {-1, 1})) == mk(F, {-1, 1}));
  CHECK(poly_gcd(mk(F, {0, 0, 0, 1}), mk(F, {0, 0, 1})) == mk(F, {0, 0, 1}));
  CHECK(poly_gcd(mk(F, {1, 2, 1}), mk(F, {2, 2})) == mk(F, {1, 1}));

  std::mt19937 rng(9);
  for (int it = 0; it < 15; ++it) {
    Poly a = random_poly(F, rng, 3 + static_cast<int>(rng() % 4));
    Poly b = random_poly(F, rng, 2 + static_cast<int>(rng() % 4));
    Poly g = poly_gcd(a, b);
    CHECK(g.degree() + poly_divexact(a, g).degree() == a.degree());
    Poly q, r;
    poly_divrem(a, g, q, r);
    CHECK(r.is_zero());
    poly_divrem(b, g, q, r);
    CHECK(r.is_zero());
  }
}

TEST_CASE("resultant fixtures") {
  auto F = q2();
  CHECK(poly_resultant(mk(F, {-3, 1}), mk(F, {-2, 0, 1})) == FieldElement(F, Rat(7)));
  CHECK(poly_resultant(mk(F, {-2, 0, 1}), mk(F, {-2, 0, 1})).is_zero());
  CHECK(poly_resultant(mk(F, {4, 0, 0, 1}), mk(F, {1, 0, 0, 1})) == FieldElement(F, Rat(-27)));
}

TEST_CASE("resultant vanishes iff gcd is nonconstant") {
  auto F = q2();
  std::mt19937 rng(21);
  for (int it = 0; it < 20; ++it) {
    Poly a = random_poly(F, rng, 2 + static_cast<int>(rng() % 3));
    Poly b = random_poly(F, rng, 2 + static_cast<int>(rng() % 3));
    bool res_zero = poly_resultant(a, b).is_zero();
    bool gcd_nc = poly_gcd(a, b).degree() > 0;
    CHECK(res_zero == gcd_nc);
    /* forced common factor */
    Poly c = random_poly(F, rng, 1);
    CHECK(poly_resultant(a * c, b * c).is_zero());
  }
}

TEST_CASE("squarefree part") {
  auto F = q2();
  CHECK(squarefree_part(mk(F, {0, 0, 1})) == mk(F, {0, 1}));
  Poly f = mk(F, {1, 0, 0, 0, 1, 1});
  CHECK(squarefree_part(f) == f);
  Poly g = mk(F, {-1, 1}) * mk(F, {-1, 1}) * mk(F, {-2, 1});
  CHECK(squarefree_part(g) == mk(F, {-1, 1}) * mk(F, {-2, 1}));
}

TEST_CASE("newton polygon fixtures") {
  {
    auto F = make_field(Int(3), 1, {0, 1});
    Poly f = mk(F, {-3, 0, 1});  // Y^2 - p at p = 3
    NewtonPolygon np = newton_polygon(f);
    REQUIRE(np.segments.size() == 1);
    CHECK(np.segments[0].slope == Rat(-1, 2));
    CHECK(np.segments[0].length == 2);
    CHECK(np.ord_zero == 0);
  }
  {
    auto F = q2();
    Poly f = mk(F, {0, 12, 0, 0, 3});  // 3Y^4 + 12Y
    NewtonPolygon np = newton_polygon(f);
    CHECK(np.ord_zero == 1);
    REQUIRE(np.segments.size() == 1);
    CHECK(np.segments[0].slope == Rat(-2, 3));
    CHECK(np.segments[0].length == 3);
    CHECK(np.vertices.front() == std::pair<long, Rat>(1, Rat(2)));
    CHECK(np.vertices.back() == std::pair<long, Rat>(4, Rat(0)));
  }
  {
    auto F = q2();
    NewtonPolygon np = newton_polygon(mk(F, {5}));
    CHECK(np.segments.empty());
    CHECK(np.ord_zero == 0);
  }
}

TEST_CASE("newton polygon multiplicities and products") {
  auto F = q2();
  std::mt19937 rng(33);
  for (int it = 0; it < 15; ++it) {
    Poly a = random_poly(F, rng, 2 + static_cast<int>(rng() % 3));
    Poly b = random_poly(F, rng, 2 + static_cast<int>(rng() % 3));
    auto count = [](const NewtonPolygon& np) {
      long n = np.ord_zero;
      for (const auto& s : np.segments) n += s.length;
      return n;
    };
    NewtonPolygon na = newton_polygon(a), nb = newton_polygon(b), nab = newton_polygon(a * b);
    CHECK(count(na) == a.degree());
    CHECK(count(nab) == a.degree() + b.degree());
    /* product polygon valuation multiset = union */
    auto multiset = [](const NewtonPolygon& np) {
      std::vector<std::pair<Valuation, long>> m = np.root_valuations();
      std::sort(m.begin(), m.end(), [](const auto& x, const auto& y) {
        if (x.first == y.first) return x.second < y.second;
        return x.first < y.first;
      });
      return m;
    };
    auto ma = multiset(na), mb = multiset(nb), mab = multiset(nab);
    std::vector<std::pair<Valuation, long>> uni = ma;
    for (auto& [v, c] : mb) {
      bool found = false;
      for (auto& [w, d] : uni)
        if (w == v) {
          d += c;
          found = true;
        }
      if (!found) uni.emplace_back(v, c);
    }
    std::sort(uni.begin(), uni.end(), [](const auto& x, const auto& y) {
      if (x.first == y.first) return x.second < y.second;
      return x.first < y.first;
    });
    CHECK(uni == mab);
  }
}

TEST_CASE("evaluation") {
  auto F = q2();
  CHECK(mk(F, {1, 0, 1}).eval(FieldElement(F, Rat(2))) == FieldElement(F, Rat(5)));
  CHECK(mk(F, {1, 0, 0, 1}).eval(FieldElement::zero(F)) == FieldElement::one(F));
  /* s0 = 1 + Y^3 at y = -pi^2 in e = 3: y^3 = -4, so the value is -3 */
  auto F3 = make_field(Int(2), 3, {0, 1});
  Poly s0 = Poly::from_rationals(F3, {Rat(1), Rat(0), Rat(0), Rat(1)}, Var::Y);
  FieldElement y = -FieldElement::pi_pow(F3, 2);
  CHECK(s0.eval(y) == FieldElement(F3, Rat(-3)));
}

TEST_CASE("variable tags guard mixing") {
  auto F = q2();
  Poly a = mk(F, {1, 1}, Var::X);
  Poly b = mk(F, {1, 1}, Var::Y);
  CHECK_THROWS_AS(a * b, error);
  CHECK_NOTHROW(a * mk(F, {2}, Var::Y));  // constants are tag-neutral
}
