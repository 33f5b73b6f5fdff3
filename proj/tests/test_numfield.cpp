#include <doctest.h>

#include <random>

#include "stablered/errors.hpp"
#include "stablered/numfield.hpp"

using namespace stablered;

namespace {

FieldElement random_element(const FieldPtr& F, std::mt19937& rng, int spread = 6) {
  std::uniform_int_distribution<int> num(-spread, spread);
  std::uniform_int_distribution<int> den(1, 3);
  std::vector<Rat> c(static_cast<size_t>(F->k()) * F->e());
  for (auto& x : c) x = Rat(num(rng), den(rng));
  return FieldElement::from_coords(F, std::move(c));
}

}  // namespace

TEST_CASE("make_field fixtures") {
  auto F1 = make_field(Int(2), 15, {0, 1});
  CHECK(F1->e() == 15);
  CHECK(F1->k() == 1);
  CHECK(F1->lambda_p_valuation() == Rat(2));

  auto F2 = make_field(Int(2), 1, {0, 1});
  CHECK(FieldElement(F2, Rat(2)).valuation() == Valuation(Rat(1)));

  auto F3 = make_field(Int(3), 4, {0, 1});
  CHECK(F3->lambda_p_valuation() == Rat(3, 2));

  CHECK_THROWS_AS(make_field(Int(4), 1, {0, 1}), error);
  /* u^2 + 1 = (u+1)^2 over F_2 */
  CHECK_THROWS_AS(make_field(Int(2), 1, {1, 0, 1}), error);
}

TEST_CASE("valuation formula") {
  auto F = make_field(Int(2), 3, {0, 1});
  CHECK(FieldElement(F, Rat(2)).valuation() == Valuation(Rat(1)));
  FieldElement x = FieldElement::pi_pow(F, 2) * Rat(3, 2);
  CHECK(x.valuation() == Valuation(Rat(-1, 3)));
  FieldElement y = FieldElement::one(F) + FieldElement::pi_pow(F, 1);
  CHECK(y.valuation() == Valuation(Rat(0)));
  CHECK(!FieldElement::zero(F).valuation().is_finite());
}

TEST_CASE("residue") {
  auto F = make_field(Int(2), 3, {0, 1});
  const auto& R = F->residue_field();
  CHECK(FieldElement(F, Rat(3)).residue() == R->one());
  CHECK(R->is_zero(FieldElement::pi_pow(F, 1).residue()));
  CHECK_THROWS_AS(FieldElement(F, Rat(1, 2)).residue(), error);
}

TEST_CASE("frobenius inverse") {
  auto F4 = FiniteField::make(2, {1, 1, 1});
  CHECK(F4->frobenius_inverse(F4->one()) == F4->one());
  CHECK(F4->frobenius_inverse(F4->zero()) == F4->zero());
  /* u -> u^2 since (u^2)^2 = u^4 = u */
  FFElem u = F4->gen();
  CHECK(F4->frobenius_inverse(u) == F4->mul(u, u));

  /* exhaustive d^p = c over small fields */
  for (auto [p, mod] : {std::pair<int64_t, std::vector<int64_t>>{2, {1, 1, 1}},
                        {3, {1, 0, 1}},
                        {2, {1, 0, 1, 0, 0, 1}},
                        {5, {2, 1}}}) {
    auto Fq = FiniteField::make(p, mod);
    std::vector<FFElem> all{Fq->zero()};
    std::vector<int64_t> digits(static_cast<size_t>(Fq->k()), 0);
    while (true) {
      size_t i = 0;
      while (i < digits.size() && ++digits[i] == p) digits[i++] = 0;
      if (i == digits.size()) break;
      all.push_back(Fq->from_coeffs(digits));
    }
    for (const auto& c : all) {
      FFElem d = Fq->frobenius_inverse(c);
      CHECK(Fq->pow(d, Int(static_cast<long>(p))) == c);
    }
  }
}

TEST_CASE("extend_field spec cases") {
  auto Q2 = make_field(Int(2), 1, {0, 1});
  auto [F3, emb] = extend_field(Q2, 3, {0, 1});
  CHECK(F3->e() == 3);
  /* pi'^3 = 2 and the embedding is the identity on Q */
  FieldElement two(Q2, Rat(2));
  CHECK(emb.apply(two) == FieldElement(F3, Rat(2)));
  CHECK(FieldElement::pi_pow(F3, 3) == FieldElement(F3, Rat(2)));

  auto F31 = make_field(Int(2), 3, {0, 1});
  auto [F32, emb2] = extend_field(F31, 3, {1, 1, 1});
  CHECK(F32->k() == 2);
  CHECK(emb2.apply(FieldElement::pi_pow(F31, 2)) == FieldElement::pi_pow(F32, 2));

  auto F2e2 = make_field(Int(2), 2, {0, 1});
  CHECK_THROWS_AS(extend_field(F2e2, 3, {0, 1}), error);
}

TEST_CASE("field axioms on random elements") {
  std::mt19937 rng(7);
  for (auto [p, e, mod] : {std::tuple<long, int, std::vector<int64_t>>{2, 3, {0, 1}},
                           {3, 2, {0, 1}},
                           {2, 2, {1, 1, 1}},
                           {5, 1, {3, 1}}}) {
    auto F = make_field(Int(p), e, mod);
    for (int it = 0; it < 20; ++it) {
      FieldElement a = random_element(F, rng);
      FieldElement b = random_element(F, rng);
      FieldElement c = random_element(F, rng);
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      if (!a.is_zero()) CHECK(a * a.inverse() == FieldElement::one(F));
    }
  }
}

TEST_CASE("valuation is multiplicative and ultrametric") {
  std::mt19937 rng(11);
  auto F = make_field(Int(2), 3, {1, 1, 1});
  for (int it = 0; it < 40; ++it) {
    FieldElement a = random_element(F, rng);
    FieldElement b = random_element(F, rng);
    if (a.is_zero() || b.is_zero()) continue;
    CHECK((a * b).valuation() == a.valuation() + b.valuation());
    Valuation vs = (a + b).valuation();
    CHECK(vs >= min(a.valuation(), b.valuation()));
    if (!(a.valuation() == b.valuation()))
      CHECK(vs == min(a.valuation(), b.valuation()));
  }
}

TEST_CASE("residue is a ring homomorphism on integral elements") {
  std::mt19937 rng(13);
  auto F = make_field(Int(3), 2, {1, 0, 1});
  const auto& R = F->residue_field();
  auto random_integral = [&]() {
    while (true) {
      FieldElement a = random_element(F, rng);
      Valuation v = a.valuation();
      if (!v.is_finite() || v.value() >= 0) return a;
    }
  };
  for (int it = 0; it < 30; ++it) {
    FieldElement a = random_integral();
    FieldElement b = random_integral();
    CHECK((a + b).residue() == R->add(a.residue(), b.residue()));
    CHECK((a * b).residue() == R->mul(a.residue(), b.residue()));
  }
}

TEST_CASE("embeddings preserve valuation and residue") {
  std::mt19937 rng(17);
  auto F = make_field(Int(2), 3, {1, 1, 1});
  auto [G, emb] = extend_ramification(F, 6);
  /* exact unramified step over a k = 2 base */
  FFPoly phi = ffpoly_zero(F->residue_field());
  {
    const auto& R = F->residue_field();
    for (int64_t c1 = 0; c1 < 2 && phi.is_zero(); ++c1)
      for (int64_t c0 = 0; c0 < 2 && phi.is_zero(); ++c0) {
        FFPoly cand = ffpoly_from(
            R, {R->mul(R->gen(), R->from_int(c0 + 1)), R->from_int(c1), R->one()});
        if (ffpoly_is_irreducible(cand)) phi = cand;
      }
  }
  REQUIRE(!phi.is_zero());
  auto [H, emb2] = adjoin_residue_root(F, phi);
  CHECK(H->k() == 4);

  for (int it = 0; it < 15; ++it) {
    FieldElement a = random_element(F, rng);
    for (const FieldEmbedding* e : {&emb, &emb2}) {
      FieldElement img = e->apply(a);
      CHECK(img.valuation() == a.valuation());
      Valuation v = a.valuation();
      if (!v.is_finite() || v.value() >= 0)
        CHECK(img.residue() == e->apply_residue(a.residue()));
    }
    FieldElement b = random_element(F, rng);
    CHECK(emb2.apply(a * b) == emb2.apply(a) * emb2.apply(b));
    CHECK(emb2.apply(a + b) == emb2.apply(a) + emb2.apply(b));
  }
}

TEST_CASE("truncate keeps a congruent element") {
  std::mt19937 rng(23);
  auto F = make_field(Int(2), 3, {0, 1});
  for (int it = 0; it < 20; ++it) {
    FieldElement a = random_element(F, rng, 40);
    FieldElement t = a.truncate(Rat(5));
    FieldElement d = a - t;
    Valuation v = d.valuation();
    CHECK((!v.is_finite() || v.value() >= 5));
  }
}
