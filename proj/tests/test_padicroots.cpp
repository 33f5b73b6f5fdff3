#include <doctest.h>

#include "stablered/errors.hpp"
#include "stablered/monopoly.hpp"
#include "stablered/padic_roots.hpp"

using namespace stablered;

namespace {

Poly mk(const FieldPtr& F, std::vector<long> c, Var v = Var::Y) {
  std::vector<Rat> q(c.begin(), c.end());
  return Poly::from_rationals(F, q, v);
}

RootSet isolate(const FieldPtr& F, const Poly& f) {
  auto tower = std::make_shared<FieldTower>(F, 1024, std::nullopt);
  return isolate_roots(f, tower);
}

}  // namespace

TEST_CASE("slope_split fixtures") {
  {
    auto F = make_field(Int(2), 1, {0, 1});
    /* 3Y^4 + 12Y after removing the zero root: 3Y^3 + 12 */
    auto branches = slope_split(mk(F, {12, 0, 0, 3}));
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].slope == Rat(-2, 3));
    CHECK(branches[0].length == 3);
    CHECK(branches[0].residual.degree() == 1);
  }
  {
    auto F = make_field(Int(3), 1, {0, 1});
    auto branches = slope_split(mk(F, {-3, 0, 1}));  // Y^2 - p
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].slope == Rat(-1, 2));
    CHECK(branches[0].length == 2);
    CHECK(branches[0].residual.degree() == 1);
    CHECK(ffpoly_is_irreducible(branches[0].residual));
  }
  {
    auto F = make_field(Int(2), 1, {0, 1});
    /* (Y-1)(Y-p) = Y^2 - 3Y + 2 at p = 2 */
    auto branches = slope_split(mk(F, {2, -3, 1}));
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].slope == Rat(-1));
    CHECK(branches[1].slope == Rat(0));
  }
}

TEST_CASE("isolate 3Y^4 + 12Y over Q2") {
  auto F = make_field(Int(2), 1, {0, 1});
  RootSet rs = isolate(F, mk(F, {0, 12, 0, 0, 3}));
  REQUIRE(rs.root_count() == 4);
  int exact_zero = 0, cubic = 0;
  for (const auto& r : rs.roots) {
    if (!r.slope.is_finite()) {
      ++exact_zero;
      CHECK(r.exact);
    } else {
      CHECK(r.slope == Valuation(Rat(2, 3)));
      cubic += static_cast<int>(r.count);
      CHECK(rs.tower->field(r.level)->e() % 3 == 0);
    }
  }
  CHECK(exact_zero == 1);
  CHECK(cubic == 3);
}

TEST_CASE("isolate exact and rational roots") {
  auto F = make_field(Int(2), 1, {0, 1});
  {
    RootSet rs = isolate(F, mk(F, {0, -1, 1}));  // Y^2 - Y
    REQUIRE(rs.size() == 2);
    for (const auto& r : rs.roots) CHECK(r.exact);
  }
  {
    RootSet rs = isolate(F, mk(F, {-2, 0, 1}));  // Y^2 - 2: roots +-pi in e = 2
    CHECK(rs.root_count() == 2);
    for (const auto& r : rs.roots) CHECK(r.slope == Valuation(Rat(1, 2)));
  }
}

TEST_CASE("multiplicities from squarefree decomposition") {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = mk(F, {-1, 1}) * mk(F, {-1, 1}) * mk(F, {-3, 1});
  RootSet rs = isolate(F, f);
  long total = 0;
  for (const auto& r : rs.roots) total += r.count * r.multiplicity;
  CHECK(total == 3);
  bool saw_double = false;
  for (const auto& r : rs.roots)
    if (r.multiplicity == 2) saw_double = true;
  CHECK(saw_double);
}

TEST_CASE("certified evaluation fixtures") {
  auto F = make_field(Int(2), 1, {0, 1});
  RootSet rs = isolate(F, mk(F, {0, 12, 0, 0, 3}));
  Poly s0 = mk(F, {1, 0, 0, 1});   // 1 + Y^3
  Poly N2 = mk(F, {0, 4, 0, 0, 1});  // Y^4 + 4Y = N_2

  size_t zero_idx = rs.size(), cubic_idx = rs.size();
  for (size_t i = 0; i < rs.size(); ++i) {
    if (!rs.roots[i].slope.is_finite())
      zero_idx = i;
    else
      cubic_idx = i;
  }
  REQUIRE(zero_idx < rs.size());
  REQUIRE(cubic_idx < rs.size());

  CHECK(certified_eval_valuation(rs, zero_idx, s0) == Valuation(Rat(0)));
  /* N_2 vanishes on every root of L (ExactZero) */
  CHECK(!certified_eval_valuation(rs, zero_idx, N2).is_finite());
  CHECK(!certified_eval_valuation(rs, cubic_idx, N2).is_finite());
  CHECK(certified_eval_valuation(rs, cubic_idx, s0) == Valuation(Rat(0)));
}

TEST_CASE("difference data fixtures") {
  auto F = make_field(Int(2), 1, {0, 1});
  {
    RootSet rs = isolate(F, mk(F, {0, 12, 0, 0, 3}));
    DifferenceData dd = difference_data(rs);
    for (size_t i = 0; i < rs.size(); ++i)
      for (size_t j = 0; j < rs.size(); ++j) {
        if (i == j) continue;
        for (const auto& [v, c] : dd.per[i][j].entries) CHECK(v == Valuation(Rat(2, 3)));
      }
  }
  {
    RootSet rs = isolate(F, mk(F, {0, -1, 1}));  // roots 0, 1
    DifferenceData dd = difference_data(rs);
    CHECK(dd.per[0][1].entries == std::vector<std::pair<Valuation, long>>{{Valuation(Rat(0)), 1}});
  }
  {
    RootSet rs = isolate(F, mk(F, {-1, 1}));
    CHECK(rs.size() == 1);
    DifferenceData dd = difference_data(rs);
    CHECK(dd.per[0][0].entries.empty());
  }
}

TEST_CASE("root valuations match the polygon on products") {
  auto F = make_field(Int(2), 1, {0, 1});
  /* isolate_roots asserts the polygon multiset internally; exercise a mix */
  Poly f = mk(F, {2, 1}) * mk(F, {-1, 1}) * mk(F, {-2, 0, 1}) * mk(F, {0, 1});
  RootSet rs = isolate(F, f);
  CHECK(rs.root_count() == 5);
  /* refine all and re-check certificates survive refinement */
  for (size_t i = 0; i < rs.size(); ++i) {
    rs.refine(i, Rat(20));
    const auto& r = rs.roots[i];
    if (r.kind == ApproxRoot::Kind::single && !r.exact) CHECK(r.gamma >= 20);
  }
}

TEST_CASE("gamma exceeds the slope") {
  auto F = make_field(Int(2), 1, {0, 1});
  RootSet rs = isolate(F, mk(F, {0, 12, 0, 0, 3}));
  for (const auto& r : rs.roots) {
    if (r.kind != ApproxRoot::Kind::single || r.exact || !r.slope.is_finite()) continue;
    CHECK(Valuation(r.gamma) > r.slope);
  }
}

TEST_CASE("branch entries for wild clusters") {
  /* the genus-2 fixture: all 16 roots form one certified-irreducible branch */
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = Poly::from_rationals(F, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)}, Var::X0);
  RepData rd = min_reps(5, Int(2));
  SpecialDecomposition dec = special_decomposition(f, rd);
  normalize_tail(dec);
  MonodromyData md = logderiv_parts(f);
  monodromy_polynomial(dec, md);
  auto tower = std::make_shared<FieldTower>(F, 1024, std::nullopt);
  RootSet rs = isolate_roots(md.L, tower);
  REQUIRE(rs.size() == 1);
  const auto& r = rs.roots[0];
  CHECK(r.kind == ApproxRoot::Kind::branch);
  CHECK(r.transitive);
  CHECK(r.count == 16);
  CHECK(r.slope == Valuation(Rat(3, 8)));
  /* within-cluster differences form an ultrametric-consistent profile */
  DifferenceData dd = difference_data(rs);
  CHECK(dd.per[0][0].total() == 15);
}
