#include <doctest.h>

#include "stablered/errors.hpp"
#include "stablered/monodromy_bound.hpp"
#include "stablered/pipeline.hpp"

using namespace stablered;

TEST_CASE("remark_gg_case") {
  {
    RemarkCase rc = remark_gg_case(5, Int(2));
    CHECK(rc.l == 1);
    CHECK(rc.s == 2);
    CHECK(rc.d == 1);
    CHECK(rc.case_label == 3);
    CHECK(rc.wild_bound_exponent == 5);
    CHECK(!rc.ambiguous);
  }
  {
    RemarkCase rc = remark_gg_case(4, Int(3));
    CHECK(rc.d == 1);
    CHECK(rc.s == 1);
    CHECK(rc.l == 1);
    CHECK(rc.wild_bound_exponent == 3);
  }
  {
    /* p | m: the decomposition is ambiguous; documented rule picks d = p-1 */
    RemarkCase rc = remark_gg_case(3, Int(3));
    CHECK(rc.ambiguous);
    CHECK(rc.d == 2);
    CHECK(rc.case_label == 1);
    CHECK(rc.wild_bound_exponent == 1);
  }
  {
    /* p = 2 forces d = 1 even when 2 | m: not ambiguous */
    RemarkCase rc = remark_gg_case(4, Int(2));
    CHECK(!rc.ambiguous);
    CHECK(rc.d == 1);
    CHECK(rc.s == 0);
    CHECK(rc.l == 3);
    CHECK(rc.case_label == 2);
    CHECK(rc.wild_bound_exponent == 0);  // s with p = 2
  }
}

TEST_CASE("bound report for the cubic fixture") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  Report rep = run(job);
  REQUIRE(rep.exit_code == 0);
  REQUIRE(rep.bound.slope_denominators.size() == 1);
  CHECK(rep.bound.slope_denominators[0] == 3);
  REQUIRE(rep.bound.radius_denominators.size() == 1);
  CHECK(rep.bound.radius_denominators[0] == 3);
  std::vector<long> fam = rep.bound.branch_degrees;
  std::sort(fam.begin(), fam.end());
  CHECK(fam == std::vector<long>{1, 3});
  CHECK(rep.bound.degree_bound == 18);
  CHECK(rep.bound.s0_valuations.size() == 1);
  CHECK(rep.bound.s0_valuations[0] == Rat(0));
  CHECK(rep.bound.s0_residue_pth_power[0]);
}

TEST_CASE("degree bound is monotone under base escalation") {
  /* the same cover over the e = 3 base: every relative denominator shrinks,
   * so the reported bound cannot grow */
  JobSpec base;
  base.p = 2;
  base.e = 1;
  base.residue_modulus = {0, 1};
  base.f_text = "1 + X^3";
  Report r1 = run(base);
  REQUIRE(r1.exit_code == 0);

  JobSpec big = base;
  big.e = 3;
  Report r2 = run(big);
  REQUIRE(r2.exit_code == 0);
  CHECK(r2.bound.degree_bound <= r1.bound.degree_bound);
}
