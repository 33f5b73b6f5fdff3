#include <doctest.h>

#include <json.hpp>

#include "stablered/errors.hpp"
#include "stablered/pipeline.hpp"

using namespace stablered;

TEST_CASE("parse_poly grammar") {
  auto F = make_field(Int(2), 15, {0, 1});
  {
    Poly f = parse_poly("1 + X^4 + X^5", F);
    CHECK(f.degree() == 5);
    CHECK(f.coeff(4) == FieldElement::one(F));
  }
  {
    Poly f = parse_poly("1 + pi^9*X^2 + pi^18*X^3 + X^5", F);
    CHECK(f.coeff(2) == FieldElement::pi_pow(F, 9));
    CHECK(f.coeff(3) == FieldElement::pi_pow(F, 18));
  }
  {
    Poly f = parse_poly("3/4*X^2 - 2*X + 1", F);
    CHECK(f.coeff(2) == FieldElement(F, Rat(3, 4)));
    CHECK(f.coeff(1) == FieldElement(F, Rat(-2)));
  }
  CHECK_THROWS_AS(parse_poly("1 + q*X", F), error);

  auto Fk = make_field(Int(2), 1, {1, 1, 1});
  Poly g = parse_poly("u*X + u^2", Fk);
  CHECK(g.coeff(1) == FieldElement::u_gen(Fk));
}

TEST_CASE("jobspec JSON round trip") {
  std::string text = R"({
    "field": {"p": 2, "e": 15, "residue_modulus": [0, 1]},
    "f": "1 + pi^9*X^2 + X^3 + pi^6*X^4 + X^5",
    "options": {"max_extension": 512, "threads": 2}
  })";
  JobSpec job = jobspec_from_json(text);
  CHECK(job.p == 2);
  CHECK(job.e == 15);
  CHECK(job.max_extension == 512);
  CHECK(job.threads == 2);
  std::string s1 = jobspec_to_json(job);
  std::string s2 = jobspec_to_json(jobspec_from_json(s1));
  CHECK(s1 == s2);
}

TEST_CASE("run on the cubic fixture") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  Report rep = run(job);
  REQUIRE(rep.exit_code == 0);
  CHECK(rep.n == 3);
  CHECK(rep.m == 3);
  CHECK(rep.r == 1);
  CHECK(rep.alpha == 1);
  CHECK(rep.genus_c == Rat(1));
  REQUIRE(rep.components.size() == 1);
  CHECK(rep.components[0].genus == 1);
  CHECK(rep.components[0].conductor == 3);
  CHECK(rep.components[0].radius == "2/3");
  CHECK(rep.congruence_ok);
  CHECK(rep.genus_sum_ok);
  CHECK(rep.all_verified);
  CHECK(!rep.reduction_type.has_value());
  /* L = 3Y^4 + 12Y */
  CHECK(rep.L_coeffs == std::vector<std::string>{"0", "12", "0", "0", "3"});
}

TEST_CASE("run rejects bad input with exit code 1") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "X^2";
  Report rep = run(job);
  CHECK(rep.exit_code == 1);
  CHECK(rep.error_code == "MultiplicityDivisibleByP");
}

TEST_CASE("reports are deterministic across runs and thread counts") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  auto strip = [](const Report& r) {
    nlohmann::json j = nlohmann::json::parse(report_to_json(r));
    j.erase("timings_ms");
    j["input"]["options"].erase("threads");
    return j.dump();
  };
  Report r1 = run(job);
  Report r2 = run(job);
  job.threads = 2;
  Report r3 = run(job);
  CHECK(strip(r1) == strip(r2));
  CHECK(strip(r1) == strip(r3));
}

TEST_CASE("coefficient-matrix polynomial input") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_coeffs = {{{"1"}}, {{"0"}}, {{"0"}}, {{"1"}}};
  Report rep = run(job);
  CHECK(rep.exit_code == 0);
  CHECK(rep.n == 3);
}

TEST_CASE("dot export shape") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  Report rep = run(job);
  REQUIRE(rep.exit_code == 0);
  std::string dot = tree_to_dot(rep.tree);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("g=1 d=2/3") != std::string::npos);
  CHECK(dot.find("g=0 d=0") != std::string::npos);
  CHECK(dot.find("n0 -> n1") != std::string::npos);
}

TEST_CASE("report JSON carries the schema essentials") {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  job.emit_fixture = true;
  Report rep = run(job);
  nlohmann::json j = nlohmann::json::parse(report_to_json(rep));
  for (const char* key : {"n", "m", "r", "alpha", "genus", "monodromy_polynomial",
                          "newton_polygon", "roots", "components", "tree", "monodromy_bound",
                          "checks", "timings_ms", "fixture"})
    CHECK(j.contains(key));
  CHECK(j["checks"]["congruence"].get<bool>());
  CHECK(j["roots"].size() >= 1);
  CHECK(j["roots"][0].contains("value_coeffs"));
}
