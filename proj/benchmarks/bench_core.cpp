#include <benchmark/benchmark.h>

#include "stablered/monopoly.hpp"
#include "stablered/padic_roots.hpp"
#include "stablered/pipeline.hpp"

using namespace stablered;

namespace {

FieldPtr field_q2_e3() { return make_field(Int(2), 3, {0, 1}); }

Poly cubic_fixture(const FieldPtr& F) {
  return Poly::from_rationals(F, {Rat(1), Rat(0), Rat(0), Rat(1)}, Var::X0);
}

void BM_FieldMul(benchmark::State& state) {
  auto F = make_field(Int(2), static_cast<int>(state.range(0)), {0, 1});
  FieldElement a = FieldElement::pi_pow(F, 1) + FieldElement(F, Rat(3, 7));
  FieldElement b = FieldElement::pi_pow(F, 2) + FieldElement(F, Rat(5, 11));
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_FieldMul)->Arg(3)->Arg(15)->Arg(45);

void BM_FieldInverse(benchmark::State& state) {
  auto F = make_field(Int(2), static_cast<int>(state.range(0)), {0, 1});
  FieldElement a = FieldElement::pi_pow(F, 1) + FieldElement(F, Rat(3, 7));
  for (auto _ : state) benchmark::DoNotOptimize(a.inverse());
}
BENCHMARK(BM_FieldInverse)->Arg(3)->Arg(15);

void BM_PolyGcd(benchmark::State& state) {
  auto F = field_q2_e3();
  Poly f = Poly::from_rationals(F, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)}, Var::Y);
  Poly g = f.derivative() * f + f.derivative();
  for (auto _ : state) benchmark::DoNotOptimize(poly_gcd(f, g));
}
BENCHMARK(BM_PolyGcd);

void BM_SpecialDecomposition(benchmark::State& state) {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = Poly::from_rationals(F, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)}, Var::X0);
  RepData rd = min_reps(5, Int(2));
  for (auto _ : state) benchmark::DoNotOptimize(special_decomposition(f, rd));
}
BENCHMARK(BM_SpecialDecomposition);

void BM_MonodromyPolynomial(benchmark::State& state) {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = Poly::from_rationals(F, {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)}, Var::X0);
  RepData rd = min_reps(5, Int(2));
  for (auto _ : state) {
    SpecialDecomposition dec = special_decomposition(f, rd);
    normalize_tail(dec);
    MonodromyData md = logderiv_parts(f);
    monodromy_polynomial(dec, md);
    benchmark::DoNotOptimize(md);
  }
}
BENCHMARK(BM_MonodromyPolynomial);

void BM_IsolateRootsCubic(benchmark::State& state) {
  auto F = make_field(Int(2), 1, {0, 1});
  Poly f = cubic_fixture(F);
  RepData rd = min_reps(3, Int(2));
  SpecialDecomposition dec = special_decomposition(f, rd);
  normalize_tail(dec);
  MonodromyData md = logderiv_parts(f);
  monodromy_polynomial(dec, md);
  for (auto _ : state) {
    auto tower = std::make_shared<FieldTower>(F, 1024, std::nullopt);
    benchmark::DoNotOptimize(isolate_roots(md.L, tower));
  }
}
BENCHMARK(BM_IsolateRootsCubic);

void BM_PipelineCubic(benchmark::State& state) {
  JobSpec job;
  job.p = 2;
  job.e = 1;
  job.residue_modulus = {0, 1};
  job.f_text = "1 + X^3";
  for (auto _ : state) benchmark::DoNotOptimize(run(job));
}
BENCHMARK(BM_PipelineCubic);

}  // namespace

BENCHMARK_MAIN();
