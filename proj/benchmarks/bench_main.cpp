#include <benchmark/benchmark.h>

#include <random>

#include "hbm/body.hpp"
#include "hbm/corpus.hpp"
#include "hbm/domain.hpp"
#include "hbm/inequality.hpp"
#include "hbm/solver.hpp"
#include "hbm/spectrum.hpp"

namespace {

hbm::SupportField bench_body(const hbm::DomainPtr& dom, unsigned seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dom->basis_count);
  c[0] = std::sqrt(dom->sphere_area());
  int top = dom->dim == 2 ? dom->index_of(4, 1) : dom->index_of(4, 4);
  Eigen::VectorXd bump = Eigen::VectorXd::Zero(dom->basis_count);
  for (int i = 1; i <= top; ++i) bump[i] = gauss(rng);
  bump *= amplitude / bump.norm();
  return hbm::body_from_coeffs(dom, c + bump);
}

// Domains are cached per (dim, lmax), so this measures the lookup, which is
// what every factory call after the first actually pays.
void BM_DomainLookup(benchmark::State& state) {
  int dim = (int)state.range(0), lmax = (int)state.range(1);
  hbm::make_domain(dim, lmax);
  for (auto _ : state) {
    auto dom = hbm::make_domain(dim, lmax);
    benchmark::DoNotOptimize(dom);
  }
}
BENCHMARK(BM_DomainLookup)->Args({2, 32})->Args({3, 12});

// Body construction: synthesis of values plus the full derivative jet and
// convexity validation. This is the per-case cost floor of the corpus.
void BM_BodyFromCoeffs(benchmark::State& state) {
  auto dom = hbm::make_domain((int)state.range(0), (int)state.range(1));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dom->basis_count);
  c[0] = std::sqrt(dom->sphere_area());
  int top = dom->dim == 2 ? dom->index_of(4, 1) : dom->index_of(4, 4);
  Eigen::VectorXd bump = Eigen::VectorXd::Zero(dom->basis_count);
  for (int i = 1; i <= top; ++i) bump[i] = gauss(rng);
  bump *= 0.15 / bump.norm();
  c += bump;
  for (auto _ : state) {
    auto K = hbm::body_from_coeffs(dom, c);
    benchmark::DoNotOptimize(K);
  }
}
BENCHMARK(BM_BodyFromCoeffs)->Args({2, 32})->Args({3, 12})->Args({3, 16});

void BM_Assemble(benchmark::State& state) {
  auto dom = hbm::make_domain((int)state.range(0), (int)state.range(1));
  hbm::SupportField K = bench_body(dom, 11, 0.15);
  for (auto _ : state) {
    auto op = hbm::assemble(K);
    benchmark::DoNotOptimize(op);
  }
}
BENCHMARK(BM_Assemble)->Args({2, 32})->Args({3, 12})->Args({3, 16});

void BM_Spectrum(benchmark::State& state) {
  auto dom = hbm::make_domain((int)state.range(0), (int)state.range(1));
  auto op = hbm::assemble(bench_body(dom, 11, 0.15));
  for (auto _ : state) {
    auto S = hbm::spectrum(op, (int)state.range(2));
    benchmark::DoNotOptimize(S);
  }
}
BENCHMARK(BM_Spectrum)->Args({2, 32, 10})->Args({3, 12, 16})->Args({3, 16, 16});

void BM_Lambda2(benchmark::State& state) {
  auto dom = hbm::make_domain(3, (int)state.range(0));
  hbm::SupportField K = bench_body(dom, 11, 0.15);
  for (auto _ : state) benchmark::DoNotOptimize(hbm::lambda2(K));
}
BENCHMARK(BM_Lambda2)->Arg(12)->Arg(16);

void BM_MinkowskiSecondStability(benchmark::State& state) {
  auto dom = hbm::make_domain(3, (int)state.range(0));
  hbm::SupportField K = bench_body(dom, 11, 0.15);
  hbm::SupportField L = bench_body(dom, 12, 0.12);
  for (auto _ : state) {
    auto r = hbm::minkowski_second_stability(K, L);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MinkowskiSecondStability)->Arg(12)->Arg(16);

void BM_ClassifyPlanar(benchmark::State& state) {
  double p = -(double)state.range(0);
  for (auto _ : state) {
    auto C = hbm::classify_planar(p);
    benchmark::DoNotOptimize(C);
  }
}
BENCHMARK(BM_ClassifyPlanar)->Arg(10)->Arg(20)->Arg(34)->Unit(benchmark::kMillisecond);

void BM_SolveSphere(benchmark::State& state) {
  auto dom = hbm::make_domain(3, 10);
  hbm::SupportField K0 = hbm::make_perturbed_ball(dom, {{2, 1, 0.1}});
  for (auto _ : state) {
    auto rep = hbm::solve_sphere(-2.0, K0);
    benchmark::DoNotOptimize(rep);
  }
}
BENCHMARK(BM_SolveSphere)->Unit(benchmark::kMillisecond);

void BM_InequalityCorpus(benchmark::State& state) {
  hbm::CorpusOptions opt;
  opt.dim = 3;
  opt.lmax = 12;
  opt.cases = (int)state.range(0);
  opt.threads = (int)state.range(1);
  for (auto _ : state) {
    auto s = hbm::run_inequality_corpus(opt);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * opt.cases);
}
BENCHMARK(BM_InequalityCorpus)->Args({40, 1})->Args({40, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
