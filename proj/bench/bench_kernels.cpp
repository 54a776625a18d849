// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "lightcone/kernels.hpp"
#include "lightcone/lattice.hpp"
#include "lightcone/sequences.hpp"

using namespace lightcone;

namespace {

OperatorSum chain_hamiltonian(int n) {
  ModelSpec s;
  s.family = ModelFamily::random_sign_xx;
  s.n_sites = n;
  s.alpha = 3.0;
  return build_model(s).hamiltonian();
}

std::vector<DenseMatrix> observables(int n, int count) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<DenseMatrix> out;
  for (int c = 0; c < count; ++c) {
    DenseMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

std::vector<kernels::ProbeRequest> requests(int n, int count) {
  std::vector<kernels::ProbeRequest> out;
  for (int c = 0; c < count; ++c)
    for (int site = 0; site < n; ++site)
      for (auto p : {Pauli::X, Pauli::Z}) out.push_back({static_cast<std::size_t>(c), static_cast<std::size_t>(site), p});
  return out;
}

void BM_DenseSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto terms = kernels::masked_terms(chain_hamiltonian(static_cast<int>(n)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dense_from_terms_serial(terms, n));
}

void BM_DenseParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto terms = kernels::masked_terms(chain_hamiltonian(static_cast<int>(n)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dense_from_terms(terms, n));
}

void BM_ProbeSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto obs = observables(n, 2);
  const auto req = requests(n, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::probe_commutator_norms_serial(obs, static_cast<std::size_t>(n), req));
}

void BM_ProbeParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto obs = observables(n, 2);
  const auto req = requests(n, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::probe_commutator_norms(obs, static_cast<std::size_t>(n), req));
}

void BM_ApplySerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto terms = kernels::masked_terms(chain_hamiltonian(static_cast<int>(n)));
  const Eigen::VectorXcd v = Eigen::VectorXcd::Random(Eigen::Index{1} << n);
  Eigen::VectorXcd out;
  for (auto _ : state) {
    kernels::apply_terms_serial(terms, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ApplyParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto terms = kernels::masked_terms(chain_hamiltonian(static_cast<int>(n)));
  const Eigen::VectorXcd v = Eigen::VectorXcd::Random(Eigen::Index{1} << n);
  Eigen::VectorXcd out;
  for (auto _ : state) {
    kernels::apply_terms(terms, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CoverageSerial(benchmark::State& state) {
  const auto th = long_thresholds(4.0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(verify_coverage_serial(th, static_cast<int>(state.range(0))));
}

void BM_CoverageParallel(benchmark::State& state) {
  const auto th = long_thresholds(4.0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(verify_coverage(th, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_DenseSerial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseParallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbeSerial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbeParallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplySerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyParallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSerial)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageParallel)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
