// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "spectra/dimension.hpp"
#include "spectra/treemap.hpp"
#include "spectra/verify.hpp"

using namespace spectra;

namespace {

std::vector<LabeledPoint> canonical(const MatrixParams& p, SpectrumBound b) {
  return enumerate_spectrum(TreeMappingSpec::canonical(), p, b).labeled();
}

void BM_orthogonality_omp(benchmark::State& st) {
  const MatrixParams p(1, 2);
  const auto pts = canonical(p, SpectrumBound::range(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(check_orthogonality(pts, p).pairs_checked);
}

void BM_orthogonality_serial(benchmark::State& st) {
  const MatrixParams p(1, 2);
  const auto pts = canonical(p, SpectrumBound::range(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(check_orthogonality_serial(pts, p).pairs_checked);
}

struct BallSetup {
  MatrixParams p{1, 2};
  std::vector<LabeledPoint> pts;
  std::vector<long double> scales;
  explicit BallSetup(int level) : pts(canonical(p, SpectrumBound::level(level))) {
    long double h = 1;
    for (int j = 1; j <= level; ++j) scales.push_back(h *= 6);
  }
};

void BM_ball_counts_omp(benchmark::State& st) {
  const BallSetup s(static_cast<int>(st.range(0)));
  PointCloud cloud(s.pts, s.p);
  const auto centers = select_centers(cloud, {});
  for (auto _ : st) benchmark::DoNotOptimize(ball_counts(cloud, centers, s.scales, 1e9).max_count.size());
}

void BM_ball_counts_serial(benchmark::State& st) {
  const BallSetup s(static_cast<int>(st.range(0)));
  PointCloud cloud(s.pts, s.p);
  const auto centers = select_centers(cloud, {});
  for (auto _ : st) benchmark::DoNotOptimize(ball_counts_serial(cloud, centers, s.scales, 1e9).max_count.size());
}

void BM_gram_omp(benchmark::State& st) {
  const MatrixParams p(1, 2);
  const int n = static_cast<int>(st.range(0));
  const auto pts = canonical(p, SpectrumBound::level(n));
  for (auto _ : st) benchmark::DoNotOptimize(gram_unitarity(n, pts, p));
}

void BM_gram_serial(benchmark::State& st) {
  const MatrixParams p(1, 2);
  const int n = static_cast<int>(st.range(0));
  const auto pts = canonical(p, SpectrumBound::level(n));
  for (auto _ : st) benchmark::DoNotOptimize(gram_unitarity_serial(n, pts, p));
}

}  // namespace

BENCHMARK(BM_orthogonality_omp)->Arg(121)->Arg(364)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_orthogonality_serial)->Arg(121)->Arg(364)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ball_counts_omp)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ball_counts_serial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_omp)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_serial)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
