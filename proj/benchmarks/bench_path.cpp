#include "lassodf/lassodf.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

using namespace lassodf;

namespace {

const StandardizedDataset& diabetes(bool expanded) {
  static const RawDataset raw = load_diabetes(LASSODF_DATA_DIR "/diabetes.csv");
  static const StandardizedDataset narrow = standardize(raw);
  static const StandardizedDataset wide = standardize(expand_quadratic(raw, true));
  return expanded ? wide : narrow;
}

StandardizedDataset gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = z(rng);
  Eigen::VectorXd y = X.leftCols(p / 2).rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) y(i) += z(rng);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return standardize(make_raw_dataset(std::move(X), std::move(y), std::move(names)));
}

}  // namespace

static void BM_PathDiabetes(benchmark::State& state) {
  const StandardizedDataset& ds = diabetes(state.range(0) != 0);
  for (auto _ : state) {
    LassoPath path = compute_path(ds);
    benchmark::DoNotOptimize(path.num_knots());
  }
}
BENCHMARK(BM_PathDiabetes)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_PathGaussian(benchmark::State& state) {
  const StandardizedDataset ds = gaussian(4 * state.range(0), state.range(0), 3);
  for (auto _ : state) {
    LassoPath path = compute_path(ds);
    benchmark::DoNotOptimize(path.num_knots());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PathGaussian)->RangeMultiplier(2)->Range(8, 128)->Complexity()->Unit(benchmark::kMicrosecond);

static void BM_SelectCp(benchmark::State& state) {
  const StandardizedDataset& ds = diabetes(true);
  const LassoPath path = compute_path(ds);
  const double s2 = estimate_sigma2(ds);
  for (auto _ : state) benchmark::DoNotOptimize(select_optimal(path, Criterion::cp, s2).chosen_m);
}
BENCHMARK(BM_SelectCp)->Unit(benchmark::kMicrosecond);

// Cost per Monte Carlo replication on a 10-point grid.
static void BM_MonteCarlo(benchmark::State& state) {
  const StandardizedDataset& ds = diabetes(state.range(0) != 0);
  const OlsFit ols = ols_fit(*ds.design(), ds.y());
  const SyntheticModel model = make_synthetic_model(ds.design(), ols.beta, std::sqrt(ols.sigma2));
  const std::vector<double> grid = default_grid(model, 1, 10);
  MonteCarloOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_df_mc(model, grid, 100, 7, opts).df_mc);
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_CholeskyUpdate(benchmark::State& state) {
  const auto p = state.range(0);
  const StandardizedDataset ds = gaussian(4 * p, p, 5);
  const Eigen::MatrixXd G = ds.X().transpose() * ds.X();
  for (auto _ : state) {
    CholFactor f;
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::VectorXd cross(j);
      for (Eigen::Index i = 0; i < j; ++i) cross(i) = G(i, j);
      f = f.add_column(cross, G(j, j), static_cast<int>(j));
    }
    for (Eigen::Index j = 0; j < p; j += 2) f = f.drop_column(0);
    benchmark::DoNotOptimize(f.size());
  }
}
BENCHMARK(BM_CholeskyUpdate)->RangeMultiplier(4)->Range(16, 256);

BENCHMARK_MAIN();
