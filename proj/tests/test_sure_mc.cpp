#include "support.hpp"

#include "lassodf/error.hpp"
#include "lassodf/lars_path.hpp"
#include "lassodf/sure_mc.hpp"

#include <doctest.h>

#include <set>

using namespace lassodf;

namespace {

SyntheticModel orthonormal_model(std::uint64_t seed, Eigen::Index n, Eigen::Index p, double sigma) {
  support::Rng rng(seed);
  const Eigen::MatrixXd Q = support::orthonormal_centered(rng, n, p);
  Eigen::VectorXd beta = Eigen::VectorXd::LinSpaced(p, -2.0, 3.0);
  return make_synthetic_model(std::make_shared<const Design>(Q), beta, sigma);
}

SyntheticModel random_model(std::uint64_t seed, Eigen::Index n, Eigen::Index p, double rho) {
  support::Rng rng(seed);
  const StandardizedDataset ds = support::random_dataset(rng, n, p, rho);
  const Eigen::VectorXd beta = support::ols_qr(ds.X(), ds.y());
  const double sigma = (ds.y() - ds.X() * beta).norm() / std::sqrt(static_cast<double>(n - p));
  return make_synthetic_model(ds.design(), beta, sigma);
}

MonteCarloOptions serial() {
  MonteCarloOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST_CASE("synthesize") {
  const SyntheticModel noiseless = orthonormal_model(1, 10, 3, 0.0);
  CHECK(synthesize(noiseless, 5) == noiseless.mu_true);

  const SyntheticModel model = orthonormal_model(1, 5, 3, 2.0);
  CHECK(synthesize(model, 9) == synthesize(model, 9));
  CHECK(synthesize(model, 9) != synthesize(model, 10));

  const int B = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
  for (int b = 0; b < B; ++b) mean += synthesize(model, replication_seed(3, b));
  mean /= B;
  CHECK((mean - model.mu_true).cwiseAbs().maxCoeff() <= 4.0 * model.sigma / std::sqrt(double(B)));
}

TEST_CASE("replication seeds are distinct and depend on the master seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t b = 0; b < 5000; ++b) seen.insert(replication_seed(42, b));
  CHECK(seen.size() == 5000);
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("make_synthetic_model validates") {
  const SyntheticModel m = orthonormal_model(1, 6, 2, 1.0);
  CHECK_THROWS_AS(make_synthetic_model(m.design, Eigen::VectorXd::Zero(3), 1.0), DomainError);
  CHECK_THROWS_AS(make_synthetic_model(m.design, m.beta_true, -1.0), DomainError);
  CHECK_THROWS_AS(make_synthetic_model(nullptr, m.beta_true, 1.0), DomainError);
}

TEST_CASE("Monte Carlo df at the ends of the path") {
  const SyntheticModel model = random_model(2, 30, 5, 0.4);
  const MonteCarloReport r = estimate_df_mc(model, {0.0, 1e6}, 2000, 7, serial());
  CHECK(r.valid == 2000);
  CHECK(std::abs(r.df_mc[0] - 5.0) <= 3.0 * r.df_se[0]);
  CHECK(r.e_active[0] == 5.0);
  // The fit is identically zero, but the control variate still contributes
  // -beta'X'e per replication: zero only in expectation.
  CHECK(std::abs(r.df_mc[1]) <= 3.0 * r.df_se[1]);
  CHECK(r.e_active[1] == 0.0);
  CHECK(r.se[0] > 0.0);
  CHECK_THROWS_AS(estimate_df_mc(model, {0.0}, 1, 7), DomainError);
  CHECK_THROWS_AS(estimate_df_mc(model, {-1.0}, 10, 7), DomainError);
}

TEST_CASE("orthonormal design: Monte Carlo df matches the closed form") {
  const SyntheticModel model = orthonormal_model(3, 20, 6, 1.0);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.8 * i);
  const MonteCarloReport r = estimate_df_mc(model, grid, 2000, 11, serial());
  const Eigen::VectorXd mu = model.beta_true;  // x_j'X beta on orthonormal columns
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double integrated = support::orthonormal_df_integrated(mu, model.sigma, grid[l]);
    double closed = 0.0;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      closed += support::normal_cdf((mu(j) - grid[l] / 2) / model.sigma) +
                support::normal_cdf(-(mu(j) + grid[l] / 2) / model.sigma);
    CHECK(integrated == doctest::Approx(closed).epsilon(1e-9));
    CHECK(std::abs(r.df_mc[l] - integrated) <= 3.0 * r.df_se[l]);
  }
}

TEST_CASE("Monte Carlo report is identical for any thread count") {
  const SyntheticModel model = random_model(4, 25, 6, 0.5);
  const std::vector<double> grid = default_grid(model, 5);
  MonteCarloOptions many;
  many.threads = 4;
  const MonteCarloReport a = estimate_df_mc(model, grid, 300, 5, serial());
  const MonteCarloReport b = estimate_df_mc(model, grid, 300, 5, many);
  CHECK(a.df_mc == b.df_mc);
  CHECK(a.bias == b.bias);
  CHECK(a.se == b.se);
  CHECK(a.e_active == b.e_active);
}

TEST_CASE("default grid") {
  const SyntheticModel model = random_model(6, 60, 12, 0.3);
  const std::vector<double> grid = default_grid(model, 1, 5);
  CHECK(grid.size() <= 5);
  CHECK(grid.back() == 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i - 1] > grid[i]);
  CHECK(default_grid(model, 1, 5) == grid);
  CHECK_THROWS_AS(default_grid(model, 1, 1), DomainError);
}

TEST_CASE("control variate: same mean, lower variance away from the null end") {
  const SyntheticModel model = random_model(7, 20, 3, 0.3);
  const double l0 = default_grid(model, 1).front();
  MonteCarloOptions zero = serial();
  zero.control = ControlVariate::zero;
  const std::vector<double> grid = {0.0, 0.1 * l0, 0.25 * l0, 0.98 * l0};
  const MonteCarloReport with = estimate_df_mc(model, grid, 50000, 3, serial());
  const MonteCarloReport without = estimate_df_mc(model, grid, 50000, 3, zero);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double combined = std::hypot(with.df_se[i], without.df_se[i]);
    CHECK(std::abs(with.df_mc[i] - without.df_mc[i]) <= 3.0 * combined);
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(with.df_se[i] < without.df_se[i]);
  // Next to lambda_0 the fit is nearly zero, so a = 0 is the closer control.
  CHECK(with.df_se[3] > without.df_se[3]);
}

TEST_CASE("degenerate replications are skipped up to the limit") {
  support::Rng rng(8);
  Eigen::MatrixXd X = support::gaussian_design(rng, 15, 3);
  X.col(2) = X.col(1);
  const StandardizedDataset ds = standardize(support::raw_from(X, support::normal_vector(rng, 15)));
  const SyntheticModel model = make_synthetic_model(ds.design(), Eigen::Vector3d(1, 1, 0), 1.0);
  CHECK_THROWS_AS(estimate_df_mc(model, {1.0}, 20, 1, serial()), DegeneracyError);
  MonteCarloOptions lenient = serial();
  lenient.max_skip_fraction = 1.0;
  const MonteCarloReport r = estimate_df_mc(model, {1.0}, 20, 1, lenient);
  CHECK(r.skipped_seeds.size() == 20);
  CHECK(r.valid == 0);
}

TEST_CASE("unbiasedness report") {
  MonteCarloReport r;
  r.lambdas = {3.0, 2.0, 1.0};
  r.bias = {0.0, 0.0, 0.0};
  r.se = {0.0, 0.0, 0.0};
  CHECK(unbiasedness_report(r).coverage_fraction == 1.0);
  r.bias = {0.5, -0.1, 0.0};
  r.se = {0.1, 0.1, 0.0};
  const UnbiasednessSummary s = unbiasedness_report(r);
  CHECK(!s.rows[0].covers_zero);
  CHECK(s.rows[1].covers_zero);
  CHECK(s.rows[0].ci_lo == doctest::Approx(0.5 - 0.196));
  CHECK(s.coverage_fraction == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("unbiasedness at desk scale") {
  const SyntheticModel model = random_model(9, 50, 8, 0.3);
  const std::vector<double> grid = default_grid(model, 42);
  const MonteCarloReport r = estimate_df_mc(model, grid, 2000, 42);
  CHECK(unbiasedness_report(r).coverage_fraction >= 0.9);
}

TEST_CASE("last-k fits") {
  support::Rng rng(10);
  const StandardizedDataset ds = support::random_dataset(rng, 30, 6, 0.6);
  const LassoPath path = compute_path(ds);
  const auto zero = last_k_fit(path, 0);
  REQUIRE(zero);
  CHECK(zero->df_hat == 0);
  CHECK(*last_k_index(path, 0) == 0);  // beta = 0 only at lambda_0
  const auto full = last_k_fit(path, 6);
  REQUIRE(full);
  CHECK(full->lambda == 0.0);
  CHECK_THROWS_AS(last_k_fit(path, 7), DomainError);
  CHECK_THROWS_AS(last_k_fit(path, -1), DomainError);

  for (int k = 0; k <= 6; ++k) {
    const auto m = last_k_index(path, k);
    if (!m) continue;
    CHECK(path.active_count_at_knot(*m) == k);
    for (std::size_t later = *m + 1; later < path.num_knots(); ++later)
      CHECK(path.active_count_at_knot(later) != k);
  }

  // Without drops each size occurs at exactly one transition point.
  const SyntheticModel ortho = orthonormal_model(11, 12, 5, 1.0);
  const LassoPath mono = compute_path(ortho.design, synthesize(ortho, 1));
  for (int k = 0; k <= 5; ++k) {
    int visits = 0;
    for (std::size_t m = 0; m < mono.num_knots(); ++m) visits += mono.active_count_at_knot(m) == k;
    CHECK(visits == 1);
    CHECK(mono.active_count_at_knot(*last_k_index(mono, k)) == k);
  }
}

TEST_CASE("step-indexed selection finds the same fit as lambda-indexed selection") {
  support::for_each_case(100, 12, [](support::Rng& rng, int) {
    const Eigen::Index p = support::uniform_int(rng, 1, 8);
    const Eigen::Index n = p + support::uniform_int(rng, 3, 40);
    const StandardizedDataset ds = support::random_dataset(rng, n, p, support::uniform(rng, 0, 0.9));
    const LassoPath path = compute_path(ds);
    const double s2 = estimate_sigma2(ds) * support::uniform(rng, 0.3, 3.0);
    for (Criterion c : {Criterion::cp, Criterion::bic}) {
      const SelectionReport by_lambda = select_optimal(path, c, s2);
      const StepSelection by_step = select_by_step(path, c, s2);
      CHECK((fit_at_knot(path, by_lambda.chosen_m).mu - by_step.fit.mu).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(by_step.k == by_lambda.chosen_df());
    }
  });
}

TEST_CASE("transition smoother reproduces the fit and has trace |B|") {
  support::for_each_case(100, 13, [](support::Rng& rng, int) {
    const Eigen::Index p = support::uniform_int(rng, 2, 8);
    const Eigen::Index n = p + support::uniform_int(rng, 3, 30);
    const StandardizedDataset ds = support::random_dataset(rng, n, p, support::uniform(rng, 0, 0.9));
    const LassoPath path = compute_path(ds);
    for (std::size_t m = 0; m < path.events().size(); ++m) {
      if (path.events()[m].type != EventType::add || path.transition_lambdas()[m] <= 0.0) continue;
      const Eigen::MatrixXd S = transition_smoother(path, m);
      CHECK(std::abs(S.trace() - path.active_count_at_knot(m)) <= 1e-8);
      const Eigen::VectorXd mu = ds.X() * path.knot(m);
      CHECK((S * ds.y() - mu).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + ds.y().cwiseAbs().maxCoeff()));
    }
  });
}

TEST_CASE("transition smoother rejects non-addition points") {
  support::Rng rng(14);
  const StandardizedDataset ds = support::random_dataset(rng, 20, 3);
  const LassoPath path = compute_path(ds);
  CHECK_THROWS_AS(transition_smoother(path, path.num_knots() - 1), DomainError);
}

TEST_CASE("conjecture report on an orthonormal design shows no bias") {
  const SyntheticModel model = orthonormal_model(15, 20, 5, 1.0);
  const ConjectureReport r = conjecture_bias_report(model, 2000, 21);
  REQUIRE(r.rows.size() == 6);
  for (const ConjectureRow& row : r.rows) {
    CHECK(row.n_valid == 2000);
    CHECK(std::abs(row.bias) <= 3.0 * row.se);
  }
}

TEST_CASE("conjecture report counts steps that never occur") {
  // With a large signal some sizes can be skipped over by drops; in any case
  // every row is present and absent steps carry a zero count.
  const SyntheticModel model = random_model(16, 30, 6, 0.9);
  const ConjectureReport r = conjecture_bias_report(model, 50, 1);
  REQUIRE(r.rows.size() == 7);
  for (const ConjectureRow& row : r.rows) {
    CHECK(row.n_valid >= 0);
    CHECK(row.n_valid <= 50);
    if (row.n_valid == 0) CHECK(std::isnan(row.df_mc));
  }
  CHECK(r.rows[0].n_valid == 50);
}

TEST_CASE("finite-difference divergence") {
  SUBCASE("orthonormal example at lambda = 4") {
    support::Rng rng(17);
    const Eigen::MatrixXd Q = support::orthonormal_centered(rng, 8, 3);
    auto design = std::make_shared<const Design>(Q.leftCols(2));
    const Eigen::VectorXd y = 3.0 * Q.col(0) + Q.col(1) + 0.5 * Q.col(2);
    CHECK(std::abs(divergence_fd(design, 4.0, y, 1e-5) - 1.0) <= 1e-6);
    CHECK(divergence_fd(design, 7.0, y) == 0.0);
    CHECK_THROWS_AS(divergence_fd(design, 2.0, y), DomainError);  // a transition point
  }
  SUBCASE("random instances match df_hat") {
    int tested = 0;
    support::for_each_case(60, 18, [&](support::Rng& rng, int) {
      const Eigen::Index p = support::uniform_int(rng, 1, 6);
      const Eigen::Index n = p + support::uniform_int(rng, 2, 24);
      const StandardizedDataset ds = support::random_dataset(rng, n, p, support::uniform(rng, 0, 0.8));
      const LassoPath path = compute_path(ds);
      const auto& lam = path.transition_lambdas();
      const auto m = static_cast<std::size_t>(support::uniform_int(rng, 0, static_cast<int>(lam.size()) - 2));
      const double l = 0.5 * (lam[m] + lam[m + 1]);
      try {
        const double div = divergence_fd(ds.design(), l, ds.y());
        CHECK(std::abs(div - fit_at(path, l).df_hat) <= 1e-4);
        ++tested;
      } catch (const DomainError&) {
        // Segment shorter than the guard band.
      }
    });
    CHECK(tested >= 50);
  }
}

TEST_CASE("gaussian design sampler") {
  Eigen::Matrix3d C;
  C << 1.0, 0.3, 0.0, 0.3, 2.0, 0.1, 0.0, 0.1, 0.5;
  const DesignSampler s = gaussian_design_sampler(C);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = s.draw(200000, rng);
  CHECK(((X.transpose() * X) / 200000.0 - C).cwiseAbs().maxCoeff() <= 0.02);
  CHECK_THROWS_AS(gaussian_design_sampler(-C), DomainError);
}

TEST_CASE("consistency experiment") {
  Eigen::MatrixXd C = Eigen::Vector3d(1.0, 0.5, 2.0).asDiagonal();
  const DesignSampler sampler = gaussian_design_sampler(C);
  const Eigen::Vector3d beta(3.0, 0.0, -1.0);

  SUBCASE("limit solution is the diagonal soft threshold") {
    const double lambda_star = 1.0;
    const ConsistencyReport r = consistency_experiment(sampler, beta, 1.0, lambda_star, {50, 400}, 200, 3);
    // Diagonal C: b_j = S(c_j b*_j, lambda*/2) / c_j.
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(r.limit_beta(j) ==
            doctest::Approx(support::soft_threshold(C(j, j) * beta(j), lambda_star / 2) / C(j, j)).epsilon(1e-9));
    CHECK(r.limit_active == 2);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].lambda_n == 50.0);
    CHECK(r.rows[1].fraction_at_limit >= r.rows[0].fraction_at_limit - 2.0 * r.rows[0].fraction_se);
    CHECK(r.rows[1].variance <= r.rows[0].variance + 2.0 * r.rows[0].variance_se);
  }
  SUBCASE("huge lambda* has an empty limit") {
    const ConsistencyReport r = consistency_experiment(sampler, beta, 1.0, 100.0, {50, 200}, 100, 4);
    CHECK(r.limit_active == 0);
    CHECK(r.rows.back().fraction_at_limit == 1.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(consistency_experiment(sampler, beta, 1.0, 0.0, {50}, 10, 1), DomainError);
    CHECK_THROWS_AS(consistency_experiment(sampler, beta, 1.0, 1.0, {3}, 10, 1), DomainError);
    // lambda* = 2 c_3 |b*_3| = 4 is where the third coefficient leaves.
    CHECK_THROWS_AS(consistency_experiment(sampler, beta, 1.0, 4.0, {50}, 10, 1), DomainError);
  }
}
