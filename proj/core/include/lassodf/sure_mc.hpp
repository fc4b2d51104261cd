#pragma once

#include "lassodf/dataset.hpp"
#include "lassodf/dof_selection.hpp"
#include "lassodf/lars_path.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace lassodf {

// y* = X beta + sigma z, z ~ N(0, I).
struct SyntheticModel {
  DesignPtr design;
  Eigen::VectorXd beta_true;
  double sigma = 1.0;
  Eigen::VectorXd mu_true;  // X beta_true
};

SyntheticModel make_synthetic_model(DesignPtr design, Eigen::VectorXd beta, double sigma);

// Seed of replication `index` under `master`. Replications draw from
// independent streams, so any execution order yields the same draws.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index);

Eigen::VectorXd synthesize(const SyntheticModel& model, std::uint64_t seed);

// Constant a_i subtracted from the fit in the covariance estimate.
enum class ControlVariate {
  true_mean,  // a_i = (X beta)_i
  zero,       // a_i = 0
};

struct MonteCarloOptions {
  ControlVariate control = ControlVariate::true_mean;
  // 0 = std::thread::hardware_concurrency().
  unsigned threads = 0;
  PathOptions path;
  // Degenerate replications are skipped; more than this fraction is an error.
  double max_skip_fraction = 0.001;
};

struct MonteCarloReport {
  std::vector<double> lambdas;
  std::vector<double> df_mc;     // sum_i cov_i / sigma^2
  std::vector<double> df_se;     // standard error of df_mc
  std::vector<double> e_active;  // mean |B_lambda|
  std::vector<double> bias;      // e_active - df_mc
  std::vector<double> se;        // standard error of the paired bias
  int B = 0;
  int valid = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> skipped_seeds;
};

MonteCarloReport estimate_df_mc(const SyntheticModel& model, const std::vector<double>& lambdas,
                                int B, std::uint64_t seed, const MonteCarloOptions& options = {});

// Transition points of one pilot draw (independent of the replication
// streams), thinned to at most max_points values; both ends are kept.
std::vector<double> default_grid(const SyntheticModel& model, std::uint64_t seed,
                                 std::size_t max_points = 50,
                                 const PathOptions& path_options = {});

struct UnbiasednessRow {
  double lambda = 0.0;
  double bias = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covers_zero = false;
};

struct UnbiasednessSummary {
  std::vector<UnbiasednessRow> rows;
  double coverage_fraction = 0.0;
};

// Pointwise 95% intervals bias +- 1.96 se.
UnbiasednessSummary unbiasedness_report(const MonteCarloReport& report);

// Index of the last transition point whose fit has exactly k nonzero
// coefficients, if any.
std::optional<std::size_t> last_k_index(const LassoPath& path, int k);
std::optional<FitResult> last_k_fit(const LassoPath& path, int k);

// Model choice with the step count k standing in for the degrees of freedom:
// minimizes rss(m_k^last) criterion over k. Ties go to the smaller k.
struct StepSelection {
  int k = 0;
  std::size_t m = 0;
  double value = 0.0;
  FitResult fit;
};
StepSelection select_by_step(const LassoPath& path, Criterion criterion, double sigma2);

// Smoother S_m with mu(lambda_m) = S_m y at an addition transition point m:
//   S_m = H_B - w x_i'(I - H_B) / (s_i - x_i'w),  w = X_B (X_B'X_B)^{-1} s_B,
// B the active set at lambda_m and i the entering predictor with sign s_i.
Eigen::MatrixXd transition_smoother(const LassoPath& path, std::size_t m);

struct ConjectureRow {
  int k = 0;
  double df_mc = 0.0;
  double bias = 0.0;  // k - df_mc
  double se = 0.0;
  int n_valid = 0;  // replications whose path visits k nonzero coefficients
};

struct ConjectureReport {
  std::vector<ConjectureRow> rows;  // k = 0..p
  int B = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> skipped_seeds;
};

// Monte Carlo degrees of freedom of the fit at m_k^last, per k.
ConjectureReport conjecture_bias_report(const SyntheticModel& model, int B, std::uint64_t seed,
                                        const MonteCarloOptions& options = {});

// Central-difference divergence sum_i d mu_i / d y_i of the fit at lambda.
// h <= 0 picks 1e-5 (1 + |y|_inf). Throws DomainError when lambda is within
// 10 h of a transition point of y.
double divergence_fd(const DesignPtr& design, double lambda, const Eigen::VectorXd& y,
                     double h = 0.0, const PathOptions& options = {});

// Draws n x p designs whose (1/n) X'X converges to limit_gram.
struct DesignSampler {
  Eigen::MatrixXd limit_gram;
  std::function<Eigen::MatrixXd(Eigen::Index n, std::mt19937_64& rng)> draw;
};

// Rows iid N(0, C).
DesignSampler gaussian_design_sampler(const Eigen::MatrixXd& C);

struct ConsistencyRow {
  Eigen::Index n = 0;
  double lambda_n = 0.0;
  int mode = 0;
  double fraction_at_limit = 0.0;  // P(df_hat = |B*|)
  double fraction_se = 0.0;
  double variance = 0.0;  // of df_hat
  double variance_se = 0.0;
};

struct ConsistencyReport {
  Eigen::VectorXd limit_beta;  // minimizer of (b - b*)'C(b - b*) + lambda* |b|_1
  int limit_active = 0;
  std::vector<double> limit_transitions;
  std::vector<ConsistencyRow> rows;
};

ConsistencyReport consistency_experiment(const DesignSampler& sampler,
                                         const Eigen::VectorXd& beta_star, double sigma,
                                         double lambda_star, const std::vector<Eigen::Index>& n_grid,
                                         int B, std::uint64_t seed);

}  // namespace lassodf
