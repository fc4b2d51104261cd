#include "lassodf/sure_mc.hpp"

#include "lassodf/error.hpp"
#include "lassodf/linalg.hpp"
#include "lassodf/oracle.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

namespace lassodf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kPilotStream = 0xFFFFFFFFFFFFFFFFULL;

unsigned resolve_threads(unsigned requested, int work) {
  unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max(1u, std::min<unsigned>(t, static_cast<unsigned>(std::max(work, 1))));
}

// Runs body(b) for b in [0, B). Each call writes only to its own slot, so the
// caller's in-order reduction is independent of the thread count.
template <class Body>
void for_each_replication(int B, unsigned threads, Body&& body) {
  const unsigned workers = resolve_threads(threads, B);
  if (workers == 1) {
    for (int b = 0; b < B; ++b) body(b);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int b = next++; b < B; b = next++) {
        try {
          body(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void check_skips(std::size_t skipped, int B, double max_fraction) {
  if (static_cast<double>(skipped) > max_fraction * B)
    throw DegeneracyError(std::to_string(skipped) + " of " + std::to_string(B) +
                          " replications produced degenerate paths (limit " +
                          std::to_string(max_fraction * 100.0) + "%)");
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

// Mean and standard error of values, summed in index order.
Moments moments(const std::vector<double>& values) {
  Moments m;
  const auto count = static_cast<double>(values.size());
  if (values.empty()) {
    m.mean = std::nan("");
    m.se = std::nan("");
    return m;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / count;
  if (values.size() < 2) {
    m.se = std::nan("");
    return m;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / (count - 1.0) / count);
  return m;
}

}  // namespace

SyntheticModel make_synthetic_model(DesignPtr design, Eigen::VectorXd beta, double sigma) {
  if (!design) throw DomainError("synthetic model: null design");
  if (beta.size() != design->p()) throw DomainError("synthetic model: beta has wrong length");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("synthetic model: sigma must be >= 0");
  SyntheticModel model;
  model.mu_true = design->X() * beta;
  model.design = std::move(design);
  model.beta_true = std::move(beta);
  model.sigma = sigma;
  return model;
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

Eigen::VectorXd synthesize(const SyntheticModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y = model.mu_true;
  if (model.sigma == 0.0) return y;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += model.sigma * normal(rng);
  return y;
}

MonteCarloReport estimate_df_mc(const SyntheticModel& model, const std::vector<double>& lambdas,
                                int B, std::uint64_t seed, const MonteCarloOptions& options) {
  if (B < 2) throw DomainError("estimate_df_mc: need B >= 2");
  if (!(model.sigma > 0.0)) throw DomainError("estimate_df_mc: need sigma > 0");
  for (double l : lambdas)
    if (!(l >= 0.0)) throw DomainError("estimate_df_mc: negative lambda in grid");
  const auto L = lambdas.size();
  const double sigma2 = model.sigma * model.sigma;

  // Per replication and lambda: covariance term t = sum_i (mu_i - a_i)(y_i - (Xb)_i) / sigma^2
  // and the active-set size.
  std::vector<std::vector<double>> cov_terms(static_cast<std::size_t>(B));
  std::vector<std::vector<int>> sizes(static_cast<std::size_t>(B));
  std::vector<char> skipped(static_cast<std::size_t>(B), 0);

  for_each_replication(B, options.threads, [&](int b) {
    const std::uint64_t s = replication_seed(seed, static_cast<std::uint64_t>(b));
    const Eigen::VectorXd y = synthesize(model, s);
    std::optional<LassoPath> path;
    try {
      path.emplace(compute_path(model.design, y, options.path));
    } catch (const DegeneracyError&) {
      skipped[b] = 1;
      return;
    }
    // mu = X beta_hat, so sum_i (mu_i - a_i) e_i = (beta_hat - beta_a)' X'e.
    const Eigen::VectorXd Xte = model.design->X().transpose() * (y - model.mu_true);
    auto& t = cov_terms[b];
    auto& k = sizes[b];
    t.resize(L);
    k.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      const Eigen::VectorXd beta = path->coefficients_at(lambdas[l]);
      const double centred = options.control == ControlVariate::true_mean
                                 ? (beta - model.beta_true).dot(Xte)
                                 : beta.dot(Xte);
      t[l] = centred / sigma2;
      k[l] = df_hat(beta);
    }
  });

  MonteCarloReport report;
  report.lambdas = lambdas;
  report.B = B;
  report.seed = seed;
  for (int b = 0; b < B; ++b)
    if (skipped[b]) report.skipped_seeds.push_back(replication_seed(seed, static_cast<std::uint64_t>(b)));
  check_skips(report.skipped_seeds.size(), B, options.max_skip_fraction);
  report.valid = B - static_cast<int>(report.skipped_seeds.size());

  for (std::size_t l = 0; l < L; ++l) {
    std::vector<double> t, k, diff;
    for (int b = 0; b < B; ++b) {
      if (skipped[b]) continue;
      t.push_back(cov_terms[b][l]);
      k.push_back(sizes[b][l]);
      diff.push_back(sizes[b][l] - cov_terms[b][l]);
    }
    const Moments mt = moments(t);
    const Moments mk = moments(k);
    const Moments md = moments(diff);
    report.df_mc.push_back(mt.mean);
    report.df_se.push_back(mt.se);
    report.e_active.push_back(mk.mean);
    report.bias.push_back(md.mean);
    report.se.push_back(md.se);
  }
  return report;
}

std::vector<double> default_grid(const SyntheticModel& model, std::uint64_t seed,
                                 std::size_t max_points, const PathOptions& path_options) {
  if (max_points < 2) throw DomainError("default_grid: need at least 2 points");
  const Eigen::VectorXd y = synthesize(model, replication_seed(seed, kPilotStream));
  const LassoPath pilot = compute_path(model.design, y, path_options);
  const auto& all = pilot.transition_lambdas();
  if (all.size() <= max_points) return all;
  std::vector<double> grid;
  for (std::size_t i = 0; i < max_points; ++i) {
    const std::size_t idx = (i * (all.size() - 1)) / (max_points - 1);
    if (grid.empty() || all[idx] != grid.back()) grid.push_back(all[idx]);
  }
  return grid;
}

UnbiasednessSummary unbiasedness_report(const MonteCarloReport& report) {
  UnbiasednessSummary summary;
  std::size_t covered = 0;
  for (std::size_t l = 0; l < report.lambdas.size(); ++l) {
    UnbiasednessRow row;
    row.lambda = report.lambdas[l];
    row.bias = report.bias[l];
    const double half = 1.96 * report.se[l];
    row.ci_lo = row.bias - half;
    row.ci_hi = row.bias + half;
    row.covers_zero = row.ci_lo <= 0.0 && 0.0 <= row.ci_hi;
    covered += row.covers_zero ? 1 : 0;
    summary.rows.push_back(row);
  }
  summary.coverage_fraction =
      summary.rows.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(summary.rows.size());
  return summary;
}

std::optional<std::size_t> last_k_index(const LassoPath& path, int k) {
  if (k < 0 || k > path.p())
    throw DomainError("last_k: k = " + std::to_string(k) + " outside [0, " + std::to_string(path.p()) + "]");
  for (std::size_t m = path.num_knots(); m-- > 0;)
    if (path.active_count_at_knot(m) == k) return m;
  return std::nullopt;
}

std::optional<FitResult> last_k_fit(const LassoPath& path, int k) {
  const auto m = last_k_index(path, k);
  if (!m) return std::nullopt;
  return fit_at_knot(path, *m);
}

StepSelection select_by_step(const LassoPath& path, Criterion criterion, double sigma2) {
  std::optional<StepSelection> best;
  for (int k = 0; k <= path.p(); ++k) {
    const auto m = last_k_index(path, k);
    if (!m) continue;
    FitResult fit = fit_at_knot(path, *m);
    const double value = criterion_value(criterion, fit.rss, k, path.n(), sigma2);
    if (!best || value < best->value) best = StepSelection{k, *m, value, std::move(fit)};
  }
  return *best;  // k = 0 is always present (lambda_0)
}

Eigen::MatrixXd transition_smoother(const LassoPath& path, std::size_t m) {
  if (m >= path.events().size() || path.events()[m].type != EventType::add)
    throw DomainError("transition_smoother: transition " + std::to_string(m) + " is not an addition");
  if (!(path.transition_lambdas()[m] > 0.0)) throw DomainError("transition_smoother: lambda_m must be > 0");
  const Eigen::MatrixXd& X = path.design()->X();
  const Eigen::Index n = X.rows();
  const int entering = path.events()[m].index;
  const PathSegment& below = path.segments()[m];
  const auto pos = std::find(below.active.begin(), below.active.end(), entering) - below.active.begin();
  const double s_i = below.signs(pos);

  const Eigen::VectorXd& beta = path.knot(m);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) active.push_back(j);
  const Eigen::VectorXd x_i = X.col(entering);
  if (active.empty()) return Eigen::MatrixXd::Zero(n, n);

  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd XB(n, k);
  Eigen::VectorXd sB(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    XB.col(c) = X.col(active[c]);
    sB(c) = beta(active[c]) > 0 ? 1.0 : -1.0;
  }
  const Eigen::LLT<Eigen::MatrixXd> gram(XB.transpose() * XB);
  const Eigen::MatrixXd H = XB * gram.solve(XB.transpose());
  const Eigen::VectorXd w = XB * gram.solve(sB);
  const Eigen::RowVectorXd residual_row = x_i.transpose() - x_i.transpose() * H;
  return H - w * residual_row / (s_i - x_i.dot(w));
}

ConjectureReport conjecture_bias_report(const SyntheticModel& model, int B, std::uint64_t seed,
                                        const MonteCarloOptions& options) {
  if (B < 2) throw DomainError("conjecture_bias_report: need B >= 2");
  if (!(model.sigma > 0.0)) throw DomainError("conjecture_bias_report: need sigma > 0");
  const auto p = static_cast<std::size_t>(model.design->p());
  const double sigma2 = model.sigma * model.sigma;
  constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::vector<double>> terms(static_cast<std::size_t>(B));
  std::vector<char> skipped(static_cast<std::size_t>(B), 0);

  for_each_replication(B, options.threads, [&](int b) {
    const Eigen::VectorXd y = synthesize(model, replication_seed(seed, static_cast<std::uint64_t>(b)));
    std::optional<LassoPath> path;
    try {
      path.emplace(compute_path(model.design, y, options.path));
    } catch (const DegeneracyError&) {
      skipped[b] = 1;
      return;
    }
    const Eigen::VectorXd Xte = model.design->X().transpose() * (y - model.mu_true);
    auto& t = terms[b];
    t.assign(p + 1, kAbsent);
    for (std::size_t k = 0; k <= p; ++k) {
      const auto m = last_k_index(*path, static_cast<int>(k));
      if (!m) continue;
      const Eigen::VectorXd& beta = path->knot(*m);
      const double centred = options.control == ControlVariate::true_mean
                                 ? (beta - model.beta_true).dot(Xte)
                                 : beta.dot(Xte);
      t[k] = centred / sigma2;
    }
  });

  ConjectureReport report;
  report.B = B;
  report.seed = seed;
  for (int b = 0; b < B; ++b)
    if (skipped[b]) report.skipped_seeds.push_back(replication_seed(seed, static_cast<std::uint64_t>(b)));
  check_skips(report.skipped_seeds.size(), B, options.max_skip_fraction);

  for (std::size_t k = 0; k <= p; ++k) {
    std::vector<double> values;
    for (int b = 0; b < B; ++b)
      if (!skipped[b] && !std::isnan(terms[b][k])) values.push_back(terms[b][k]);
    const Moments mt = moments(values);
    ConjectureRow row;
    row.k = static_cast<int>(k);
    row.df_mc = mt.mean;
    row.bias = static_cast<double>(k) - mt.mean;
    row.se = mt.se;
    row.n_valid = static_cast<int>(values.size());
    report.rows.push_back(row);
  }
  return report;
}

double divergence_fd(const DesignPtr& design, double lambda, const Eigen::VectorXd& y, double h,
                     const PathOptions& options) {
  if (!(lambda >= 0.0)) throw DomainError("divergence_fd: lambda must be nonnegative");
  if (h <= 0.0) h = 1e-5 * (1.0 + y.cwiseAbs().maxCoeff());
  const LassoPath base = compute_path(design, y, options);
  for (double t : base.transition_lambdas())
    if (std::abs(lambda - t) <= 10.0 * h)
      throw DomainError("divergence_fd: lambda " + std::to_string(lambda) +
                        " is within the guard band of transition point " + std::to_string(t));
  const Eigen::MatrixXd& X = design->X();
  double divergence = 0.0;
  Eigen::VectorXd shifted = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    shifted(i) = y(i) + h;
    const double up = X.row(i).dot(compute_path(design, shifted, options).coefficients_at(lambda));
    shifted(i) = y(i) - h;
    const double down = X.row(i).dot(compute_path(design, shifted, options).coefficients_at(lambda));
    shifted(i) = y(i);
    divergence += (up - down) / (2.0 * h);
  }
  return divergence;
}

DesignSampler gaussian_design_sampler(const Eigen::MatrixXd& C) {
  const Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) throw DomainError("gaussian_design_sampler: C must be positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  DesignSampler sampler;
  sampler.limit_gram = C;
  sampler.draw = [L](Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd Z(n, L.rows());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < L.rows(); ++j) Z(i, j) = normal(rng);
    return Eigen::MatrixXd(Z * L.transpose());
  };
  return sampler;
}

ConsistencyReport consistency_experiment(const DesignSampler& sampler,
                                         const Eigen::VectorXd& beta_star, double sigma,
                                         double lambda_star, const std::vector<Eigen::Index>& n_grid,
                                         int B, std::uint64_t seed) {
  const Eigen::MatrixXd& C = sampler.limit_gram;
  const Eigen::Index p = C.rows();
  if (beta_star.size() != p) throw DomainError("consistency_experiment: beta* has wrong length");
  if (!(lambda_star > 0.0)) throw DomainError("consistency_experiment: lambda* must be positive");
  if (B < 2) throw DomainError("consistency_experiment: need B >= 2");

  // The limit objective (b - b*)'C(b - b*) + lambda*|b|_1 is a lasso problem
  // with design U (U'U = C) and response U b*.
  const Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) throw DomainError("consistency_experiment: C must be positive definite");
  const Eigen::MatrixXd U = llt.matrixU();
  const Eigen::VectorXd limit_y = U * beta_star;

  ConsistencyReport report;
  const LassoPath limit_path = compute_path(std::make_shared<const Design>(U), limit_y);
  report.limit_transitions = limit_path.transition_lambdas();
  for (double t : report.limit_transitions)
    if (std::abs(t - lambda_star) <= 1e-6 * lambda_star)
      throw DomainError("consistency_experiment: lambda* = " + std::to_string(lambda_star) +
                        " is a transition point of the limit problem");
  oracle::IterativeOptions oracle_options;
  oracle_options.tol = 1e-12 * (1.0 + lambda_star);
  report.limit_beta = oracle::solve_iterative(U, limit_y, lambda_star, oracle_options).beta;
  report.limit_active = df_hat(report.limit_beta);

  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const Eigen::Index n = n_grid[g];
    if (n <= p) throw DomainError("consistency_experiment: need n > p");
    const double lambda_n = static_cast<double>(n) * lambda_star;
    std::vector<int> dfs(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
      std::mt19937_64 rng(replication_seed(replication_seed(seed, g), static_cast<std::uint64_t>(b)));
      Eigen::MatrixXd X = sampler.draw(n, rng);
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd y = X * beta_star;
      for (Eigen::Index i = 0; i < n; ++i) y(i) += sigma * normal(rng);
      const LassoPath path = compute_path(std::make_shared<const Design>(std::move(X)), std::move(y));
      dfs[b] = df_hat(path.coefficients_at(lambda_n));
    }

    ConsistencyRow row;
    row.n = n;
    row.lambda_n = lambda_n;
    std::map<int, int> counts;
    for (int d : dfs) ++counts[d];
    row.mode = std::max_element(counts.begin(), counts.end(),
                                [](const auto& l, const auto& r) { return l.second < r.second; })
                   ->first;
    const double f = static_cast<double>(counts[report.limit_active]) / B;
    row.fraction_at_limit = f;
    row.fraction_se = std::sqrt(f * (1.0 - f) / B);

    double mean = 0.0;
    for (int d : dfs) mean += d;
    mean /= B;
    double m2 = 0.0;
    double m4 = 0.0;
    for (int d : dfs) {
      const double c = d - mean;
      m2 += c * c;
      m4 += c * c * c * c;
    }
    m2 /= B;
    m4 /= B;
    row.variance = m2 * B / (B - 1.0);
    // Large-sample standard error of the sample variance.
    row.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / B);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace lassodf
