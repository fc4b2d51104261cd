#include "lassodf/dof_selection.hpp"

#include "lassodf/error.hpp"
#include "lassodf/linalg.hpp"

#include <cmath>
#include <string>

namespace lassodf {

namespace {

void check_criterion_args(Eigen::Index n, double sigma2) {
  if (n < 1) throw DomainError("criterion: n must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw DomainError("criterion: sigma2 must be positive and finite, got " + std::to_string(sigma2));
}

}  // namespace

int df_hat(const Eigen::VectorXd& beta) {
  return static_cast<int>((beta.array() != 0.0).count());
}

int df_hat(const FitResult& fit) {
  return df_hat(fit.beta);
}

OlsFit ols_fit(const Design& design, const Eigen::VectorXd& y) {
  if (design.n() <= design.p())
    throw DomainError("OLS variance needs n > p (n = " + std::to_string(design.n()) +
                      ", p = " + std::to_string(design.p()) + ")");
  const CholFactor chol = CholFactor::factor(design.gram());
  OlsFit fit;
  fit.beta = chol.solve(design.X().transpose() * y);
  fit.rss = (y - design.X() * fit.beta).squaredNorm();
  fit.sigma2 = fit.rss / static_cast<double>(design.n() - design.p());
  return fit;
}

double estimate_sigma2(const StandardizedDataset& ds) {
  return ols_fit(*ds.design(), ds.y()).sigma2;
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::cp: return "cp";
    case Criterion::aic: return "aic";
    case Criterion::bic: return "bic";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "cp") return Criterion::cp;
  if (name == "aic") return Criterion::aic;
  if (name == "bic") return Criterion::bic;
  throw DomainError("unknown criterion \"" + std::string(name) + "\" (expected cp, aic or bic)");
}

double cp(double rss, int df, Eigen::Index n, double sigma2) {
  check_criterion_args(n, sigma2);
  const auto nn = static_cast<double>(n);
  return rss / nn + 2.0 * df * sigma2 / nn;
}

double aic(double rss, int df, Eigen::Index n, double sigma2) {
  check_criterion_args(n, sigma2);
  const auto nn = static_cast<double>(n);
  return rss / (nn * sigma2) + 2.0 * df / nn;
}

double bic(double rss, int df, Eigen::Index n, double sigma2) {
  check_criterion_args(n, sigma2);
  const auto nn = static_cast<double>(n);
  return rss / (nn * sigma2) + std::log(nn) * df / nn;
}

double criterion_value(Criterion c, double rss, int df, Eigen::Index n, double sigma2) {
  switch (c) {
    case Criterion::cp: return cp(rss, df, n, sigma2);
    case Criterion::aic: return aic(rss, df, n, sigma2);
    case Criterion::bic: return bic(rss, df, n, sigma2);
  }
  throw DomainError("unknown criterion");
}

SelectionReport select_optimal(const LassoPath& path, Criterion criterion, double sigma2) {
  if (path.num_knots() == 0) throw DomainError("select_optimal: empty path");
  check_criterion_args(path.n(), sigma2);
  SelectionReport report;
  report.criterion = criterion;
  report.sigma2 = sigma2;
  for (std::size_t m = 0; m < path.num_knots(); ++m) {
    const FitResult fit = fit_at_knot(path, m);
    SelectionRow row{m, fit.lambda, fit.rss, fit.df_hat,
                     criterion_value(criterion, fit.rss, fit.df_hat, path.n(), sigma2)};
    // Strict comparison keeps the earliest (largest lambda) of equal values.
    if (m == 0 || row.value < report.rows[report.chosen_m].value) report.chosen_m = m;
    report.rows.push_back(row);
  }
  report.chosen_lambda = report.rows[report.chosen_m].lambda;
  report.chosen_beta = path.knot(report.chosen_m);
  return report;
}

std::vector<std::pair<double, double>> criterion_curve(const LassoPath& path, Criterion criterion,
                                                       double sigma2,
                                                       const std::vector<double>& lambdas) {
  check_criterion_args(path.n(), sigma2);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0)) throw DomainError("criterion_curve: negative lambda in grid");
    const FitResult fit = fit_at(path, lambda);
    curve.emplace_back(lambda, criterion_value(criterion, fit.rss, fit.df_hat, path.n(), sigma2));
  }
  return curve;
}

}  // namespace lassodf
