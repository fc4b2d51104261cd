#pragma once

#include "lassodf/dataset.hpp"
#include "lassodf/lars_path.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lassodf {

// Unbiased degrees-of-freedom estimate: the number of nonzero coefficients.
int df_hat(const FitResult& fit);
int df_hat(const Eigen::VectorXd& beta);

struct OlsFit {
  Eigen::VectorXd beta;
  double rss = 0.0;
  double sigma2 = 0.0;  // rss / (n - p)
};

// Full least-squares fit. Throws DomainError when n <= p and
// RankDeficiencyError when X'X is singular.
OlsFit ols_fit(const Design& design, const Eigen::VectorXd& y);

// sigma^2 = ||y - X b_ols||^2 / (n - p). Returns 0 when y lies in the column
// space; Cp-type criteria are undefined then and reject it.
double estimate_sigma2(const StandardizedDataset& ds);

enum class Criterion { cp, aic, bic };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

// rss/n + 2 df sigma2/n
double cp(double rss, int df, Eigen::Index n, double sigma2);
// rss/(n sigma2) + 2 df/n
double aic(double rss, int df, Eigen::Index n, double sigma2);
// rss/(n sigma2) + log(n) df/n
double bic(double rss, int df, Eigen::Index n, double sigma2);
double criterion_value(Criterion c, double rss, int df, Eigen::Index n, double sigma2);

struct SelectionRow {
  std::size_t m = 0;
  double lambda = 0.0;
  double rss = 0.0;
  int df_hat = 0;
  double value = 0.0;
};

struct SelectionReport {
  Criterion criterion = Criterion::cp;
  double sigma2 = 0.0;
  std::vector<SelectionRow> rows;  // one per transition point, lambda decreasing
  std::size_t chosen_m = 0;
  double chosen_lambda = 0.0;
  Eigen::VectorXd chosen_beta;

  int chosen_df() const { return rows.at(chosen_m).df_hat; }
};

// Minimizes the criterion over the transition points (lambda_K = 0 included),
// which is the global minimum over lambda >= 0. Ties go to the larger lambda.
SelectionReport select_optimal(const LassoPath& path, Criterion criterion, double sigma2);

// Criterion evaluated at arbitrary lambdas.
std::vector<std::pair<double, double>> criterion_curve(const LassoPath& path, Criterion criterion,
                                                       double sigma2,
                                                       const std::vector<double>& lambdas);

}  // namespace lassodf
