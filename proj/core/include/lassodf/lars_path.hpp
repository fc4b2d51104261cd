#pragma once

#include "lassodf/dataset.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace lassodf {

// The lasso objective throughout is ||y - X b||^2 + lambda * sum |b_j|, so the
// stationarity condition for an active predictor is 2 x_j'r = lambda sgn(b_j)
// and every soft threshold is lambda / 2.

enum class EventType { add, drop };

struct PathEvent {
  EventType type;
  int index;  // predictor that enters or leaves
};

// One linear piece of the path, lambda in [lambda_lo, lambda_hi]. On it the
// active coefficients are a - (lambda / 2) d with
//   a = (X_B'X_B)^{-1} X_B'y,  d = (X_B'X_B)^{-1} signs.
struct PathSegment {
  double lambda_hi = 0.0;
  double lambda_lo = 0.0;
  std::vector<int> active;  // predictor indices, insertion order
  Eigen::VectorXd signs;
  Eigen::VectorXd a;
  Eigen::VectorXd d;
  std::optional<int> entered;  // joined at lambda_hi
  std::optional<int> leaving;  // reaches zero at lambda_lo
  Eigen::Index num_predictors = 0;
};

// Coefficients at lambda within the closed segment interval. The entering
// coefficient is exactly 0 at lambda_hi and the leaving one at lambda_lo.
Eigen::VectorXd segment_coefficients(const PathSegment& seg, double lambda);

struct PathOptions {
  // 0 selects the default of 8 * p.
  int max_steps = 0;
  // Two candidate events closer than tie_tolerance * lambda are a degeneracy.
  double tie_tolerance = 1e-9;
  // Candidates within reselect_guard * lambda of the current point are ignored.
  double reselect_guard = 1e-12;
};

class LassoPath {
 public:
  LassoPath(DesignPtr design, Eigen::VectorXd y, std::vector<double> transition_lambdas,
            std::vector<PathSegment> segments, std::vector<PathEvent> events,
            std::vector<Eigen::VectorXd> knots);

  // lambda_0 > lambda_1 > ... > lambda_K = 0.
  const std::vector<double>& transition_lambdas() const { return lambdas_; }
  // Segment m covers [lambda_{m+1}, lambda_m].
  const std::vector<PathSegment>& segments() const { return segments_; }
  // Event m happens at lambda_m (there is none at lambda_K = 0).
  const std::vector<PathEvent>& events() const { return events_; }
  // Exact coefficients at lambda_m; event coordinates are exactly 0.
  const Eigen::VectorXd& knot(std::size_t m) const { return knots_.at(m); }
  std::size_t num_knots() const { return knots_.size(); }
  // Nonzero count of the coefficients at lambda_m.
  int active_count_at_knot(std::size_t m) const;

  double lambda_max() const { return lambdas_.front(); }
  const DesignPtr& design() const { return design_; }
  const Eigen::VectorXd& y() const { return y_; }
  Eigen::Index n() const { return design_->n(); }
  Eigen::Index p() const { return design_->p(); }

  // Coefficients at any lambda >= 0.
  Eigen::VectorXd coefficients_at(double lambda) const;

 private:
  DesignPtr design_;
  Eigen::VectorXd y_;
  std::vector<double> lambdas_;
  std::vector<PathSegment> segments_;
  std::vector<PathEvent> events_;
  std::vector<Eigen::VectorXd> knots_;
};

// Homotopy from lambda_0 = max_j 2|x_j'y| down to 0. Throws DegeneracyError
// when two events tie, RankDeficiencyError when an active Gram loses rank and
// ConvergenceError when max_steps is exceeded.
LassoPath compute_path(const StandardizedDataset& ds, const PathOptions& options = {});
LassoPath compute_path(DesignPtr design, Eigen::VectorXd y, const PathOptions& options = {});

struct FitResult {
  double lambda = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd mu;
  double rss = 0.0;
  int df_hat = 0;
};

FitResult fit_at(const LassoPath& path, double lambda);
// Fit at the transition point lambda_m.
FitResult fit_at_knot(const LassoPath& path, std::size_t m);

struct KktReport {
  double active_violation = 0.0;    // max |2 x_j'r - lambda sgn(b_j)| over b_j != 0
  double inactive_violation = 0.0;  // max (2 |x_j'r| - lambda)_+ over b_j == 0

  double max() const { return std::max(active_violation, inactive_violation); }
};

KktReport kkt_check(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double lambda);
KktReport kkt_check(const StandardizedDataset& ds, const Eigen::VectorXd& beta, double lambda);

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda);

// ||mu(y + delta) - mu(y)|| / ||delta|| with both fits computed from scratch.
double lipschitz_probe(const DesignPtr& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& delta, double lambda,
                       const PathOptions& options = {});

}  // namespace lassodf
