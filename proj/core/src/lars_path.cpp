#include "lassodf/lars_path.hpp"

#include "lassodf/error.hpp"
#include "lassodf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace lassodf {

namespace {

struct Candidate {
  double lambda = -1.0;
  EventType type = EventType::add;
  int index = -1;
  double sign = 0.0;  // sign of an entering coefficient
};

std::string describe(const Candidate& c) {
  return std::string(c.type == EventType::add ? "add(" : "drop(") + std::to_string(c.index) + ")";
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

}  // namespace

Eigen::VectorXd segment_coefficients(const PathSegment& seg, double lambda) {
  if (!(lambda >= seg.lambda_lo && lambda <= seg.lambda_hi))
    throw DomainError("lambda " + std::to_string(lambda) + " outside segment [" +
                      std::to_string(seg.lambda_lo) + ", " + std::to_string(seg.lambda_hi) + "]");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(seg.num_predictors);
  const Eigen::VectorXd active = seg.a - 0.5 * lambda * seg.d;
  for (std::size_t i = 0; i < seg.active.size(); ++i)
    beta(seg.active[i]) = active(static_cast<Eigen::Index>(i));
  if (seg.entered && lambda == seg.lambda_hi) beta(*seg.entered) = 0.0;
  if (seg.leaving && lambda == seg.lambda_lo) beta(*seg.leaving) = 0.0;
  return beta;
}

LassoPath::LassoPath(DesignPtr design, Eigen::VectorXd y, std::vector<double> transition_lambdas,
                     std::vector<PathSegment> segments, std::vector<PathEvent> events,
                     std::vector<Eigen::VectorXd> knots)
    : design_(std::move(design)),
      y_(std::move(y)),
      lambdas_(std::move(transition_lambdas)),
      segments_(std::move(segments)),
      events_(std::move(events)),
      knots_(std::move(knots)) {
  if (lambdas_.empty() || lambdas_.back() != 0.0)
    throw DomainError("a path must end at lambda = 0");
  if (segments_.size() + 1 != lambdas_.size() || knots_.size() != lambdas_.size() ||
      events_.size() != segments_.size())
    throw DomainError("inconsistent path structure");
}

int LassoPath::active_count_at_knot(std::size_t m) const {
  return static_cast<int>((knot(m).array() != 0.0).count());
}

Eigen::VectorXd LassoPath::coefficients_at(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative, got " + std::to_string(lambda));
  if (lambda >= lambdas_.front()) return Eigen::VectorXd::Zero(p());
  // First transition point <= lambda; lambdas_ is strictly decreasing.
  auto it = std::lower_bound(lambdas_.begin(), lambdas_.end(), lambda, std::greater<>());
  const auto m = static_cast<std::size_t>(it - lambdas_.begin());
  if (*it == lambda) return knots_[m];
  return segment_coefficients(segments_[m - 1], lambda);
}

LassoPath compute_path(const StandardizedDataset& ds, const PathOptions& options) {
  return compute_path(ds.design(), ds.y(), options);
}

LassoPath compute_path(DesignPtr design, Eigen::VectorXd y, const PathOptions& options) {
  if (!design) throw DomainError("compute_path: null design");
  const Eigen::Index n = design->n();
  const Eigen::Index p = design->p();
  if (n < 2) throw DataError("compute_path: need n >= 2");
  if (y.size() != n) throw DomainError("compute_path: response length mismatch");
  const int max_steps = options.max_steps > 0 ? options.max_steps : static_cast<int>(8 * p);
  const Eigen::MatrixXd& G = design->gram();
  const Eigen::VectorXd Xty = design->X().transpose() * y;

  std::vector<double> lambdas;
  std::vector<PathSegment> segments;
  std::vector<PathEvent> events;
  std::vector<Eigen::VectorXd> knots;

  Eigen::Index top = 0;
  const double lambda0 = 2.0 * Xty.cwiseAbs().maxCoeff(&top);
  const double scale = 2.0 * std::sqrt(G.diagonal().maxCoeff()) * y.norm();
  lambdas.push_back(lambda0);
  knots.push_back(Eigen::VectorXd::Zero(p));
  if (!(lambda0 > 1e-14 * scale)) {
    // y is orthogonal to every column: beta is 0 everywhere, OLS included.
    lambdas.back() = 0.0;
    return LassoPath(std::move(design), std::move(y), std::move(lambdas), std::move(segments),
                     std::move(events), std::move(knots));
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j != top && 2.0 * std::abs(Xty(j)) >= lambda0 * (1.0 - options.tie_tolerance))
      throw DegeneracyError("predictors " + std::to_string(top) + " and " + std::to_string(j) +
                            " tie for entry at lambda_0 = " + std::to_string(lambda0) +
                            "; jitter the response by an infinitesimal amount");
  }

  CholFactor chol;
  std::vector<int> active;
  std::vector<double> signs;
  std::vector<bool> is_active(static_cast<std::size_t>(p), false);
  Candidate event{lambda0, EventType::add, static_cast<int>(top), Xty(top) > 0 ? 1.0 : -1.0};
  int just_dropped = -1;
  double just_dropped_sign = 0.0;
  double current = lambda0;

  for (int step = 0;; ++step) {
    if (step >= max_steps)
      throw ConvergenceError("path exceeded max_steps = " + std::to_string(max_steps));

    int just_added = -1;
    if (event.type == EventType::add) {
      const int j = event.index;
      Eigen::VectorXd cross(static_cast<Eigen::Index>(active.size()));
      for (std::size_t i = 0; i < active.size(); ++i) cross(static_cast<Eigen::Index>(i)) = G(j, active[i]);
      chol = chol.add_column(cross, G(j, j), j);
      active.push_back(j);
      signs.push_back(event.sign);
      is_active[j] = true;
      just_added = j;
      just_dropped = -1;
    } else {
      const auto pos = std::find(active.begin(), active.end(), event.index) - active.begin();
      chol = chol.drop_column(pos);
      just_dropped = event.index;
      just_dropped_sign = signs[static_cast<std::size_t>(pos)];
      active.erase(active.begin() + pos);
      signs.erase(signs.begin() + pos);
      is_active[event.index] = false;
    }

    PathSegment seg;
    seg.lambda_hi = current;
    seg.active = active;
    seg.signs = Eigen::Map<const Eigen::VectorXd>(signs.data(), static_cast<Eigen::Index>(signs.size()));
    seg.a = chol.solve(gather(Xty, active));
    seg.d = chol.solve(seg.signs);
    seg.num_predictors = p;
    if (event.type == EventType::add) seg.entered = event.index;

    const double ceiling = current * (1.0 - options.reselect_guard);
    std::vector<Candidate> candidates;

    // Entry: the inactive correlation is u_j + (lambda/2) v_j, linear in
    // lambda; predictor j joins where 2 c_j(lambda) = +-lambda.
    for (Eigen::Index j = 0; j < p; ++j) {
      if (is_active[j]) continue;
      double u = Xty(j);
      double v = 0.0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        u -= G(j, active[i]) * seg.a(static_cast<Eigen::Index>(i));
        v += G(j, active[i]) * seg.d(static_cast<Eigen::Index>(i));
      }
      for (double s : {1.0, -1.0}) {
        if (j == just_dropped && s == just_dropped_sign) continue;
        const double denom = s - v;
        if (denom == 0.0) continue;
        const double lam = 2.0 * u / denom;
        if (lam > 0.0 && lam < ceiling)
          candidates.push_back({lam, EventType::add, static_cast<int>(j), s});
      }
    }
    // Removal: active coefficient a_i - (lambda/2) d_i hits zero.
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i] == just_added) continue;
      const double di = seg.d(static_cast<Eigen::Index>(i));
      if (di == 0.0) continue;
      const double lam = 2.0 * seg.a(static_cast<Eigen::Index>(i)) / di;
      if (lam > 0.0 && lam < ceiling) candidates.push_back({lam, EventType::drop, active[i], 0.0});
    }

    if (candidates.empty()) {
      seg.lambda_lo = 0.0;
      knots.push_back(segment_coefficients(seg, 0.0));
      lambdas.push_back(0.0);
      events.push_back({event.type, event.index});
      segments.push_back(std::move(seg));
      break;
    }

    std::partial_sort(candidates.begin(), candidates.begin() + std::min<std::size_t>(2, candidates.size()),
                      candidates.end(),
                      [](const Candidate& l, const Candidate& r) { return l.lambda > r.lambda; });
    const Candidate next = candidates.front();
    if (candidates.size() > 1 &&
        candidates[1].lambda >= next.lambda * (1.0 - options.tie_tolerance))
      throw DegeneracyError("events " + describe(next) + " and " + describe(candidates[1]) +
                            " coincide at lambda = " + std::to_string(next.lambda) +
                            "; jitter the response by an infinitesimal amount");

    seg.lambda_lo = next.lambda;
    if (next.type == EventType::drop) seg.leaving = next.index;
    knots.push_back(segment_coefficients(seg, next.lambda));
    lambdas.push_back(next.lambda);
    events.push_back({event.type, event.index});
    segments.push_back(std::move(seg));

    event = next;
    current = next.lambda;
  }

  return LassoPath(std::move(design), std::move(y), std::move(lambdas), std::move(segments),
                   std::move(events), std::move(knots));
}

namespace {

FitResult make_fit(const LassoPath& path, double lambda, Eigen::VectorXd beta) {
  FitResult fit;
  fit.lambda = lambda;
  fit.mu = path.design()->X() * beta;
  fit.rss = (path.y() - fit.mu).squaredNorm();
  fit.df_hat = static_cast<int>((beta.array() != 0.0).count());
  fit.beta = std::move(beta);
  return fit;
}

}  // namespace

FitResult fit_at(const LassoPath& path, double lambda) {
  return make_fit(path, lambda, path.coefficients_at(lambda));
}

FitResult fit_at_knot(const LassoPath& path, std::size_t m) {
  return make_fit(path, path.transition_lambdas().at(m), path.knot(m));
}

KktReport kkt_check(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double lambda) {
  const Eigen::VectorXd corr = 2.0 * (X.transpose() * (y - X * beta));
  KktReport report;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) {
      const double s = beta(j) > 0 ? 1.0 : -1.0;
      report.active_violation = std::max(report.active_violation, std::abs(corr(j) - lambda * s));
    } else {
      report.inactive_violation = std::max(report.inactive_violation, std::abs(corr(j)) - lambda);
    }
  }
  return report;
}

KktReport kkt_check(const StandardizedDataset& ds, const Eigen::VectorXd& beta, double lambda) {
  return kkt_check(ds.X(), ds.y(), beta, lambda);
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda) {
  return (y - X * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

double lipschitz_probe(const DesignPtr& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& delta, double lambda, const PathOptions& options) {
  const double norm = delta.norm();
  if (norm == 0.0) throw DomainError("lipschitz_probe: zero perturbation");
  const FitResult base = fit_at(compute_path(design, y, options), lambda);
  const FitResult moved = fit_at(compute_path(design, y + delta, options), lambda);
  return (moved.mu - base.mu).norm() / norm;
}

}  // namespace lassodf
