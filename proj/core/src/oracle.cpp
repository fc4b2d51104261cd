#include "lassodf/oracle.hpp"

#include "lassodf/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <string>

namespace lassodf::oracle {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

OracleSolution solve_iterative(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                               const IterativeOptions& options) {
  if (!(lambda >= 0.0)) throw DomainError("solve_iterative: lambda must be nonnegative");
  const Eigen::Index p = X.cols();
  OracleSolution sol;
  sol.beta = options.start.size() == p ? options.start : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y - X * sol.beta;
  const Eigen::VectorXd sq_norms = X.colwise().squaredNorm().transpose();

  for (long sweep = 1; sweep <= options.max_iter; ++sweep) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = sol.beta(j);
      const double z = X.col(j).dot(r) + sq_norms(j) * old;
      const double updated = soft_threshold(z, 0.5 * lambda) / sq_norms(j);
      if (updated != old) {
        r -= X.col(j) * (updated - old);
        sol.beta(j) = updated;
      }
    }
    sol.iterations = sweep;
    sol.max_kkt_violation = kkt_check(X, y, sol.beta, lambda).max();
    if (sol.max_kkt_violation <= options.tol) return sol;
  }
  throw ConvergenceError("coordinate descent did not reach KKT tolerance " +
                         std::to_string(options.tol) + " in " + std::to_string(options.max_iter) +
                         " sweeps (violation " + std::to_string(sol.max_kkt_violation) + ")");
}

OracleSolution solve_iterative(const StandardizedDataset& ds, double lambda,
                               const IterativeOptions& options) {
  return solve_iterative(ds.X(), ds.y(), lambda, options);
}

Eigen::VectorXd solve_signpattern(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index p = X.cols();
  if (p > 6) throw DomainError("solve_signpattern: p must be at most 6");
  if (!(lambda >= 0.0)) throw DomainError("solve_signpattern: lambda must be nonnegative");
  const Eigen::VectorXd Xty = X.transpose() * y;
  const double tol = 1e-10 * (1.0 + 2.0 * Xty.cwiseAbs().maxCoeff());

  long patterns = 1;
  for (Eigen::Index j = 0; j < p; ++j) patterns *= 3;

  Eigen::VectorXd best;
  double best_objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXi signs(p);
  for (long code = 0; code < patterns; ++code) {
    long rest = code;
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < p; ++j) {
      signs(j) = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      if (signs(j) != 0) active.push_back(j);
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (!active.empty()) {
      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd XB(X.rows(), k);
      Eigen::VectorXd rhs(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        XB.col(i) = X.col(active[i]);
        rhs(i) = Xty(active[i]) - 0.5 * lambda * signs(active[i]);
      }
      const Eigen::VectorXd bB = (XB.transpose() * XB).llt().solve(rhs);
      bool consistent = true;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (bB(i) * signs(active[i]) <= 0.0) consistent = false;
        beta(active[i]) = bB(i);
      }
      if (!consistent) continue;
    }
    if (kkt_check(X, y, beta, lambda).max() > tol) continue;
    const double objective = lasso_objective(X, y, beta, lambda);
    if (objective < best_objective) {
      best_objective = objective;
      best = beta;
    }
  }
  if (best.size() == 0)
    throw DegeneracyError("solve_signpattern: no sign pattern satisfies the KKT conditions");
  return best;
}

Eigen::VectorXd solve_signpattern(const StandardizedDataset& ds, double lambda) {
  return solve_signpattern(ds.X(), ds.y(), lambda);
}

PathOracleComparison compare_path_oracle(const LassoPath& path, const std::vector<double>& lambdas,
                                         double tol) {
  const Eigen::MatrixXd& X = path.design()->X();
  IterativeOptions options;
  options.tol = 1e-11 * (1.0 + 2.0 * (X.transpose() * path.y()).cwiseAbs().maxCoeff());
  PathOracleComparison result;
  for (double lambda : lambdas) {
    const Eigen::VectorXd from_path = path.coefficients_at(lambda);
    const OracleSolution sol = solve_iterative(X, path.y(), lambda, options);
    result.max_discrepancy =
        std::max(result.max_discrepancy, (from_path - sol.beta).cwiseAbs().maxCoeff());
  }
  result.passed = result.max_discrepancy <= tol;
  return result;
}

}  // namespace lassodf::oracle
