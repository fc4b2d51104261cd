#pragma once

#include "lassodf/dataset.hpp"
#include "lassodf/lars_path.hpp"

#include <Eigen/Core>

#include <vector>

// Reference solvers used to check the path solver. They share nothing with
// the homotopy beyond the objective definition and are intentionally slow.
namespace lassodf::oracle {

struct OracleSolution {
  Eigen::VectorXd beta;
  long iterations = 0;  // full sweeps
  double max_kkt_violation = 0.0;
};

struct IterativeOptions {
  double tol = 1e-8;
  long max_iter = 100000;
  // Optional starting point (empty = zeros).
  Eigen::VectorXd start;
};

// Cyclic coordinate minimization of ||y - Xb||^2 + lambda |b|_1:
//   b_j <- S(x_j'(y - sum_{k != j} x_k b_k), lambda / 2) / ||x_j||^2.
// Stops when the KKT violation is at most tol; throws ConvergenceError after
// max_iter sweeps.
OracleSolution solve_iterative(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                               const IterativeOptions& options = {});
OracleSolution solve_iterative(const StandardizedDataset& ds, double lambda,
                               const IterativeOptions& options = {});

// Exhaustive certificate for p <= 6: tries all 3^p sign patterns, keeps those
// whose closed-form solution is sign-consistent and satisfies the KKT
// conditions, and returns the objective minimizer among them.
Eigen::VectorXd solve_signpattern(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);
Eigen::VectorXd solve_signpattern(const StandardizedDataset& ds, double lambda);

struct PathOracleComparison {
  double max_discrepancy = 0.0;  // l-infinity over the grid
  bool passed = false;
};

PathOracleComparison compare_path_oracle(const LassoPath& path, const std::vector<double>& lambdas,
                                         double tol);

}  // namespace lassodf::oracle
