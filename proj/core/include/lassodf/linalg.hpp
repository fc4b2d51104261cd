#pragma once

#include <Eigen/Core>

#include <vector>

namespace lassodf {

// Pivots at or below this (relative to the matching Gram diagonal entry) are
// treated as rank deficiency.
inline constexpr double kPivotTolerance = 1e-10;

// Cholesky factor L (L L' = Gram of the active columns) tagged with the
// predictor index of each row/column in insertion order. Values are immutable;
// add_column/drop_column return new factors.
class CholFactor {
 public:
  CholFactor() = default;

  // Factors a symmetric positive-definite matrix. `order` labels the columns
  // (defaults to 0..k-1). Throws RankDeficiencyError naming the failing index.
  static CholFactor factor(const Eigen::MatrixXd& gram, std::vector<int> order = {});

  // Appends predictor `index` with cross products `cross` (x_new' X_B, in
  // active order) and squared norm `self_dot`.
  CholFactor add_column(const Eigen::VectorXd& cross, double self_dot, int index) const;

  // Removes the column at `position` in active order. Re-triangularizes the
  // trailing block with Givens rotations.
  CholFactor drop_column(Eigen::Index position) const;

  // Solves (L L') v = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // L L'.
  Eigen::MatrixXd reconstruct() const;

  const Eigen::MatrixXd& L() const { return L_; }
  const std::vector<int>& active_order() const { return order_; }
  Eigen::Index size() const { return L_.rows(); }
  bool empty() const { return L_.rows() == 0; }

 private:
  CholFactor(Eigen::MatrixXd L, std::vector<int> order) : L_(std::move(L)), order_(std::move(order)) {}

  Eigen::MatrixXd L_;
  std::vector<int> order_;
};

}  // namespace lassodf
