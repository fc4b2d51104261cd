#include "lassodf/linalg.hpp"

#include "lassodf/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <string>

namespace lassodf {

namespace {

void check_pivot(double pivot, double diagonal, std::ptrdiff_t index) {
  if (!(pivot > kPivotTolerance * std::max(1.0, std::abs(diagonal))))
    throw RankDeficiencyError("Gram matrix is not positive definite at column " +
                                  std::to_string(index) + " (pivot " + std::to_string(pivot) + ")",
                              index);
}

}  // namespace

CholFactor CholFactor::factor(const Eigen::MatrixXd& gram, std::vector<int> order) {
  const Eigen::Index k = gram.rows();
  if (k < 1 || gram.cols() != k) throw DomainError("factor: need a non-empty square matrix");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DomainError("factor: matrix is not symmetric");
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
  }
  if (static_cast<Eigen::Index>(order.size()) != k) throw DomainError("factor: order size mismatch");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double pivot = gram(j, j) - L.row(j).head(j).squaredNorm();
    check_pivot(pivot, gram(j, j), order[j]);
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < k; ++i)
      L(i, j) = (gram(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return CholFactor(std::move(L), std::move(order));
}

CholFactor CholFactor::add_column(const Eigen::VectorXd& cross, double self_dot, int index) const {
  const Eigen::Index k = size();
  if (cross.size() != k) throw DomainError("add_column: cross-product length mismatch");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k + 1, k + 1);
  L.topLeftCorner(k, k) = L_;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
  if (k > 0) w = L_.triangularView<Eigen::Lower>().solve(cross);
  const double pivot = self_dot - w.squaredNorm();
  check_pivot(pivot, self_dot, index);
  L.row(k).head(k) = w.transpose();
  L(k, k) = std::sqrt(pivot);
  std::vector<int> order = order_;
  order.push_back(index);
  return CholFactor(std::move(L), std::move(order));
}

CholFactor CholFactor::drop_column(Eigen::Index position) const {
  const Eigen::Index k = size();
  if (position < 0 || position >= k)
    throw DomainError("drop_column: position " + std::to_string(position) + " out of range");

  // Removing row `position` of L leaves a (k-1) x k matrix whose rows from
  // `position` on carry one entry above the diagonal.
  Eigen::MatrixXd M(k - 1, k);
  M.topRows(position) = L_.topRows(position);
  M.bottomRows(k - 1 - position) = L_.bottomRows(k - 1 - position);

  for (Eigen::Index i = position; i < k - 1; ++i) {
    const double a = M(i, i);
    const double b = M(i, i + 1);
    const double r = std::hypot(a, b);
    if (r == 0.0) continue;
    const double c = a / r;
    const double s = b / r;
    // Rotate columns i and i+1 (right-multiplication by an orthogonal matrix
    // leaves M M' unchanged).
    for (Eigen::Index row = i; row < k - 1; ++row) {
      const double u = M(row, i);
      const double v = M(row, i + 1);
      M(row, i) = c * u + s * v;
      M(row, i + 1) = -s * u + c * v;
    }
  }
  Eigen::MatrixXd L = M.leftCols(k - 1).triangularView<Eigen::Lower>();
  for (Eigen::Index j = 0; j < k - 1; ++j)
    if (L(j, j) < 0) L.col(j) = -L.col(j);

  std::vector<int> order = order_;
  order.erase(order.begin() + position);
  return CholFactor(std::move(L), std::move(order));
}

Eigen::VectorXd CholFactor::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != size()) throw DomainError("solve: right-hand side length mismatch");
  if (empty()) return Eigen::VectorXd(0);
  Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(rhs);
  L_.transpose().triangularView<Eigen::Upper>().solveInPlace(v);
  return v;
}

Eigen::MatrixXd CholFactor::reconstruct() const {
  return L_ * L_.transpose();
}

}  // namespace lassodf
