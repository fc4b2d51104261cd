#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace lassodf {

// Tabular data on its original scale.
struct RawDataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;  // one per column of X
  std::string response_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Validates the RawDataset invariants (finite entries, n >= 2, p >= 1,
// unique names, consistent sizes) and returns the assembled value.
RawDataset make_raw_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                            std::vector<std::string> names,
                            std::string response_name = "y");

// A design matrix together with its Gram matrix X'X. Shared read-only between
// a dataset, the paths computed from it and Monte Carlo replications.
class Design {
 public:
  explicit Design(Eigen::MatrixXd X);

  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  Eigen::Index n() const { return X_.rows(); }
  Eigen::Index p() const { return X_.cols(); }

 private:
  Eigen::MatrixXd X_;
  Eigen::MatrixXd gram_;
};

using DesignPtr = std::shared_ptr<const Design>;

// Centered, unit-l2-norm columns and a centered response. Immutable.
class StandardizedDataset {
 public:
  StandardizedDataset(DesignPtr design, Eigen::VectorXd y, Eigen::VectorXd col_means,
                      Eigen::VectorXd col_scales, double y_mean,
                      std::vector<std::string> names);

  const Eigen::MatrixXd& X() const { return design_->X(); }
  const Eigen::VectorXd& y() const { return y_; }
  const DesignPtr& design() const { return design_; }
  const Eigen::VectorXd& col_means() const { return col_means_; }
  // Column j of X equals (raw column j - col_means[j]) / col_scales[j].
  const Eigen::VectorXd& col_scales() const { return col_scales_; }
  double y_mean() const { return y_mean_; }
  const std::vector<std::string>& names() const { return names_; }
  Eigen::Index n() const { return design_->n(); }
  Eigen::Index p() const { return design_->p(); }

  // Same design, different response. The response is used as given (it is
  // not re-centred), which is what synthetic-response experiments need.
  StandardizedDataset with_response(Eigen::VectorXd y) const;

  // Coefficients on the raw scale: raw fit = intercept + X_raw * slopes.
  struct RawCoefficients {
    double intercept;
    Eigen::VectorXd slopes;
  };
  RawCoefficients to_raw_scale(const Eigen::VectorXd& beta) const;

 private:
  DesignPtr design_;
  Eigen::VectorXd y_;
  Eigen::VectorXd col_means_;
  Eigen::VectorXd col_scales_;
  double y_mean_;
  std::vector<std::string> names_;
};

// Reads a comma-separated file with a header row. `response` names the
// response column; if no header matches and it parses as a non-negative
// integer, it is taken as a 0-based column index. Empty means the last column.
RawDataset load_csv(const std::filesystem::path& path, const std::string& response = "");

// Loads the bundled diabetes benchmark (442 rows; AGE, SEX, BMI, BP, S1..S6
// predictors and response Y) and checks that layout.
RawDataset load_diabetes(const std::filesystem::path& path);

StandardizedDataset standardize(const RawDataset& raw);

// Main effects, then all pairwise products in lexicographic order (a*b),
// then squares (a^2) of every column except, when binary_square_drop is set,
// columns taking exactly two distinct values. Products and squares are formed
// from mean-centred main effects.
RawDataset expand_quadratic(const RawDataset& raw, bool binary_square_drop);

// Number of columns expand_quadratic produces for p predictors of which
// `binary_dropped` squares are omitted.
constexpr std::size_t expanded_column_count(std::size_t p, std::size_t binary_dropped) {
  return p + p * (p - 1) / 2 + (p - binary_dropped);
}

}  // namespace lassodf
