#include "lassodf/dataset.hpp"

#include "lassodf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace lassodf {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  // A trailing comma means an empty last cell.
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

// Two-pass centring keeps |mean| at rounding level even for offsets far from 0.
Eigen::VectorXd centred(const Eigen::VectorXd& v, double& mean) {
  mean = v.mean();
  Eigen::VectorXd c = v.array() - mean;
  const double correction = c.mean();
  c.array() -= correction;
  mean += correction;
  return c;
}

}  // namespace

RawDataset make_raw_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                            std::vector<std::string> names, std::string response_name) {
  if (X.rows() != y.size())
    throw DataError("design has " + std::to_string(X.rows()) + " rows but response has " +
                    std::to_string(y.size()));
  if (X.rows() < 2) throw DataError("need at least 2 observations, got " + std::to_string(X.rows()));
  if (X.cols() < 1) throw DataError("need at least one predictor");
  if (static_cast<Eigen::Index>(names.size()) != X.cols())
    throw DataError("got " + std::to_string(names.size()) + " names for " +
                    std::to_string(X.cols()) + " columns");
  std::unordered_set<std::string> seen;
  for (const auto& name : names)
    if (!seen.insert(name).second) throw DataError("duplicate column name \"" + name + "\"");
  if (!X.allFinite() || !y.allFinite()) throw DataError("non-finite value in data");
  return RawDataset{std::move(X), std::move(y), std::move(names), std::move(response_name)};
}

Design::Design(Eigen::MatrixXd X) : X_(std::move(X)) {
  gram_ = X_.transpose() * X_;
}

StandardizedDataset::StandardizedDataset(DesignPtr design, Eigen::VectorXd y,
                                         Eigen::VectorXd col_means, Eigen::VectorXd col_scales,
                                         double y_mean, std::vector<std::string> names)
    : design_(std::move(design)),
      y_(std::move(y)),
      col_means_(std::move(col_means)),
      col_scales_(std::move(col_scales)),
      y_mean_(y_mean),
      names_(std::move(names)) {
  if (!design_) throw DataError("null design");
  if (y_.size() != design_->n()) throw DataError("response length does not match design");
}

StandardizedDataset StandardizedDataset::with_response(Eigen::VectorXd y) const {
  return StandardizedDataset(design_, std::move(y), col_means_, col_scales_, y_mean_, names_);
}

StandardizedDataset::RawCoefficients StandardizedDataset::to_raw_scale(
    const Eigen::VectorXd& beta) const {
  if (beta.size() != p()) throw DomainError("coefficient vector has wrong length");
  Eigen::VectorXd slopes = beta.array() / col_scales_.array();
  const double intercept = y_mean_ - slopes.dot(col_means_);
  return {intercept, std::move(slopes)};
}

RawDataset load_csv(const std::filesystem::path& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  {
    std::set<std::string> seen;
    for (const auto& h : header)
      if (!seen.insert(h).second) throw DataError(path.string() + ": duplicate header \"" + h + "\"");
  }

  std::size_t response_col = header.size();
  if (response.empty()) response_col = header.size() - 1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response) response_col = j;
  if (response_col == header.size() && !response.empty()) {
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(response.data(), response.data() + response.size(), index);
    if (ec != std::errc() || ptr != response.data() + response.size() || index >= header.size())
      throw DataError(path.string() + ": no response column \"" + response + "\"");
    response_col = index;
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row_number;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError(path.string() + ": row " + std::to_string(row_number) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(trim(cells[j]), values[j]))
        throw DataError(path.string() + ": non-numeric value \"" + cells[j] + "\" at row " +
                        std::to_string(row_number) + ", column \"" + header[j] + "\"");
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2)
    throw DataError(path.string() + ": need at least 2 data rows, got " +
                    std::to_string(rows.size()));

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size()) - 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != response_col) names.push_back(header[j]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == response_col)
        y(i) = rows[i][j];
      else
        X(i, col++) = rows[i][j];
    }
  }
  return make_raw_dataset(std::move(X), std::move(y), std::move(names), header[response_col]);
}

RawDataset load_diabetes(const std::filesystem::path& path) {
  static const std::vector<std::string> expected = {"AGE", "SEX", "BMI", "BP", "S1",
                                                    "S2",  "S3",  "S4",  "S5", "S6"};
  RawDataset raw = load_csv(path, "Y");
  if (raw.n() != 442 || raw.names != expected)
    throw DataError(path.string() + ": not the diabetes layout (442 rows; AGE,SEX,BMI,BP,S1..S6,Y)");
  return raw;
}

StandardizedDataset standardize(const RawDataset& raw) {
  if (raw.n() == 0 || raw.p() == 0) throw DataError("cannot standardize an empty dataset");
  const Eigen::Index n = raw.n();
  const Eigen::Index p = raw.p();
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd means(p);
  Eigen::VectorXd scales(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double mean = 0.0;
    Eigen::VectorXd c = centred(raw.X.col(j), mean);
    const double norm = c.norm();
    if (!(norm > 1e-10 * std::max(1.0, raw.X.col(j).norm())))
      throw DataError("column \"" + raw.names[j] + "\" is constant");
    means(j) = mean;
    scales(j) = norm;
    X.col(j) = c / norm;
  }
  double y_mean = 0.0;
  Eigen::VectorXd y = centred(raw.y, y_mean);
  return StandardizedDataset(std::make_shared<const Design>(std::move(X)), std::move(y),
                             std::move(means), std::move(scales), y_mean, raw.names);
}

RawDataset expand_quadratic(const RawDataset& raw, bool binary_square_drop) {
  const Eigen::Index p = raw.p();
  if (p < 2) throw DataError("quadratic expansion needs at least 2 predictors");
  const Eigen::Index n = raw.n();

  Eigen::MatrixXd centred_cols(n, p);
  std::vector<bool> binary(p, false);
  for (Eigen::Index j = 0; j < p; ++j) {
    double mean = 0.0;
    centred_cols.col(j) = centred(raw.X.col(j), mean);
    std::set<double> distinct(raw.X.col(j).begin(), raw.X.col(j).end());
    binary[j] = distinct.size() == 2;
  }

  std::vector<Eigen::VectorXd> cols;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) {
    cols.emplace_back(raw.X.col(j));
    names.push_back(raw.names[j]);
  }
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = a + 1; b < p; ++b) {
      cols.emplace_back(centred_cols.col(a).cwiseProduct(centred_cols.col(b)));
      names.push_back(raw.names[a] + "*" + raw.names[b]);
    }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (binary_square_drop && binary[j]) continue;
    cols.emplace_back(centred_cols.col(j).cwiseAbs2());
    names.push_back(raw.names[j] + "^2");
  }

  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = cols[j];
  return make_raw_dataset(std::move(X), raw.y, std::move(names), raw.response_name);
}

}  // namespace lassodf
