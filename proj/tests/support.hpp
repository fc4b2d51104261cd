#pragma once

#include "lassodf/dataset.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace support {

using Rng = std::mt19937_64;

inline std::string diabetes_csv() { return std::string(LASSODF_DATA_DIR) + "/diabetes.csv"; }

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Eigen::VectorXd normal_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Rows N(0, (1 - rho) I + rho 11').
inline Eigen::MatrixXd gaussian_design(Rng& rng, Eigen::Index n, Eigen::Index p, double rho = 0.0) {
  Eigen::MatrixXd X(n, p);
  const double a = std::sqrt(1.0 - rho), b = std::sqrt(rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double shared = normal(rng);
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = a * normal(rng) + b * shared;
  }
  return X;
}

inline lassodf::RawDataset raw_from(Eigen::MatrixXd X, Eigen::VectorXd y) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  return lassodf::make_raw_dataset(std::move(X), std::move(y), std::move(names));
}

// Random regression instance: a few strong coefficients plus noise.
inline lassodf::StandardizedDataset random_dataset(Rng& rng, Eigen::Index n, Eigen::Index p,
                                                   double rho = 0.0, double noise = 1.0) {
  Eigen::MatrixXd X = gaussian_design(rng, n, p, rho);
  Eigen::VectorXd beta(p);
  for (Eigen::Index j = 0; j < p; ++j) beta(j) = (uniform(rng, 0, 1) < 0.5 ? 0.0 : 3.0 * normal(rng));
  Eigen::VectorXd y = X * beta + noise * normal_vector(rng, n);
  return lassodf::standardize(raw_from(std::move(X), std::move(y)));
}

// n x p matrix with orthonormal, centered columns.
inline Eigen::MatrixXd orthonormal_centered(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd G = gaussian_design(rng, n, p);
  G.rowwise() -= G.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
}

inline Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index k) {
  Eigen::MatrixXd A = gaussian_design(rng, k + 3, k);
  return A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(k, k);
}

// Independent least squares by column-pivoted QR.
inline Eigen::VectorXd ols_qr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Soft-threshold degrees of freedom on an orthonormal design,
// sum_j P(|z_j| > lambda/2) with z_j ~ N(mu_j, sigma^2), by composite Simpson
// integration of the density over [-lambda/2, lambda/2].
inline double orthonormal_df_integrated(const Eigen::VectorXd& mu, double sigma, double lambda) {
  const double t = lambda / 2.0;
  if (t == 0.0) return static_cast<double>(mu.size());
  const int intervals = 4000;
  const double h = 2.0 * t / intervals;
  const double c = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
  double df = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    auto density = [&](double z) {
      const double u = (z - mu(j)) / sigma;
      return c * std::exp(-0.5 * u * u);
    };
    double sum = density(-t) + density(t);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * density(-t + i * h);
    df += 1.0 - sum * h / 3.0;
  }
  return df;
}

// Runs `body(rng, case_index)` for `count` cases, each with its own stream.
template <class Body>
void for_each_case(int count, std::uint64_t seed, Body&& body) {
  for (int c = 0; c < count; ++c) {
    Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(c));
    body(rng, c);
  }
}

}  // namespace support
