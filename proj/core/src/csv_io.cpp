#include "lassodf/csv_io.hpp"

#include "lassodf/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace lassodf::csv {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_transitions(std::ostream& out, const LassoPath& path) {
  out << "m,lambda,event_type,event_index,active_size\n";
  const auto& lambdas = path.transition_lambdas();
  for (std::size_t m = 0; m < lambdas.size(); ++m) {
    out << m << ',' << format_double(lambdas[m]) << ',';
    if (m < path.events().size()) {
      const PathEvent& e = path.events()[m];
      out << (e.type == EventType::add ? "add" : "drop") << ',' << e.index << ','
          << path.segments()[m].active.size();
    } else {
      out << "end,," << path.active_count_at_knot(m);
    }
    out << '\n';
  }
}

void write_coefficients(std::ostream& out, const LassoPath& path,
                        const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != path.p())
    throw DomainError("write_coefficients: need one name per predictor");
  out << "lambda";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t m = 0; m < path.num_knots(); ++m) {
    out << format_double(path.transition_lambdas()[m]);
    const Eigen::VectorXd& beta = path.knot(m);
    for (Eigen::Index j = 0; j < beta.size(); ++j) out << ',' << format_double(beta(j));
    out << '\n';
  }
}

std::vector<CoefficientRow> read_coefficients(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("coefficient table: missing header");
  std::vector<CoefficientRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError("coefficient table: bad number \"" + cell + "\"");
      values.push_back(v);
    }
    if (values.size() < 2) throw DataError("coefficient table: short row");
    CoefficientRow row;
    row.lambda = values.front();
    row.beta = Eigen::Map<Eigen::VectorXd>(values.data() + 1, static_cast<Eigen::Index>(values.size() - 1));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_selection(std::ostream& out, const LassoPath& path, double sigma2) {
  const SelectionReport by_cp = select_optimal(path, Criterion::cp, sigma2);
  const SelectionReport by_aic = select_optimal(path, Criterion::aic, sigma2);
  const SelectionReport by_bic = select_optimal(path, Criterion::bic, sigma2);
  out << "m,lambda,rss,df_hat,cp,aic,bic,cp_min,aic_min,bic_min\n";
  for (std::size_t m = 0; m < by_cp.rows.size(); ++m) {
    const SelectionRow& r = by_cp.rows[m];
    out << r.m << ',' << format_double(r.lambda) << ',' << format_double(r.rss) << ',' << r.df_hat
        << ',' << format_double(r.value) << ',' << format_double(by_aic.rows[m].value) << ','
        << format_double(by_bic.rows[m].value) << ',' << (by_cp.chosen_m == m ? 1 : 0) << ','
        << (by_aic.chosen_m == m ? 1 : 0) << ',' << (by_bic.chosen_m == m ? 1 : 0) << '\n';
  }
}

void write_df_curve(std::ostream& out, const LassoPath& path, const std::vector<double>& lambdas,
                    std::optional<double> sigma2) {
  out << "lambda,df_hat,rss";
  if (sigma2) out << ",cp,aic,bic";
  out << '\n';
  for (double lambda : lambdas) {
    const FitResult fit = fit_at(path, lambda);
    out << format_double(lambda) << ',' << fit.df_hat << ',' << format_double(fit.rss);
    if (sigma2) {
      for (Criterion c : {Criterion::cp, Criterion::aic, Criterion::bic})
        out << ',' << format_double(criterion_value(c, fit.rss, fit.df_hat, path.n(), *sigma2));
    }
    out << '\n';
  }
}

void write_mc_report(std::ostream& out, const MonteCarloReport& report) {
  const UnbiasednessSummary summary = unbiasedness_report(report);
  out << "lambda,df_mc,e_active,bias,se,ci_lo,ci_hi\n";
  for (std::size_t l = 0; l < report.lambdas.size(); ++l) {
    out << format_double(report.lambdas[l]) << ',' << format_double(report.df_mc[l]) << ','
        << format_double(report.e_active[l]) << ',' << format_double(report.bias[l]) << ','
        << format_double(report.se[l]) << ',' << format_double(summary.rows[l].ci_lo) << ','
        << format_double(summary.rows[l].ci_hi) << '\n';
  }
}

void write_conjecture(std::ostream& out, const ConjectureReport& report) {
  out << "k,df_mc,bias,se,n_valid_replications\n";
  for (const ConjectureRow& row : report.rows) {
    out << row.k << ',' << format_double(row.df_mc) << ',' << format_double(row.bias) << ','
        << format_double(row.se) << ',' << row.n_valid << '\n';
  }
}

}  // namespace lassodf::csv
