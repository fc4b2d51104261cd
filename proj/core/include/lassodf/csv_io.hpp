#pragma once

#include "lassodf/dof_selection.hpp"
#include "lassodf/lars_path.hpp"
#include "lassodf/sure_mc.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lassodf::csv {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// m,lambda,event_type,event_index,active_size. active_size is the number of
// nonzero coefficients just below lambda_m; the last row (lambda = 0) has
// event "end" and the size of the least-squares fit.
void write_transitions(std::ostream& out, const LassoPath& path);

// lambda,<name_1>,...,<name_p>: one row per transition point.
void write_coefficients(std::ostream& out, const LassoPath& path,
                        const std::vector<std::string>& names);

struct CoefficientRow {
  double lambda = 0.0;
  Eigen::VectorXd beta;
};
std::vector<CoefficientRow> read_coefficients(std::istream& in);

// m,lambda,rss,df_hat,cp,aic,bic,cp_min,aic_min,bic_min.
void write_selection(std::ostream& out, const LassoPath& path, double sigma2);

// lambda,df_hat,rss and, when sigma2 is given, cp,aic,bic.
void write_df_curve(std::ostream& out, const LassoPath& path, const std::vector<double>& lambdas,
                    std::optional<double> sigma2);

// lambda,df_mc,e_active,bias,se,ci_lo,ci_hi.
void write_mc_report(std::ostream& out, const MonteCarloReport& report);

// k,df_mc,bias,se,n_valid_replications.
void write_conjecture(std::ostream& out, const ConjectureReport& report);

}  // namespace lassodf::csv
