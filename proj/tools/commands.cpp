#include "commands.hpp"

#include "lassodf/csv_io.hpp"
#include "lassodf/dataset.hpp"
#include "lassodf/dof_selection.hpp"
#include "lassodf/error.hpp"
#include "lassodf/lars_path.hpp"
#include "lassodf/sure_mc.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lassodf::cli {
namespace {

bool is_monte_carlo(const std::string& sub) {
  return sub == "verify-df" || sub == "conjecture-bias";
}

StandardizedDataset load_input(const RunConfig& config) {
  RawDataset raw = load_csv(config.input, config.response);
  if (config.expand_quadratic) raw = expand_quadratic(raw, !config.keep_binary_squares);
  return standardize(raw);
}

PathOptions path_options(const RunConfig& config) {
  PathOptions opts;
  opts.max_steps = config.max_steps;
  return opts;
}

double resolve_sigma2(const RunConfig& config, const StandardizedDataset& ds) {
  if (config.sigma2) return *config.sigma2;
  return estimate_sigma2(ds);
}

// The CSV goes to the output file if one is named, else to `out`; the summary
// then goes wherever the CSV does not.
class Sink {
 public:
  Sink(const RunConfig& config, std::ostream& out, std::ostream& err)
      : out_(out), err_(err), to_file_(!config.output.empty()) {
    if (to_file_) {
      file_.open(config.output, std::ios::binary);
      if (!file_) throw DataError("cannot open output file \"" + config.output + "\"");
    }
  }

  std::ostream& csv() { return to_file_ ? static_cast<std::ostream&>(file_) : out_; }
  std::ostream& summary() { return to_file_ ? out_ : err_; }

  void finish() {
    if (!to_file_) return;
    file_.close();
    if (!file_) throw DataError("failed writing output file");
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool to_file_;
  std::ofstream file_;
};

std::vector<double> resolve_lambdas(const RunConfig& config, const LassoPath& path) {
  std::vector<double> lambdas = parse_lambda_list(config.lambdas);
  if (lambdas.empty()) lambdas = path.transition_lambdas();
  return lambdas;
}

SyntheticModel synthetic_model(const RunConfig& config, const StandardizedDataset& ds) {
  const OlsFit ols = ols_fit(*ds.design(), ds.y());
  double sigma2 = config.sigma2 ? *config.sigma2 : ols.sigma2;
  if (!(sigma2 > 0.0)) throw DomainError("noise variance estimate is zero; pass --sigma2");
  const double sigma = std::sqrt(sigma2) * config.sigma_scale;
  return make_synthetic_model(ds.design(), ols.beta, sigma);
}

MonteCarloOptions mc_options(const RunConfig& config) {
  MonteCarloOptions opts;
  opts.threads = config.threads;
  opts.path = path_options(config);
  return opts;
}

}  // namespace

std::vector<double> parse_lambda_list(const std::string& text) {
  if (text == "transitions") return {};
  std::vector<double> values;
  std::istringstream cells(text);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t");
    const auto last = cell.find_last_not_of(" \t");
    if (first == std::string::npos) throw DomainError("--lambdas: empty entry");
    cell = cell.substr(first, last - first + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v) || v < 0.0)
      throw DomainError("--lambdas: \"" + cell + "\" is not a nonnegative number");
    values.push_back(v);
  }
  if (values.empty()) throw DomainError("--lambdas: no values");
  return values;
}

void validate(const RunConfig& config) {
  if (config.input.empty()) throw DomainError("--input is required");
  if (config.sigma2 && !(*config.sigma2 > 0.0 && std::isfinite(*config.sigma2)))
    throw DomainError("--sigma2 must be positive and finite");
  if (!(config.sigma_scale > 0.0 && std::isfinite(config.sigma_scale)))
    throw DomainError("--sigma-scale must be positive and finite");
  if (is_monte_carlo(config.subcommand) && config.replications < 2)
    throw DomainError("--replications must be at least 2");
  if (config.max_steps < 0) throw DomainError("--max-steps must be nonnegative");
  parse_criterion(config.criterion);
  parse_lambda_list(config.lambdas);
}

int cmd_path(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const StandardizedDataset ds = load_input(config);
  const LassoPath path = compute_path(ds, path_options(config));

  Sink sink(config, out, err);
  csv::write_transitions(sink.csv(), path);
  sink.finish();
  if (!config.coefficients.empty()) {
    std::ofstream coef(config.coefficients, std::ios::binary);
    if (!coef) throw DataError("cannot open coefficient file \"" + config.coefficients + "\"");
    csv::write_coefficients(coef, path, ds.names());
  }
  sink.summary() << "path: " << path.num_knots() << " transition points, lambda_max "
                 << csv::format_double(path.lambda_max()) << '\n';
  return kOk;
}

int cmd_select(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const StandardizedDataset ds = load_input(config);
  const Criterion criterion = parse_criterion(config.criterion);
  const double sigma2 = resolve_sigma2(config, ds);
  if (!(sigma2 > 0.0)) throw DomainError("noise variance estimate is zero; pass --sigma2");
  const LassoPath path = compute_path(ds, path_options(config));
  const SelectionReport report = select_optimal(path, criterion, sigma2);

  Sink sink(config, out, err);
  csv::write_selection(sink.csv(), path, sigma2);
  sink.finish();

  std::ostream& s = sink.summary();
  s << to_string(criterion) << ": lambda " << csv::format_double(report.chosen_lambda) << ", "
    << report.chosen_df() << " nonzero coefficients\n";
  for (Eigen::Index j = 0; j < report.chosen_beta.size(); ++j) {
    if (report.chosen_beta(j) != 0.0)
      s << "  " << ds.names()[static_cast<std::size_t>(j)] << ' '
        << csv::format_double(report.chosen_beta(j)) << '\n';
  }
  return kOk;
}

int cmd_df_curve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const StandardizedDataset ds = load_input(config);
  const LassoPath path = compute_path(ds, path_options(config));
  std::optional<double> sigma2 = config.sigma2;
  if (!sigma2 && ds.n() > ds.p()) {
    const double estimate = estimate_sigma2(ds);
    if (estimate > 0.0) sigma2 = estimate;
  }

  Sink sink(config, out, err);
  csv::write_df_curve(sink.csv(), path, resolve_lambdas(config, path), sigma2);
  sink.finish();
  return kOk;
}

int cmd_verify_df(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const StandardizedDataset ds = load_input(config);
  const SyntheticModel model = synthetic_model(config, ds);
  std::vector<double> lambdas = parse_lambda_list(config.lambdas);
  if (lambdas.empty()) lambdas = default_grid(model, config.seed, 50, path_options(config));

  const MonteCarloReport report =
      estimate_df_mc(model, lambdas, config.replications, config.seed, mc_options(config));
  const UnbiasednessSummary summary = unbiasedness_report(report);

  Sink sink(config, out, err);
  csv::write_mc_report(sink.csv(), report);
  sink.finish();
  sink.summary() << "coverage fraction " << csv::format_double(summary.coverage_fraction)
                 << " over " << lambdas.size() << " lambdas, " << report.valid << " of "
                 << report.B << " replications, sigma " << csv::format_double(model.sigma)
                 << '\n';
  return kOk;
}

int cmd_conjecture_bias(const RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  const StandardizedDataset ds = load_input(config);
  const SyntheticModel model = synthetic_model(config, ds);
  const ConjectureReport report =
      conjecture_bias_report(model, config.replications, config.seed, mc_options(config));

  Sink sink(config, out, err);
  csv::write_conjecture(sink.csv(), report);
  sink.finish();

  double max_bias = 0.0;
  int flagged = 0;
  for (const ConjectureRow& row : report.rows) {
    if (row.n_valid < 2) continue;
    max_bias = std::max(max_bias, std::abs(row.bias));
    if (std::abs(row.bias) > 3.0 * row.se) ++flagged;
  }
  sink.summary() << "max |bias| " << csv::format_double(max_bias) << ", " << flagged
                 << " steps with |bias| > 3 se\n";
  return kOk;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == "path") return cmd_path(config, out, err);
    if (config.subcommand == "select") return cmd_select(config, out, err);
    if (config.subcommand == "df-curve") return cmd_df_curve(config, out, err);
    if (config.subcommand == "verify-df") return cmd_verify_df(config, out, err);
    if (config.subcommand == "conjecture-bias") return cmd_conjecture_bias(config, out, err);
    err << "error: unknown subcommand \"" << config.subcommand << "\"\n";
    return kInputError;
  } catch (const DegeneracyError& e) {
    err << "degeneracy: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const RankDeficiencyError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lasso paths, degrees of freedom and model selection"};
  app.require_subcommand(1);

  RunConfig config;
  double sigma2 = 0.0;
  std::string seed_text = "1";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "CSV file with a header row")->required();
    sub->add_option("--response", config.response, "response column name or 0-based index (default: last)");
    sub->add_option("-o,--output", config.output, "output CSV (default: stdout)");
    sub->add_flag("--expand-quadratic", config.expand_quadratic,
                  "add pairwise interactions and squares");
    sub->add_flag("--keep-binary-squares", config.keep_binary_squares,
                  "with --expand-quadratic, keep squares of two-valued columns");
    sub->add_option("--sigma2", sigma2, "known noise variance");
    sub->add_option("--criterion", config.criterion, "cp, aic or bic");
    sub->add_option("--lambdas", config.lambdas, "comma-separated list or \"transitions\"");
    sub->add_option("--max-steps", config.max_steps, "path step limit (0: 8p)");
  };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--replications", config.replications, "Monte Carlo replications");
    sub->add_option("--seed", seed_text, "master seed");
    sub->add_option("--sigma-scale", config.sigma_scale, "multiplier on the noise level");
    sub->add_option("--threads", config.threads, "worker threads (0: all cores)");
  };

  CLI::App* path = app.add_subcommand("path", "transition points and coefficient table");
  add_common(path);
  path->add_option("--coefficients", config.coefficients, "coefficient table CSV");
  CLI::App* select = app.add_subcommand("select", "Cp/AIC/BIC model selection");
  add_common(select);
  CLI::App* curve = app.add_subcommand("df-curve", "df estimate and criteria along a grid");
  add_common(curve);
  CLI::App* verify = app.add_subcommand("verify-df", "Monte Carlo check that df_hat is unbiased");
  add_common(verify);
  add_mc(verify);
  CLI::App* conj = app.add_subcommand("conjecture-bias", "Monte Carlo df at the last k-step");
  add_common(conj);
  add_mc(conj);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {  // --help
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  for (CLI::App* sub : app.get_subcommands()) config.subcommand = sub->get_name();
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--sigma2") > 0) config.sigma2 = sigma2;
  {
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
    if (ec != std::errc() || ptr != seed_text.data() + seed_text.size()) {
      err << "error: --seed must be a nonnegative integer\n";
      return kInputError;
    }
    config.seed = seed;
  }
  return execute(config, out, err);
}

}  // namespace lassodf::cli
