#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lassodf::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInputError = 2,
  kDegenerate = 3,
  kNoConvergence = 4,
};

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string response;  // empty = last column
  std::string criterion = "cp";
  std::optional<double> sigma2;
  double sigma_scale = 1.0;
  int replications = 2000;
  std::uint64_t seed = 1;
  std::string lambdas = "transitions";
  std::string output;        // empty = stdout
  std::string coefficients;  // path subcommand: wide coefficient table
  bool expand_quadratic = false;
  bool keep_binary_squares = false;
  unsigned threads = 0;
  int max_steps = 0;
};

// Validates cross-field invariants; throws DomainError.
void validate(const RunConfig& config);

// Each command writes its CSV to config.output (or `out` when empty) and a
// human-readable summary to `out` when a file was written, else to `err`.
// Exceptions propagate; run() maps them to exit codes.
int cmd_path(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_select(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_df_curve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify_df(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_conjecture_bias(const RunConfig& config, std::ostream& out, std::ostream& err);

// Dispatches on config.subcommand and maps errors to the exit-code contract.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and executes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "transitions" or a comma-separated list of nonnegative numbers (an empty
// result for "transitions").
std::vector<double> parse_lambda_list(const std::string& text);

}  // namespace lassodf::cli
