#ifndef FLINT_RUN_CONFIG_HPP
#define FLINT_RUN_CONFIG_HPP

#include <string>
#include <vector>

#include "flint/engine.hpp"
#include "flint/learn.hpp"
#include "flint/mine.hpp"
#include "flint/resolve.hpp"

namespace flint::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything a command run depends on, serializable as flat `key = value`
// text (keys match the flag names) and embedded verbatim in report headers
// so any artifact names the exact configuration that produced it.
struct RunConfig {
  // engine
  unsigned seed = 1;
  double timeout_secs = 30.0;
  int max_paths = 4096;
  int L = 10;
  int loop_bound = 8;
  std::string search = "dfs";            // dfs | bfs
  std::string store_key_mode = "base";   // base | offset
  // mining thresholds (kept as decimal text; parsed exactly downstream)
  std::string min_support = "0.01";
  std::string min_confidence = "0.6";
  std::string locate = "directive";      // directive | name
  // learning
  std::string source = "combined";       // stack | constraints | combined
  std::string model = "svm";             // nb | svm | rf
  double test_fraction = 0.2;
  int cv_repeats = 5;
  int cv_folds = 10;
  int smote_k = 5;
  double svm_lambda = 1e-4;
  int svm_epochs = 50;
  int rf_trees = 100;
  int rf_max_depth = 16;
  std::string fractions = "0.25,0.5,0.75";  // partial-data ablation steps
  // reporting
  bool report_times = false;  // real seconds in metrics columns (breaks rerun identity)
  std::vector<std::string> exclude = {"spec_check*"};  // trace cleaning patterns
};

// Fixed key order; parse(to_text(c)) == c.
std::string to_text(const RunConfig& c);
// Applies `key = value` lines over `base`. '#' and blank lines are skipped.
// Unknown keys or unparsable values are usage errors.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

// "# flint <version>" followed by one "# key = value" line per field.
std::vector<std::string> header_comments(const RunConfig& c);

symex::EngineConfig engine_config(const RunConfig& c);
flc::ResolveOptions resolve_options(const RunConfig& c);
learn::EvalPlan eval_plan(const RunConfig& c);
learn::Hyperparams hyperparams(const RunConfig& c);
mine::Rational min_support_rational(const RunConfig& c);
mine::Rational min_confidence_rational(const RunConfig& c);
std::vector<double> partial_fractions(const RunConfig& c);

}  // namespace flint::cli

#endif
