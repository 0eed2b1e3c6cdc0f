#ifndef FLINT_CLI_HPP
#define FLINT_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

#include "flint/run_config.hpp"

// Command implementations behind the `flint` binary. Each returns a process
// exit code (0 success, 3 truncated-but-written) and throws flint::Error for
// usage/input/internal failures; the binary maps those onto exit codes too.

namespace flint::cli {

struct ExtractArgs {
  std::string src, products, out_paths, out_deps;
};

struct MineArgs {
  std::string deps, out;
  std::vector<std::string> units;  // sources for name-mode function lookup
};

struct TrainArgs {
  std::string paths, out_model, out_metrics, dataset;
};

struct PredictArgs {
  std::string paths, model, out;
  std::string source;  // optional; must agree with the model's source
};

struct AblateArgs {
  std::string paths, out_loio, out_partial, out_importance, dataset;
};

struct GenBenchArgs {
  std::string out_dir;
  bool big_unit = false;  // also emit the 120-feature scalability unit
  bool validate = true;
};

struct ReportArgs {
  std::string paths, deps, out;  // either corpus may be empty
};

int cmd_extract(const RunConfig& cfg, const ExtractArgs& a, std::ostream& log);
int cmd_mine(const RunConfig& cfg, const MineArgs& a, std::ostream& log);
int cmd_train(const RunConfig& cfg, const TrainArgs& a, std::ostream& log);
int cmd_predict(const RunConfig& cfg, const PredictArgs& a, std::ostream& log);
int cmd_ablate(const RunConfig& cfg, const AblateArgs& a, std::ostream& log);
int cmd_gen_bench(const RunConfig& cfg, const GenBenchArgs& a, std::ostream& log);
int cmd_report(const RunConfig& cfg, const ReportArgs& a, std::ostream& log);

}  // namespace flint::cli

#endif
