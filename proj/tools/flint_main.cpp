#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flint/cli.hpp"
#include "flint/error.hpp"

namespace {

// Flag values are collected as raw text and pushed through the same
// `key = value` parser as config files, so validation and precedence live in
// one place: defaults, then --config, then explicit flags.
struct RawFlags {
  std::map<std::string, std::string> kv;
  std::vector<std::string> exclude;
  std::string text() const {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    if (!exclude.empty()) {
      out += "exclude = ";
      for (size_t i = 0; i < exclude.size(); ++i)
        out += (i ? "," : "") + exclude[i];
      out += "\n";
    }
    return out;
  }
};

void add_global_options(CLI::App& app, RawFlags& raw) {
  auto opt = [&app, &raw](const char* flag, const char* key, const char* desc) {
    app.add_option_function<std::string>(
        flag, [&raw, key](const std::string& v) { raw.kv[key] = v; }, desc);
  };
  opt("--seed", "seed", "random seed for every seeded stage");
  opt("--timeout-secs", "timeout-secs", "per-product symbolic execution budget");
  opt("--max-paths", "max-paths", "terminated-path budget per product");
  opt("-L", "L", "longest call sequences kept per normal path");
  opt("--loop-bound", "loop-bound", "loop unroll bound");
  opt("--search", "search", "worklist order: dfs | bfs");
  opt("--store-key-mode", "store-key-mode", "dependency store key: base | offset");
  opt("--min-support", "min-support", "minimum itemset support (decimal)");
  opt("--min-confidence", "min-confidence", "minimum rule confidence (decimal)");
  opt("--locate", "locate", "feature location mode: directive | name");
  opt("--source", "source", "document source: stack | constraints | combined");
  opt("--model", "model", "classifier: nb | svm | rf");
  opt("--test-fraction", "test-fraction", "held-out fraction for evaluation");
  opt("--cv-repeats", "cv-repeats", "cross-validation repeats");
  opt("--cv-folds", "cv-folds", "cross-validation folds");
  opt("--smote-k", "smote-k", "SMOTE neighbour count");
  opt("--svm-lambda", "svm-lambda", "SVM regularization strength");
  opt("--svm-epochs", "svm-epochs", "SVM training epochs");
  opt("--rf-trees", "rf-trees", "random forest size");
  opt("--rf-max-depth", "rf-max-depth", "random forest depth limit");
  opt("--fractions", "fractions", "partial-data fractions, comma separated");
  app.add_flag_function(
      "--report-times",
      [&raw](std::int64_t) { raw.kv["report-times"] = "true"; },
      "write real train/predict seconds into metrics (non-reproducible)");
  app.add_option("--exclude", raw.exclude,
                 "trace-cleaning pattern (name or prefix*); replaces the default");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-interaction analysis for FLC product lines"};
  app.set_version_flag("--version", std::string("flint ") + flint::cli::kToolVersion);
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "flat `key = value` configuration file");
  RawFlags raw;
  add_global_options(app, raw);

  flint::cli::ExtractArgs eargs;
  auto* extract = app.add_subcommand("extract", "symbolically execute every product and emit corpora");
  extract->fallthrough();
  extract->add_option("--src", eargs.src, "FLC source unit")->required();
  extract->add_option("--products", eargs.products, "product definition file")->required();
  extract->add_option("--out-paths", eargs.out_paths, "path corpus output (JSONL)")->required();
  extract->add_option("--out-deps", eargs.out_deps, "dependency corpus output (JSONL)")->required();

  flint::cli::MineArgs margs;
  auto* mine = app.add_subcommand("mine", "mine association rules from a dependency corpus");
  mine->fallthrough();
  mine->add_option("--deps", margs.deps, "dependency corpus (JSONL)")->required();
  mine->add_option("--out", margs.out, "rules report output (CSV)")->required();
  mine->add_option("--unit", margs.units, "FLC source for name-mode lookup (repeatable)");

  flint::cli::TrainArgs targs;
  auto* train = app.add_subcommand("train", "train and evaluate a termination classifier");
  train->fallthrough();
  train->add_option("--paths", targs.paths, "path corpus (JSONL)")->required();
  train->add_option("--out-model", targs.out_model, "model output (JSON)")->required();
  train->add_option("--out-metrics", targs.out_metrics, "metrics output (CSV)")->required();
  train->add_option("--dataset", targs.dataset, "dataset label in reports");

  flint::cli::PredictArgs pargs;
  auto* predict = app.add_subcommand("predict", "label a path corpus with a trained model");
  predict->fallthrough();
  predict->add_option("--paths", pargs.paths, "path corpus (JSONL)")->required();
  predict->add_option("--model-file", pargs.model, "trained model (JSON)")->required();
  predict->add_option("--out", pargs.out, "predictions output (CSV)")->required();

  flint::cli::AblateArgs aargs;
  auto* ablate = app.add_subcommand("ablate", "interaction hold-out, partial-data and importance tables");
  ablate->fallthrough();
  ablate->add_option("--paths", aargs.paths, "path corpus (JSONL)")->required();
  ablate->add_option("--out-loio", aargs.out_loio, "per-interaction hold-out table (CSV)")->required();
  ablate->add_option("--out-partial", aargs.out_partial, "partial-data table (CSV)")->required();
  ablate->add_option("--out-importance", aargs.out_importance, "token importance table (CSV)")->required();
  ablate->add_option("--dataset", aargs.dataset, "dataset label in reports");

  flint::cli::GenBenchArgs gargs;
  auto* gen = app.add_subcommand("gen-bench", "emit the benchmark product lines");
  gen->fallthrough();
  gen->add_option("--out", gargs.out_dir, "output directory")->required();
  gen->add_flag("--big-unit", gargs.big_unit, "also emit the 120-feature scalability unit");
  bool no_validate = false;
  gen->add_flag("--no-validate", no_validate, "skip the engine-backed suite self-check");

  flint::cli::ReportArgs rargs;
  auto* report = app.add_subcommand("report", "summarize corpora");
  report->fallthrough();
  report->add_option("--paths", rargs.paths, "path corpus (JSONL)");
  report->add_option("--deps", rargs.deps, "dependency corpus (JSONL)");
  report->add_option("--out", rargs.out, "report output (text)")->required();

  try {
    app.parse(argc, argv);

    flint::cli::RunConfig cfg;
    if (!config_file.empty()) cfg = flint::cli::parse_config_file(config_file, cfg);
    cfg = flint::cli::parse_config_text(raw.text(), cfg);
    gargs.validate = !no_validate;
    pargs.source = raw.kv.count("source") ? raw.kv.at("source") : "";

    if (extract->parsed()) return flint::cli::cmd_extract(cfg, eargs, std::cout);
    if (mine->parsed()) return flint::cli::cmd_mine(cfg, margs, std::cout);
    if (train->parsed()) return flint::cli::cmd_train(cfg, targs, std::cout);
    if (predict->parsed()) return flint::cli::cmd_predict(cfg, pargs, std::cout);
    if (ablate->parsed()) return flint::cli::cmd_ablate(cfg, aargs, std::cout);
    if (gen->parsed()) return flint::cli::cmd_gen_bench(cfg, gargs, std::cout);
    if (report->parsed()) return flint::cli::cmd_report(cfg, rargs, std::cout);
    return 1;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const flint::Error& e) {
    std::cerr << "flint: " << e.what() << "\n";
    return static_cast<int>(e.code);
  } catch (const std::exception& e) {
    std::cerr << "flint: internal error: " << e.what() << "\n";
    return static_cast<int>(flint::Errc::internal);
  }
}
