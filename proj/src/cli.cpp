#include "flint/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "flint/annotate.hpp"
#include "flint/bench.hpp"
#include "flint/error.hpp"
#include "flint/featloc.hpp"
#include "flint/parser.hpp"
#include "flint/records.hpp"
#include "flint/resolve.hpp"

namespace flint::cli {

namespace {

std::string fixed(double v, int places) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(places) << v;
  return o.str();
}

std::string comment_block(const RunConfig& cfg) {
  std::string out;
  for (const auto& line : header_comments(cfg)) out += "# " + line + "\n";
  return out;
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& ctx) {
  throw Error(e.code, ctx + ": " + e.what());
}

}  // namespace

int cmd_extract(const RunConfig& cfg, const ExtractArgs& a, std::ostream& log) {
  auto unit = flc::parse_unit_file(a.src);
  auto products = flc::parse_products_file(a.products);
  if (products.empty())
    fail_input("product file " + a.products + " defines no products");
  auto annotated = modelx::annotate_metadata_vars(unit);
  auto ropt = resolve_options(cfg);
  auto ecfg = engine_config(cfg);

  std::vector<modelx::PathRecord> paths;
  using DepKey = std::tuple<std::string, std::string, int, std::string, int, std::string>;
  std::map<DepKey, modelx::DepRecord> dep_union;
  bool truncated_any = false;

  for (const auto& p : products) {
    // The result's dependence pairs point into the product's program; keep
    // it alive until the records below are built.
    flc::IrProgram prog;
    symex::ExtractResult res;
    try {
      prog = flc::resolve_product(annotated, p, ropt);
      res = symex::extract_feature_models(prog, ecfg);
    } catch (const Error& e) {
      rethrow_with_context(e, "product " + p.name);
    }
    truncated_any |= res.truncated;
    auto recs = modelx::make_path_records(res, p.name);
    int n_fail = static_cast<int>(res.fail.size());
    log << p.name << ": paths=" << res.paths_terminated
        << " normal=" << res.normal.size() << " failure=" << n_fail
        << " bound_exhausted=" << res.bound_exhausted
        << " ss=" << res.ss.size() << " sl=" << res.sl.size()
        << (res.truncated ? " truncated" : "") << "\n";
    paths.insert(paths.end(), recs.begin(), recs.end());
    for (const auto& d : modelx::make_dep_records(res)) {
      DepKey key{d.kind, d.src_loc.file, d.src_loc.line, d.dst_loc.file,
                 d.dst_loc.line, d.object};
      dep_union.emplace(std::move(key), d);
    }
  }

  int dropped = 0;
  auto cleaned = modelx::clean_records(paths, cfg.exclude, &dropped);
  std::vector<modelx::DepRecord> deps;
  deps.reserve(dep_union.size());
  for (auto& [k, v] : dep_union) deps.push_back(v);

  modelx::emit_path_corpus(cleaned, a.out_paths);
  modelx::emit_dep_corpus(deps, a.out_deps);
  log << "wrote " << cleaned.size() << " path records to " << a.out_paths;
  if (dropped) log << " (" << dropped << " dropped by trace cleaning)";
  log << "\nwrote " << deps.size() << " dependency records to " << a.out_deps << "\n";
  if (truncated_any) {
    log << "warning: extraction truncated (timeout or path budget)\n";
    return static_cast<int>(Errc::truncated);
  }
  return 0;
}

int cmd_mine(const RunConfig& cfg, const MineArgs& a, std::ostream& log) {
  auto deps = modelx::read_dep_corpus(a.deps);
  auto min_sup = min_support_rational(cfg);
  auto min_conf = min_confidence_rational(cfg);

  std::vector<mine::RuleRow> rows;
  size_t located = 0;
  if (deps.empty()) {
    log << "warning: dependency corpus " << a.deps << " is empty; writing an empty report\n";
  } else {
    featloc::FunctionIndex index;
    bool name_mode = cfg.locate == "name";
    if (name_mode) {
      if (a.units.empty())
        fail_usage("locate mode 'name' requires at least one --unit source file");
      for (const auto& u : a.units) index.add_unit(flc::parse_unit_file(u));
    }
    std::vector<mine::ItemsetRecord> records;
    for (const auto& d : deps) {
      auto located_dep = name_mode ? featloc::locate_by_name(d, index)
                                   : featloc::locate_by_directive(d);
      if (!located_dep) continue;
      ++located;
      records.push_back(mine::ItemsetRecord{mine::encode(*located_dep)});
    }
    auto frequent = mine::apriori(records, min_sup);
    auto rules = mine::filter_rules(mine::derive_rules(frequent, min_conf));
    rows = mine::rule_rows(rules);
  }

  modelx::write_text_atomic(a.out, mine::rules_csv(rows, header_comments(cfg)));
  log << "read " << deps.size() << " dependencies, located " << located
      << ", wrote " << rows.size() << " rules to " << a.out << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const TrainArgs& a, std::ostream& log) {
  auto corpus = modelx::read_path_corpus(a.paths);
  auto source = learn::parse_source(cfg.source);
  auto kind = learn::parse_model_kind(cfg.model);
  auto plan = eval_plan(cfg);
  plan.hp = hyperparams(cfg);
  std::string dataset = a.dataset.empty() ? stem_of(a.paths) : a.dataset;

  auto eval = learn::evaluate(corpus, source, kind, plan);

  std::ostringstream csv;
  csv << comment_block(cfg);
  csv << "# cv-mean-bac = " << fixed(eval.cv_mean_bac, 6) << "\n";
  csv << "# cv-folds-redrawn = " << eval.folds_redrawn << "\n";
  csv << "# smote-duplicated = " << (eval.smote_duplicated ? "true" : "false") << "\n";
  csv << learn::metrics_csv_header() << "\n";
  csv << learn::metrics_csv_row(dataset, source, kind, eval.held_out,
                                cfg.report_times)
      << "\n";
  modelx::write_text_atomic(a.out_metrics, csv.str());
  learn::save_model(a.out_model, eval.model);

  log << dataset << " " << learn::source_name(source) << " "
      << learn::model_kind_name(kind) << ": held-out bac=" << fixed(eval.held_out.bac, 6)
      << " recall=" << fixed(eval.held_out.recall, 6)
      << " precision=" << fixed(eval.held_out.precision, 6)
      << " cv-mean-bac=" << fixed(eval.cv_mean_bac, 6) << "\n";
  log << "wrote model to " << a.out_model << ", metrics to " << a.out_metrics << "\n";
  return 0;
}

int cmd_predict(const RunConfig& cfg, const PredictArgs& a, std::ostream& log) {
  auto model = learn::load_model(a.model);
  auto corpus = modelx::read_path_corpus(a.paths);
  if (!a.source.empty()) {
    auto requested = learn::parse_source(a.source);
    if (requested != model.vocab.source)
      fail_input("model was trained on source '" +
                 learn::source_name(model.vocab.source) + "' but '" +
                 learn::source_name(requested) + "' was requested");
  }

  auto x = learn::vectorize_with(corpus, model.vocab);
  auto pred = model.predict(x);

  std::ostringstream out;
  out << comment_block(cfg);
  out << "index,product,predicted,sequences\n";
  int flagged = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    bool fail_pred = pred[i] == 1;
    flagged += fail_pred ? 1 : 0;
    out << i << "," << corpus[i].product << ","
        << (fail_pred ? "failure" : "normal") << ",";
    if (fail_pred) {
      for (size_t s = 0; s < corpus[i].call_sequences.size(); ++s) {
        if (s) out << " | ";
        out << symex::serialize_sequence(corpus[i].call_sequences[s]);
      }
    }
    out << "\n";
  }
  modelx::write_text_atomic(a.out, out.str());
  log << "flagged " << flagged << " of " << corpus.size()
      << " paths as predicted failures; wrote " << a.out << "\n";
  return 0;
}

int cmd_ablate(const RunConfig& cfg, const AblateArgs& a, std::ostream& log) {
  auto corpus = modelx::read_path_corpus(a.paths);
  auto source = learn::parse_source(cfg.source);
  auto kind = learn::parse_model_kind(cfg.model);
  auto plan = eval_plan(cfg);
  plan.hp = hyperparams(cfg);
  auto fractions = partial_fractions(cfg);
  std::string dataset = a.dataset.empty() ? stem_of(a.paths) : a.dataset;

  auto eval = learn::evaluate(corpus, source, kind, plan);
  auto loio = learn::leave_one_interaction_out(corpus, source, kind, plan);
  auto partial = learn::partial_data_eval(corpus, eval, source, fractions);
  learn::Model rf_model = kind == learn::ModelKind::RF
                              ? eval.model
                              : learn::evaluate(corpus, source,
                                                learn::ModelKind::RF, plan)
                                    .model;
  auto importance = learn::feature_importance(rf_model);

  std::ostringstream loio_csv;
  loio_csv << comment_block(cfg);
  loio_csv << "spec_id,failures,detected,hit\n";
  int hits = 0;
  for (const auto& r : loio.rows) {
    hits += r.detected ? 1 : 0;
    loio_csv << r.spec_id << "," << r.n_fail << "," << r.n_detected << ","
             << (r.detected ? 1 : 0) << "\n";
  }
  loio_csv << "# detected " << hits << "/" << loio.rows.size() << " ("
           << fixed(loio.percent_detected, 2) << "%)\n";
  modelx::write_text_atomic(a.out_loio, loio_csv.str());

  std::ostringstream part_csv;
  part_csv << comment_block(cfg);
  part_csv << "fraction,bac,recall,precision,dropped\n";
  for (const auto& r : partial)
    part_csv << fixed(r.fraction, 2) << "," << fixed(r.metrics.bac, 6) << ","
             << fixed(r.metrics.recall, 6) << "," << fixed(r.metrics.precision, 6)
             << "," << r.dropped << "\n";
  modelx::write_text_atomic(a.out_partial, part_csv.str());

  modelx::write_text_atomic(
      a.out_importance, comment_block(cfg) + learn::importance_csv(importance));

  log << dataset << ": interactions detected " << hits << "/" << loio.rows.size()
      << " (" << fixed(loio.percent_detected, 2) << "%)\n";
  for (const auto& r : partial)
    log << "  fraction " << fixed(r.fraction, 2) << ": bac="
        << fixed(r.metrics.bac, 6) << " dropped=" << r.dropped << "\n";
  log << "wrote " << a.out_loio << ", " << a.out_partial << ", "
      << a.out_importance << "\n";
  return 0;
}

int cmd_gen_bench(const RunConfig& cfg, const GenBenchArgs& a, std::ostream& log) {
  std::vector<bench::BenchmarkSuite> suites = {
      bench::make_mailkit(), bench::make_liftkit(), bench::make_pumpkit()};
  if (a.big_unit) suites.push_back(bench::make_megakit(cfg.seed));

  auto ecfg = engine_config(cfg);
  for (const auto& s : suites) {
    bench::write_suite(s, a.out_dir);
    log << "wrote " << a.out_dir << "/" << s.name << " (" << s.products.size()
        << " products, " << s.interactions.size() << " seeded interactions)\n";
    if (a.validate && s.name != "megakit") log << bench::validate_suite(s, ecfg);
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, const ReportArgs& a, std::ostream& log) {
  if (a.paths.empty() && a.deps.empty())
    fail_usage("report needs a path corpus, a dependency corpus, or both");

  std::ostringstream out;
  out << comment_block(cfg);

  if (!a.paths.empty()) {
    auto corpus = modelx::read_path_corpus(a.paths);
    int failures = 0, over = 0;
    std::set<std::string> products;
    std::map<std::string, int> by_spec;
    for (const auto& r : corpus) {
      products.insert(r.product);
      if (r.status == "failure") ++failures;
      if (r.over_approx) ++over;
      if (!r.spec_id.empty()) by_spec[r.spec_id]++;
    }
    out << "paths-records = " << corpus.size() << "\n"
        << "paths-failure = " << failures << "\n"
        << "paths-normal = " << corpus.size() - failures << "\n"
        << "paths-over-approx = " << over << "\n"
        << "paths-products = " << products.size() << "\n";
    for (const auto& [id, n] : by_spec)
      out << "spec " << id << " failures = " << n << "\n";
  }

  if (!a.deps.empty()) {
    auto deps = modelx::read_dep_corpus(a.deps);
    int ss = 0;
    for (const auto& d : deps) ss += d.kind == "SS" ? 1 : 0;
    out << "deps-records = " << deps.size() << "\n"
        << "deps-ss = " << ss << "\n"
        << "deps-sl = " << deps.size() - ss << "\n";
    auto tally = featloc::classify_relevance(deps, featloc::LocateMode::Directive);
    const char* kind_name[2] = {"SS", "SL"};
    for (int k = 0; k < 2; ++k)
      out << "relevance " << kind_name[k] << " fr_fr=" << tally.counts[k][1][1]
          << " fr_nfr=" << tally.counts[k][1][0]
          << " nfr_fr=" << tally.counts[k][0][1]
          << " nfr_nfr=" << tally.counts[k][0][0] << "\n";
  }

  modelx::write_text_atomic(a.out, out.str());
  log << "wrote report to " << a.out << "\n";
  return 0;
}

}  // namespace flint::cli
