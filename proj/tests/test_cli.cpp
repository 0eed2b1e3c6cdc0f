#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flint/cli.hpp"
#include "flint/error.hpp"
#include "flint/records.hpp"
#include "flint/run_config.hpp"

using namespace flint;
using namespace flint::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("flint-cli-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Non-comment lines of a report, in order.
std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

template <typename F>
void expect_error(Errc code, const std::string& fragment, F&& f) {
  try {
    f();
    FAIL_CHECK("expected an error containing: " << fragment);
  } catch (const Error& e) {
    CHECK(e.code == code);
    CHECK_MESSAGE(contains(e.what(), fragment), e.what());
  }
}

}  // namespace

TEST_CASE("config text round trips through parse") {
  RunConfig c;
  std::string text = to_text(c);
  CHECK(contains(text, "seed = 1\n"));
  CHECK(contains(text, "search = dfs\n"));
  CHECK(contains(text, "store-key-mode = base\n"));
  CHECK(contains(text, "min-support = 0.01\n"));
  CHECK(contains(text, "fractions = 0.25,0.5,0.75\n"));
  CHECK(contains(text, "report-times = false\n"));
  CHECK(contains(text, "exclude = spec_check*\n"));
  CHECK(to_text(parse_config_text(text)) == text);

  RunConfig m;
  m.seed = 99;
  m.timeout_secs = 2.5;
  m.max_paths = 17;
  m.search = "bfs";
  m.store_key_mode = "offset";
  m.min_support = "0.125";
  m.locate = "name";
  m.source = "stack";
  m.model = "rf";
  m.svm_lambda = 1e-7;
  m.fractions = "0.5";
  m.report_times = true;
  m.exclude = {"a*", "b"};
  CHECK(to_text(parse_config_text(to_text(m))) == to_text(m));
}

TEST_CASE("config lines override a base and tolerate comments") {
  RunConfig base;
  RunConfig c = parse_config_text(
      "# run settings\n"
      "\n"
      "seed = 7\n"
      "  model =  rf \n"
      "report-times = 1\n"
      "exclude = spec_check*, helper_* \n",
      base);
  CHECK(c.seed == 7);
  CHECK(c.model == "rf");
  CHECK(c.report_times == true);
  CHECK(c.exclude == std::vector<std::string>{"spec_check*", "helper_*"});
  CHECK(c.search == "dfs");  // untouched keys keep base values
  CHECK(c.max_paths == 4096);

  CHECK(parse_config_text("exclude =\n").exclude.empty());
}

TEST_CASE("malformed config lines are usage errors") {
  expect_error(Errc::usage, "unknown key 'sead'",
               [] { parse_config_text("sead = 1\n"); });
  expect_error(Errc::usage, "config line 2: expected 'key = value'",
               [] { parse_config_text("# ok\nseed 1\n"); });
  expect_error(Errc::usage, "expected an integer, got 'abc'",
               [] { parse_config_text("seed = abc\n"); });
  expect_error(Errc::usage, "expected a number, got '1x'",
               [] { parse_config_text("timeout-secs = 1x\n"); });
  expect_error(Errc::usage, "expected true/false, got 'yes'",
               [] { parse_config_text("report-times = yes\n"); });
  expect_error(Errc::usage, "expected one of dfs|bfs, got 'random'",
               [] { parse_config_text("search = random\n"); });
  expect_error(Errc::usage, "expected one of base|offset, got 'page'",
               [] { parse_config_text("store-key-mode = page\n"); });
  expect_error(Errc::usage, "expected one of directive|name, got 'guess'",
               [] { parse_config_text("locate = guess\n"); });
  expect_error(Errc::usage, "expected one of stack|constraints|combined",
               [] { parse_config_text("source = calls\n"); });
  expect_error(Errc::usage, "expected one of nb|svm|rf, got 'knn'",
               [] { parse_config_text("model = knn\n"); });
  expect_error(Errc::input, "cannot open config file",
               [] { parse_config_file("/nonexistent/flint.cfg"); });
}

TEST_CASE("header comments name the tool version and every setting") {
  RunConfig c;
  auto lines = header_comments(c);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == std::string("flint ") + kToolVersion);
  CHECK(lines[1] == "seed = 1");
  // one line per config key plus the version banner
  std::istringstream in(to_text(c));
  std::string line;
  size_t keys = 0;
  while (std::getline(in, line)) ++keys;
  CHECK(lines.size() == keys + 1);
}

TEST_CASE("derived engine and learning settings mirror the config") {
  RunConfig c;
  c.seed = 11;
  c.timeout_secs = 4.5;
  c.max_paths = 99;
  c.L = 3;
  c.loop_bound = 5;
  c.search = "bfs";
  c.store_key_mode = "offset";
  c.test_fraction = 0.3;
  c.cv_repeats = 2;
  c.cv_folds = 4;
  c.smote_k = 3;
  c.svm_lambda = 0.5;
  c.svm_epochs = 9;
  c.rf_trees = 7;
  c.rf_max_depth = 2;

  auto e = engine_config(c);
  CHECK(e.timeout_secs == 4.5);
  CHECK(e.max_paths == 99);
  CHECK(e.L == 3);
  CHECK(e.loop_bound == 5);
  CHECK(e.search == symex::EngineConfig::Search::BFS);
  CHECK(e.store_key == symex::EngineConfig::StoreKey::ObjectOffset);
  CHECK(e.seed == 11);

  CHECK(resolve_options(c).loop_bound == 5);

  auto p = eval_plan(c);
  CHECK(p.test_fraction == 0.3);
  CHECK(p.repeats == 2);
  CHECK(p.folds == 4);
  CHECK(p.smote_k == 3);
  CHECK(p.seed == 11);

  auto h = hyperparams(c);
  CHECK(h.svm_lambda == 0.5);
  CHECK(h.svm_epochs == 9);
  CHECK(h.rf_trees == 7);
  CHECK(h.rf_max_depth == 2);

  CHECK(min_support_rational(RunConfig{}) == mine::Rational::of(1, 100));
  CHECK(min_confidence_rational(RunConfig{}) == mine::Rational::of(3, 5));
}

TEST_CASE("partial-data fractions come from the config list") {
  CHECK(partial_fractions(RunConfig{}) == std::vector<double>{0.25, 0.5, 0.75});
  RunConfig c;
  c.fractions = " 0.5 ,1";
  CHECK(partial_fractions(c) == std::vector<double>{0.5, 1.0});
  c.fractions = "0";
  expect_error(Errc::usage, "values must be in (0, 1]", [&] { partial_fractions(c); });
  c.fractions = "1.5";
  expect_error(Errc::usage, "values must be in (0, 1]", [&] { partial_fractions(c); });
  c.fractions = "";
  expect_error(Errc::usage, "list is empty", [&] { partial_fractions(c); });
  c.fractions = "0.5,zebra";
  expect_error(Errc::usage, "expected a number", [&] { partial_fractions(c); });
}

TEST_CASE("commands chain into a deterministic artifact pipeline") {
  TempDir td;
  std::ostringstream log;

  RunConfig cfg;
  cfg.seed = 3;
  cfg.cv_repeats = 2;
  cfg.cv_folds = 5;
  cfg.svm_epochs = 40;
  cfg.rf_trees = 25;
  cfg.rf_max_depth = 8;

  GenBenchArgs gen;
  gen.out_dir = td.file("bench");
  gen.validate = false;
  REQUIRE(cmd_gen_bench(cfg, gen, log) == 0);
  CHECK(contains(log.str(), "wrote"));
  for (const char* s : {"mailkit", "liftkit", "pumpkit"}) {
    CAPTURE(s);
    fs::path root = fs::path(gen.out_dir) / s;
    CHECK(fs::exists(root / (std::string(s) + ".flc")));
    CHECK(fs::exists(root / "products.txt"));
    CHECK(fs::exists(root / "interactions.csv"));
  }
  CHECK(!fs::exists(fs::path(gen.out_dir) / "megakit"));

  ExtractArgs ex;
  ex.src = td.file("bench/pumpkit/pumpkit.flc");
  ex.products = td.file("bench/pumpkit/products.txt");
  ex.out_paths = td.file("pump_paths.jsonl");
  ex.out_deps = td.file("pump_deps.jsonl");
  log.str("");
  REQUIRE(cmd_extract(cfg, ex, log) == 0);
  CHECK(contains(log.str(), "paths="));
  CHECK(contains(log.str(), "failure="));
  CHECK(!contains(log.str(), "truncated"));
  auto corpus = modelx::read_path_corpus(ex.out_paths);
  REQUIRE(corpus.size() >= 8);
  auto deps = modelx::read_dep_corpus(ex.out_deps);
  REQUIRE(!deps.empty());

  SUBCASE("path budget exhaustion still writes corpora but signals truncation") {
    RunConfig tight = cfg;
    tight.max_paths = 1;
    ExtractArgs ext = ex;
    ext.out_paths = td.file("tight_paths.jsonl");
    ext.out_deps = td.file("tight_deps.jsonl");
    std::ostringstream tlog;
    CHECK(cmd_extract(tight, ext, tlog) == 3);
    CHECK(contains(tlog.str(), "truncated"));
    CHECK(!modelx::read_path_corpus(ext.out_paths).empty());
  }

  SUBCASE("extraction is reproducible byte for byte") {
    ExtractArgs again = ex;
    again.out_paths = td.file("pump_paths2.jsonl");
    again.out_deps = td.file("pump_deps2.jsonl");
    std::ostringstream relog;
    REQUIRE(cmd_extract(cfg, again, relog) == 0);
    CHECK(slurp(again.out_paths) == slurp(ex.out_paths));
    CHECK(slurp(again.out_deps) == slurp(ex.out_deps));
  }

  SUBCASE("train, predict, mine, report and ablate consume the corpora") {
    TrainArgs tr;
    tr.paths = ex.out_paths;
    tr.out_model = td.file("model.json");
    tr.out_metrics = td.file("metrics.csv");
    log.str("");
    REQUIRE(cmd_train(cfg, tr, log) == 0);
    CHECK(contains(log.str(), "held-out bac="));
    std::string metrics = slurp(tr.out_metrics);
    CHECK(metrics.rfind("# flint 0.1.0\n", 0) == 0);
    CHECK(contains(metrics, "# cv-mean-bac = "));
    CHECK(contains(metrics,
                   "dataset,source,model,bac,recall,precision,train_secs,predict_secs"));
    CHECK(contains(metrics, "\npump_paths,combined,svm,"));
    CHECK(contains(metrics, ",0.000,0.000\n"));  // timing suppressed by default

    TrainArgs tr2 = tr;
    tr2.out_model = td.file("model2.json");
    tr2.out_metrics = td.file("metrics2.csv");
    std::ostringstream relog;
    REQUIRE(cmd_train(cfg, tr2, relog) == 0);
    CHECK(slurp(tr2.out_metrics) == metrics);
    CHECK(slurp(tr2.out_model) == slurp(tr.out_model));

    PredictArgs pr;
    pr.paths = ex.out_paths;
    pr.model = tr.out_model;
    pr.out = td.file("pred.csv");
    log.str("");
    REQUIRE(cmd_predict(cfg, pr, log) == 0);
    CHECK(contains(log.str(), "flagged"));
    std::string pred = slurp(pr.out);
    auto rows = data_lines(pred);
    REQUIRE(!rows.empty());
    CHECK(rows[0] == "index,product,predicted,sequences");
    CHECK(rows.size() == corpus.size() + 1);
    size_t flagged = 0, normal = 0;
    for (size_t i = 1; i < rows.size(); ++i) {
      if (contains(rows[i], ",failure,")) {
        ++flagged;
        CHECK(contains(rows[i], "@"));  // flagged rows carry their call sequences
      }
      if (contains(rows[i], ",normal,")) {
        ++normal;
        CHECK(rows[i].back() == ',');
      }
    }
    CHECK(flagged + normal == corpus.size());
    CHECK(flagged >= 1);
    CHECK(normal >= 1);

    PredictArgs mismatched = pr;
    mismatched.source = "stack";
    expect_error(Errc::input,
                 "model was trained on source 'combined' but 'stack' was requested",
                 [&] { cmd_predict(cfg, mismatched, log); });

    MineArgs mi;
    mi.deps = ex.out_deps;
    mi.out = td.file("rules.csv");
    log.str("");
    REQUIRE(cmd_mine(cfg, mi, log) == 0);
    CHECK(contains(log.str(), "wrote"));
    auto rule_rows = data_lines(slurp(mi.out));
    REQUIRE(!rule_rows.empty());
    CHECK(rule_rows[0] == "lhs,rhs,direction,support,confidence");
    CHECK(rule_rows.size() >= 2);  // pump interactions yield at least one rule

    MineArgs mi2 = mi;
    mi2.out = td.file("rules2.csv");
    REQUIRE(cmd_mine(cfg, mi2, log) == 0);
    CHECK(slurp(mi2.out) == slurp(mi.out));

    MineArgs empty;
    empty.deps = td.file("empty_deps.jsonl");
    empty.out = td.file("empty_rules.csv");
    spit(empty.deps, "");
    log.str("");
    REQUIRE(cmd_mine(cfg, empty, log) == 0);
    CHECK(contains(log.str(), "is empty"));
    CHECK(data_lines(slurp(empty.out)) ==
          std::vector<std::string>{"lhs,rhs,direction,support,confidence"});

    RunConfig by_name = cfg;
    by_name.locate = "name";
    MineArgs no_units = mi;
    expect_error(Errc::usage, "locate mode 'name' requires at least one --unit",
                 [&] { cmd_mine(by_name, no_units, log); });

    ReportArgs rep;
    rep.paths = ex.out_paths;
    rep.deps = ex.out_deps;
    rep.out = td.file("report.txt");
    REQUIRE(cmd_report(cfg, rep, log) == 0);
    std::string report = slurp(rep.out);
    CHECK(contains(report, "paths-records = " + std::to_string(corpus.size())));
    CHECK(contains(report, "paths-failure = "));
    CHECK(contains(report, "spec "));
    CHECK(contains(report, "deps-records = " + std::to_string(deps.size())));
    CHECK(contains(report, "relevance SS fr_fr="));
    CHECK(contains(report, "relevance SL fr_fr="));

    ReportArgs paths_only;
    paths_only.paths = ex.out_paths;
    paths_only.out = td.file("report_paths.txt");
    REQUIRE(cmd_report(cfg, paths_only, log) == 0);
    std::string paths_report = slurp(paths_only.out);
    CHECK(contains(paths_report, "paths-records = "));
    CHECK(!contains(paths_report, "deps-records"));

    ReportArgs nothing;
    nothing.out = td.file("report_none.txt");
    expect_error(Errc::usage, "report needs a path corpus",
                 [&] { cmd_report(cfg, nothing, log); });

    AblateArgs ab;
    ab.paths = ex.out_paths;
    ab.out_loio = td.file("loio.csv");
    ab.out_partial = td.file("partial.csv");
    ab.out_importance = td.file("importance.csv");
    log.str("");
    REQUIRE(cmd_ablate(cfg, ab, log) == 0);
    CHECK(contains(log.str(), "interactions detected"));
    std::string loio = slurp(ab.out_loio);
    auto loio_rows = data_lines(loio);
    REQUIRE(!loio_rows.empty());
    CHECK(loio_rows[0] == "spec_id,failures,detected,hit");
    CHECK(loio_rows.size() >= 2);
    CHECK(contains(loio, "# detected "));
    auto partial_rows = data_lines(slurp(ab.out_partial));
    REQUIRE(partial_rows.size() == 4);  // header + one row per fraction
    CHECK(partial_rows[0] == "fraction,bac,recall,precision,dropped");
    CHECK(partial_rows[1].rfind("0.25,", 0) == 0);
    CHECK(partial_rows[3].rfind("0.75,", 0) == 0);
    auto imp_rows = data_lines(slurp(ab.out_importance));
    REQUIRE(!imp_rows.empty());
    CHECK(imp_rows[0] == "token,score");
    CHECK(imp_rows.size() >= 2);

    AblateArgs ab2 = ab;
    ab2.out_loio = td.file("loio2.csv");
    ab2.out_partial = td.file("partial2.csv");
    ab2.out_importance = td.file("importance2.csv");
    REQUIRE(cmd_ablate(cfg, ab2, log) == 0);
    CHECK(slurp(ab2.out_loio) == loio);
    CHECK(slurp(ab2.out_partial) == slurp(ab.out_partial));
    CHECK(slurp(ab2.out_importance) == slurp(ab.out_importance));
  }
}
