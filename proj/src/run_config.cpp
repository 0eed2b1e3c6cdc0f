#include "flint/run_config.hpp"

#include <fstream>
#include <sstream>

#include "flint/error.hpp"

namespace flint::cli {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string num(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail_usage("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double parse_num(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail_usage("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail_usage("config key '" + key + "': expected true/false, got '" + v + "'");
}

void check_choice(const std::string& key, const std::string& v,
                  std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string opts;
  for (const char* a : allowed) opts += std::string(opts.empty() ? "" : "|") + a;
  fail_usage("config key '" + key + "': expected one of " + opts + ", got '" + v + "'");
}

}  // namespace

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "seed = " << c.seed << "\n"
    << "timeout-secs = " << num(c.timeout_secs) << "\n"
    << "max-paths = " << c.max_paths << "\n"
    << "L = " << c.L << "\n"
    << "loop-bound = " << c.loop_bound << "\n"
    << "search = " << c.search << "\n"
    << "store-key-mode = " << c.store_key_mode << "\n"
    << "min-support = " << c.min_support << "\n"
    << "min-confidence = " << c.min_confidence << "\n"
    << "locate = " << c.locate << "\n"
    << "source = " << c.source << "\n"
    << "model = " << c.model << "\n"
    << "test-fraction = " << num(c.test_fraction) << "\n"
    << "cv-repeats = " << c.cv_repeats << "\n"
    << "cv-folds = " << c.cv_folds << "\n"
    << "smote-k = " << c.smote_k << "\n"
    << "svm-lambda = " << num(c.svm_lambda) << "\n"
    << "svm-epochs = " << c.svm_epochs << "\n"
    << "rf-trees = " << c.rf_trees << "\n"
    << "rf-max-depth = " << c.rf_max_depth << "\n"
    << "fractions = " << c.fractions << "\n"
    << "report-times = " << (c.report_times ? "true" : "false") << "\n"
    << "exclude = " << join_list(c.exclude) << "\n";
  return o.str();
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      fail_usage("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key == "seed") {
      base.seed = static_cast<unsigned>(parse_int(key, val));
    } else if (key == "timeout-secs") {
      base.timeout_secs = parse_num(key, val);
    } else if (key == "max-paths") {
      base.max_paths = static_cast<int>(parse_int(key, val));
    } else if (key == "L") {
      base.L = static_cast<int>(parse_int(key, val));
    } else if (key == "loop-bound") {
      base.loop_bound = static_cast<int>(parse_int(key, val));
    } else if (key == "search") {
      check_choice(key, val, {"dfs", "bfs"});
      base.search = val;
    } else if (key == "store-key-mode") {
      check_choice(key, val, {"base", "offset"});
      base.store_key_mode = val;
    } else if (key == "min-support") {
      base.min_support = val;
    } else if (key == "min-confidence") {
      base.min_confidence = val;
    } else if (key == "locate") {
      check_choice(key, val, {"directive", "name"});
      base.locate = val;
    } else if (key == "source") {
      check_choice(key, val, {"stack", "constraints", "combined"});
      base.source = val;
    } else if (key == "model") {
      check_choice(key, val, {"nb", "svm", "rf"});
      base.model = val;
    } else if (key == "test-fraction") {
      base.test_fraction = parse_num(key, val);
    } else if (key == "cv-repeats") {
      base.cv_repeats = static_cast<int>(parse_int(key, val));
    } else if (key == "cv-folds") {
      base.cv_folds = static_cast<int>(parse_int(key, val));
    } else if (key == "smote-k") {
      base.smote_k = static_cast<int>(parse_int(key, val));
    } else if (key == "svm-lambda") {
      base.svm_lambda = parse_num(key, val);
    } else if (key == "svm-epochs") {
      base.svm_epochs = static_cast<int>(parse_int(key, val));
    } else if (key == "rf-trees") {
      base.rf_trees = static_cast<int>(parse_int(key, val));
    } else if (key == "rf-max-depth") {
      base.rf_max_depth = static_cast<int>(parse_int(key, val));
    } else if (key == "fractions") {
      base.fractions = val;
    } else if (key == "report-times") {
      base.report_times = parse_bool(key, val);
    } else if (key == "exclude") {
      base.exclude = split_list(val);
    } else {
      fail_usage("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::vector<std::string> header_comments(const RunConfig& c) {
  std::vector<std::string> out;
  out.push_back(std::string("flint ") + kToolVersion);
  std::istringstream in(to_text(c));
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

symex::EngineConfig engine_config(const RunConfig& c) {
  symex::EngineConfig e;
  e.timeout_secs = c.timeout_secs;
  e.max_paths = c.max_paths;
  e.L = c.L;
  e.loop_bound = c.loop_bound;
  e.search = c.search == "bfs" ? symex::EngineConfig::Search::BFS
                               : symex::EngineConfig::Search::DFS;
  e.store_key = c.store_key_mode == "offset"
                    ? symex::EngineConfig::StoreKey::ObjectOffset
                    : symex::EngineConfig::StoreKey::BaseAddress;
  e.seed = c.seed;
  return e;
}

flc::ResolveOptions resolve_options(const RunConfig& c) {
  flc::ResolveOptions r;
  r.loop_bound = c.loop_bound;
  return r;
}

learn::EvalPlan eval_plan(const RunConfig& c) {
  learn::EvalPlan p;
  p.test_fraction = c.test_fraction;
  p.repeats = c.cv_repeats;
  p.folds = c.cv_folds;
  p.smote_k = c.smote_k;
  p.seed = c.seed;
  return p;
}

learn::Hyperparams hyperparams(const RunConfig& c) {
  learn::Hyperparams h;
  h.svm_lambda = c.svm_lambda;
  h.svm_epochs = c.svm_epochs;
  h.rf_trees = c.rf_trees;
  h.rf_max_depth = c.rf_max_depth;
  return h;
}

mine::Rational min_support_rational(const RunConfig& c) {
  return mine::parse_decimal_rational(c.min_support);
}

mine::Rational min_confidence_rational(const RunConfig& c) {
  return mine::parse_decimal_rational(c.min_confidence);
}

std::vector<double> partial_fractions(const RunConfig& c) {
  std::vector<double> out;
  for (const auto& f : split_list(c.fractions)) {
    double v = parse_num("fractions", f);
    if (!(v > 0.0 && v <= 1.0))
      fail_usage("config key 'fractions': values must be in (0, 1], got '" + f + "'");
    out.push_back(v);
  }
  if (out.empty()) fail_usage("config key 'fractions': list is empty");
  return out;
}

}  // namespace flint::cli
