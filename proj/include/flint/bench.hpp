#ifndef FLINT_BENCH_HPP
#define FLINT_BENCH_HPP

#include <string>
#include <vector>

#include "flint/ast.hpp"
#include "flint/engine.hpp"

namespace flint::bench {

struct SeededInteraction {
  std::string spec_id;  // empty when the clash is not guarded by a check
  std::string feature_a, feature_b;
  bool guarded = true;
};

struct BenchmarkSuite {
  std::string name;
  std::string unit_filename;  // "<name>.flc"
  std::string unit_text;
  std::vector<flc::ProductDef> products;
  std::vector<SeededInteraction> interactions;
};

// Fixed product-line corpora. Guarded feature clashes call a shared
// log_violation() helper and fail() under a spec id; spec_check_* wrappers
// are the default trace exclusions.
BenchmarkSuite make_mailkit();
BenchmarkSuite make_liftkit();  // exercises bounded while loops
BenchmarkSuite make_pumpkit();  // one clash intentionally has no check

// Scalability unit: 120 features, ~15 kLOC, ~40 seeded-random products.
BenchmarkSuite make_megakit(unsigned seed);

std::string products_text(const BenchmarkSuite& s);
std::string interactions_csv(const BenchmarkSuite& s);

// Writes <dir>/<name>/{<name>.flc, products.txt, interactions.csv}.
void write_suite(const BenchmarkSuite& s, const std::string& dir);

// Engine-backed sanity check: every guarded interaction produces a failure
// path in at least one product; unguarded ones produce dependencies but no
// failure. Returns a one-line-per-interaction summary; throws on violation.
std::string validate_suite(const BenchmarkSuite& s, const symex::EngineConfig& cfg);

}  // namespace flint::bench

#endif
