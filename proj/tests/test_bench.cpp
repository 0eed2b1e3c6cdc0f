#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "flint/bench.hpp"
#include "flint/engine.hpp"
#include "flint/parser.hpp"
#include "flint/resolve.hpp"

using namespace flint;
using namespace flint::bench;
using namespace flint::flc;
namespace fs = std::filesystem;

namespace {

void check_suite_wellformed(const BenchmarkSuite& s) {
  CAPTURE(s.name);
  // The unit parses, and every product resolves against it.
  SourceUnit u = parse_unit_text(s.unit_filename, s.unit_text);
  CHECK_FALSE(u.declared_features.empty());
  CHECK_FALSE(s.products.empty());
  for (const auto& p : s.products) CHECK_NOTHROW(resolve_product(u, p));

  // Product definitions round-trip through their text form.
  auto parsed = parse_products_text("products.txt", products_text(s));
  REQUIRE(parsed.size() == s.products.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].name == s.products[i].name);
    CHECK(parsed[i].enabled == s.products[i].enabled);
  }

  // Interactions reference declared features and unique spec ids.
  std::set<std::string> declared(u.declared_features.begin(),
                                 u.declared_features.end());
  std::set<std::string> ids;
  for (const auto& it : s.interactions) {
    CHECK(declared.count(it.feature_a) == 1);
    CHECK(declared.count(it.feature_b) == 1);
    if (it.guarded) {
      CHECK_FALSE(it.spec_id.empty());
      CHECK(ids.insert(it.spec_id).second);
    } else {
      CHECK(it.spec_id.empty());
    }
  }
}

}  // namespace

TEST_CASE("the fixed suites are well-formed product lines") {
  check_suite_wellformed(make_mailkit());
  check_suite_wellformed(make_liftkit());
  check_suite_wellformed(make_pumpkit());
}

TEST_CASE("mailkit seeds ten guarded pairwise interactions") {
  BenchmarkSuite s = make_mailkit();
  CHECK(s.name == "mailkit");
  CHECK(s.unit_filename == "mailkit.flc");
  CHECK(s.interactions.size() == 10);
  for (const auto& it : s.interactions) CHECK(it.guarded);
  // Failure sites call the shared logging helper, which the learners see.
  CHECK(s.unit_text.find("log_violation") != std::string::npos);
  CHECK(s.unit_text.find("spec_check_") != std::string::npos);
}

TEST_CASE("liftkit exercises bounded loops") {
  BenchmarkSuite s = make_liftkit();
  CHECK(s.interactions.size() == 5);
  CHECK(s.unit_text.find("while") != std::string::npos);
}

TEST_CASE("pumpkit leaves exactly one interaction unguarded") {
  BenchmarkSuite s = make_pumpkit();
  int unguarded = 0;
  for (const auto& it : s.interactions) unguarded += it.guarded ? 0 : 1;
  CHECK(unguarded == 1);
  // The unguarded clash still names its features for ground-truth reports.
  for (const auto& it : s.interactions)
    if (!it.guarded) {
      CHECK_FALSE(it.feature_a.empty());
      CHECK_FALSE(it.feature_b.empty());
    }
}

TEST_CASE("the engine confirms every seeded interaction") {
  symex::EngineConfig cfg;
  cfg.timeout_secs = 120.0;
  for (auto make : {make_mailkit, make_liftkit, make_pumpkit}) {
    BenchmarkSuite s = make();
    std::string report;
    CHECK_NOTHROW(report = validate_suite(s, cfg));
    // One line per interaction.
    CHECK(std::count(report.begin(), report.end(), '\n') ==
          static_cast<long>(s.interactions.size()));
  }
}

TEST_CASE("the interactions CSV lists ground truth with a header") {
  BenchmarkSuite s = make_pumpkit();
  std::string csv = interactions_csv(s);
  CHECK(csv.find("spec_id,feature_a,feature_b,guarded") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(s.interactions.size()) + 1);
  CHECK(csv.find(",Gauge,Alarm,0") != std::string::npos);  // the unguarded clash
}

TEST_CASE("the scalability unit is large and deterministic per seed") {
  BenchmarkSuite a = make_megakit(9);
  BenchmarkSuite b = make_megakit(9);
  CHECK(a.unit_text == b.unit_text);
  CHECK(products_text(a) == products_text(b));

  SourceUnit u = parse_unit_text(a.unit_filename, a.unit_text);
  CHECK(u.declared_features.size() == 120);
  CHECK(u.n_lines >= 14000);
  CHECK(a.products.size() >= 35);
  for (const auto& p : a.products) CHECK_NOTHROW(resolve_product(u, p));

  // The seed drives the product draws, not the source text.
  BenchmarkSuite c = make_megakit(10);
  CHECK(a.unit_text == c.unit_text);
  CHECK(products_text(a) != products_text(c));
}

TEST_CASE("writing a suite produces the three artifact files") {
  fs::path dir = fs::temp_directory_path() / ("flint-bench-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  BenchmarkSuite s = make_pumpkit();
  write_suite(s, dir.string());
  fs::path root = dir / s.name;
  CHECK(fs::exists(root / s.unit_filename));
  CHECK(fs::exists(root / "products.txt"));
  CHECK(fs::exists(root / "interactions.csv"));

  std::ifstream is(root / s.unit_filename);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  CHECK(text == s.unit_text);
  fs::remove_all(dir);
}
