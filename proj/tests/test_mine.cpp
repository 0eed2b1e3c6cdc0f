#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flint/error.hpp"
#include "flint/mine.hpp"

using namespace flint;
using namespace flint::mine;
using flint::flc::FeatureExpr;
using flint::flc::parse_feature_expr;
namespace fs = std::filesystem;

namespace {

Rational r(long long n, long long d) { return Rational::of(n, d); }

ItemsetRecord rec(std::initializer_list<const char*> items) {
  ItemsetRecord out;
  for (const char* s : items) out.items.push_back(s);
  return out;
}

// Exhaustive frequent-itemset reference capped at pairs.
std::vector<FrequentItemset> brute_frequent(const std::vector<ItemsetRecord>& records,
                                            const Rational& min_support) {
  std::vector<std::set<std::string>> sets;
  std::set<std::string> universe;
  for (const auto& rr : records) {
    sets.emplace_back(rr.items.begin(), rr.items.end());
    universe.insert(rr.items.begin(), rr.items.end());
  }
  long long n = static_cast<long long>(records.size());
  std::vector<FrequentItemset> out;
  std::vector<std::string> items(universe.begin(), universe.end());
  for (size_t i = 0; i < items.size(); ++i) {
    long long c = 0;
    for (const auto& s : sets) c += s.count(items[i]);
    Rational sup = Rational::of(c, n);
    if (!(sup < min_support)) out.push_back({{items[i]}, sup});
  }
  for (size_t i = 0; i < items.size(); ++i)
    for (size_t j = i + 1; j < items.size(); ++j) {
      long long c = 0;
      for (const auto& s : sets) c += s.count(items[i]) && s.count(items[j]);
      Rational sup = Rational::of(c, n);
      if (!(sup < min_support)) out.push_back({{items[i], items[j]}, sup});
    }
  return out;
}

std::map<std::vector<std::string>, Rational> keyed(const std::vector<FrequentItemset>& fs) {
  std::map<std::vector<std::string>, Rational> m;
  for (const auto& f : fs) {
    std::vector<std::string> k = f.items;
    std::sort(k.begin(), k.end());
    m[k] = f.support;
  }
  return m;
}

}  // namespace

TEST_CASE("rationals reduce, compare and divide exactly") {
  CHECK(r(2, 4) == r(1, 2));
  CHECK(r(0, 7) == r(0, 1));
  CHECK(r(6, -8) == Rational{-3, 4});
  CHECK(r(1, 3) < r(1, 2));
  CHECK_FALSE(r(1, 2) < r(1, 2));
  CHECK(r(1, 2) <= r(1, 2));
  CHECK(r(2, 3).div(r(1, 3)) == r(2, 1));
  CHECK(r(3, 4).div(r(3, 4)) == r(1, 1));
}

TEST_CASE("decimal rendering rounds half up at the last place") {
  CHECK(r(1, 2).to_decimal(6) == "0.500000");
  CHECK(r(1, 3).to_decimal(6) == "0.333333");
  CHECK(r(2, 3).to_decimal(6) == "0.666667");
  CHECK(r(1, 1).to_decimal(6) == "1.000000");
  CHECK(r(5, 4).to_decimal(2) == "1.25");
  CHECK(r(1, 8).to_decimal(2) == "0.13");    // 0.125 rounds up
  CHECK(r(1, 16).to_decimal(3) == "0.063");  // 0.0625 rounds up
  CHECK(r(0, 1).to_decimal(3) == "0.000");
}

TEST_CASE("decimal thresholds parse to exact rationals") {
  CHECK(parse_decimal_rational("0.01") == r(1, 100));
  CHECK(parse_decimal_rational("1") == r(1, 1));
  CHECK(parse_decimal_rational("0.5") == r(1, 2));
  CHECK(parse_decimal_rational(".25") == r(1, 4));
  CHECK(parse_decimal_rational("2.") == r(2, 1));
  for (const char* bad : {"", "-1", "0.1.2", "abc", "1e-3", "."}) {
    CAPTURE(bad);
    try {
      parse_decimal_rational(bad);
      FAIL_CHECK("expected a usage error for: " << bad);
    } catch (const Error& e) {
      CHECK(e.code == Errc::usage);
    }
  }
}

TEST_CASE("items encode endpoint role, kind and access") {
  FeatureExpr ab = parse_feature_expr("A && B");
  CHECK(encode_item(ab, true, "SL") == "A&&B_Source_{Store_Load}_Store");
  CHECK(encode_item(ab, false, "SL") == "A&&B_Destination_{Store_Load}_Load");
  CHECK(encode_item(ab, true, "SS") == "A&&B_Source_{Store_Store}_Store");
  CHECK(encode_item(ab, false, "SS") == "A&&B_Destination_{Store_Store}_Store");

  featloc::FeatureDepRecord dep;
  dep.source_feature = parse_feature_expr("A");
  dep.dest_feature = parse_feature_expr("B || C");
  dep.kind = "SL";
  auto items = encode(dep);
  REQUIRE(items.size() == 2);
  CHECK(items[0] == "A_Source_{Store_Load}_Store");
  CHECK(items[1] == "B||C_Destination_{Store_Load}_Load");
}

TEST_CASE("item texts parse back to their components") {
  ParsedItem p = parse_item("A&&!B_Source_{Store_Load}_Store");
  CHECK(p.expr.equals_canonical(parse_feature_expr("A && !B")));
  CHECK(p.is_source);
  CHECK(p.kind == "SL");
  CHECK(p.access == "Store");

  ParsedItem q = parse_item("C_Destination_{Store_Store}_Store");
  CHECK_FALSE(q.is_source);
  CHECK(q.kind == "SS");
  CHECK(q.access == "Store");

  // Round-trip through encode.
  FeatureExpr e = parse_feature_expr("X || (Y && Z)");
  ParsedItem round = parse_item(encode_item(e, false, "SL"));
  CHECK(round.expr.equals_canonical(e));
  CHECK(round.kind == "SL");

  auto expect_bad = [](const std::string& text, const std::string& needle) {
    try {
      parse_item(text);
      FAIL_CHECK("expected an input error for: " << text);
    } catch (const Error& e2) {
      CHECK(e2.code == Errc::input);
      CHECK_MESSAGE(std::string(e2.what()).find(needle) != std::string::npos,
                    e2.what());
    }
  };
  expect_bad("A_Source_{Store_Load}", "missing access suffix");
  expect_bad("A_Source_Store", "dependency-kind segment");
  expect_bad("A_{Store_Load}_Load", "missing endpoint role");
  expect_bad("_Source_{Store_Load}_Store", "empty feature expression");
  // An SL destination is a load, never a store.
  expect_bad("A_Destination_{Store_Load}_Store", "disagrees with role and kind");
}

TEST_CASE("apriori finds singletons and pairs above the threshold") {
  std::vector<ItemsetRecord> records = {
      rec({"a", "b"}), rec({"a", "b"}), rec({"a", "c"}), rec({"d"})};
  auto got = keyed(apriori(records, r(1, 2)));
  // a: 3/4, b: 2/4, {a,b}: 2/4; c and d fall below 1/2.
  REQUIRE(got.size() == 3);
  CHECK(got.at({"a"}) == r(3, 4));
  CHECK(got.at({"b"}) == r(1, 2));
  CHECK(got.at({"a", "b"}) == r(1, 2));

  // The support boundary is inclusive.
  auto one = keyed(apriori({rec({"x"}), rec({"y"})}, r(1, 2)));
  CHECK(one.count({"x"}) == 1);
  CHECK(one.count({"y"}) == 1);

  CHECK(apriori({}, r(1, 100)).empty());

  // Duplicate items inside one record count once.
  auto dup = keyed(apriori({rec({"a", "a", "b"})}, r(1, 1)));
  CHECK(dup.at({"a"}) == r(1, 1));
  CHECK(dup.at({"a", "b"}) == r(1, 1));

  // A one-item cap never reports pairs.
  for (const auto& f : apriori(records, r(1, 4), 1)) CHECK(f.items.size() == 1);
}

TEST_CASE("apriori agrees with exhaustive enumeration on random corpora") {
  std::mt19937 rng(515);
  std::uniform_int_distribution<int> n_records(1, 30);
  std::uniform_int_distribution<int> n_items(1, 5);
  std::uniform_int_distribution<int> pick_item(0, 7);
  std::uniform_int_distribution<int> pick_den(1, 10);
  const char* pool[] = {"i0", "i1", "i2", "i3", "i4", "i5", "i6", "i7"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ItemsetRecord> records;
    int nr = n_records(rng);
    for (int k = 0; k < nr; ++k) {
      ItemsetRecord rr;
      int ni = n_items(rng);
      for (int i = 0; i < ni; ++i) rr.items.push_back(pool[pick_item(rng)]);
      records.push_back(std::move(rr));
    }
    long long den = pick_den(rng);
    Rational min_sup = Rational::of(1, den);
    auto fast = keyed(apriori(records, min_sup));
    auto slow = keyed(brute_frequent(records, min_sup));
    CHECK(fast == slow);
  }
}

TEST_CASE("rules come out in both directions with exact confidences") {
  std::vector<ItemsetRecord> records = {
      rec({"a", "b"}), rec({"a", "b"}), rec({"a"}), rec({"b"})};
  auto frequent = apriori(records, r(1, 4));
  auto rules = derive_rules(frequent, r(0, 1));
  // {a,b} support 2/4; a and b each 3/4 -> confidence 2/3 both ways.
  REQUIRE(rules.size() == 2);
  for (const auto& rule : rules) {
    CHECK(rule.support == r(1, 2));
    CHECK(rule.confidence == r(2, 3));
  }
  CHECK(rules[0].lhs != rules[1].lhs);

  // The confidence threshold is inclusive too.
  CHECK(derive_rules(frequent, r(2, 3)).size() == 2);
  CHECK(derive_rules(frequent, r(7, 10)).empty());

  // Asymmetric supports give asymmetric confidences.
  std::vector<ItemsetRecord> skew = {rec({"a", "b"}), rec({"a"}), rec({"a"})};
  auto skew_rules = derive_rules(apriori(skew, r(1, 3)), r(0, 1));
  std::map<std::string, Rational> conf;
  for (const auto& rule : skew_rules) conf[rule.lhs] = rule.confidence;
  CHECK(conf.at("a") == r(1, 3));
  CHECK(conf.at("b") == r(1, 1));
}

TEST_CASE("self-dependencies are filtered out") {
  AssociationRule self;
  self.lhs = "A&&B_Source_{Store_Load}_Store";
  self.rhs = "B&&A_Destination_{Store_Load}_Load";  // canonically equal
  self.support = r(1, 2);
  self.confidence = r(1, 1);
  AssociationRule cross;
  cross.lhs = "A_Source_{Store_Load}_Store";
  cross.rhs = "B_Destination_{Store_Load}_Load";
  cross.support = r(1, 2);
  cross.confidence = r(1, 1);
  // Direction of the rule does not matter, endpoint roles do.
  AssociationRule self_rev;
  self_rev.lhs = "C_Destination_{Store_Store}_Store";
  self_rev.rhs = "C_Source_{Store_Store}_Store";
  self_rev.support = r(1, 3);
  self_rev.confidence = r(1, 2);

  auto kept = filter_rules({self, cross, self_rev});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].lhs == cross.lhs);
}

TEST_CASE("bidirectional pairs collapse into one row with the smaller confidence") {
  AssociationRule fwd{"a", "b", r(1, 2), r(3, 4)};
  AssociationRule bwd{"b", "a", r(1, 2), r(2, 3)};
  AssociationRule solo{"c", "d", r(1, 4), r(1, 2)};
  auto rows = rule_rows({fwd, bwd, solo});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lhs == "a");
  CHECK(rows[0].rhs == "b");
  CHECK(rows[0].direction == "<=>");
  CHECK(rows[0].confidence == r(2, 3));
  CHECK(rows[0].support == r(1, 2));
  CHECK(rows[1].direction == "=>");
  CHECK(rows[1].lhs == "c");

  // One-directional rules keep their own orientation.
  auto only_bwd = rule_rows({bwd});
  REQUIRE(only_bwd.size() == 1);
  CHECK(only_bwd[0].lhs == "b");
  CHECK(only_bwd[0].rhs == "a");
  CHECK(only_bwd[0].direction == "=>");
}

TEST_CASE("rows sort by support, confidence, then text") {
  AssociationRule r1{"a", "b", r(1, 2), r(1, 2)};
  AssociationRule r2{"c", "d", r(3, 4), r(1, 4)};
  AssociationRule r3{"b", "e", r(1, 2), r(3, 4)};
  auto rows = rule_rows({r1, r2, r3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].lhs == "c");  // highest support first
  CHECK(rows[1].lhs == "b");  // equal support: higher confidence first
  CHECK(rows[2].lhs == "a");
}

TEST_CASE("the CSV report carries comments, header and fixed decimals") {
  AssociationRule rule{"a", "b", r(1, 3), r(2, 3)};
  std::string csv = rules_csv(rule_rows({rule}), {"records: 3", "min support: 1/3"});
  CHECK(csv ==
        "# records: 3\n"
        "# min support: 1/3\n"
        "lhs,rhs,direction,support,confidence\n"
        "a,b,=>,0.333333,0.666667\n");
  CHECK(rules_csv({}, {}) == "lhs,rhs,direction,support,confidence\n");
}

TEST_CASE("itemset files round-trip and validate") {
  fs::path dir = fs::temp_directory_path() / ("flint-mine-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string path = (dir / "items.jsonl").string();

  std::vector<ItemsetRecord> records = {rec({"a", "b"}), rec({"c"})};
  write_itemsets(path, records);
  auto back = read_itemsets(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].items == std::vector<std::string>{"a", "b"});
  CHECK(back[1].items == std::vector<std::string>{"c"});

  auto expect_bad = [](const std::string& p, const std::string& needle) {
    try {
      read_itemsets(p);
      FAIL_CHECK("expected an input error containing: " << needle);
    } catch (const Error& e) {
      CHECK(e.code == Errc::input);
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  expect_bad((dir / "absent.jsonl").string(), "cannot open itemset file");

  std::string bad1 = (dir / "bad1.jsonl").string();
  {
    std::ofstream os(bad1);
    os << "{broken\n";
  }
  expect_bad(bad1, "bad json");

  std::string bad2 = (dir / "bad2.jsonl").string();
  {
    std::ofstream os(bad2);
    os << "{\"other\": 1}\n";
  }
  expect_bad(bad2, "expected {\"items\"");

  std::string bad3 = (dir / "bad3.jsonl").string();
  {
    std::ofstream os(bad3);
    os << "{\"items\": [1, 2]}\n";
  }
  expect_bad(bad3, "items must be strings");

  fs::remove_all(dir);
}
