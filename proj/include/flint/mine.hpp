#ifndef FLINT_MINE_HPP
#define FLINT_MINE_HPP

#include <string>
#include <vector>

#include "flint/featloc.hpp"
#include "flint/feature_expr.hpp"

namespace flint::mine {

// Exact nonnegative rational; supports and confidences are ratios of small
// record counts, so all arithmetic stays well inside 64 bits.
struct Rational {
  long long num = 0, den = 1;
  static Rational of(long long n, long long d);
  Rational div(const Rational& o) const;  // *this / o
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  std::string to_decimal(int places = 6) const;
};

// Parses a plain decimal like "0.01" or "1" into an exact rational.
Rational parse_decimal_rational(const std::string& text);

// One itemset-encoded endpoint:
//   <EXPR>_<Source|Destination>_{<Store_Store|Store_Load>}_<Store|Load>
struct ParsedItem {
  flc::FeatureExpr expr;
  bool is_source = false;
  std::string kind;    // "SS" | "SL"
  std::string access;  // "Store" | "Load"
};

std::string encode_item(const flc::FeatureExpr& expr, bool is_source,
                        const std::string& kind);
ParsedItem parse_item(const std::string& text);

// A feature dependency becomes a two-item record: its source endpoint and
// its destination endpoint.
std::vector<std::string> encode(const featloc::FeatureDepRecord& dep);

struct ItemsetRecord {
  std::vector<std::string> items;
};

std::vector<ItemsetRecord> read_itemsets(const std::string& path);
void write_itemsets(const std::string& path, const std::vector<ItemsetRecord>& rs);

struct FrequentItemset {
  std::vector<std::string> items;  // sorted, size 1 or 2
  Rational support;
};

// Level-wise frequent-itemset search capped at pairs.
std::vector<FrequentItemset> apriori(const std::vector<ItemsetRecord>& records,
                                     const Rational& min_support, int max_size = 2);

struct AssociationRule {
  std::string lhs, rhs;  // single items each
  Rational support, confidence;
};

// Both rule directions of every frequent pair, kept when confidence clears
// the threshold.
std::vector<AssociationRule> derive_rules(const std::vector<FrequentItemset>& frequent,
                                          const Rational& min_confidence);

// Drops rules whose source and destination endpoints carry canonically equal
// feature expressions (self-dependencies).
std::vector<AssociationRule> filter_rules(const std::vector<AssociationRule>& rules);

// Report rows: a pair surviving in both directions collapses into one `<=>`
// row with lexicographically ordered endpoints and the smaller confidence.
struct RuleRow {
  std::string lhs, rhs, direction;  // direction "=>" or "<=>"
  Rational support, confidence;
};

std::vector<RuleRow> rule_rows(const std::vector<AssociationRule>& rules);

// CSV: lhs,rhs,direction,support,confidence — sorted by support desc,
// confidence desc, then rule text. Leading comment lines start with "# ".
std::string rules_csv(const std::vector<RuleRow>& rows,
                      const std::vector<std::string>& comments);

}  // namespace flint::mine

#endif
