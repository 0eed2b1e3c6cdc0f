#include "flint/mine.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "flint/error.hpp"
#include "flint/records.hpp"
#include "json.hpp"

namespace flint::mine {

Rational Rational::of(long long n, long long d) {
  if (d == 0) fail_internal("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return Rational{n / g, d / g};
}

Rational Rational::div(const Rational& o) const {
  if (o.num == 0) fail_internal("rational division by zero");
  return Rational::of(num * o.den, den * o.num);
}

bool Rational::operator<(const Rational& o) const {
  return num * o.den < o.num * den;
}

std::string Rational::to_decimal(int places) const {
  long long scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  // Round half up; all values here are nonnegative.
  long long scaled = (num * scale * 2 + den) / (den * 2);
  std::ostringstream out;
  out << scaled / scale << '.';
  std::string frac = std::to_string(scaled % scale);
  out << std::string(places - frac.size(), '0') << frac;
  return out.str();
}

Rational parse_decimal_rational(const std::string& text) {
  if (text.empty()) fail_usage("empty threshold value");
  auto dot = text.find('.');
  std::string ip = dot == std::string::npos ? text : text.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : text.substr(dot + 1);
  if (ip.empty() && fp.empty()) fail_usage("bad threshold '" + text + "'");
  for (char c : ip)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail_usage("bad threshold '" + text + "'");
  for (char c : fp)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail_usage("bad threshold '" + text + "'");
  if (fp.size() > 9) fail_usage("threshold '" + text + "' has too many digits");
  long long den = 1;
  for (size_t i = 0; i < fp.size(); ++i) den *= 10;
  long long num = (ip.empty() ? 0 : std::stoll(ip)) * den +
                  (fp.empty() ? 0 : std::stoll(fp));
  return Rational::of(num, den);
}

namespace {

const char* kind_segment(const std::string& kind) {
  if (kind == "SS") return "Store_Store";
  if (kind == "SL") return "Store_Load";
  fail_internal("unknown dependency kind '" + kind + "'");
}

// Strips `suffix` off the end of `s`, or returns nullopt.
std::optional<std::string> strip_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return std::nullopt;
  if (s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0)
    return std::nullopt;
  return s.substr(0, s.size() - suffix.size());
}

}  // namespace

std::string encode_item(const flc::FeatureExpr& expr, bool is_source,
                        const std::string& kind) {
  std::string access = is_source ? "Store" : (kind == "SL" ? "Load" : "Store");
  return expr.to_string(false) + "_" + (is_source ? "Source" : "Destination") +
         "_{" + kind_segment(kind) + "}_" + access;
}

ParsedItem parse_item(const std::string& text) {
  auto bad = [&](const std::string& why) -> ParsedItem {
    fail_input("bad item '" + text + "': " + why);
  };
  std::string rest = text;
  ParsedItem item;
  if (auto r = strip_suffix(rest, "_Store")) {
    item.access = "Store";
    rest = *r;
  } else if (auto r2 = strip_suffix(rest, "_Load")) {
    item.access = "Load";
    rest = *r2;
  } else {
    return bad("missing access suffix");
  }
  if (auto r = strip_suffix(rest, "_{Store_Store}")) {
    item.kind = "SS";
    rest = *r;
  } else if (auto r2 = strip_suffix(rest, "_{Store_Load}")) {
    item.kind = "SL";
    rest = *r2;
  } else {
    return bad("missing or malformed dependency-kind segment");
  }
  if (auto r = strip_suffix(rest, "_Source")) {
    item.is_source = true;
    rest = *r;
  } else if (auto r2 = strip_suffix(rest, "_Destination")) {
    item.is_source = false;
    rest = *r2;
  } else {
    return bad("missing endpoint role");
  }
  if (rest.empty()) return bad("empty feature expression");
  std::string expected = item.is_source ? "Store" : (item.kind == "SL" ? "Load" : "Store");
  if (item.access != expected)
    return bad("access '" + item.access + "' disagrees with role and kind");
  item.expr = flc::parse_feature_expr(rest);
  return item;
}

std::vector<std::string> encode(const featloc::FeatureDepRecord& dep) {
  return {encode_item(dep.source_feature, true, dep.kind),
          encode_item(dep.dest_feature, false, dep.kind)};
}

std::vector<ItemsetRecord> read_itemsets(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open itemset file: " + path);
  std::vector<ItemsetRecord> rs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail_input(path + ":" + std::to_string(lineno) + ": bad json: " + e.what());
    }
    if (!j.is_object() || !j.contains("items") || !j["items"].is_array())
      fail_input(path + ":" + std::to_string(lineno) + ": expected {\"items\": [...]}");
    ItemsetRecord r;
    for (const auto& it : j["items"]) {
      if (!it.is_string())
        fail_input(path + ":" + std::to_string(lineno) + ": items must be strings");
      r.items.push_back(it.get<std::string>());
    }
    rs.push_back(std::move(r));
  }
  return rs;
}

void write_itemsets(const std::string& path, const std::vector<ItemsetRecord>& rs) {
  std::string out;
  for (const auto& r : rs) {
    nlohmann::ordered_json j;
    j["items"] = r.items;
    out += j.dump();
    out += "\n";
  }
  modelx::write_text_atomic(path, out);
}

std::vector<FrequentItemset> apriori(const std::vector<ItemsetRecord>& records,
                                     const Rational& min_support, int max_size) {
  if (max_size < 1 || max_size > 2)
    fail_usage("itemset size cap must be 1 or 2");
  std::vector<FrequentItemset> out;
  if (records.empty()) return out;
  long long n = static_cast<long long>(records.size());

  // Each record as a deduplicated sorted item set.
  std::vector<std::vector<std::string>> sets;
  sets.reserve(records.size());
  for (const auto& r : records) {
    std::vector<std::string> s = r.items;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }

  std::map<std::string, long long> count1;
  for (const auto& s : sets)
    for (const auto& it : s) ++count1[it];

  std::vector<std::string> frequent1;
  for (const auto& [item, c] : count1) {
    Rational sup = Rational::of(c, n);
    if (!(sup < min_support)) {
      out.push_back(FrequentItemset{{item}, sup});
      frequent1.push_back(item);
    }
  }
  if (max_size == 1) return out;

  std::map<std::pair<std::string, std::string>, long long> count2;
  std::set<std::string> freq1set(frequent1.begin(), frequent1.end());
  for (const auto& s : sets) {
    std::vector<const std::string*> in_play;
    for (const auto& it : s)
      if (freq1set.count(it)) in_play.push_back(&it);
    for (size_t i = 0; i < in_play.size(); ++i)
      for (size_t j = i + 1; j < in_play.size(); ++j)
        ++count2[{*in_play[i], *in_play[j]}];
  }
  for (const auto& [pair, c] : count2) {
    Rational sup = Rational::of(c, n);
    if (!(sup < min_support))
      out.push_back(FrequentItemset{{pair.first, pair.second}, sup});
  }
  return out;
}

std::vector<AssociationRule> derive_rules(const std::vector<FrequentItemset>& frequent,
                                          const Rational& min_confidence) {
  std::map<std::string, Rational> single;
  for (const auto& f : frequent)
    if (f.items.size() == 1) single[f.items[0]] = f.support;

  std::vector<AssociationRule> rules;
  for (const auto& f : frequent) {
    if (f.items.size() != 2) continue;
    for (int dir = 0; dir < 2; ++dir) {
      const std::string& lhs = f.items[dir == 0 ? 0 : 1];
      const std::string& rhs = f.items[dir == 0 ? 1 : 0];
      auto it = single.find(lhs);
      if (it == single.end())
        fail_internal("frequent pair without frequent member '" + lhs + "'");
      Rational conf = f.support.div(it->second);
      if (!(conf < min_confidence))
        rules.push_back(AssociationRule{lhs, rhs, f.support, conf});
    }
  }
  return rules;
}

std::vector<AssociationRule> filter_rules(const std::vector<AssociationRule>& rules) {
  std::vector<AssociationRule> kept;
  for (const auto& r : rules) {
    ParsedItem a = parse_item(r.lhs);
    ParsedItem b = parse_item(r.rhs);
    const ParsedItem& src = a.is_source ? a : b;
    const ParsedItem& dst = a.is_source ? b : a;
    if (src.is_source != dst.is_source && src.expr.equals_canonical(dst.expr))
      continue;
    kept.push_back(r);
  }
  return kept;
}

std::vector<RuleRow> rule_rows(const std::vector<AssociationRule>& rules) {
  // Group by unordered endpoint pair to find bidirectional rules.
  std::map<std::pair<std::string, std::string>, std::vector<const AssociationRule*>> groups;
  for (const auto& r : rules) {
    auto key = r.lhs < r.rhs ? std::make_pair(r.lhs, r.rhs)
                             : std::make_pair(r.rhs, r.lhs);
    groups[key].push_back(&r);
  }
  std::vector<RuleRow> rows;
  for (const auto& [key, rs] : groups) {
    bool fwd = false, bwd = false;
    Rational conf_fwd, conf_bwd, sup;
    for (const auto* r : rs) {
      sup = r->support;
      if (r->lhs == key.first) {
        fwd = true;
        conf_fwd = r->confidence;
      } else {
        bwd = true;
        conf_bwd = r->confidence;
      }
    }
    if (fwd && bwd) {
      Rational conf = conf_fwd < conf_bwd ? conf_fwd : conf_bwd;
      rows.push_back(RuleRow{key.first, key.second, "<=>", sup, conf});
    } else if (fwd) {
      rows.push_back(RuleRow{key.first, key.second, "=>", sup, conf_fwd});
    } else {
      rows.push_back(RuleRow{key.second, key.first, "=>", sup, conf_bwd});
    }
  }
  auto text_of = [](const RuleRow& r) { return r.lhs + " " + r.direction + " " + r.rhs; };
  std::sort(rows.begin(), rows.end(), [&](const RuleRow& a, const RuleRow& b) {
    if (!(a.support == b.support)) return b.support < a.support;
    if (!(a.confidence == b.confidence)) return b.confidence < a.confidence;
    return text_of(a) < text_of(b);
  });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const RuleRow& a, const RuleRow& b) {
                           return a.lhs == b.lhs && a.rhs == b.rhs &&
                                  a.direction == b.direction &&
                                  a.support == b.support &&
                                  a.confidence == b.confidence;
                         }),
             rows.end());
  return rows;
}

std::string rules_csv(const std::vector<RuleRow>& rows,
                      const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "lhs,rhs,direction,support,confidence\n";
  for (const auto& r : rows)
    out << r.lhs << ',' << r.rhs << ',' << r.direction << ','
        << r.support.to_decimal() << ',' << r.confidence.to_decimal() << "\n";
  return out.str();
}

}  // namespace flint::mine
