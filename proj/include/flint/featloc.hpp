#ifndef FLINT_FEATLOC_HPP
#define FLINT_FEATLOC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flint/ast.hpp"
#include "flint/records.hpp"

namespace flint::featloc {

// A dependency with both endpoints mapped to feature expressions, ready for
// itemset encoding. Access kinds follow the dependency kind: the source is
// always a store; an SL destination is a load, an SS destination a store.
struct FeatureDepRecord {
  flc::FeatureExpr source_feature, dest_feature;
  std::string kind;  // "SS" | "SL"
  flc::SrcLoc src_loc, dst_loc;
  std::string source_access() const { return "s"; }
  std::string dest_access() const { return kind == "SL" ? "l" : "s"; }
};

// Directive-style location: endpoint features are the presence conditions;
// None when either endpoint is unguarded (presence True).
std::optional<FeatureDepRecord> locate_by_directive(const modelx::DepRecord& dep);

// (file, line) -> enclosing function name, built from parsed units.
class FunctionIndex {
 public:
  void add_unit(const flc::SourceUnit& u);
  std::optional<std::string> enclosing(const flc::SrcLoc& loc) const;

 private:
  struct Span {
    int lo = 0, hi = 0;
    std::string fn;
  };
  std::map<std::string, std::vector<Span>> by_file_;
};

// Product-line-style location: endpoints resolve through their enclosing
// function names, parsed as `<base>__role__<Feature>`; None when either
// name lacks the role marker. A role marker with an empty feature name is
// an input error.
std::optional<FeatureDepRecord> locate_by_name(const modelx::DepRecord& dep,
                                               const FunctionIndex& index,
                                               const std::string& role_separator = "__role__");

enum class LocateMode { Directive, Name };

struct RelevanceTally {
  // counts[kind][src relevant][dst relevant]; kind 0 = SS, 1 = SL
  int counts[2][2][2] = {};
  int total(int kind) const {
    return counts[kind][0][0] + counts[kind][0][1] + counts[kind][1][0] +
           counts[kind][1][1];
  }
};

RelevanceTally classify_relevance(const std::vector<modelx::DepRecord>& deps,
                                  LocateMode mode, const FunctionIndex* index = nullptr);

// CSV round-trip, compact feature-expression syntax. Header:
// kind,src_file,src_line,src_presence,dst_file,dst_line,dst_presence,src_access,dst_access
std::string featdeps_csv(const std::vector<FeatureDepRecord>& rs);
std::vector<FeatureDepRecord> parse_featdeps_csv(const std::string& text);

}  // namespace flint::featloc

#endif
