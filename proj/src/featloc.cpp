#include "flint/featloc.hpp"

#include <algorithm>
#include <sstream>

#include "flint/error.hpp"

namespace flint::featloc {

std::optional<FeatureDepRecord> locate_by_directive(const modelx::DepRecord& dep) {
  if (dep.src_presence.is_true() || dep.dst_presence.is_true()) return std::nullopt;
  FeatureDepRecord r;
  r.source_feature = dep.src_presence;
  r.dest_feature = dep.dst_presence;
  r.kind = dep.kind;
  r.src_loc = dep.src_loc;
  r.dst_loc = dep.dst_loc;
  return r;
}

void FunctionIndex::add_unit(const flc::SourceUnit& u) {
  auto& spans = by_file_[u.path];
  for (const auto& f : u.functions)
    spans.push_back(Span{f.loc.line, f.end_line, f.name});
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.lo < b.lo; });
}

std::optional<std::string> FunctionIndex::enclosing(const flc::SrcLoc& loc) const {
  auto it = by_file_.find(loc.file);
  if (it == by_file_.end()) return std::nullopt;
  for (const auto& s : it->second)
    if (loc.line >= s.lo && loc.line <= s.hi) return s.fn;
  return std::nullopt;
}

namespace {

// Splits `fn` at `sep` and returns the feature atom, or nullopt when the
// marker is absent. An empty feature name after the marker is malformed.
std::optional<flc::FeatureExpr> role_feature(const std::string& fn,
                                             const std::string& sep) {
  auto pos = fn.find(sep);
  if (pos == std::string::npos) return std::nullopt;
  std::string feature = fn.substr(pos + sep.size());
  if (feature.empty())
    fail_input("malformed role marker in function name '" + fn +
               "': empty feature name");
  return flc::FeatureExpr::atom(feature);
}

}  // namespace

std::optional<FeatureDepRecord> locate_by_name(const modelx::DepRecord& dep,
                                               const FunctionIndex& index,
                                               const std::string& role_separator) {
  auto src_fn = index.enclosing(dep.src_loc);
  auto dst_fn = index.enclosing(dep.dst_loc);
  if (!src_fn || !dst_fn) return std::nullopt;
  auto src_feat = role_feature(*src_fn, role_separator);
  auto dst_feat = role_feature(*dst_fn, role_separator);
  if (!src_feat || !dst_feat) return std::nullopt;
  FeatureDepRecord r;
  r.source_feature = *src_feat;
  r.dest_feature = *dst_feat;
  r.kind = dep.kind;
  r.src_loc = dep.src_loc;
  r.dst_loc = dep.dst_loc;
  return r;
}

RelevanceTally classify_relevance(const std::vector<modelx::DepRecord>& deps,
                                  LocateMode mode, const FunctionIndex* index) {
  if (mode == LocateMode::Name && !index)
    fail_internal("name-based relevance needs a function index");
  RelevanceTally t;
  for (const auto& d : deps) {
    int k = d.kind == "SS" ? 0 : 1;
    bool src_rel, dst_rel;
    if (mode == LocateMode::Directive) {
      src_rel = !d.src_presence.is_true();
      dst_rel = !d.dst_presence.is_true();
    } else {
      auto sf = index->enclosing(d.src_loc);
      auto df = index->enclosing(d.dst_loc);
      src_rel = sf && role_feature(*sf, "__role__").has_value();
      dst_rel = df && role_feature(*df, "__role__").has_value();
    }
    ++t.counts[k][src_rel ? 1 : 0][dst_rel ? 1 : 0];
  }
  return t;
}

static const char* kHeader =
    "kind,src_file,src_line,src_presence,dst_file,dst_line,dst_presence,"
    "src_access,dst_access";

std::string featdeps_csv(const std::vector<FeatureDepRecord>& rs) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& r : rs) {
    out << r.kind << ',' << r.src_loc.file << ',' << r.src_loc.line << ','
        << r.source_feature.to_string(false) << ',' << r.dst_loc.file << ','
        << r.dst_loc.line << ',' << r.dest_feature.to_string(false) << ','
        << r.source_access() << ',' << r.dest_access() << "\n";
  }
  return out.str();
}

std::vector<FeatureDepRecord> parse_featdeps_csv(const std::string& text) {
  std::vector<FeatureDepRecord> rs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kHeader)
        fail_input("feature-dependency csv: unexpected header on line " +
                   std::to_string(lineno));
      saw_header = true;
      continue;
    }
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cols.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    cols.push_back(cur);
    if (cols.size() != 9)
      fail_input("feature-dependency csv: expected 9 columns on line " +
                 std::to_string(lineno));
    FeatureDepRecord r;
    r.kind = cols[0];
    if (r.kind != "SS" && r.kind != "SL")
      fail_input("feature-dependency csv: bad kind '" + cols[0] + "' on line " +
                 std::to_string(lineno));
    r.src_loc.file = cols[1];
    r.dst_loc.file = cols[4];
    try {
      r.src_loc.line = std::stoi(cols[2]);
      r.dst_loc.line = std::stoi(cols[5]);
    } catch (const std::exception&) {
      fail_input("feature-dependency csv: bad line number on line " +
                 std::to_string(lineno));
    }
    r.source_feature = flc::parse_feature_expr(cols[3]);
    r.dest_feature = flc::parse_feature_expr(cols[6]);
    if (cols[7] != r.source_access() || cols[8] != r.dest_access())
      fail_input("feature-dependency csv: access kinds disagree with '" +
                 r.kind + "' on line " + std::to_string(lineno));
    rs.push_back(std::move(r));
  }
  if (!saw_header) fail_input("feature-dependency csv: missing header");
  return rs;
}

}  // namespace flint::featloc
