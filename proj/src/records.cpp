#include "flint/records.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "flint/error.hpp"

namespace flint::modelx {

using json = nlohmann::ordered_json;
using symex::AtomicConstraint;
using symex::CallSequence;
using symex::Rel;
using symex::SymOp;
using symex::SymValue;
using symex::SymVarInfo;

AtomSerializer::AtomSerializer(const std::vector<SymVarInfo>& vars) {
  std::map<std::string, int> totals;
  for (const auto& v : vars) totals[v.base]++;
  display_.reserve(vars.size());
  for (const auto& v : vars) {
    if (totals[v.base] == 1)
      display_.push_back(v.base);
    else
      display_.push_back(v.base + "_" + std::to_string(v.instance));
  }
}

namespace {

const char* sym_op_name(SymOp o) {
  switch (o) {
    case SymOp::Add: return "Add"; case SymOp::Sub: return "Sub";
    case SymOp::Mul: return "Mul"; case SymOp::Eq: return "Eq";
    case SymOp::Ne: return "Ne"; case SymOp::Lt: return "Lt";
    case SymOp::Le: return "Le"; case SymOp::Gt: return "Gt";
    case SymOp::Ge: return "Ge"; case SymOp::And: return "And";
    case SymOp::Or: return "Or"; case SymOp::Not: return "Not";
    case SymOp::Select: return "Select";
  }
  return "?";
}

bool commutative(SymOp o) {
  switch (o) {
    case SymOp::Eq: case SymOp::Ne: case SymOp::Add: case SymOp::Mul:
    case SymOp::And: case SymOp::Or:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string AtomSerializer::value_text(const SymValue& v) const {
  switch (v.kind()) {
    case SymValue::K::Con:
      return std::to_string(v.cval());
    case SymValue::K::Var:
      return display_.at(static_cast<size_t>(v.var_id()));
    case SymValue::K::Op:
      break;
  }
  SymOp o = v.op_kind();
  std::vector<std::string> parts;
  parts.reserve(v.kids().size());
  for (const auto& k : v.kids()) parts.push_back(value_text(k));
  // One relation direction: a Gt/Ge value becomes Lt/Le with swapped sides.
  if (o == SymOp::Gt || o == SymOp::Ge) {
    std::swap(parts[0], parts[1]);
    o = o == SymOp::Gt ? SymOp::Lt : SymOp::Le;
  }
  if (commutative(o) && parts[1] < parts[0]) std::swap(parts[0], parts[1]);
  std::string out = "(";
  out += sym_op_name(o);
  for (const auto& p : parts) {
    out += " ";
    out += p;
  }
  out += ")";
  return out;
}

std::string AtomSerializer::atom_text(const AtomicConstraint& a) const {
  Rel r = a.rel;
  std::string l = value_text(a.lhs), rr = value_text(a.rhs);
  if (r == Rel::Gt || r == Rel::Ge) {
    std::swap(l, rr);
    r = r == Rel::Gt ? Rel::Lt : Rel::Le;
  }
  const char* name = r == Rel::Eq ? "Eq" : r == Rel::Ne ? "Ne" : r == Rel::Lt ? "Lt" : "Le";
  if ((r == Rel::Eq || r == Rel::Ne) && rr < l) std::swap(l, rr);
  return "(" + std::string(name) + " " + l + " " + rr + ")";
}

namespace {

PathRecord to_record(const symex::PathResult& p, const std::string& product) {
  PathRecord r;
  r.product = product;
  r.spec_id = p.spec_id;
  r.status = p.status == symex::PathStatus::Normal ? "normal" : "failure";
  r.call_sequences = p.sequences;
  AtomSerializer ser(p.vars);
  r.atoms.reserve(p.pc.size());
  for (const auto& a : p.pc) r.atoms.push_back(ser.atom_text(a));
  std::sort(r.atoms.begin(), r.atoms.end());
  r.atoms.erase(std::unique(r.atoms.begin(), r.atoms.end()), r.atoms.end());
  r.over_approx = p.over_approx;
  return r;
}

}  // namespace

std::vector<PathRecord> make_path_records(const symex::ExtractResult& r,
                                          const std::string& product) {
  std::vector<PathRecord> out;
  out.reserve(r.normal.size() + r.fail.size());
  for (const auto& p : r.normal) out.push_back(to_record(p, product));
  for (const auto& p : r.fail) out.push_back(to_record(p, product));
  return out;
}

std::vector<DepRecord> make_dep_records(const symex::ExtractResult& r) {
  std::vector<DepRecord> out;
  out.reserve(r.ss.size() + r.sl.size());
  auto add = [&out](const symex::DepPair& p, const char* kind) {
    out.push_back({kind, p.src->loc, p.dst->loc, p.src->presence, p.dst->presence,
                   p.object});
  };
  for (const auto& p : r.ss) add(p, "SS");
  for (const auto& p : r.sl) add(p, "SL");
  return out;
}

namespace {

bool matches(const std::string& name, const std::string& pattern) {
  if (!pattern.empty() && pattern.back() == '*')
    return name.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
  return name == pattern;
}

}  // namespace

CallSequence clean_trace(const CallSequence& seq, const std::vector<std::string>& exclusions) {
  CallSequence out;
  for (const auto& e : seq) {
    bool drop = false;
    for (const auto& p : exclusions)
      if (matches(e.fn, p)) {
        drop = true;
        break;
      }
    if (!drop) out.push_back(e);
  }
  return out;
}

std::vector<PathRecord> clean_records(const std::vector<PathRecord>& in,
                                      const std::vector<std::string>& exclusions,
                                      int* dropped) {
  std::vector<PathRecord> out;
  int n_dropped = 0;
  for (const auto& r : in) {
    PathRecord c = r;
    bool emptied = false;
    for (auto& seq : c.call_sequences) {
      seq = clean_trace(seq, exclusions);
      if (seq.empty()) {
        emptied = true;
        break;
      }
    }
    if (emptied)
      n_dropped++;
    else
      out.push_back(std::move(c));
  }
  if (dropped) *dropped = n_dropped;
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail_input("cannot open for writing: " + tmp);
    os << content;
    os.flush();
    if (!os) fail_input("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail_input("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

namespace {

json sequences_json(const std::vector<CallSequence>& seqs) {
  json out = json::array();
  for (const auto& seq : seqs) {
    json js = json::array();
    for (const auto& e : seq) js.push_back({e.fn, e.callsite.file, e.callsite.line});
    out.push_back(std::move(js));
  }
  return out;
}

std::vector<std::string> read_lines_checked(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail_input("cannot open corpus: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

json parse_line(const std::string& path, size_t n, const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    fail_input(path + ":" + std::to_string(n + 1) + ": malformed corpus record");
  return j;
}

[[noreturn]] void heterogeneous(const std::string& path, size_t n) {
  fail_input(path + ":" + std::to_string(n + 1) + ": heterogeneous corpus");
}

}  // namespace

void emit_path_corpus(const std::vector<PathRecord>& rs, const std::string& path) {
  std::ostringstream os;
  for (const auto& r : rs) {
    json j;
    j["product"] = r.product;
    j["spec_id"] = r.spec_id.empty() ? json(nullptr) : json(r.spec_id);
    j["status"] = r.status;
    j["call_sequences"] = sequences_json(r.call_sequences);
    j["atoms"] = r.atoms;
    j["over_approx"] = r.over_approx;
    os << j.dump() << "\n";
  }
  write_text_atomic(path, os.str());
}

void emit_dep_corpus(const std::vector<DepRecord>& rs, const std::string& path) {
  std::ostringstream os;
  for (const auto& r : rs) {
    json j;
    j["kind"] = r.kind;
    j["src"] = {{"file", r.src_loc.file},
                {"line", r.src_loc.line},
                {"presence", r.src_presence.to_string(true)}};
    j["dst"] = {{"file", r.dst_loc.file},
                {"line", r.dst_loc.line},
                {"presence", r.dst_presence.to_string(true)}};
    j["object"] = r.object;
    os << j.dump() << "\n";
  }
  write_text_atomic(path, os.str());
}

std::vector<PathRecord> read_path_corpus(const std::string& path) {
  std::vector<PathRecord> out;
  auto lines = read_lines_checked(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    json j = parse_line(path, i, lines[i]);
    if (j.contains("kind")) heterogeneous(path, i);
    auto where = path + ":" + std::to_string(i + 1);
    if (!j.contains("product") || !j.contains("status") || !j.contains("call_sequences") ||
        !j.contains("atoms") || !j.contains("over_approx"))
      fail_input(where + ": missing path-record field");
    PathRecord r;
    r.product = j["product"].get<std::string>();
    if (j.contains("spec_id") && !j["spec_id"].is_null())
      r.spec_id = j["spec_id"].get<std::string>();
    r.status = j["status"].get<std::string>();
    if (r.status != "normal" && r.status != "failure")
      fail_input(where + ": bad status '" + r.status + "'");
    for (const auto& js : j["call_sequences"]) {
      CallSequence seq;
      for (const auto& je : js) {
        if (!je.is_array() || je.size() != 3)
          fail_input(where + ": malformed call-sequence entry");
        seq.push_back({je[0].get<std::string>(),
                       {je[1].get<std::string>(), je[2].get<int>()}});
      }
      r.call_sequences.push_back(std::move(seq));
    }
    for (const auto& ja : j["atoms"]) r.atoms.push_back(ja.get<std::string>());
    r.over_approx = j["over_approx"].get<bool>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DepRecord> read_dep_corpus(const std::string& path) {
  std::vector<DepRecord> out;
  auto lines = read_lines_checked(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    json j = parse_line(path, i, lines[i]);
    if (j.contains("status") || j.contains("call_sequences")) heterogeneous(path, i);
    auto where = path + ":" + std::to_string(i + 1);
    if (!j.contains("kind") || !j.contains("src") || !j.contains("dst") ||
        !j.contains("object"))
      fail_input(where + ": missing dependency-record field");
    DepRecord r;
    r.kind = j["kind"].get<std::string>();
    if (r.kind != "SS" && r.kind != "SL")
      fail_input(where + ": bad dependency kind '" + r.kind + "'");
    auto endpoint = [&](const json& je, flc::SrcLoc& loc, flc::FeatureExpr& presence) {
      if (!je.contains("file") || !je.contains("line") || !je.contains("presence"))
        fail_input(where + ": malformed dependency endpoint");
      loc.file = je["file"].get<std::string>();
      loc.line = je["line"].get<int>();
      presence = flc::parse_feature_expr(je["presence"].get<std::string>());
    };
    endpoint(j["src"], r.src_loc, r.src_presence);
    endpoint(j["dst"], r.dst_loc, r.dst_presence);
    r.object = j["object"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace flint::modelx
