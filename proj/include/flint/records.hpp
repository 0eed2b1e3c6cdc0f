#ifndef FLINT_RECORDS_HPP
#define FLINT_RECORDS_HPP

#include <string>
#include <vector>

#include "flint/engine.hpp"
#include "flint/feature_expr.hpp"

namespace flint::modelx {

// Canonical atom serialization with per-path display names: a variable base
// created once on the path prints bare; with two or more instances each
// prints base_1, base_2, ... in creation order. Gt/Ge normalize to Lt/Le by
// operand swap; commutative operands are ordered lexicographically by their
// serialized text.
class AtomSerializer {
 public:
  explicit AtomSerializer(const std::vector<symex::SymVarInfo>& vars);
  std::string value_text(const symex::SymValue& v) const;
  std::string atom_text(const symex::AtomicConstraint& a) const;

 private:
  std::vector<std::string> display_;
};

struct PathRecord {
  std::string product;
  std::string spec_id;  // empty = none
  std::string status;   // "normal" | "failure"
  std::vector<symex::CallSequence> call_sequences;
  std::vector<std::string> atoms;  // canonical texts, sorted and deduplicated
  bool over_approx = false;
};

struct DepRecord {
  std::string kind;  // "SS" | "SL"
  flc::SrcLoc src_loc, dst_loc;
  flc::FeatureExpr src_presence, dst_presence;
  std::string object;
};

std::vector<PathRecord> make_path_records(const symex::ExtractResult& r,
                                          const std::string& product);
std::vector<DepRecord> make_dep_records(const symex::ExtractResult& r);

// Removes entries whose function name matches the exclusion list (exact
// name, or prefix when the pattern ends in '*').
symex::CallSequence clean_trace(const symex::CallSequence& seq,
                                const std::vector<std::string>& exclusions);

// clean_trace over every sequence of every record; a record where any
// sequence would empty is dropped and counted.
std::vector<PathRecord> clean_records(const std::vector<PathRecord>& in,
                                      const std::vector<std::string>& exclusions,
                                      int* dropped = nullptr);

// Writes via a temp file + rename so readers never observe partial output.
void write_text_atomic(const std::string& path, const std::string& content);

// JSON-Lines corpora with fixed key order; readers validate the schema and
// reject files mixing record kinds.
void emit_path_corpus(const std::vector<PathRecord>& rs, const std::string& path);
void emit_dep_corpus(const std::vector<DepRecord>& rs, const std::string& path);
std::vector<PathRecord> read_path_corpus(const std::string& path);
std::vector<DepRecord> read_dep_corpus(const std::string& path);

}  // namespace flint::modelx

#endif
