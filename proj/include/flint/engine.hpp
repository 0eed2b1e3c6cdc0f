#ifndef FLINT_ENGINE_HPP
#define FLINT_ENGINE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flint/ir.hpp"
#include "flint/symval.hpp"

// Dynamic symbolic execution over a product-resolved program. A worklist of
// path states is stepped one instruction at a time; symbolic branches fork,
// symbolic addresses fork one successor per in-domain offset plus feasible
// out-of-bounds failures, and symbolic division operands are concretized by
// forking over their value interval. Every successor's path condition is
// feasibility-checked; unknown verdicts keep the path and mark it
// over-approximate.

namespace flint::symex {

struct EngineConfig {
  double timeout_secs = 30.0;
  int max_paths = 4096;  // terminated-path budget
  int L = 10;            // longest call sequences kept per normal path
  int loop_bound = 8;    // applied at resolve time; echoed into run metadata
  enum class Search { DFS, BFS } search = Search::DFS;
  enum class StoreKey { BaseAddress, ObjectOffset } store_key = StoreKey::BaseAddress;
  long long feasibility_budget = 65536;
  unsigned seed = 1;
};

struct CallEntry {
  std::string fn;
  flc::SrcLoc callsite;  // entry frame carries the entry function's own loc
  auto operator<=>(const CallEntry&) const = default;
};
using CallSequence = std::vector<CallEntry>;

std::string serialize_sequence(const CallSequence& seq);

enum class PathStatus { Normal, Failure, BoundExhausted };

struct DepPair {
  enum class Kind { SS, SL } kind;
  const flc::IrInstruction* src = nullptr;  // a store
  const flc::IrInstruction* dst = nullptr;  // store (SS) or load (SL)
  std::string object;
};

// One terminated path, with everything the serializers need.
struct PathResult {
  int id = 0;
  PathStatus status = PathStatus::Normal;
  std::string spec_id;     // failure: @spec annotation if any
  std::string diagnostic;  // failure: human-readable cause
  std::vector<CallSequence> sequences;
  std::vector<AtomicConstraint> pc;  // insertion order
  std::vector<SymVarInfo> vars;      // per-path registry, indexed by var id
  bool over_approx = false;
};

struct ExtractResult {
  std::vector<PathResult> normal;
  std::vector<PathResult> fail;
  // Paths that hit the loop budget: kept for diagnostics and oracles, but
  // never serialized into corpora and never contributing dependency pairs.
  std::vector<PathResult> exhausted;
  int bound_exhausted = 0;
  std::vector<DepPair> ss;  // deduped by (src-loc, dst-loc, object), sorted
  std::vector<DepPair> sl;
  bool truncated = false;   // timeout or max-paths hit
  int paths_terminated = 0;
  double wall_secs = 0.0;
};

// Runs the worklist to completion (or timeout / path budget) and collects
// path records plus store-store / store-load dependency pairs unioned over
// normally- and failure-terminated paths.
ExtractResult extract_feature_models(const flc::IrProgram& p, const EngineConfig& cfg = {});

// The L longest sequences (all, if fewer), ties at the cut resolved toward
// the lexicographically smaller serialization. Result ordered longest first.
std::vector<CallSequence> choose_longest(const std::set<CallSequence>& seqs, int l);

}  // namespace flint::symex

#endif
