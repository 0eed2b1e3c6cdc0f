#ifndef FLINT_TESTS_SUPPORT_CONCRETE_INTERP_HPP
#define FLINT_TESTS_SUPPORT_CONCRETE_INTERP_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flint/engine.hpp"
#include "flint/ir.hpp"

namespace flint::testing {

// Reference interpreter: runs a program on one concrete input assignment,
// mirroring the symbolic engine's value semantics exactly (wrap on store /
// call / return boundaries, truncating division faulting on a zero divisor,
// non-short-circuit logicals). Used as an independent oracle for the
// engine's dependences and path outcomes.

enum class RunStatus { Normal, Failure, BoundExhausted, Excluded };

// One non-meta make_symbolic event, in execution order.
struct SymInput {
  std::string base;
  long long lo = 0, hi = 0;
};

struct RunResult {
  RunStatus status = RunStatus::Normal;
  std::string spec_id;
  std::string diagnostic;
  // Non-meta make_symbolic events seen, in order.
  std::vector<SymInput> events;
  // Values created per symbolic base in creation order; a metadata result
  // stays unset until its defining assume executes.
  std::map<std::string, std::vector<std::optional<long long>>> created;
  // Per-run store-store / store-load pairs, in discovery order, undeduped.
  std::vector<symex::DepPair> pairs;
};

// Executes the entry function with the i-th non-meta make_symbolic event
// taking inputs[i]; events beyond the vector take their domain minimum (so
// an empty vector probes the event list).
RunResult run_concrete(const flc::IrProgram& p, const std::vector<long long>& inputs,
                       const symex::EngineConfig& cfg = {});

// Deduplication key matching the engine's: src|dst|object.
std::string dep_key(const symex::DepPair& d);

// True when the run's created values satisfy every constraint of the path.
// Variables are matched positionally per base (n-th creation of the base);
// a constraint over an instance the run never created or bound fails.
bool satisfies_path(const RunResult& r, const symex::PathResult& path);

}  // namespace flint::testing

#endif
