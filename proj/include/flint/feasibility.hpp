#ifndef FLINT_FEASIBILITY_HPP
#define FLINT_FEASIBILITY_HPP

#include <vector>

#include "flint/symval.hpp"

namespace flint::symex {

enum class Feas { Sat, Unsat, Unknown };

// Solver-free satisfiability check for a path condition. Variables carry
// finite domains (indexed by SymValue var id). Exact — by exhaustive
// enumeration per connected component — whenever the involved domain
// product stays within `budget`; otherwise interval propagation, which
// either refutes exactly or returns Unknown (caller treats Unknown as sat
// and flags the path over-approximate).
//
// Full-range 32-bit variables constrained by a single defining equality
// (the metadata-result pattern) are eliminated up front so they never
// count against the enumeration budget.
Feas check_feasibility(const std::vector<AtomicConstraint>& pc,
                       const std::vector<SymVarInfo>& vars,
                       long long budget = 65536);

// Conservative inclusive range of a value under the variable domains.
std::pair<long long, long long> value_interval(const SymValue& v,
                                               const std::vector<SymVarInfo>& vars);

}  // namespace flint::symex

#endif
