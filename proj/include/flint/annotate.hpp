#ifndef FLINT_ANNOTATE_HPP
#define FLINT_ANNOTATE_HPP

#include "flint/ast.hpp"

namespace flint::modelx {

// Instruments every integer-returning function F with a metadata symbolic
// variable `FRes`: a make_symbolic(FRes) at entry and an assume(FRes == r)
// immediately before each `return r`. Metadata variables live in registers,
// not memory, so the instrumentation adds no loads or stores; the product
// resolver lowers the assume/return pair so the return expression is
// evaluated exactly once. Void functions are unchanged.
// Error (input): `FRes` collides with an identifier already in the unit.
flc::SourceUnit annotate_metadata_vars(const flc::SourceUnit& u);

}  // namespace flint::modelx

#endif
