#ifndef FLINT_RESOLVE_HPP
#define FLINT_RESOLVE_HPP

#include "flint/ast.hpp"
#include "flint/ir.hpp"

namespace flint::flc {

struct ResolveOptions {
  int loop_bound = 8;       // max executed iterations before the residual halt
  std::string entry = "main";
};

// Specializes a unit for one product: filters declarations and statements by
// directive presence, lowers to IR, unrolls loops up to the bound. Every
// retained instruction is stamped with its original presence condition.
// Errors (Errc::input): unknown feature in the product, dangling callsite
// (callee filtered out), arity/void misuse at a callsite, recursion,
// missing entry function, non-positive loop bound.
IrProgram resolve_product(const SourceUnit& u, const ProductDef& p,
                          const ResolveOptions& opt = {});

}  // namespace flint::flc

#endif
