#ifndef FLINT_IR_HPP
#define FLINT_IR_HPP

#include <map>
#include <string>
#include <vector>

#include "flint/ast.hpp"

// Product-specialized IR. Loops are unrolled (with a residual halt), every
// named-variable access is an explicit load/store on a memory object, and
// scratch values live in per-activation temps. Parameters are read-only and
// live in temps 0..n-1 of their function's frame.

namespace flint::flc {

enum class IrOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, Select };

// Pure expression over temps, constants and metadata variables.
struct IrExpr {
  enum class K { Const, Temp, Meta, Op } k = K::Const;
  int width = 32;
  long long cval = 0;  // Const
  int temp = -1;       // Temp
  std::string meta;    // Meta: metadata variable base name
  IrOp op{};           // Op
  std::vector<IrExpr> kids;

  static IrExpr constant(long long v, int width = 32);
  static IrExpr temp_ref(int t, int width);
  static IrExpr meta_ref(std::string base);
  static IrExpr make_op(IrOp op, std::vector<IrExpr> kids, int width);
};

struct IrInstruction {
  enum class K {
    Load,     // dst = object[index]
    Store,    // object[index] = value
    Assign,   // dst = value
    Branch,   // if value != 0 goto t1 else t2
    Jump,     // goto t1
    Call,     // dst = callee(args) / callee(args)
    Ret,      // return [value]
    MakeSym,  // object or metadata var becomes a fresh symbolic variable
    Assume,   // constrain value != 0; drop path if unsatisfiable
    Assert,   // fail if value can be 0
    Fail,     // failure termination, optional spec id
    Halt      // loop bound exhausted
  } k;
  SrcLoc loc;
  FeatureExpr presence;

  int dst = -1;        // Load/Assign/Call
  std::string object;  // Load/Store/MakeSym: qualified object id
  IrExpr index;        // Load/Store
  IrExpr value;        // Store/Assign/Ret/Branch/Assume/Assert
  bool has_value = false;  // Ret
  int t1 = -1, t2 = -1;    // Branch/Jump targets

  std::string callee;
  std::vector<IrExpr> args;

  bool is_meta = false;   // MakeSym
  std::string sym_base;   // MakeSym: display base name
  long long lo = 0, hi = 0;
  int sym_width = 32;

  std::string spec_id;  // Fail
};

struct MemoryObjectDecl {
  std::string id;       // qualified: "g" or "func::x"
  std::string display;  // source name
  long long count = 1;  // elements
  bool is_array = false;
  int width = 32;
  bool is_global = true;
  std::string func;  // owning function for locals
  SrcLoc loc;
  bool has_init = false;
  long long init = 0;
};

struct IrFunction {
  std::string name;
  bool is_void = false;
  int ret_width = 32;
  std::vector<Param> params;  // parameter i occupies temp i
  int n_temps = 0;
  std::vector<MemoryObjectDecl> locals;
  std::vector<IrInstruction> body;
  SrcLoc loc;
};

struct IrProgram {
  std::string unit_path;
  ProductDef product;
  std::string entry = "main";
  std::vector<MemoryObjectDecl> globals;
  std::vector<IrFunction> functions;
  std::map<std::string, int> fn_index;

  const IrFunction& fn(const std::string& name) const;
  bool has_fn(const std::string& name) const { return fn_index.count(name) > 0; }
  // Globals plus every function's static locals.
  std::vector<const MemoryObjectDecl*> all_objects() const;
};

// Two's-complement wrap of v to the given bit width (8/16/32).
long long wrap_width(long long v, int width);
long long width_min(int width);
long long width_max(int width);

// Human-readable dump; with include_presence=false the output depends only
// on the executable content (used by the line-filtering oracle).
std::string ir_to_string(const IrProgram& p, bool include_presence = true);

}  // namespace flint::flc

#endif
