#ifndef FLINT_AST_HPP
#define FLINT_AST_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "flint/feature_expr.hpp"

// FLC: a small C-like imperative language with feature directives.
//
//   features A, B, C;                 // feature declarations
//   int32 g;  int8 buf[4];            // globals (scalar or fixed array),
//                                     // optional constant initializer
//   int32 f(int32 x) { ... }          // functions; params are read-only
//                                     // scalars
//   statements: decls, assignment, if/else, while (bounded at resolve time),
//               calls, return, make_symbolic(v[,lo,hi]), assume(e),
//               assert(e), fail() [@spec(id)];
//   expressions: || && == != < <= > >= + - * / % unary ! -  ?:  literals,
//               variables, array indexing. Calls appear only as statements
//               or as the full right-hand side of an assignment.
//   directives: #if <feature-expr> / #else / #endif on their own lines,
//               enclosing whole declarations/statements (disciplined use).
//
// The parser keeps *all* directive branches in the AST and records the
// directive scope structure; product resolution later filters by presence.

namespace flint::flc {

struct SrcLoc {
  std::string file;
  int line = 0;
  auto operator<=>(const SrcLoc&) const = default;
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class K { Int, Var, Index, Unary, Binary, Ternary, Call, Meta } k;
  SrcLoc loc;
  long long ival = 0;          // Int
  std::string name;            // Var / Index / Call / Meta
  UnOp un{};                   // Unary
  BinOp bin{};                 // Binary
  ExprPtr a, b, c;             // operands; Index uses a as the subscript
  std::vector<ExprPtr> args;   // Call
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
};

struct Stmt {
  enum class K {
    Decl,
    Assign,
    If,
    While,
    Return,
    CallStmt,
    MakeSymbolic,
    Assume,
    Assert,
    Fail
  } k;
  SrcLoc loc;

  // Decl: name, width, array_count (0 = scalar), optional init expr.
  // Assign: name (+ lv_index for arrays), rhs.
  std::string name;
  int width = 32;
  long long array_count = 0;
  ExprPtr init;
  ExprPtr lv_index;
  ExprPtr rhs;  // Assign rhs; Return value; CallStmt call expr

  ExprPtr cond;  // If / While / Assume / Assert
  Block body;    // If then-block / While body
  Block else_body;

  // MakeSymbolic: name (+ is_meta for injected metadata variables),
  // optional [lo,hi] domain.
  bool is_meta = false;
  bool has_domain = false;
  long long lo = 0, hi = 0;

  std::string spec_id;  // Fail: optional @spec(id)
  bool synthetic = false;  // injected by a pass (implicit return, metadata)
};

struct Param {
  std::string name;
  int width = 32;
  SrcLoc loc;
};

struct Function {
  std::string name;
  bool is_void = false;
  int ret_width = 32;
  std::vector<Param> params;
  Block body;
  SrcLoc loc;
  int end_line = 0;  // closing brace
};

struct GlobalDecl {
  std::string name;
  int width = 32;
  long long array_count = 0;  // 0 = scalar
  bool has_init = false;
  long long init = 0;
  SrcLoc loc;
};

// One #if or #else region. `local` is this level's own condition (for an
// #else branch: the negation of the matching #if condition); `effective`
// is the conjunction of all enclosing conditions down to this one.
struct DirectiveScope {
  int parent = -1;  // scope index, -1 = top level
  FeatureExpr local;
  FeatureExpr effective;
  int if_line = 0;  // line of the introducing directive
};

struct SourceUnit {
  std::string path;
  std::vector<std::string> declared_features;
  std::vector<GlobalDecl> globals;
  std::vector<Function> functions;
  std::vector<DirectiveScope> scopes;
  std::vector<int> scope_of_line;  // 1-based; -1 = top level
  int n_lines = 0;

  // Innermost enclosing directive condition for a line (True at top level).
  // Total over [1, n_lines]; out-of-range lines are an input error.
  FeatureExpr presence_of(int line) const;
  int scope_at(int line) const;  // -1 at top level
};

struct ProductDef {
  std::string name;
  std::set<std::string> enabled;
  int line = 0;
};

// Regenerates FLC source (including directive lines) from the AST. The
// result reparses to a structurally equal unit.
std::string pretty_print(const SourceUnit& u);

// Structural equality ignoring line numbers: same declarations, same
// statement/expression trees, and canonically equal presence condition on
// every global, function and statement. On mismatch, *why (if given)
// receives a short description.
bool structurally_equal(const SourceUnit& a, const SourceUnit& b,
                        std::string* why = nullptr);

}  // namespace flint::flc

#endif
