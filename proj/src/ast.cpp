#include "flint/ast.hpp"

#include <algorithm>
#include <sstream>

#include "flint/error.hpp"

namespace flint::flc {

int SourceUnit::scope_at(int line) const {
  if (line < 1 || line > n_lines)
    fail_input(path + ": line " + std::to_string(line) + " out of range (1.." +
               std::to_string(n_lines) + ")");
  return scope_of_line[line];
}

FeatureExpr SourceUnit::presence_of(int line) const {
  int sc = scope_at(line);
  return sc < 0 ? FeatureExpr::top() : scopes[sc].effective;
}

// ---- pretty printing --------------------------------------------------------

namespace {

int prec_of(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq: case BinOp::Ne: return 3;
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
    case BinOp::Add: case BinOp::Sub: return 5;
    case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 6;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+"; case BinOp::Sub: return "-";
    case BinOp::Mul: return "*"; case BinOp::Div: return "/";
    case BinOp::Mod: return "%"; case BinOp::Eq: return "==";
    case BinOp::Ne: return "!="; case BinOp::Lt: return "<";
    case BinOp::Le: return "<="; case BinOp::Gt: return ">";
    case BinOp::Ge: return ">="; case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

void print_expr(const Expr& e, std::string& out, int min_prec) {
  switch (e.k) {
    case Expr::K::Int:
      if (e.ival < 0) {
        out += '(';
        out += std::to_string(e.ival);
        out += ')';
      } else {
        out += std::to_string(e.ival);
      }
      break;
    case Expr::K::Var:
    case Expr::K::Meta:
      out += e.name;
      break;
    case Expr::K::Index:
      out += e.name;
      out += '[';
      print_expr(*e.a, out, 0);
      out += ']';
      break;
    case Expr::K::Unary:
      out += e.un == UnOp::Not ? '!' : '-';
      print_expr(*e.a, out, 7);
      break;
    case Expr::K::Binary: {
      int p = prec_of(e.bin);
      bool paren = p < min_prec;
      if (paren) out += '(';
      print_expr(*e.a, out, p);
      out += ' ';
      out += op_text(e.bin);
      out += ' ';
      print_expr(*e.b, out, p + 1);
      if (paren) out += ')';
      break;
    }
    case Expr::K::Ternary: {
      bool paren = min_prec > 0;
      if (paren) out += '(';
      print_expr(*e.a, out, 1);
      out += " ? ";
      print_expr(*e.b, out, 0);
      out += " : ";
      print_expr(*e.c, out, 0);
      if (paren) out += ')';
      break;
    }
    case Expr::K::Call:
      out += e.name;
      out += '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.args[i], out, 0);
      }
      out += ')';
      break;
  }
}

std::string expr_text(const ExprPtr& e) {
  std::string s;
  if (e) print_expr(*e, s, 0);
  return s;
}

const char* width_name(int w) { return w == 8 ? "int8" : w == 16 ? "int16" : "int32"; }

// Emits #if/#endif transitions between directive scope chains.
class ScopeEmitter {
 public:
  explicit ScopeEmitter(const SourceUnit& u) : u_(u) {}

  std::vector<int> chain_of(int line) const {
    std::vector<int> chain;
    for (int sc = u_.scope_of_line[line]; sc >= 0; sc = u_.scopes[sc].parent)
      chain.push_back(sc);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }

  void transition(std::string& out, const std::vector<int>& target) {
    size_t common = 0;
    while (common < cur_.size() && common < target.size() && cur_[common] == target[common])
      ++common;
    for (size_t i = cur_.size(); i > common; --i) out += "#endif\n";
    for (size_t i = common; i < target.size(); ++i)
      out += "#if " + u_.scopes[target[i]].local.to_string() + "\n";
    cur_ = target;
  }

  void close_all(std::string& out) { transition(out, {}); }

 private:
  const SourceUnit& u_;
  std::vector<int> cur_;
};

void print_block(const SourceUnit& u, const Block& b, std::string& out, int indent,
                 ScopeEmitter& scopes, const std::vector<int>& enclosing);

void print_stmt(const SourceUnit& u, const Stmt& s, std::string& out, int indent,
                ScopeEmitter& scopes) {
  std::string pad(indent, ' ');
  switch (s.k) {
    case Stmt::K::Decl:
      out += pad + width_name(s.width) + " " + s.name;
      if (s.array_count > 0) out += "[" + std::to_string(s.array_count) + "]";
      if (s.init) out += " = " + expr_text(s.init);
      out += ";\n";
      break;
    case Stmt::K::Assign:
      out += pad + s.name;
      if (s.lv_index) out += "[" + expr_text(s.lv_index) + "]";
      out += " = " + expr_text(s.rhs) + ";\n";
      break;
    case Stmt::K::If: {
      out += pad + "if (" + expr_text(s.cond) + ") {\n";
      auto here = scopes.chain_of(s.loc.line);
      print_block(u, s.body, out, indent + 2, scopes, here);
      out += pad + "}";
      if (!s.else_body.stmts.empty()) {
        out += " else {\n";
        print_block(u, s.else_body, out, indent + 2, scopes, here);
        out += pad + "}";
      }
      out += "\n";
      break;
    }
    case Stmt::K::While: {
      out += pad + "while (" + expr_text(s.cond) + ") {\n";
      auto here = scopes.chain_of(s.loc.line);
      print_block(u, s.body, out, indent + 2, scopes, here);
      out += pad + "}\n";
      break;
    }
    case Stmt::K::Return:
      out += pad + "return";
      if (s.rhs) out += " " + expr_text(s.rhs);
      out += ";\n";
      break;
    case Stmt::K::CallStmt:
      out += pad + expr_text(s.rhs) + ";\n";
      break;
    case Stmt::K::MakeSymbolic:
      out += pad + "make_symbolic(" + s.name;
      if (s.has_domain)
        out += ", " + std::to_string(s.lo) + ", " + std::to_string(s.hi);
      out += ");\n";
      break;
    case Stmt::K::Assume:
      out += pad + "assume(" + expr_text(s.cond) + ");\n";
      break;
    case Stmt::K::Assert:
      out += pad + "assert(" + expr_text(s.cond) + ");\n";
      break;
    case Stmt::K::Fail:
      out += pad + "fail()";
      if (!s.spec_id.empty()) out += " @spec(" + s.spec_id + ")";
      out += ";\n";
      break;
  }
}

void print_block(const SourceUnit& u, const Block& b, std::string& out, int indent,
                 ScopeEmitter& scopes, const std::vector<int>& enclosing) {
  for (const auto& s : b.stmts) {
    scopes.transition(out, scopes.chain_of(s->loc.line));
    print_stmt(u, *s, out, indent, scopes);
  }
  scopes.transition(out, enclosing);
}

}  // namespace

std::string pretty_print(const SourceUnit& u) {
  std::string out;
  if (!u.declared_features.empty()) {
    out += "features ";
    for (size_t i = 0; i < u.declared_features.size(); ++i) {
      if (i) out += ", ";
      out += u.declared_features[i];
    }
    out += ";\n\n";
  }
  // Globals and functions interleaved in original line order.
  struct Item {
    int line;
    bool is_global;
    size_t idx;
  };
  std::vector<Item> items;
  for (size_t i = 0; i < u.globals.size(); ++i)
    items.push_back({u.globals[i].loc.line, true, i});
  for (size_t i = 0; i < u.functions.size(); ++i)
    items.push_back({u.functions[i].loc.line, false, i});
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.line < b.line; });

  ScopeEmitter scopes(u);
  for (const auto& it : items) {
    scopes.transition(out, scopes.chain_of(it.line));
    if (it.is_global) {
      const auto& g = u.globals[it.idx];
      out += std::string(width_name(g.width)) + " " + g.name;
      if (g.array_count > 0) out += "[" + std::to_string(g.array_count) + "]";
      if (g.has_init) out += " = " + std::to_string(g.init);
      out += ";\n";
    } else {
      const auto& f = u.functions[it.idx];
      out += "\n";
      out += (f.is_void ? std::string("void") : std::string(width_name(f.ret_width)));
      out += " " + f.name + "(";
      for (size_t i = 0; i < f.params.size(); ++i) {
        if (i) out += ", ";
        out += std::string(width_name(f.params[i].width)) + " " + f.params[i].name;
      }
      out += ") {\n";
      auto here = scopes.chain_of(it.line);
      print_block(u, f.body, out, 2, scopes, here);
      out += "}\n";
    }
  }
  scopes.close_all(out);
  return out;
}

// ---- structural equality ----------------------------------------------------

namespace {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->k != b->k) return false;
  switch (a->k) {
    case Expr::K::Int: return a->ival == b->ival;
    case Expr::K::Var:
    case Expr::K::Meta: return a->name == b->name;
    case Expr::K::Index: return a->name == b->name && expr_equal(a->a, b->a);
    case Expr::K::Unary: return a->un == b->un && expr_equal(a->a, b->a);
    case Expr::K::Binary:
      return a->bin == b->bin && expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::K::Ternary:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b) && expr_equal(a->c, b->c);
    case Expr::K::Call: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

struct Cmp {
  const SourceUnit& ua;
  const SourceUnit& ub;
  std::string why;

  bool fail(const std::string& w) {
    if (why.empty()) why = w;
    return false;
  }

  bool presence_equal(int line_a, int line_b, const std::string& what) {
    auto pa = ua.presence_of(line_a).canonical_key();
    auto pb = ub.presence_of(line_b).canonical_key();
    if (pa != pb)
      return fail(what + ": presence mismatch (" + pa + " vs " + pb + ")");
    return true;
  }

  bool block_equal(const Block& a, const Block& b, const std::string& ctx) {
    if (a.stmts.size() != b.stmts.size())
      return fail(ctx + ": statement count " + std::to_string(a.stmts.size()) + " vs " +
                  std::to_string(b.stmts.size()));
    for (size_t i = 0; i < a.stmts.size(); ++i)
      if (!stmt_equal(*a.stmts[i], *b.stmts[i], ctx + "[" + std::to_string(i) + "]"))
        return false;
    return true;
  }

  bool stmt_equal(const Stmt& a, const Stmt& b, const std::string& ctx) {
    if (a.k != b.k) return fail(ctx + ": statement kind");
    if (a.name != b.name || a.width != b.width || a.array_count != b.array_count)
      return fail(ctx + ": declaration shape");
    if (a.is_meta != b.is_meta || a.has_domain != b.has_domain || a.lo != b.lo ||
        a.hi != b.hi || a.spec_id != b.spec_id)
      return fail(ctx + ": statement attributes");
    if (!expr_equal(a.init, b.init) || !expr_equal(a.lv_index, b.lv_index) ||
        !expr_equal(a.rhs, b.rhs) || !expr_equal(a.cond, b.cond))
      return fail(ctx + ": expression");
    if (!presence_equal(a.loc.line, b.loc.line, ctx)) return false;
    return block_equal(a.body, b.body, ctx + ".body") &&
           block_equal(a.else_body, b.else_body, ctx + ".else");
  }
};

}  // namespace

bool structurally_equal(const SourceUnit& a, const SourceUnit& b, std::string* why) {
  Cmp cmp{a, b, {}};
  bool ok = [&] {
    if (a.declared_features != b.declared_features) return cmp.fail("feature list");
    if (a.globals.size() != b.globals.size()) return cmp.fail("global count");
    for (size_t i = 0; i < a.globals.size(); ++i) {
      const auto& ga = a.globals[i];
      const auto& gb = b.globals[i];
      if (ga.name != gb.name || ga.width != gb.width || ga.array_count != gb.array_count ||
          ga.has_init != gb.has_init || ga.init != gb.init)
        return cmp.fail("global " + ga.name);
      if (!cmp.presence_equal(ga.loc.line, gb.loc.line, "global " + ga.name)) return false;
    }
    if (a.functions.size() != b.functions.size()) return cmp.fail("function count");
    for (size_t i = 0; i < a.functions.size(); ++i) {
      const auto& fa = a.functions[i];
      const auto& fb = b.functions[i];
      if (fa.name != fb.name || fa.is_void != fb.is_void || fa.ret_width != fb.ret_width)
        return cmp.fail("function " + fa.name + " signature");
      if (fa.params.size() != fb.params.size())
        return cmp.fail("function " + fa.name + " params");
      for (size_t j = 0; j < fa.params.size(); ++j)
        if (fa.params[j].name != fb.params[j].name || fa.params[j].width != fb.params[j].width)
          return cmp.fail("function " + fa.name + " param " + std::to_string(j));
      if (!cmp.presence_equal(fa.loc.line, fb.loc.line, "function " + fa.name)) return false;
      if (!cmp.block_equal(fa.body, fb.body, fa.name)) return false;
    }
    return true;
  }();
  if (!ok && why) *why = cmp.why;
  return ok;
}

}  // namespace flint::flc
