#include "flint/resolve.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flint/error.hpp"

namespace flint::flc {

namespace {

std::string at(const SrcLoc& loc) {
  return loc.file + ":" + std::to_string(loc.line);
}

IrOp map_binop(BinOp op) {
  switch (op) {
    case BinOp::Add: return IrOp::Add; case BinOp::Sub: return IrOp::Sub;
    case BinOp::Mul: return IrOp::Mul; case BinOp::Div: return IrOp::Div;
    case BinOp::Mod: return IrOp::Mod; case BinOp::Eq: return IrOp::Eq;
    case BinOp::Ne: return IrOp::Ne; case BinOp::Lt: return IrOp::Lt;
    case BinOp::Le: return IrOp::Le; case BinOp::Gt: return IrOp::Gt;
    case BinOp::Ge: return IrOp::Ge; case BinOp::And: return IrOp::And;
    case BinOp::Or: return IrOp::Or;
  }
  fail_internal("unmapped binary operator");
}

class Lowerer {
 public:
  Lowerer(const SourceUnit& u, const ProductDef& p, const ResolveOptions& opt,
          const std::map<std::string, int>& global_index, IrProgram& prog)
      : u_(u), product_(p), opt_(opt), global_index_(global_index), prog_(prog) {}

  IrFunction lower_function(const Function& f) {
    fn_ = IrFunction{};
    fn_.name = f.name;
    fn_.is_void = f.is_void;
    fn_.ret_width = f.ret_width;
    fn_.params = f.params;
    fn_.n_temps = static_cast<int>(f.params.size());
    fn_.loc = f.loc;
    param_index_.clear();
    local_index_.clear();
    local_decl_line_.clear();
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (!param_index_.emplace(f.params[i].name, static_cast<int>(i)).second)
        fail_input("duplicate parameter '" + f.params[i].name + "' at " + at(f.params[i].loc));
    }
    lower_block(f.body);
    return std::move(fn_);
  }

 private:
  bool retained(int line) const {
    return u_.presence_of(line).evaluate(product_.enabled);
  }

  int fresh_temp() { return fn_.n_temps++; }

  IrInstruction& emit(IrInstruction::K k, const SrcLoc& loc) {
    IrInstruction in;
    in.k = k;
    in.loc = loc;
    in.presence = u_.presence_of(loc.line);
    fn_.body.push_back(std::move(in));
    return fn_.body.back();
  }

  struct Target {
    enum class K { Param, Object } k;
    int param = -1;
    int width = 32;
    const MemoryObjectDecl* obj = nullptr;
  };

  Target resolve_name(const std::string& name, const SrcLoc& loc) {
    if (auto it = local_index_.find(name); it != local_index_.end())
      return {Target::K::Object, -1, fn_.locals[it->second].width, &fn_.locals[it->second]};
    if (auto it = param_index_.find(name); it != param_index_.end())
      return {Target::K::Param, it->second, fn_.params[it->second].width, nullptr};
    if (auto it = global_index_.find(name); it != global_index_.end())
      return {Target::K::Object, -1, prog_.globals[it->second].width, &prog_.globals[it->second]};
    fail_input("unknown variable '" + name + "' at " + at(loc));
  }

  IrExpr lower_expr(const ExprPtr& e) {
    switch (e->k) {
      case Expr::K::Int:
        return IrExpr::constant(e->ival, 32);
      case Expr::K::Meta:
        return IrExpr::meta_ref(e->name);
      case Expr::K::Var: {
        Target t = resolve_name(e->name, e->loc);
        if (t.k == Target::K::Param) return IrExpr::temp_ref(t.param, t.width);
        if (t.obj->is_array)
          fail_input("array '" + e->name + "' used without an index at " + at(e->loc));
        auto& in = emit(IrInstruction::K::Load, e->loc);
        in.dst = fresh_temp();
        in.object = t.obj->id;
        in.index = IrExpr::constant(0, 32);
        return IrExpr::temp_ref(in.dst, t.obj->width);
      }
      case Expr::K::Index: {
        Target t = resolve_name(e->name, e->loc);
        if (t.k == Target::K::Param)
          fail_input("parameter '" + e->name + "' is not an array at " + at(e->loc));
        if (!t.obj->is_array)
          fail_input("'" + e->name + "' is not an array at " + at(e->loc));
        IrExpr idx = lower_expr(e->a);
        auto& in = emit(IrInstruction::K::Load, e->loc);
        in.dst = fresh_temp();
        in.object = t.obj->id;
        in.index = std::move(idx);
        return IrExpr::temp_ref(in.dst, t.obj->width);
      }
      case Expr::K::Unary: {
        IrExpr kid = lower_expr(e->a);
        if (e->un == UnOp::Neg)
          return IrExpr::make_op(IrOp::Sub, {IrExpr::constant(0, 32), std::move(kid)}, 32);
        return IrExpr::make_op(IrOp::Not, {std::move(kid)}, 32);
      }
      case Expr::K::Binary: {
        IrExpr lhs = lower_expr(e->a);
        IrExpr rhs = lower_expr(e->b);
        return IrExpr::make_op(map_binop(e->bin), {std::move(lhs), std::move(rhs)}, 32);
      }
      case Expr::K::Ternary: {
        IrExpr c = lower_expr(e->a);
        IrExpr x = lower_expr(e->b);
        IrExpr y = lower_expr(e->c);
        return IrExpr::make_op(IrOp::Select, {std::move(c), std::move(x), std::move(y)}, 32);
      }
      case Expr::K::Call:
        fail_internal("call expression survived parsing outside statement position at " + at(e->loc));
    }
    fail_internal("unhandled expression kind");
  }

  // Lowers a call expression into a Call instruction. dst < 0 discards the
  // result (plain call statement).
  void lower_call(const ExprPtr& call, int dst) {
    std::vector<IrExpr> args;
    args.reserve(call->args.size());
    for (const auto& a : call->args) args.push_back(lower_expr(a));
    auto& in = emit(IrInstruction::K::Call, call->loc);
    in.dst = dst;
    in.callee = call->name;
    in.args = std::move(args);
  }

  void lower_store(const std::string& name, const ExprPtr& lv_index, IrExpr value,
                   const SrcLoc& loc) {
    Target t = resolve_name(name, loc);
    if (t.k == Target::K::Param)
      fail_input("cannot assign to parameter '" + name + "' at " + at(loc));
    IrExpr idx = IrExpr::constant(0, 32);
    if (lv_index) {
      if (!t.obj->is_array)
        fail_input("'" + name + "' is not an array at " + at(loc));
      idx = lower_expr(lv_index);
    } else if (t.obj->is_array) {
      fail_input("array '" + name + "' used without an index at " + at(loc));
    }
    auto& in = emit(IrInstruction::K::Store, loc);
    in.object = t.obj->id;
    in.index = std::move(idx);
    in.value = std::move(value);
  }

  void lower_block(const Block& b) {
    for (size_t i = 0; i < b.stmts.size(); ++i) {
      const Stmt& s = *b.stmts[i];
      if (!retained(s.loc.line)) continue;
      // Metadata assume + return are lowered jointly so the return
      // expression (and any loads it needs) is evaluated exactly once.
      if (s.k == Stmt::K::Assume && s.synthetic && s.cond->k == Expr::K::Binary &&
          s.cond->bin == BinOp::Eq && s.cond->a->k == Expr::K::Meta &&
          i + 1 < b.stmts.size() && b.stmts[i + 1]->k == Stmt::K::Return &&
          b.stmts[i + 1]->rhs == s.cond->b) {
        IrExpr v = lower_expr(s.cond->b);
        auto& a = emit(IrInstruction::K::Assume, s.loc);
        a.value = IrExpr::make_op(IrOp::Eq, {IrExpr::meta_ref(s.cond->a->name), v}, 32);
        auto& r = emit(IrInstruction::K::Ret, b.stmts[i + 1]->loc);
        r.value = std::move(v);
        r.has_value = true;
        ++i;
        continue;
      }
      lower_stmt(s);
    }
  }

  void lower_stmt(const Stmt& s) {
    switch (s.k) {
      case Stmt::K::Decl: {
        auto it = local_decl_line_.find(s.name);
        if (it != local_decl_line_.end()) {
          // Re-visiting the same declaration (loop unrolling) is fine.
          if (it->second != s.loc.line)
            fail_input("duplicate local '" + s.name + "' in function '" + fn_.name +
                       "' at " + at(s.loc));
        } else {
          if (param_index_.count(s.name))
            fail_input("local '" + s.name + "' shadows a parameter at " + at(s.loc));
          MemoryObjectDecl d;
          d.id = fn_.name + "::" + s.name;
          d.display = s.name;
          d.count = s.array_count > 0 ? s.array_count : 1;
          d.is_array = s.array_count > 0;
          d.width = s.width;
          d.is_global = false;
          d.func = fn_.name;
          d.loc = s.loc;
          local_decl_line_[s.name] = s.loc.line;
          local_index_[s.name] = static_cast<int>(fn_.locals.size());
          fn_.locals.push_back(std::move(d));
        }
        if (s.init) {
          if (s.init->k == Expr::K::Call) {
            int t = fresh_temp();
            lower_call(s.init, t);
            lower_store(s.name, nullptr, IrExpr::temp_ref(t, 32), s.loc);
          } else {
            lower_store(s.name, nullptr, lower_expr(s.init), s.loc);
          }
        }
        break;
      }
      case Stmt::K::Assign: {
        if (s.rhs->k == Expr::K::Call) {
          int t = fresh_temp();
          lower_call(s.rhs, t);
          lower_store(s.name, s.lv_index, IrExpr::temp_ref(t, 32), s.loc);
        } else {
          lower_store(s.name, s.lv_index, lower_expr(s.rhs), s.loc);
        }
        break;
      }
      case Stmt::K::If: {
        IrExpr c = lower_expr(s.cond);
        size_t br = fn_.body.size();
        auto& in = emit(IrInstruction::K::Branch, s.loc);
        in.value = std::move(c);
        lower_block(s.body);
        if (s.else_body.stmts.empty()) {
          fn_.body[br].t1 = static_cast<int>(br) + 1;
          fn_.body[br].t2 = static_cast<int>(fn_.body.size());
        } else {
          size_t jmp = fn_.body.size();
          emit(IrInstruction::K::Jump, s.loc);
          fn_.body[br].t1 = static_cast<int>(br) + 1;
          fn_.body[br].t2 = static_cast<int>(fn_.body.size());
          lower_block(s.else_body);
          fn_.body[jmp].t1 = static_cast<int>(fn_.body.size());
        }
        break;
      }
      case Stmt::K::While: {
        std::vector<size_t> exits;  // branches/jumps that leave the loop
        for (int iter = 0; iter < opt_.loop_bound; ++iter) {
          IrExpr c = lower_expr(s.cond);
          size_t br = fn_.body.size();
          auto& in = emit(IrInstruction::K::Branch, s.loc);
          in.value = std::move(c);
          fn_.body[br].t1 = static_cast<int>(br) + 1;
          exits.push_back(br);
          lower_block(s.body);
        }
        // Residual check: if the condition still holds after the last
        // unrolled iteration, the path's loop budget is exhausted.
        IrExpr c = lower_expr(s.cond);
        size_t br = fn_.body.size();
        auto& in = emit(IrInstruction::K::Branch, s.loc);
        in.value = std::move(c);
        fn_.body[br].t1 = static_cast<int>(fn_.body.size());
        exits.push_back(br);
        emit(IrInstruction::K::Halt, s.loc);
        int end = static_cast<int>(fn_.body.size());
        for (size_t b : exits) fn_.body[b].t2 = end;
        break;
      }
      case Stmt::K::Return: {
        IrExpr v;
        bool has_v = false;
        if (s.rhs) {
          v = lower_expr(s.rhs);  // loads must precede the return
          has_v = true;
        }
        auto& in = emit(IrInstruction::K::Ret, s.loc);
        in.value = std::move(v);
        in.has_value = has_v;
        break;
      }
      case Stmt::K::CallStmt:
        lower_call(s.rhs, -1);
        break;
      case Stmt::K::MakeSymbolic: {
        if (s.is_meta) {
          auto& in = emit(IrInstruction::K::MakeSym, s.loc);
          in.is_meta = true;
          in.sym_base = s.name;
          in.sym_width = 32;
          in.lo = width_min(32);
          in.hi = width_max(32);
          break;
        }
        Target t = resolve_name(s.name, s.loc);
        if (t.k == Target::K::Param)
          fail_input("cannot make parameter '" + s.name + "' symbolic at " + at(s.loc));
        if (t.obj->is_array)
          fail_input("make_symbolic target '" + s.name + "' must be a scalar at " + at(s.loc));
        long long lo = width_min(t.obj->width), hi = width_max(t.obj->width);
        if (s.has_domain) {
          if (s.lo > s.hi)
            fail_input("empty symbolic domain for '" + s.name + "' at " + at(s.loc));
          if (s.lo < lo || s.hi > hi)
            fail_input("symbolic domain for '" + s.name + "' exceeds its width at " + at(s.loc));
          lo = s.lo;
          hi = s.hi;
        }
        auto& in = emit(IrInstruction::K::MakeSym, s.loc);
        in.object = t.obj->id;
        in.sym_base = t.obj->display;
        in.sym_width = t.obj->width;
        in.lo = lo;
        in.hi = hi;
        break;
      }
      case Stmt::K::Assume: {
        IrExpr c = lower_expr(s.cond);
        auto& in = emit(IrInstruction::K::Assume, s.loc);
        in.value = std::move(c);
        break;
      }
      case Stmt::K::Assert: {
        IrExpr c = lower_expr(s.cond);
        auto& in = emit(IrInstruction::K::Assert, s.loc);
        in.value = std::move(c);
        break;
      }
      case Stmt::K::Fail: {
        auto& in = emit(IrInstruction::K::Fail, s.loc);
        in.spec_id = s.spec_id;
        break;
      }
    }
  }

  const SourceUnit& u_;
  const ProductDef& product_;
  const ResolveOptions& opt_;
  const std::map<std::string, int>& global_index_;
  IrProgram& prog_;
  IrFunction fn_;
  std::map<std::string, int> param_index_;
  std::map<std::string, int> local_index_;
  std::map<std::string, int> local_decl_line_;
};

// Rejects direct and mutual recursion by 3-color DFS over the call graph.
void check_recursion(const IrProgram& p) {
  std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
  std::vector<std::string> chain;
  struct Walker {
    const IrProgram& p;
    std::map<std::string, int>& color;
    std::vector<std::string>& chain;
    void walk(const std::string& name) {
      color[name] = 1;
      chain.push_back(name);
      for (const auto& in : p.fn(name).body) {
        if (in.k != IrInstruction::K::Call) continue;
        int c = color.count(in.callee) ? color[in.callee] : 0;
        if (c == 1) {
          std::string cyc;
          auto it = std::find(chain.begin(), chain.end(), in.callee);
          for (; it != chain.end(); ++it) cyc += *it + " -> ";
          fail_input("recursion is not supported: " + cyc + in.callee);
        }
        if (c == 0) walk(in.callee);
      }
      chain.pop_back();
      color[name] = 2;
    }
  } w{p, color, chain};
  for (const auto& f : p.functions)
    if (color[f.name] == 0) w.walk(f.name);
}

}  // namespace

IrProgram resolve_product(const SourceUnit& u, const ProductDef& p,
                          const ResolveOptions& opt) {
  if (opt.loop_bound < 1)
    fail_input("loop bound must be positive (got " + std::to_string(opt.loop_bound) + ")");
  std::set<std::string> declared(u.declared_features.begin(), u.declared_features.end());
  for (const auto& f : p.enabled)
    if (!declared.count(f))
      fail_input("product '" + p.name + "' enables undeclared feature '" + f + "'");

  IrProgram prog;
  prog.unit_path = u.path;
  prog.product = p;
  prog.entry = opt.entry;

  std::map<std::string, int> global_index;
  for (const auto& g : u.globals) {
    if (!u.presence_of(g.loc.line).evaluate(p.enabled)) continue;
    MemoryObjectDecl d;
    d.id = g.name;
    d.display = g.name;
    d.count = g.array_count > 0 ? g.array_count : 1;
    d.is_array = g.array_count > 0;
    d.width = g.width;
    d.is_global = true;
    d.loc = g.loc;
    d.has_init = g.has_init;
    d.init = wrap_width(g.init, g.width);
    global_index[g.name] = static_cast<int>(prog.globals.size());
    prog.globals.push_back(std::move(d));
  }

  Lowerer lower(u, p, opt, global_index, prog);
  for (const auto& f : u.functions) {
    if (!u.presence_of(f.loc.line).evaluate(p.enabled)) continue;
    prog.fn_index[f.name] = static_cast<int>(prog.functions.size());
    prog.functions.push_back(lower.lower_function(f));
  }

  for (const auto& f : prog.functions) {
    for (const auto& in : f.body) {
      if (in.k != IrInstruction::K::Call) continue;
      if (!prog.has_fn(in.callee))
        fail_input("call to '" + in.callee + "' at " + at(in.loc) +
                   ": function not present in product '" + p.name + "'");
      const IrFunction& callee = prog.fn(in.callee);
      if (callee.params.size() != in.args.size())
        fail_input("call to '" + in.callee + "' at " + at(in.loc) + ": expected " +
                   std::to_string(callee.params.size()) + " argument(s), got " +
                   std::to_string(in.args.size()));
      if (callee.is_void && in.dst >= 0)
        fail_input("void function '" + in.callee + "' used as a value at " + at(in.loc));
    }
  }
  check_recursion(prog);

  if (!prog.has_fn(opt.entry))
    fail_input("entry function '" + opt.entry + "' not present in product '" + p.name + "'");
  if (!prog.fn(opt.entry).params.empty())
    fail_input("entry function '" + opt.entry + "' must take no parameters");
  return prog;
}

}  // namespace flint::flc
