#include "flint/annotate.hpp"

#include <memory>
#include <set>

#include "flint/error.hpp"

namespace flint::modelx {

namespace {

using namespace flc;

void collect_decl_names(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b.stmts) {
    if (s->k == Stmt::K::Decl) out.insert(s->name);
    collect_decl_names(s->body, out);
    collect_decl_names(s->else_body, out);
  }
}

StmtPtr make_meta_assume(const std::string& base, const ExprPtr& ret_expr, SrcLoc loc) {
  auto meta = std::make_shared<Expr>();
  meta->k = Expr::K::Meta;
  meta->loc = loc;
  meta->name = base;
  auto eq = std::make_shared<Expr>();
  eq->k = Expr::K::Binary;
  eq->bin = BinOp::Eq;
  eq->loc = loc;
  eq->a = std::move(meta);
  eq->b = ret_expr;
  auto st = std::make_shared<Stmt>();
  st->k = Stmt::K::Assume;
  st->loc = loc;
  st->cond = std::move(eq);
  st->synthetic = true;
  return st;
}

Block annotate_block(const Block& b, const std::string& base) {
  Block out;
  for (const auto& s : b.stmts) {
    switch (s->k) {
      case Stmt::K::Return:
        if (!s->rhs) fail_internal("non-void return without a value survived parsing");
        out.stmts.push_back(make_meta_assume(base, s->rhs, s->loc));
        out.stmts.push_back(s);
        break;
      case Stmt::K::If:
      case Stmt::K::While: {
        auto copy = std::make_shared<Stmt>(*s);
        copy->body = annotate_block(s->body, base);
        copy->else_body = annotate_block(s->else_body, base);
        out.stmts.push_back(std::move(copy));
        break;
      }
      default:
        out.stmts.push_back(s);
        break;
    }
  }
  return out;
}

}  // namespace

SourceUnit annotate_metadata_vars(const SourceUnit& u) {
  std::set<std::string> idents;
  for (const auto& g : u.globals) idents.insert(g.name);
  for (const auto& f : u.functions) {
    idents.insert(f.name);
    for (const auto& p : f.params) idents.insert(p.name);
    collect_decl_names(f.body, idents);
  }

  SourceUnit out = u;
  for (auto& f : out.functions) {
    if (f.is_void) continue;
    std::string base = f.name + "Res";
    if (idents.count(base))
      fail_input("metadata variable '" + base + "' collides with an existing identifier");
    auto ms = std::make_shared<Stmt>();
    ms->k = Stmt::K::MakeSymbolic;
    ms->loc = f.loc;
    ms->name = base;
    ms->is_meta = true;
    ms->synthetic = true;
    Block body;
    body.stmts.push_back(std::move(ms));
    Block rest = annotate_block(f.body, base);
    body.stmts.insert(body.stmts.end(), rest.stmts.begin(), rest.stmts.end());
    f.body = std::move(body);
  }
  return out;
}

}  // namespace flint::modelx
