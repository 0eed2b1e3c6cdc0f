#include "flint/symval.hpp"

#include <sstream>

#include "flint/error.hpp"
#include "flint/ir.hpp"

namespace flint::symex {

using flc::wrap_width;

SymValue SymValue::concrete(long long v) {
  auto n = std::make_shared<Node>();
  n->k = K::Con;
  n->c = wrap_width(v, 32);
  return SymValue(std::move(n));
}

SymValue SymValue::var(int id) {
  auto n = std::make_shared<Node>();
  n->k = K::Var;
  n->var = id;
  return SymValue(std::move(n));
}

SymValue SymValue::op(SymOp o, std::vector<SymValue> kids) {
  bool all_con = true;
  for (const auto& k : kids) all_con = all_con && k.is_concrete();
  if (all_con) {
    std::vector<long long> xs;
    xs.reserve(kids.size());
    for (const auto& k : kids) xs.push_back(k.cval());
    return concrete(apply_sym_op(o, xs));
  }
  if (o == SymOp::Select && kids.at(0).is_concrete())
    return kids[0].cval() != 0 ? kids[1] : kids[2];
  auto n = std::make_shared<Node>();
  n->k = K::Op;
  n->op = o;
  n->kids = std::move(kids);
  return SymValue(std::move(n));
}

namespace {

const char* op_key(SymOp o) {
  switch (o) {
    case SymOp::Add: return "Add"; case SymOp::Sub: return "Sub";
    case SymOp::Mul: return "Mul"; case SymOp::Eq: return "Eq";
    case SymOp::Ne: return "Ne"; case SymOp::Lt: return "Lt";
    case SymOp::Le: return "Le"; case SymOp::Gt: return "Gt";
    case SymOp::Ge: return "Ge"; case SymOp::And: return "And";
    case SymOp::Or: return "Or"; case SymOp::Not: return "Not";
    case SymOp::Select: return "Select";
  }
  return "?";
}

void key_of(const SymValue& v, std::ostream& os) {
  switch (v.kind()) {
    case SymValue::K::Con: os << v.cval(); break;
    case SymValue::K::Var: os << "v" << v.var_id(); break;
    case SymValue::K::Op:
      os << "(" << op_key(v.op_kind());
      for (const auto& k : v.kids()) {
        os << " ";
        key_of(k, os);
      }
      os << ")";
      break;
  }
}

const char* rel_key(Rel r) {
  switch (r) {
    case Rel::Eq: return "Eq"; case Rel::Ne: return "Ne";
    case Rel::Lt: return "Lt"; case Rel::Le: return "Le";
    case Rel::Gt: return "Gt"; case Rel::Ge: return "Ge";
  }
  return "?";
}

}  // namespace

std::string SymValue::key() const {
  std::ostringstream os;
  key_of(*this, os);
  return os.str();
}

std::string AtomicConstraint::key() const {
  std::ostringstream os;
  os << "(" << rel_key(rel) << " ";
  key_of(lhs, os);
  os << " ";
  key_of(rhs, os);
  os << ")";
  return os.str();
}

Rel negate_rel(Rel r) {
  switch (r) {
    case Rel::Eq: return Rel::Ne; case Rel::Ne: return Rel::Eq;
    case Rel::Lt: return Rel::Ge; case Rel::Le: return Rel::Gt;
    case Rel::Gt: return Rel::Le; case Rel::Ge: return Rel::Lt;
  }
  fail_internal("bad relation");
}

namespace {

bool rel_of_op(SymOp o, Rel& out) {
  switch (o) {
    case SymOp::Eq: out = Rel::Eq; return true;
    case SymOp::Ne: out = Rel::Ne; return true;
    case SymOp::Lt: out = Rel::Lt; return true;
    case SymOp::Le: out = Rel::Le; return true;
    case SymOp::Gt: out = Rel::Gt; return true;
    case SymOp::Ge: out = Rel::Ge; return true;
    default: return false;
  }
}

void split_into(const SymValue& v, bool truth, std::vector<AtomicConstraint>& out) {
  if (v.kind() == SymValue::K::Op) {
    SymOp o = v.op_kind();
    if (o == SymOp::Not) {
      split_into(v.kids()[0], !truth, out);
      return;
    }
    if ((o == SymOp::And && truth) || (o == SymOp::Or && !truth)) {
      for (const auto& k : v.kids()) split_into(k, truth, out);
      return;
    }
    Rel r;
    if (rel_of_op(o, r)) {
      out.push_back({truth ? r : negate_rel(r), v.kids()[0], v.kids()[1]});
      return;
    }
  }
  // Var, arithmetic, select, or a non-splittable and/or side.
  out.push_back({truth ? Rel::Ne : Rel::Eq, v, SymValue::concrete(0)});
}

}  // namespace

std::vector<AtomicConstraint> split_condition(const SymValue& v, bool truth) {
  std::vector<AtomicConstraint> out;
  split_into(v, truth, out);
  return out;
}

long long apply_sym_op(SymOp op, const std::vector<long long>& xs) {
  switch (op) {
    case SymOp::Add: return wrap_width(xs.at(0) + xs.at(1), 32);
    case SymOp::Sub: return wrap_width(xs.at(0) - xs.at(1), 32);
    case SymOp::Mul: return wrap_width(xs.at(0) * xs.at(1), 32);
    case SymOp::Eq: return xs.at(0) == xs.at(1) ? 1 : 0;
    case SymOp::Ne: return xs.at(0) != xs.at(1) ? 1 : 0;
    case SymOp::Lt: return xs.at(0) < xs.at(1) ? 1 : 0;
    case SymOp::Le: return xs.at(0) <= xs.at(1) ? 1 : 0;
    case SymOp::Gt: return xs.at(0) > xs.at(1) ? 1 : 0;
    case SymOp::Ge: return xs.at(0) >= xs.at(1) ? 1 : 0;
    case SymOp::And: return (xs.at(0) != 0 && xs.at(1) != 0) ? 1 : 0;
    case SymOp::Or: return (xs.at(0) != 0 || xs.at(1) != 0) ? 1 : 0;
    case SymOp::Not: return xs.at(0) == 0 ? 1 : 0;
    case SymOp::Select: return xs.at(0) != 0 ? xs.at(1) : xs.at(2);
  }
  fail_internal("bad symbolic operator");
}

long long eval_sym(const SymValue& v, const std::function<long long(int)>& env) {
  switch (v.kind()) {
    case SymValue::K::Con: return v.cval();
    case SymValue::K::Var: return env(v.var_id());
    case SymValue::K::Op: {
      std::vector<long long> xs;
      xs.reserve(v.kids().size());
      for (const auto& k : v.kids()) xs.push_back(eval_sym(k, env));
      return apply_sym_op(v.op_kind(), xs);
    }
  }
  fail_internal("bad symbolic value");
}

bool eval_atom(const AtomicConstraint& a, const std::function<long long(int)>& env) {
  long long l = eval_sym(a.lhs, env), r = eval_sym(a.rhs, env);
  switch (a.rel) {
    case Rel::Eq: return l == r; case Rel::Ne: return l != r;
    case Rel::Lt: return l < r; case Rel::Le: return l <= r;
    case Rel::Gt: return l > r; case Rel::Ge: return l >= r;
  }
  fail_internal("bad relation");
}

void collect_vars(const SymValue& v, std::set<int>& out) {
  switch (v.kind()) {
    case SymValue::K::Con: return;
    case SymValue::K::Var: out.insert(v.var_id()); return;
    case SymValue::K::Op:
      for (const auto& k : v.kids()) collect_vars(k, out);
      return;
  }
}

void collect_vars(const AtomicConstraint& a, std::set<int>& out) {
  collect_vars(a.lhs, out);
  collect_vars(a.rhs, out);
}

}  // namespace flint::symex
