#include "flint/feasibility.hpp"

#include <algorithm>
#include <map>

#include "flint/error.hpp"
#include "flint/ir.hpp"

namespace flint::symex {

namespace {

using flc::width_max;
using flc::width_min;

struct Iv {
  long long lo, hi;
};

constexpr long long kI32Min = -2147483648ll;
constexpr long long kI32Max = 2147483647ll;

Iv widen32(Iv v) {
  if (v.lo < kI32Min || v.hi > kI32Max) return {kI32Min, kI32Max};
  return v;
}

Iv iv_bool(int definite) {  // -1 unknown, 0 false, 1 true
  if (definite == 0) return {0, 0};
  if (definite == 1) return {1, 1};
  return {0, 1};
}

bool excludes_zero(Iv v) { return v.lo > 0 || v.hi < 0; }
bool is_zero(Iv v) { return v.lo == 0 && v.hi == 0; }

Iv eval_iv(const SymValue& v, const std::vector<SymVarInfo>& vars) {
  switch (v.kind()) {
    case SymValue::K::Con: return {v.cval(), v.cval()};
    case SymValue::K::Var: {
      const auto& info = vars.at(static_cast<size_t>(v.var_id()));
      return {info.lo, info.hi};
    }
    case SymValue::K::Op: break;
  }
  const auto& ks = v.kids();
  switch (v.op_kind()) {
    case SymOp::Add: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      return widen32({a.lo + b.lo, a.hi + b.hi});
    }
    case SymOp::Sub: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      return widen32({a.lo - b.hi, a.hi - b.lo});
    }
    case SymOp::Mul: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      long long p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
      return widen32({std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})});
    }
    case SymOp::Eq: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.hi < b.lo || b.hi < a.lo) return iv_bool(0);
      if (a.lo == a.hi && b.lo == b.hi && a.lo == b.lo) return iv_bool(1);
      return iv_bool(-1);
    }
    case SymOp::Ne: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.hi < b.lo || b.hi < a.lo) return iv_bool(1);
      if (a.lo == a.hi && b.lo == b.hi && a.lo == b.lo) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Lt: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.hi < b.lo) return iv_bool(1);
      if (a.lo >= b.hi) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Le: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.hi <= b.lo) return iv_bool(1);
      if (a.lo > b.hi) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Gt: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.lo > b.hi) return iv_bool(1);
      if (a.hi <= b.lo) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Ge: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (a.lo >= b.hi) return iv_bool(1);
      if (a.hi < b.lo) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::And: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (is_zero(a) || is_zero(b)) return iv_bool(0);
      if (excludes_zero(a) && excludes_zero(b)) return iv_bool(1);
      return iv_bool(-1);
    }
    case SymOp::Or: {
      Iv a = eval_iv(ks[0], vars), b = eval_iv(ks[1], vars);
      if (excludes_zero(a) || excludes_zero(b)) return iv_bool(1);
      if (is_zero(a) && is_zero(b)) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Not: {
      Iv a = eval_iv(ks[0], vars);
      if (is_zero(a)) return iv_bool(1);
      if (excludes_zero(a)) return iv_bool(0);
      return iv_bool(-1);
    }
    case SymOp::Select: {
      Iv c = eval_iv(ks[0], vars);
      Iv x = eval_iv(ks[1], vars), y = eval_iv(ks[2], vars);
      if (excludes_zero(c)) return x;
      if (is_zero(c)) return y;
      return {std::min(x.lo, y.lo), std::max(x.hi, y.hi)};
    }
  }
  fail_internal("bad operator in interval evaluation");
}

// -1 impossible, 1 certain, 0 undecided
int atom_by_intervals(const AtomicConstraint& a, const std::vector<SymVarInfo>& vars) {
  Iv l = eval_iv(a.lhs, vars), r = eval_iv(a.rhs, vars);
  switch (a.rel) {
    case Rel::Eq:
      if (l.hi < r.lo || r.hi < l.lo) return -1;
      if (l.lo == l.hi && r.lo == r.hi && l.lo == r.lo) return 1;
      return 0;
    case Rel::Ne:
      if (l.hi < r.lo || r.hi < l.lo) return 1;
      if (l.lo == l.hi && r.lo == r.hi && l.lo == r.lo) return -1;
      return 0;
    case Rel::Lt:
      if (l.hi < r.lo) return 1;
      if (l.lo >= r.hi) return -1;
      return 0;
    case Rel::Le:
      if (l.hi <= r.lo) return 1;
      if (l.lo > r.hi) return -1;
      return 0;
    case Rel::Gt:
      if (l.lo > r.hi) return 1;
      if (l.hi <= r.lo) return -1;
      return 0;
    case Rel::Ge:
      if (l.lo >= r.hi) return 1;
      if (l.hi < r.lo) return -1;
      return 0;
  }
  fail_internal("bad relation");
}

// Drops full-range 32-bit variables whose only occurrence in the pc is one
// side of a single equality atom; any value of the other side is then
// representable, so the atom is vacuously satisfiable.
void eliminate_defined_vars(std::vector<AtomicConstraint>& atoms,
                            const std::vector<SymVarInfo>& vars) {
  bool changed = true;
  while (changed) {
    changed = false;
    // Occurrences counted per atom side, so a var mentioned on both sides
    // of its own defining equality is never eliminated.
    std::map<int, int> occurrences;
    for (const auto& a : atoms) {
      std::set<int> l, r;
      collect_vars(a.lhs, l);
      collect_vars(a.rhs, r);
      for (int v : l) occurrences[v]++;
      for (int v : r) occurrences[v]++;
    }
    for (size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      if (a.rel != Rel::Eq) continue;
      int v = -1;
      const SymValue* other = nullptr;
      if (a.lhs.kind() == SymValue::K::Var) {
        v = a.lhs.var_id();
        other = &a.rhs;
      } else if (a.rhs.kind() == SymValue::K::Var) {
        v = a.rhs.var_id();
        other = &a.lhs;
      } else {
        continue;
      }
      if (occurrences[v] != 1) continue;
      std::set<int> ov;
      collect_vars(*other, ov);
      if (ov.count(v)) continue;
      const auto& info = vars.at(static_cast<size_t>(v));
      if (info.width != 32 || info.lo != width_min(32) || info.hi != width_max(32))
        continue;
      atoms.erase(atoms.begin() + static_cast<long>(i));
      changed = true;
      break;
    }
  }
}

}  // namespace

std::pair<long long, long long> value_interval(const SymValue& v,
                                               const std::vector<SymVarInfo>& vars) {
  Iv iv = eval_iv(v, vars);
  return {iv.lo, iv.hi};
}

Feas check_feasibility(const std::vector<AtomicConstraint>& pc,
                       const std::vector<SymVarInfo>& vars, long long budget) {
  std::vector<AtomicConstraint> atoms;
  for (const auto& a : pc) {
    std::set<int> vs;
    collect_vars(a, vs);
    if (vs.empty()) {
      if (!eval_atom(a, [](int) -> long long { fail_internal("unreachable"); }))
        return Feas::Unsat;
      continue;  // concretely true; irrelevant
    }
    atoms.push_back(a);
  }
  eliminate_defined_vars(atoms, vars);
  if (atoms.empty()) return Feas::Sat;

  // Connected components over shared variables.
  std::map<int, int> comp_of_var;
  std::vector<int> comp_of_atom(atoms.size(), -1);
  int n_comps = 0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (comp_of_atom[i] >= 0) continue;
    int c = n_comps++;
    std::vector<size_t> frontier{i};
    comp_of_atom[i] = c;
    while (!frontier.empty()) {
      size_t j = frontier.back();
      frontier.pop_back();
      std::set<int> vs;
      collect_vars(atoms[j], vs);
      for (int v : vs) {
        auto [it, fresh] = comp_of_var.emplace(v, c);
        (void)it;
        if (!fresh) continue;
        for (size_t k = 0; k < atoms.size(); ++k) {
          if (comp_of_atom[k] >= 0) continue;
          std::set<int> ks;
          collect_vars(atoms[k], ks);
          if (ks.count(v)) {
            comp_of_atom[k] = c;
            frontier.push_back(k);
          }
        }
      }
    }
  }

  bool any_unknown = false;
  for (int c = 0; c < n_comps; ++c) {
    std::vector<const AtomicConstraint*> comp;
    std::set<int> var_set;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (comp_of_atom[i] != c) continue;
      comp.push_back(&atoms[i]);
      collect_vars(atoms[i], var_set);
    }
    std::vector<int> ids(var_set.begin(), var_set.end());
    long long product = 1;
    bool within = true;
    for (int v : ids) {
      const auto& info = vars.at(static_cast<size_t>(v));
      long long size = info.hi - info.lo + 1;
      if (product > budget / size) {
        within = false;
        break;
      }
      product *= size;
    }
    if (within && product <= budget) {
      // Exhaustive enumeration of this component's domain cube.
      std::vector<long long> cur(ids.size());
      for (size_t i = 0; i < ids.size(); ++i)
        cur[i] = vars[static_cast<size_t>(ids[i])].lo;
      std::map<int, size_t> slot;
      for (size_t i = 0; i < ids.size(); ++i) slot[ids[i]] = i;
      auto env = [&](int v) { return cur[slot.at(v)]; };
      bool sat = false;
      for (long long n = 0; n < product && !sat; ++n) {
        bool ok = true;
        for (const auto* a : comp)
          if (!eval_atom(*a, env)) {
            ok = false;
            break;
          }
        sat = ok;
        // odometer step
        for (size_t i = 0; i < ids.size(); ++i) {
          if (++cur[i] <= vars[static_cast<size_t>(ids[i])].hi) break;
          cur[i] = vars[static_cast<size_t>(ids[i])].lo;
        }
      }
      if (!sat) return Feas::Unsat;
    } else {
      bool undecided = false;
      for (const auto* a : comp) {
        int verdict = atom_by_intervals(*a, vars);
        if (verdict < 0) return Feas::Unsat;
        if (verdict == 0) undecided = true;
      }
      if (undecided) any_unknown = true;
    }
  }
  return any_unknown ? Feas::Unknown : Feas::Sat;
}

}  // namespace flint::symex
