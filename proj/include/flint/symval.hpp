#ifndef FLINT_SYMVAL_HPP
#define FLINT_SYMVAL_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace flint::symex {

// Operator set of symbolic expressions. Division/modulo never appear here:
// the engine concretizes them by forking before building expressions.
enum class SymOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, Select };

// One symbolic variable of a path. (base, instance) is unique per path;
// instance counts creations of the same base in path order.
struct SymVarInfo {
  std::string base;
  int instance = 1;
  int width = 32;
  long long lo = 0, hi = 0;  // inclusive domain
  bool is_meta = false;
};

// Immutable 32-bit symbolic value: concrete constant, variable reference,
// or operator application. Fully concrete applications fold on construction.
class SymValue {
 public:
  enum class K { Con, Var, Op };

  SymValue() : SymValue(concrete(0)) {}
  static SymValue concrete(long long v);
  static SymValue var(int id);
  static SymValue op(SymOp o, std::vector<SymValue> kids);

  K kind() const { return n_->k; }
  bool is_concrete() const { return n_->k == K::Con; }
  long long cval() const { return n_->c; }
  int var_id() const { return n_->var; }
  SymOp op_kind() const { return n_->op; }
  const std::vector<SymValue>& kids() const { return n_->kids; }

  // Stable structural key over var ids; used for pc dedup, not display.
  std::string key() const;

 private:
  struct Node {
    K k = K::Con;
    long long c = 0;
    int var = -1;
    SymOp op{};
    std::vector<SymValue> kids;
  };
  explicit SymValue(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

enum class Rel { Eq, Ne, Lt, Le, Gt, Ge };
Rel negate_rel(Rel r);

struct AtomicConstraint {
  Rel rel{};
  SymValue lhs, rhs;
  std::string key() const;
};

// Conjuncts asserted by taking a branch on `v` with the given truth value.
// And-true / Or-false / Not recurse; relations become (negated) atoms;
// anything else becomes (Ne 0 v) / (Eq 0 v).
std::vector<AtomicConstraint> split_condition(const SymValue& v, bool truth);

// Concrete 32-bit semantics shared by folding, enumeration and the tests.
long long apply_sym_op(SymOp op, const std::vector<long long>& xs);
long long eval_sym(const SymValue& v, const std::function<long long(int)>& env);
bool eval_atom(const AtomicConstraint& a, const std::function<long long(int)>& env);
void collect_vars(const SymValue& v, std::set<int>& out);
void collect_vars(const AtomicConstraint& a, std::set<int>& out);

}  // namespace flint::symex

#endif
