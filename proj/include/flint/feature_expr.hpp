#ifndef FLINT_FEATURE_EXPR_HPP
#define FLINT_FEATURE_EXPR_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace flint::flc {

// Boolean expression over feature names, as written in #if directives.
// Immutable; nested And-in-And / Or-in-Or are flattened at construction.
class FeatureExpr {
 public:
  enum class Kind { True, Atom, Not, And, Or };

  FeatureExpr() : FeatureExpr(top()) {}

  static FeatureExpr top();  // condition of unguarded code; prints as "1"
  static FeatureExpr atom(std::string name);
  static FeatureExpr negate(FeatureExpr e);
  static FeatureExpr conj(std::vector<FeatureExpr> xs);  // empty -> top()
  static FeatureExpr disj(std::vector<FeatureExpr> xs);  // empty -> top()

  Kind kind() const { return node_->kind; }
  bool is_true() const { return node_->kind == Kind::True; }
  const std::string& atom_name() const;
  const std::vector<FeatureExpr>& operands() const;

  bool evaluate(const std::set<std::string>& enabled) const;

  // Directive syntax: "A && !B" (spaced) or "A&&!B" (compact, used in
  // mined item texts).
  std::string to_string(bool spaced = true) const;

  // Structural equality after flattening, operand sorting and dedup.
  std::string canonical_key() const;
  bool equals_canonical(const FeatureExpr& o) const {
    return canonical_key() == o.canonical_key();
  }

  void collect_atoms(std::set<std::string>& out) const;

 private:
  struct Node {
    Kind kind;
    std::string name;                 // Atom
    std::vector<FeatureExpr> kids;    // Not (1), And/Or (>=1)
  };
  explicit FeatureExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Parses the directive expression syntax (idents, !, &&, ||, parens, "1").
// Throws Error(Errc::input) with a position message on malformed input.
FeatureExpr parse_feature_expr(const std::string& text);

}  // namespace flint::flc

#endif
