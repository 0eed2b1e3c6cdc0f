#include "flint/feature_expr.hpp"

#include <algorithm>
#include <cctype>

#include "flint/error.hpp"

namespace flint::flc {

FeatureExpr FeatureExpr::top() {
  static const auto node = std::make_shared<const Node>(Node{Kind::True, "", {}});
  return FeatureExpr(node);
}

FeatureExpr FeatureExpr::atom(std::string name) {
  return FeatureExpr(std::make_shared<const Node>(Node{Kind::Atom, std::move(name), {}}));
}

FeatureExpr FeatureExpr::negate(FeatureExpr e) {
  return FeatureExpr(std::make_shared<const Node>(Node{Kind::Not, "", {std::move(e)}}));
}

static FeatureExpr make_nary(FeatureExpr::Kind k, std::vector<FeatureExpr> xs) {
  if (xs.empty()) return FeatureExpr::top();
  std::vector<FeatureExpr> flat;
  for (auto& x : xs) {
    if (x.kind() == k) {
      for (const auto& kid : x.operands()) flat.push_back(kid);
    } else {
      flat.push_back(std::move(x));
    }
  }
  if (flat.size() == 1) return flat[0];
  if (k == FeatureExpr::Kind::And) return FeatureExpr::conj(std::move(flat));
  return FeatureExpr::disj(std::move(flat));
}

FeatureExpr FeatureExpr::conj(std::vector<FeatureExpr> xs) {
  if (xs.empty()) return top();
  bool needs_flatten = false;
  for (const auto& x : xs)
    if (x.kind() == Kind::And) needs_flatten = true;
  if (needs_flatten || xs.size() == 1) return make_nary(Kind::And, std::move(xs));
  return FeatureExpr(std::make_shared<const Node>(Node{Kind::And, "", std::move(xs)}));
}

FeatureExpr FeatureExpr::disj(std::vector<FeatureExpr> xs) {
  if (xs.empty()) return top();
  bool needs_flatten = false;
  for (const auto& x : xs)
    if (x.kind() == Kind::Or) needs_flatten = true;
  if (needs_flatten || xs.size() == 1) return make_nary(Kind::Or, std::move(xs));
  return FeatureExpr(std::make_shared<const Node>(Node{Kind::Or, "", std::move(xs)}));
}

const std::string& FeatureExpr::atom_name() const {
  if (node_->kind != Kind::Atom) fail_internal("FeatureExpr: atom_name on non-atom");
  return node_->name;
}

const std::vector<FeatureExpr>& FeatureExpr::operands() const { return node_->kids; }

bool FeatureExpr::evaluate(const std::set<std::string>& enabled) const {
  switch (node_->kind) {
    case Kind::True: return true;
    case Kind::Atom: return enabled.count(node_->name) > 0;
    case Kind::Not: return !node_->kids[0].evaluate(enabled);
    case Kind::And:
      for (const auto& k : node_->kids)
        if (!k.evaluate(enabled)) return false;
      return true;
    case Kind::Or:
      for (const auto& k : node_->kids)
        if (k.evaluate(enabled)) return true;
      return false;
  }
  fail_internal("FeatureExpr: bad kind");
}

// Precedence: Or < And < Not < atom. Parenthesize a child only when its
// binding is weaker than the context requires.
static void print(const FeatureExpr& e, std::string& out, bool spaced, int min_prec) {
  const int prec = e.kind() == FeatureExpr::Kind::Or    ? 1
                   : e.kind() == FeatureExpr::Kind::And ? 2
                   : e.kind() == FeatureExpr::Kind::Not ? 3
                                                        : 4;
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  const char* sep_and = spaced ? " && " : "&&";
  const char* sep_or = spaced ? " || " : "||";
  switch (e.kind()) {
    case FeatureExpr::Kind::True: out += '1'; break;
    case FeatureExpr::Kind::Atom: out += e.atom_name(); break;
    case FeatureExpr::Kind::Not:
      out += '!';
      print(e.operands()[0], out, spaced, 4);
      break;
    case FeatureExpr::Kind::And:
      for (size_t i = 0; i < e.operands().size(); ++i) {
        if (i) out += sep_and;
        print(e.operands()[i], out, spaced, 2);
      }
      break;
    case FeatureExpr::Kind::Or:
      for (size_t i = 0; i < e.operands().size(); ++i) {
        if (i) out += sep_or;
        print(e.operands()[i], out, spaced, 1);
      }
      break;
  }
  if (paren) out += ')';
}

std::string FeatureExpr::to_string(bool spaced) const {
  std::string out;
  print(*this, out, spaced, 0);
  return out;
}

std::string FeatureExpr::canonical_key() const {
  switch (node_->kind) {
    case Kind::True: return "1";
    case Kind::Atom: return node_->name;
    case Kind::Not: return "(! " + node_->kids[0].canonical_key() + ")";
    case Kind::And:
    case Kind::Or: {
      std::vector<std::string> keys;
      keys.reserve(node_->kids.size());
      for (const auto& k : node_->kids) keys.push_back(k.canonical_key());
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      if (keys.size() == 1) return keys[0];
      std::string out = node_->kind == Kind::And ? "(&&" : "(||";
      for (const auto& k : keys) {
        out += ' ';
        out += k;
      }
      out += ')';
      return out;
    }
  }
  fail_internal("FeatureExpr: bad kind");
}

void FeatureExpr::collect_atoms(std::set<std::string>& out) const {
  switch (node_->kind) {
    case Kind::True: return;
    case Kind::Atom: out.insert(node_->name); return;
    default:
      for (const auto& k : node_->kids) k.collect_atoms(out);
  }
}

// ---- parser ----------------------------------------------------------------

namespace {

struct ExprParser {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(const char* tok) {
    skip_ws();
    size_t n = std::char_traits<char>::length(tok);
    if (s.compare(pos, n, tok) == 0) {
      pos += n;
      return true;
    }
    return false;
  }
  [[noreturn]] void err(const std::string& what) {
    fail_input("feature expression: " + what + " at offset " + std::to_string(pos) +
               " in \"" + s + "\"");
  }

  FeatureExpr parse_or() {
    std::vector<FeatureExpr> xs{parse_and()};
    while (eat("||")) xs.push_back(parse_and());
    return FeatureExpr::disj(std::move(xs));
  }
  FeatureExpr parse_and() {
    std::vector<FeatureExpr> xs{parse_unary()};
    while (true) {
      skip_ws();
      // Careful not to consume the first '&' of nothing or mistake "&&".
      if (s.compare(pos, 2, "&&") == 0) {
        pos += 2;
        xs.push_back(parse_unary());
      } else {
        break;
      }
    }
    return FeatureExpr::conj(std::move(xs));
  }
  FeatureExpr parse_unary() {
    skip_ws();
    if (pos < s.size() && s[pos] == '!') {
      ++pos;
      return FeatureExpr::negate(parse_unary());
    }
    return parse_primary();
  }
  FeatureExpr parse_primary() {
    skip_ws();
    if (pos >= s.size()) err("unexpected end");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      FeatureExpr e = parse_or();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') err("missing ')'");
      ++pos;
      return e;
    }
    if (c == '1') {
      ++pos;
      return FeatureExpr::top();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      return FeatureExpr::atom(s.substr(start, pos - start));
    }
    err(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

FeatureExpr parse_feature_expr(const std::string& text) {
  ExprParser p{text};
  FeatureExpr e = p.parse_or();
  p.skip_ws();
  if (p.pos != text.size()) p.err("trailing input");
  return e;
}

}  // namespace flint::flc
