#include "flint/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "flint/error.hpp"

namespace flint::flc {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

bool is_directive_line(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return false;
}

// ---- tokens ---------------------------------------------------------------

enum class Tok {
  End, Ident, Int,
  // punctuation / operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Assign, Question, Colon, At,
  OrOr, AndAnd, EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Percent, Bang,
};

struct Token {
  Tok t;
  std::string text;
  long long ival = 0;
  int line = 0;
};

class Lexer {
 public:
  Lexer(const std::string& file, const std::vector<std::string>& lines)
      : file_(file) {
    for (size_t i = 0; i < lines.size(); ++i) lex_line(lines[i], static_cast<int>(i) + 1);
    if (in_block_comment_) fail_input(file_ + ": unterminated /* comment");
    toks_.push_back({Tok::End, "", 0, static_cast<int>(lines.size())});
  }
  std::vector<Token> take() { return std::move(toks_); }

 private:
  void lex_line(const std::string& s, int line) {
    size_t i = 0;
    while (i < s.size()) {
      if (in_block_comment_) {
        size_t e = s.find("*/", i);
        if (e == std::string::npos) return;
        in_block_comment_ = false;
        i = e + 2;
        continue;
      }
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
      if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') return;
      if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
        in_block_comment_ = true;
        i += 2;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t b = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
        toks_.push_back({Tok::Ident, s.substr(b, i - b), 0, line});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t b = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        Token t{Tok::Int, s.substr(b, i - b), 0, line};
        try {
          t.ival = std::stoll(t.text);
        } catch (...) {
          fail_input(file_ + ":" + std::to_string(line) + ": integer literal out of range");
        }
        toks_.push_back(t);
        continue;
      }
      auto two = [&](char a, char b2) { return c == a && i + 1 < s.size() && s[i + 1] == b2; };
      if (two('|', '|')) { push(Tok::OrOr, "||", line); i += 2; continue; }
      if (two('&', '&')) { push(Tok::AndAnd, "&&", line); i += 2; continue; }
      if (two('=', '=')) { push(Tok::EqEq, "==", line); i += 2; continue; }
      if (two('!', '=')) { push(Tok::NotEq, "!=", line); i += 2; continue; }
      if (two('<', '=')) { push(Tok::Le, "<=", line); i += 2; continue; }
      if (two('>', '=')) { push(Tok::Ge, ">=", line); i += 2; continue; }
      switch (c) {
        case '(': push(Tok::LParen, "(", line); break;
        case ')': push(Tok::RParen, ")", line); break;
        case '{': push(Tok::LBrace, "{", line); break;
        case '}': push(Tok::RBrace, "}", line); break;
        case '[': push(Tok::LBracket, "[", line); break;
        case ']': push(Tok::RBracket, "]", line); break;
        case ',': push(Tok::Comma, ",", line); break;
        case ';': push(Tok::Semi, ";", line); break;
        case '=': push(Tok::Assign, "=", line); break;
        case '?': push(Tok::Question, "?", line); break;
        case ':': push(Tok::Colon, ":", line); break;
        case '@': push(Tok::At, "@", line); break;
        case '<': push(Tok::Lt, "<", line); break;
        case '>': push(Tok::Gt, ">", line); break;
        case '+': push(Tok::Plus, "+", line); break;
        case '-': push(Tok::Minus, "-", line); break;
        case '*': push(Tok::Star, "*", line); break;
        case '/': push(Tok::Slash, "/", line); break;
        case '%': push(Tok::Percent, "%", line); break;
        case '!': push(Tok::Bang, "!", line); break;
        default:
          fail_input(file_ + ":" + std::to_string(line) + ": unexpected character '" +
                     std::string(1, c) + "'");
      }
      ++i;
    }
  }
  void push(Tok t, const char* txt, int line) { toks_.push_back({t, txt, 0, line}); }

  std::string file_;
  std::vector<Token> toks_;
  bool in_block_comment_ = false;
};

// ---- parser ----------------------------------------------------------------

class Parser {
 public:
  Parser(std::string path, std::vector<Token> toks, SourceUnit unit)
      : path_(std::move(path)), toks_(std::move(toks)), unit_(std::move(unit)) {}

  SourceUnit run() {
    while (!at(Tok::End)) parse_top_level();
    validate();
    return std::move(unit_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok t) const { return cur().t == t; }
  bool at_ident(const char* s) const { return cur().t == Tok::Ident && cur().text == s; }
  Token eat() { return toks_[pos_++]; }
  Token expect(Tok t, const char* what) {
    if (!at(t)) err(std::string("expected ") + what + ", got '" + cur().text + "'");
    return eat();
  }
  [[noreturn]] void err(const std::string& msg) const {
    fail_input(path_ + ":" + std::to_string(cur().line) + ": " + msg);
  }
  SrcLoc loc_here() const { return {path_, cur().line}; }

  static bool is_type_name(const std::string& s) {
    return s == "int8" || s == "int16" || s == "int32" || s == "void";
  }
  static int width_of(const std::string& s) { return s == "int8" ? 8 : s == "int16" ? 16 : 32; }

  bool is_reserved(const std::string& s) const {
    static const std::set<std::string> kw = {
        "features", "int8",  "int16",  "int32", "void",   "if",
        "else",     "while", "return", "fail",  "assume", "assert",
        "make_symbolic"};
    return kw.count(s) > 0;
  }

  std::string expect_name() {
    Token t = expect(Tok::Ident, "identifier");
    if (is_reserved(t.text)) fail_input(path_ + ":" + std::to_string(t.line) +
                                        ": reserved word '" + t.text + "' used as a name");
    return t.text;
  }

  void parse_top_level() {
    if (at_ident("features")) {
      eat();
      do {
        unit_.declared_features.push_back(expect_name());
      } while (at(Tok::Comma) && (eat(), true));
      expect(Tok::Semi, "';'");
      return;
    }
    if (!at(Tok::Ident) || !is_type_name(cur().text)) err("expected declaration or function");
    Token ty = eat();
    SrcLoc nloc = loc_here();
    std::string name = expect_name();
    if (at(Tok::LParen)) {
      parse_function(ty.text, name, nloc);
    } else {
      if (ty.text == "void") err("'void' is only valid as a function return type");
      GlobalDecl g;
      g.name = name;
      g.width = width_of(ty.text);
      g.loc = nloc;
      if (at(Tok::LBracket)) {
        eat();
        Token n = expect(Tok::Int, "array size");
        if (n.ival <= 0) err("array size must be positive");
        g.array_count = n.ival;
        expect(Tok::RBracket, "']'");
      }
      if (at(Tok::Assign)) {
        eat();
        if (g.array_count > 0) err("array globals cannot have initializers");
        bool neg = at(Tok::Minus) && (eat(), true);
        Token v = expect(Tok::Int, "constant initializer");
        g.has_init = true;
        g.init = neg ? -v.ival : v.ival;
      }
      expect(Tok::Semi, "';'");
      unit_.globals.push_back(std::move(g));
    }
  }

  void parse_function(const std::string& ret_ty, const std::string& name, SrcLoc nloc) {
    Function f;
    f.name = name;
    f.is_void = ret_ty == "void";
    f.ret_width = f.is_void ? 0 : width_of(ret_ty);
    f.loc = nloc;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        Token ty = expect(Tok::Ident, "parameter type");
        if (!is_type_name(ty.text) || ty.text == "void") err("bad parameter type");
        Param p;
        p.loc = loc_here();
        p.name = expect_name();
        p.width = width_of(ty.text);
        f.params.push_back(std::move(p));
      } while (at(Tok::Comma) && (eat(), true));
    }
    expect(Tok::RParen, "')'");
    f.body = parse_block();
    f.end_line = toks_[pos_ - 1].line;  // closing brace just consumed
    // Non-void functions get an implicit terminal return so later passes see
    // an explicit return site on every exit.
    if (!f.is_void) {
      bool ends_with_return =
          !f.body.stmts.empty() && f.body.stmts.back()->k == Stmt::K::Return;
      if (!ends_with_return) {
        auto r = std::make_shared<Stmt>();
        r->k = Stmt::K::Return;
        r->loc = {path_, f.end_line};
        auto zero = std::make_shared<Expr>();
        zero->k = Expr::K::Int;
        zero->ival = 0;
        zero->loc = r->loc;
        r->rhs = zero;
        r->synthetic = true;
        f.body.stmts.push_back(r);
      }
    }
    unit_.functions.push_back(std::move(f));
  }

  Block parse_block() {
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) err("unexpected end of input inside block");
      b.stmts.push_back(parse_stmt());
    }
    eat();  // '}'
    return b;
  }

  StmtPtr parse_stmt() {
    auto s = std::make_shared<Stmt>();
    s->loc = loc_here();
    if (at(Tok::Ident) && is_type_name(cur().text)) {
      Token ty = eat();
      if (ty.text == "void") err("'void' is not a variable type");
      s->k = Stmt::K::Decl;
      s->name = expect_name();
      s->width = width_of(ty.text);
      if (at(Tok::LBracket)) {
        eat();
        Token n = expect(Tok::Int, "array size");
        if (n.ival <= 0) err("array size must be positive");
        s->array_count = n.ival;
        expect(Tok::RBracket, "']'");
      }
      if (at(Tok::Assign)) {
        eat();
        if (s->array_count > 0) err("array locals cannot have initializers");
        s->init = parse_rhs();
      }
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_ident("if")) {
      eat();
      s->k = Stmt::K::If;
      expect(Tok::LParen, "'('");
      s->cond = parse_expr();
      expect(Tok::RParen, "')'");
      s->body = parse_block();
      if (at_ident("else")) {
        eat();
        if (at_ident("if")) {
          s->else_body.stmts.push_back(parse_stmt());  // else-if chain
        } else {
          s->else_body = parse_block();
        }
      }
      return s;
    }
    if (at_ident("while")) {
      eat();
      s->k = Stmt::K::While;
      expect(Tok::LParen, "'('");
      s->cond = parse_expr();
      expect(Tok::RParen, "')'");
      s->body = parse_block();
      return s;
    }
    if (at_ident("return")) {
      eat();
      s->k = Stmt::K::Return;
      if (!at(Tok::Semi)) s->rhs = parse_rhs();
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_ident("make_symbolic")) {
      eat();
      s->k = Stmt::K::MakeSymbolic;
      expect(Tok::LParen, "'('");
      s->name = expect_name();
      if (at(Tok::Comma)) {
        eat();
        s->has_domain = true;
        s->lo = parse_const_int();
        expect(Tok::Comma, "','");
        s->hi = parse_const_int();
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_ident("assume") || at_ident("assert")) {
      s->k = cur().text == "assume" ? Stmt::K::Assume : Stmt::K::Assert;
      eat();
      expect(Tok::LParen, "'('");
      s->cond = parse_expr();
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_ident("fail")) {
      eat();
      s->k = Stmt::K::Fail;
      expect(Tok::LParen, "'('");
      expect(Tok::RParen, "')'");
      if (at(Tok::At)) {
        eat();
        Token w = expect(Tok::Ident, "'spec'");
        if (w.text != "spec") err("expected 'spec' after '@'");
        expect(Tok::LParen, "'('");
        if (at(Tok::Ident) || at(Tok::Int))
          s->spec_id = eat().text;
        else
          err("expected spec identifier");
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Semi, "';'");
      return s;
    }
    // assignment or call statement
    if (at(Tok::Ident)) {
      std::string name = expect_name();
      if (at(Tok::LParen)) {
        s->k = Stmt::K::CallStmt;
        s->rhs = parse_call(name, s->loc);
        expect(Tok::Semi, "';'");
        return s;
      }
      s->k = Stmt::K::Assign;
      s->name = name;
      if (at(Tok::LBracket)) {
        eat();
        s->lv_index = parse_expr();
        expect(Tok::RBracket, "']'");
      }
      expect(Tok::Assign, "'='");
      s->rhs = parse_rhs();
      expect(Tok::Semi, "';'");
      return s;
    }
    err("expected statement");
  }

  long long parse_const_int() {
    bool neg = at(Tok::Minus) && (eat(), true);
    Token v = expect(Tok::Int, "integer");
    return neg ? -v.ival : v.ival;
  }

  // Right-hand side of an assignment/initializer/return: either a call or a
  // call-free expression.
  ExprPtr parse_rhs() {
    if (at(Tok::Ident) && !is_reserved(cur().text) && toks_[pos_ + 1].t == Tok::LParen) {
      std::string name = cur().text;
      SrcLoc l = loc_here();
      eat();
      return parse_call(name, l);
    }
    return parse_expr();
  }

  ExprPtr parse_call(const std::string& name, SrcLoc l) {
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Call;
    e->name = name;
    e->loc = l;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      do {
        e->args.push_back(parse_expr());
      } while (at(Tok::Comma) && (eat(), true));
    }
    expect(Tok::RParen, "')'");
    return e;
  }

  // Call-free expression grammar, C precedence.
  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary() {
    ExprPtr c = parse_or();
    if (!at(Tok::Question)) return c;
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Ternary;
    e->loc = c->loc;
    eat();
    e->a = c;
    e->b = parse_ternary();
    expect(Tok::Colon, "':'");
    e->c = parse_ternary();
    return e;
  }

  ExprPtr binop(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Binary;
    e->bin = op;
    e->loc = l->loc;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    while (at(Tok::OrOr)) { eat(); l = binop(BinOp::Or, l, parse_and()); }
    return l;
  }
  ExprPtr parse_and() {
    ExprPtr l = parse_eq();
    while (at(Tok::AndAnd)) { eat(); l = binop(BinOp::And, l, parse_eq()); }
    return l;
  }
  ExprPtr parse_eq() {
    ExprPtr l = parse_rel();
    while (at(Tok::EqEq) || at(Tok::NotEq)) {
      BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
      eat();
      l = binop(op, l, parse_rel());
    }
    return l;
  }
  ExprPtr parse_rel() {
    ExprPtr l = parse_add();
    while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
      BinOp op = at(Tok::Lt) ? BinOp::Lt : at(Tok::Le) ? BinOp::Le : at(Tok::Gt) ? BinOp::Gt : BinOp::Ge;
      eat();
      l = binop(op, l, parse_add());
    }
    return l;
  }
  ExprPtr parse_add() {
    ExprPtr l = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      eat();
      l = binop(op, l, parse_mul());
    }
    return l;
  }
  ExprPtr parse_mul() {
    ExprPtr l = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      BinOp op = at(Tok::Star) ? BinOp::Mul : at(Tok::Slash) ? BinOp::Div : BinOp::Mod;
      eat();
      l = binop(op, l, parse_unary());
    }
    return l;
  }
  ExprPtr parse_unary() {
    if (at(Tok::Bang) || at(Tok::Minus)) {
      auto e = std::make_shared<Expr>();
      e->k = Expr::K::Unary;
      e->un = at(Tok::Bang) ? UnOp::Not : UnOp::Neg;
      e->loc = loc_here();
      eat();
      e->a = parse_unary();
      return e;
    }
    return parse_primary();
  }
  ExprPtr parse_primary() {
    if (at(Tok::Int)) {
      auto e = std::make_shared<Expr>();
      e->k = Expr::K::Int;
      e->loc = loc_here();
      e->ival = eat().ival;
      return e;
    }
    if (at(Tok::LParen)) {
      eat();
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident)) {
      if (is_reserved(cur().text)) err("reserved word '" + cur().text + "' in expression");
      auto e = std::make_shared<Expr>();
      e->loc = loc_here();
      e->name = eat().text;
      if (at(Tok::LParen))
        err("call to '" + e->name + "' not allowed inside a compound expression");
      if (at(Tok::LBracket)) {
        e->k = Expr::K::Index;
        eat();
        e->a = parse_expr();
        expect(Tok::RBracket, "']'");
      } else {
        e->k = Expr::K::Var;
      }
      return e;
    }
    err("expected expression");
  }

  void validate() {
    std::set<std::string> feats;
    for (const auto& f : unit_.declared_features) {
      if (!feats.insert(f).second)
        fail_input(path_ + ": duplicate feature declaration '" + f + "'");
    }
    std::set<std::string> gnames;
    for (const auto& g : unit_.globals) {
      if (!gnames.insert(g.name).second)
        fail_input(path_ + ":" + std::to_string(g.loc.line) + ": duplicate global '" +
                   g.name + "'");
    }
    std::set<std::string> fnames;
    for (const auto& f : unit_.functions) {
      if (!fnames.insert(f.name).second)
        fail_input(path_ + ":" + std::to_string(f.loc.line) + ": duplicate function '" +
                   f.name + "'");
      if (gnames.count(f.name))
        fail_input(path_ + ":" + std::to_string(f.loc.line) + ": '" + f.name +
                   "' is both a global and a function");
    }
    for (const auto& sc : unit_.scopes) {
      std::set<std::string> used;
      sc.local.collect_atoms(used);
      for (const auto& a : used) {
        if (!feats.count(a))
          fail_input(path_ + ":" + std::to_string(sc.if_line) +
                     ": use of undeclared feature '" + a + "' in directive");
      }
    }
  }

  std::string path_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  SourceUnit unit_;
};

// Builds the directive scope structure and blanks directive lines so the
// token stream keeps original line numbers.
void process_directives(const std::string& path, std::vector<std::string>& lines,
                        SourceUnit& unit) {
  unit.n_lines = static_cast<int>(lines.size());
  unit.scope_of_line.assign(lines.size() + 2, -1);
  struct Open {
    int scope;     // current scope id (the #if branch, or the #else branch)
    int if_line;
    FeatureExpr cond;  // the original #if condition
    bool in_else = false;
  };
  std::vector<Open> stack;
  for (size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    if (!is_directive_line(lines[i])) {
      unit.scope_of_line[line_no] = stack.empty() ? -1 : stack.back().scope;
      continue;
    }
    std::string body = lines[i];
    body.erase(0, body.find('#') + 1);
    std::istringstream ss(body);
    std::string word;
    ss >> word;
    std::string rest;
    std::getline(ss, rest);
    auto trim = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    trim(rest);
    if (word == "if") {
      if (rest.empty())
        fail_input(path + ":" + std::to_string(line_no) + ": #if without condition");
      FeatureExpr cond;
      try {
        cond = parse_feature_expr(rest);
      } catch (const Error& e) {
        fail_input(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      int parent = stack.empty() ? -1 : stack.back().scope;
      FeatureExpr parent_eff =
          parent < 0 ? FeatureExpr::top() : unit.scopes[parent].effective;
      DirectiveScope sc;
      sc.parent = parent;
      sc.local = cond;
      sc.effective = parent_eff.is_true() ? cond : FeatureExpr::conj({parent_eff, cond});
      sc.if_line = line_no;
      unit.scope_of_line[line_no] = parent;
      unit.scopes.push_back(sc);
      stack.push_back({static_cast<int>(unit.scopes.size()) - 1, line_no, cond, false});
    } else if (word == "else") {
      if (stack.empty() || stack.back().in_else)
        fail_input(path + ":" + std::to_string(line_no) + ": unbalanced directive (#else)");
      Open& top = stack.back();
      int parent = unit.scopes[top.scope].parent;
      FeatureExpr parent_eff =
          parent < 0 ? FeatureExpr::top() : unit.scopes[parent].effective;
      DirectiveScope sc;
      sc.parent = parent;
      sc.local = FeatureExpr::negate(top.cond);
      sc.effective =
          parent_eff.is_true() ? sc.local : FeatureExpr::conj({parent_eff, sc.local});
      sc.if_line = line_no;
      unit.scope_of_line[line_no] = parent;
      unit.scopes.push_back(sc);
      top.scope = static_cast<int>(unit.scopes.size()) - 1;
      top.in_else = true;
    } else if (word == "endif") {
      if (stack.empty())
        fail_input(path + ":" + std::to_string(line_no) + ": unbalanced directive (#endif)");
      stack.pop_back();
      unit.scope_of_line[line_no] = stack.empty() ? -1 : stack.back().scope;
    } else {
      fail_input(path + ":" + std::to_string(line_no) + ": unknown directive '#" + word + "'");
    }
    lines[i].clear();
  }
  if (!stack.empty())
    fail_input(path + ":" + std::to_string(stack.back().if_line) + ": unterminated #if");
}

}  // namespace

SourceUnit parse_unit_text(const std::string& path, const std::string& text) {
  SourceUnit unit;
  unit.path = path;
  auto lines = split_lines(text);
  process_directives(path, lines, unit);
  Lexer lex(path, lines);
  Parser p(path, lex.take(), std::move(unit));
  return p.run();
}

SourceUnit parse_unit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open source file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_unit_text(path, ss.str());
}

std::vector<ProductDef> parse_products_text(const std::string& path,
                                            const std::string& text) {
  std::vector<ProductDef> out;
  std::set<std::string> names;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string s = lines[i];
    size_t h = s.find_first_not_of(" \t");
    if (h == std::string::npos || s[h] == '#') continue;
    size_t colon = s.find(':');
    if (colon == std::string::npos)
      fail_input(path + ":" + std::to_string(i + 1) + ": expected 'name: features'");
    ProductDef p;
    p.line = static_cast<int>(i) + 1;
    p.name = s.substr(0, colon);
    auto trim = [](std::string& t) {
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    };
    trim(p.name);
    if (p.name.empty())
      fail_input(path + ":" + std::to_string(i + 1) + ": empty product name");
    if (!names.insert(p.name).second)
      fail_input(path + ":" + std::to_string(i + 1) + ": duplicate product '" + p.name + "'");
    std::string rest = s.substr(colon + 1);
    std::stringstream fs(rest);
    std::string feat;
    while (std::getline(fs, feat, ',')) {
      trim(feat);
      if (feat.empty()) continue;
      if (!p.enabled.insert(feat).second)
        fail_input(path + ":" + std::to_string(i + 1) + ": duplicate feature '" + feat +
                   "' in product '" + p.name + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ProductDef> parse_products_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open products file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_products_text(path, ss.str());
}

}  // namespace flint::flc
