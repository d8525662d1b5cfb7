#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quasilin/errors.hpp"
#include "quasilin/qform.hpp"
#include "quasilin/semilinear.hpp"
#include "quasilin/tower.hpp"

namespace quasilin::script {

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Expr {
  enum class Kind { name, constant, add, mul, div, pow };
  Kind kind = Kind::constant;
  std::string name;
  /// Constant value (0 or 1) or exponent of a power.
  long value = 0;
  std::vector<Expr> args;
  Position pos;
};

struct Statement {
  enum class Kind { field, adjoin_var, adjoin_sqrt, form, command };
  Kind kind = Kind::command;
  Position pos;
  /// Declared name, or the command keyword.
  std::string name;
  /// Field variables, or form operands of a command.
  std::vector<std::string> names;
  std::vector<Expr> exprs;
  /// Integer arguments: positional for example46, key=value for fuzz.
  std::vector<std::pair<std::string, long>> options;
};

struct SessionScript {
  std::vector<Statement> statements;
};

inline const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k{
      "field", "adjoin", "form", "var", "sqrt", "GF2", "invariants", "tower", "check", "example46", "fuzz"};
  return k;
}

inline const std::vector<std::string>& fuzz_keys() {
  static const std::vector<std::string> k{"instances", "seed",      "base_variables", "min_dim_p",
                                          "max_dim_p", "min_dim_q", "max_dim_q",      "max_terms",
                                          "max_degree", "threads"};
  return k;
}

namespace detail {

struct Token {
  enum class Kind { ident, number, symbol, end };
  Kind kind = Kind::end;
  std::string text;
  Position pos;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  Position p;
  std::size_t i = 0;
  const auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
  };
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      advance(1);
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Kind::ident, std::string(s.substr(i, j - i)), p});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j - i > 9) throw ParseError("number too large", p.line, p.column);
      out.push_back({Token::Kind::number, std::string(s.substr(i, j - i)), p});
      advance(j - i);
    } else if (std::string_view("()<>,=+*/^-").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Token::Kind::symbol, std::string(1, static_cast<char>(c)), p});
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", p.line, p.column);
    }
  }
  out.push_back({Token::Kind::end, "", p});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  SessionScript run() {
    SessionScript out;
    while (peek().kind != Token::Kind::end) out.statements.push_back(statement());
    if (!field_seen_) throw ParseError("script declares no field", 1, 1);
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  bool field_seen_ = false;
  std::set<std::string> scalars_;
  std::set<std::string> forms_;

  const Token& peek() const { return toks_[at_]; }
  const Token& take() { return toks_[at_ < toks_.size() - 1 ? at_++ : at_]; }

  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    throw ParseError(what, t.pos.line, t.pos.column);
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
  }

  bool at_symbol(const char* s) const {
    return peek().kind == Token::Kind::symbol && peek().text == s;
  }

  void expect_symbol(const char* s) {
    if (!at_symbol(s)) fail(peek(), std::string("expected '") + s + "', found " + describe(peek()));
    take();
  }

  void expect_word(const char* w) {
    if (peek().kind != Token::Kind::ident || peek().text != w) {
      fail(peek(), std::string("expected '") + w + "', found " + describe(peek()));
    }
    take();
  }

  const Token& identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::ident) fail(t, std::string("expected ") + what + ", found " + describe(t));
    if (keywords().count(t.text)) fail(t, "'" + t.text + "' is a keyword");
    return take();
  }

  void declare(const Token& t) {
    if (scalars_.count(t.text) || forms_.count(t.text)) fail(t, "'" + t.text + "' is already declared");
  }

  long integer() {
    bool negative = false;
    if (at_symbol("-")) {
      take();
      negative = true;
    }
    if (peek().kind != Token::Kind::number) fail(peek(), "expected an integer, found " + describe(peek()));
    const long v = std::stol(take().text);
    return negative ? -v : v;
  }

  Statement statement() {
    const Token& kw = peek();
    if (kw.kind != Token::Kind::ident) fail(kw, "expected a statement, found " + describe(kw));
    Statement st;
    st.pos = kw.pos;
    const std::string word = take().text;
    if (word != "field" && !field_seen_) fail(kw, "the first statement must be 'field'");
    if (word == "field") {
      if (field_seen_) fail(kw, "field declared twice");
      field_seen_ = true;
      st.kind = Statement::Kind::field;
      expect_word("GF2");
      expect_symbol("(");
      do {
        const Token& n = identifier("a variable name");
        declare(n);
        scalars_.insert(n.text);
        st.names.push_back(n.text);
        if (!at_symbol(",")) break;
        take();
      } while (true);
      expect_symbol(")");
    } else if (word == "adjoin") {
      if (peek().kind == Token::Kind::ident && peek().text == "var") {
        take();
        st.kind = Statement::Kind::adjoin_var;
        const Token& n = identifier("a variable name");
        declare(n);
        st.name = n.text;
        scalars_.insert(n.text);
      } else {
        st.kind = Statement::Kind::adjoin_sqrt;
        const Token& n = identifier("a root name");
        declare(n);
        st.name = n.text;
        expect_symbol("=");
        expect_word("sqrt");
        expect_symbol("(");
        st.exprs.push_back(sum());
        expect_symbol(")");
        scalars_.insert(st.name);
      }
    } else if (word == "form") {
      st.kind = Statement::Kind::form;
      const Token& n = identifier("a form name");
      declare(n);
      st.name = n.text;
      expect_symbol("=");
      expect_symbol("<");
      if (at_symbol(">")) fail(peek(), "a form needs at least one coefficient");
      do {
        st.exprs.push_back(sum());
        if (!at_symbol(",")) break;
        take();
      } while (true);
      expect_symbol(">");
      forms_.insert(st.name);
    } else if (word == "invariants" || word == "tower" || word == "check" || word == "example46") {
      st.kind = Statement::Kind::command;
      st.name = word;
      const std::size_t forms = word == "check" ? 2 : 1;
      for (std::size_t k = 0; k < forms; ++k) {
        if (peek().kind != Token::Kind::ident) {
          fail(peek(), "'" + word + "' takes " + std::to_string(forms) + " form name(s), found " +
                           describe(peek()));
        }
        const Token& n = take();
        if (!forms_.count(n.text)) fail(n, "form '" + n.text + "' is not declared");
        st.names.push_back(n.text);
      }
      if (word == "example46") {
        for (const char* key : {"a", "k", "l"}) {
          if (peek().kind != Token::Kind::number && !at_symbol("-")) {
            fail(peek(), "'example46' takes a form and three integers a k l, found " + describe(peek()));
          }
          st.options.emplace_back(key, integer());
        }
      }
    } else if (word == "fuzz") {
      st.kind = Statement::Kind::command;
      st.name = word;
      while (peek().kind == Token::Kind::ident && !keywords().count(peek().text)) {
        const Token& key = take();
        const auto& known = fuzz_keys();
        if (std::find(known.begin(), known.end(), key.text) == known.end()) {
          fail(key, "unknown fuzz option '" + key.text + "'");
        }
        expect_symbol("=");
        const long v = integer();
        if (v < 0) fail(key, "fuzz option '" + key.text + "' must be non-negative");
        st.options.emplace_back(key.text, v);
      }
    } else {
      fail(kw, "unknown statement '" + word + "'");
    }
    return st;
  }

  Expr sum() {
    Expr e = product();
    while (at_symbol("+")) {
      const Position p = take().pos;
      e = Expr{Expr::Kind::add, "", 0, {std::move(e), product()}, p};
    }
    return e;
  }

  Expr product() {
    Expr e = power();
    while (at_symbol("*") || at_symbol("/")) {
      const Token& op = take();
      const auto kind = op.text == "*" ? Expr::Kind::mul : Expr::Kind::div;
      e = Expr{kind, "", 0, {std::move(e), power()}, op.pos};
    }
    return e;
  }

  Expr power() {
    Expr base = atom();
    if (!at_symbol("^")) return base;
    const Position p = take().pos;
    const long exp = integer();
    return Expr{Expr::Kind::pow, "", exp, {std::move(base)}, p};
  }

  Expr atom() {
    const Token& t = peek();
    if (at_symbol("(")) {
      take();
      Expr e = sum();
      expect_symbol(")");
      return e;
    }
    if (t.kind == Token::Kind::number) {
      if (t.text != "0" && t.text != "1") fail(t, "only the constants 0 and 1 are allowed");
      take();
      return Expr{Expr::Kind::constant, "", t.text == "1" ? 1 : 0, {}, t.pos};
    }
    if (t.kind == Token::Kind::ident) {
      if (!scalars_.count(t.text)) fail(t, "'" + t.text + "' is not a declared variable or root");
      take();
      return Expr{Expr::Kind::name, t.text, 0, {}, t.pos};
    }
    fail(t, "expected an expression, found " + describe(t));
  }
};

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::pow: return 3;
    default: return 4;
  }
}

}  // namespace detail

inline SessionScript parse(std::string_view text) { return detail::Parser(text).run(); }

inline std::string to_string(const Expr& e) {
  const auto wrap = [](const Expr& child, bool parens) {
    return parens ? "(" + to_string(child) + ")" : to_string(child);
  };
  const int p = detail::precedence(e);
  switch (e.kind) {
    case Expr::Kind::name: return e.name;
    case Expr::Kind::constant: return std::to_string(e.value);
    case Expr::Kind::add:
      return wrap(e.args[0], detail::precedence(e.args[0]) < p) + " + " +
             wrap(e.args[1], detail::precedence(e.args[1]) <= p);
    case Expr::Kind::mul:
    case Expr::Kind::div:
      return wrap(e.args[0], detail::precedence(e.args[0]) < p) + (e.kind == Expr::Kind::mul ? "*" : "/") +
             wrap(e.args[1], detail::precedence(e.args[1]) <= p);
    case Expr::Kind::pow:
      return wrap(e.args[0], detail::precedence(e.args[0]) <= p) + "^" + std::to_string(e.value);
  }
  return "";
}

/// Canonical text: one statement per line, single spaces, minimal parentheses.
inline std::string to_string(const SessionScript& s) {
  std::string out;
  for (const auto& st : s.statements) {
    switch (st.kind) {
      case Statement::Kind::field: {
        out += "field GF2(";
        for (std::size_t i = 0; i < st.names.size(); ++i) out += (i ? ", " : "") + st.names[i];
        out += ")";
        break;
      }
      case Statement::Kind::adjoin_var: out += "adjoin var " + st.name; break;
      case Statement::Kind::adjoin_sqrt: out += "adjoin " + st.name + " = sqrt(" + to_string(st.exprs[0]) + ")"; break;
      case Statement::Kind::form: {
        out += "form " + st.name + " = <";
        for (std::size_t i = 0; i < st.exprs.size(); ++i) out += (i ? ", " : "") + to_string(st.exprs[i]);
        out += ">";
        break;
      }
      case Statement::Kind::command: {
        out += st.name;
        for (const auto& n : st.names) out += " " + n;
        for (const auto& [key, v] : st.options) {
          out += " " + (st.name == "fuzz" ? key + "=" : std::string()) + std::to_string(v);
        }
        break;
      }
    }
    out += "\n";
  }
  return out;
}

/// Evaluates declarations in order; commands are left to the caller.
class Session {
 public:
  const FieldTower& tower() const { return *tower_; }

  /// Form bound to `name`, embedded in the current tower.
  QForm form(const std::string& name) const { return forms_.at(name).extended_to(*tower_); }

  const std::map<std::string, QForm>& forms() const { return forms_; }

  /// Applies a declaration statement; commands are ignored.
  void apply(const Statement& st) {
    try {
      switch (st.kind) {
        case Statement::Kind::field: tower_ = FieldTower::rational(st.names); break;
        case Statement::Kind::adjoin_var: tower_ = tower_->adjoin_transcendentals({st.name}); break;
        case Statement::Kind::adjoin_sqrt: tower_ = adjoin_sqrt(*tower_, st.name, eval(st.exprs[0])); break;
        case Statement::Kind::form: {
          std::vector<TowerElement> c;
          for (const auto& e : st.exprs) c.push_back(eval(e));
          forms_.insert_or_assign(st.name, QForm(*tower_, std::move(c)));
          break;
        }
        case Statement::Kind::command: break;
      }
    } catch (const SquareRadicand& e) {
      throw ParseError(e.what(), st.pos.line, st.pos.column);
    } catch (const ZeroRadicand& e) {
      throw ParseError(e.what(), st.pos.line, st.pos.column);
    } catch (const NameCollision& e) {
      throw ParseError(e.what(), st.pos.line, st.pos.column);
    }
  }

  TowerElement eval(const Expr& e) const {
    const FieldTower& t = *tower_;
    switch (e.kind) {
      case Expr::Kind::name: {
        if (auto v = t.variable_index(e.name)) return t.variable(*v);
        if (auto r = t.root_index(e.name)) return t.root(*r);
        throw ParseError("'" + e.name + "' is not declared", e.pos.line, e.pos.column);
      }
      case Expr::Kind::constant: return e.value ? t.one() : t.zero();
      case Expr::Kind::add: return eval(e.args[0]) + eval(e.args[1]);
      case Expr::Kind::mul: return eval(e.args[0]) * eval(e.args[1]);
      case Expr::Kind::div: {
        const TowerElement d = eval(e.args[1]);
        if (d.is_zero()) throw ParseError("division by zero", e.pos.line, e.pos.column);
        return eval(e.args[0]) / d;
      }
      case Expr::Kind::pow: {
        const TowerElement b = eval(e.args[0]);
        if (e.value < 0 && b.is_zero()) throw ParseError("zero to a negative power", e.pos.line, e.pos.column);
        return b.pow(e.value);
      }
    }
    return t.zero();
  }

 private:
  std::optional<FieldTower> tower_;
  std::map<std::string, QForm> forms_;
};

/// Parses a field descriptor followed by form literals into a session holding the final tower.
inline Session load(std::string_view text) {
  Session s;
  for (const auto& st : parse(text).statements) s.apply(st);
  return s;
}

}  // namespace quasilin::script
