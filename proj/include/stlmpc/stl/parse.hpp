#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>

#include "stlmpc/stl/formula.hpp"

namespace stlmpc {

/// Syntax error with the character position it occurred at.
class ParseError : public Error {
public:
  size_t pos;
  ParseError(const std::string& msg, size_t at)
      : Error(msg + " (at position " + std::to_string(at) + ")"), pos(at) {}
};

namespace detail {

// Grammar (precedence ! > & > |, temporal operators bind tighter than both):
//   formula := and_expr ("|" and_expr)*
//   and_expr := unary ("&" unary)*
//   unary   := "!" unary | primary
//   primary := "G[" int "," int "]" "(" formula ")"
//            | "F[" int "," int "]" "(" formula ")"
//            | "(" formula ")" [ "U[" int "," int "]" "(" formula ")" ]
//            | "true" | "false" | atom
//   atom    := linexpr (">="|"<="|">"|"<") linexpr
//   linexpr := ["+"|"-"] term (("+"|"-") term)*
//   term    := number ["*" ident] | ident
// A bare identifier is accepted as shorthand for "ident >= 0".
class FormulaParser {
public:
  FormulaParser(std::string_view text, const SignalTable& table) : text_(text), table_(table) {}

  FormulaPtr parse() {
    auto f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

private:
  std::string_view text_;
  const SignalTable& table_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool ident_ahead() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string read_ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  double read_number() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    if (pos_ == start) fail("expected number");
    return std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
  }

  int read_interval_bound() {
    skip_ws();
    size_t at = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-')
      throw ParseError("interval bounds must be nonnegative integers", at);
    double v = read_number();
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ParseError("interval bounds must be integers", at);
    return i;
  }

  std::pair<int, int> read_interval() {
    expect('[');
    int a = read_interval_bound();
    expect(',');
    size_t at = pos_;
    int b = read_interval_bound();
    if (b < a) throw ParseError("inverted interval", at);
    expect(']');
    return {a, b};
  }

  FormulaPtr parse_or() {
    std::vector<FormulaPtr> cs{parse_and()};
    while (accept('|')) cs.push_back(parse_and());
    return cs.size() == 1 ? cs[0] : f_or(std::move(cs));
  }

  FormulaPtr parse_and() {
    std::vector<FormulaPtr> cs{parse_unary()};
    while (accept('&')) cs.push_back(parse_unary());
    return cs.size() == 1 ? cs[0] : f_and(std::move(cs));
  }

  FormulaPtr parse_unary() {
    if (accept('!')) return f_not(parse_unary());
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    skip_ws();
    if (accept('(')) {
      auto inner = parse_or();
      expect(')');
      // A parenthesized formula may be the left operand of an Until.
      skip_ws();
      if (pos_ + 1 < text_.size() && text_[pos_] == 'U' && text_[pos_ + 1] == '[') {
        ++pos_;
        auto [a, b] = read_interval();
        expect('(');
        auto rhs = parse_or();
        expect(')');
        return f_until(std::move(inner), std::move(rhs), a, b);
      }
      return inner;
    }
    if (ident_ahead()) {
      size_t mark = pos_;
      std::string id = read_ident();
      if ((id == "G" || id == "F") && peek() == '[') {
        auto [a, b] = read_interval();
        expect('(');
        auto child = parse_or();
        expect(')');
        return id == "G" ? f_always(std::move(child), a, b) : f_eventually(std::move(child), a, b);
      }
      if (id == "true") return f_true();
      if (id == "false") return f_false();
      pos_ = mark;  // identifier starts an atom
    }
    return parse_atom();
  }

  // Affine expression accumulated into (coeffs, offset).
  void parse_linexpr(std::vector<double>& coeffs, double& offset) {
    double sign = 1.0;
    if (accept('-'))
      sign = -1.0;
    else
      accept('+');
    for (;;) {
      parse_term(coeffs, offset, sign);
      skip_ws();
      if (accept('+'))
        sign = 1.0;
      else if (accept('-'))
        sign = -1.0;
      else
        break;
    }
  }

  void parse_term(std::vector<double>& coeffs, double& offset, double sign) {
    skip_ws();
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      double v = read_number();
      skip_ws();
      if (accept('*')) {
        add_signal_coeff(coeffs, sign * v);
      } else {
        offset += sign * v;
      }
    } else if (ident_ahead()) {
      add_signal_coeff(coeffs, sign);
    } else {
      fail("expected term");
    }
  }

  void add_signal_coeff(std::vector<double>& coeffs, double coef) {
    skip_ws();
    size_t at = pos_;
    std::string name = read_ident();
    int idx = table_.index_of(name);
    if (idx < 0) throw ParseError("unknown signal name '" + name + "'", at);
    if (static_cast<size_t>(idx) >= coeffs.size()) coeffs.resize(idx + 1, 0.0);
    coeffs[idx] += coef;
  }

  FormulaPtr parse_atom() {
    std::vector<double> lhs_c(table_.names.size(), 0.0);
    double lhs_o = 0.0;
    parse_linexpr(lhs_c, lhs_o);
    skip_ws();
    std::string op;
    if (accept('>'))
      op = accept('=') ? ">=" : ">";
    else if (accept('<'))
      op = accept('=') ? "<=" : "<";
    else {
      // Bare identifier shorthand: "name" means "name >= 0".
      bool single = lhs_o == 0.0;
      int nz = 0;
      for (double c : lhs_c)
        if (c != 0.0) ++nz;
      if (single && nz == 1) {
        LinearPredicate p;
        p.coeffs = lhs_c;
        return f_pred(std::move(p));
      }
      fail("expected comparison operator");
    }
    std::vector<double> rhs_c(table_.names.size(), 0.0);
    double rhs_o = 0.0;
    parse_linexpr(rhs_c, rhs_o);

    LinearPredicate p;
    size_t dim = std::max(lhs_c.size(), rhs_c.size());
    lhs_c.resize(dim, 0.0);
    rhs_c.resize(dim, 0.0);
    p.coeffs.resize(dim);
    // ">=": mu = lhs - rhs; "<=": mu = rhs - lhs. Strict forms set the flag.
    double flip = (op == ">=" || op == ">") ? 1.0 : -1.0;
    for (size_t i = 0; i < dim; ++i) p.coeffs[i] = flip * (lhs_c[i] - rhs_c[i]);
    p.offset = flip * (lhs_o - rhs_o);
    p.strict = (op == ">" || op == "<");
    return f_pred(std::move(p));
  }
};

}  // namespace detail

/// Parses a formula string against the declared signal names.
inline FormulaPtr parse_formula(std::string_view text, const SignalTable& table) {
  return detail::FormulaParser(text, table).parse();
}

namespace detail {

inline std::string predicate_to_string(const LinearPredicate& p, const SignalTable& table) {
  if (p.is_constant() && std::isinf(p.offset)) return p.offset > 0 ? "true" : "false";
  std::string s;
  bool first = true;
  for (size_t i = 0; i < p.coeffs.size(); ++i) {
    double c = p.coeffs[i];
    if (c == 0.0) continue;
    std::string name =
        i < table.names.size() ? table.names[i] : ("s" + std::to_string(i));
    double mag = std::fabs(c);
    std::string term = (mag == 1.0) ? name : format_double(mag) + "*" + name;
    if (first) {
      s += (c < 0 ? "-" : "") + term;
      first = false;
    } else {
      s += (c < 0 ? " - " : " + ") + term;
    }
  }
  if (first) {
    s = format_double(p.offset);
  } else if (p.offset != 0.0) {
    s += (p.offset < 0 ? " - " : " + ") + format_double(std::fabs(p.offset));
  }
  return s + (p.strict ? " > 0" : " >= 0");
}

inline void formula_to_string(const Formula& f, const SignalTable& table, int parent_prec,
                              std::string& out) {
  // precedence: Or = 1, And = 2, primary = 3
  switch (f.kind) {
    case NodeKind::True:
      out += "true";
      return;
    case NodeKind::Pred:
      if (parent_prec >= 3 && !(f.pred.is_constant() && std::isinf(f.pred.offset))) {
        out += "(";
        out += predicate_to_string(f.pred, table);
        out += ")";
      } else {
        out += predicate_to_string(f.pred, table);
      }
      return;
    case NodeKind::Not:
      out += "!(";
      formula_to_string(*f.children[0], table, 0, out);
      out += ")";
      return;
    case NodeKind::And:
    case NodeKind::Or: {
      int prec = f.kind == NodeKind::And ? 2 : 1;
      bool paren = parent_prec >= prec;
      if (paren) out += "(";
      for (size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += f.kind == NodeKind::And ? " & " : " | ";
        formula_to_string(*f.children[i], table, prec, out);
      }
      if (paren) out += ")";
      return;
    }
    case NodeKind::Always:
    case NodeKind::Eventually:
      out += f.kind == NodeKind::Always ? "G[" : "F[";
      out += std::to_string(f.lo) + "," + std::to_string(f.hi) + "](";
      formula_to_string(*f.children[0], table, 0, out);
      out += ")";
      return;
    case NodeKind::Until:
      out += "(";
      formula_to_string(*f.children[0], table, 0, out);
      out += ") U[" + std::to_string(f.lo) + "," + std::to_string(f.hi) + "] (";
      formula_to_string(*f.children[1], table, 0, out);
      out += ")";
      return;
  }
}

}  // namespace detail

/// Renders a formula in the grammar accepted by parse_formula.
/// parse_formula(to_string(f)) is structurally equal to f.
inline std::string to_string(const Formula& f, const SignalTable& table) {
  std::string s;
  detail::formula_to_string(f, table, 0, s);
  return s;
}

inline std::string to_string(const FormulaPtr& f, const SignalTable& table) {
  return to_string(*f, table);
}

}  // namespace stlmpc
