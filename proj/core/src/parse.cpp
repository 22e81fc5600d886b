#include <cctype>
#include <charconv>
#include <optional>

#include "lq/expr.hpp"

namespace lq {

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::shared_ptr<const ExtFamily> family;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Expr parse_expr() { return parse_sum(); }

  Expr parse_sum() {
    std::vector<Expr> terms;
    terms.push_back(parse_product());
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos;
        terms.push_back(parse_product());
      } else if (c == '-') {
        ++pos;
        terms.push_back(Expr::neg(parse_product()));
      } else {
        break;
      }
    }
    return Expr::add(std::move(terms));
  }

  Expr parse_product() {
    Expr acc = parse_unary();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos;
        acc = Expr::mul({acc, parse_unary()});
      } else if (c == '/') {
        ++pos;
        acc = Expr::div(acc, parse_unary());
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_unary() {
    if (eat('-')) return Expr::neg(parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (peek() == '^') {
      ++pos;
      // Right associative; the exponent may itself carry a unary sign.
      Expr ex = eat('-') ? Expr::neg(parse_power()) : parse_power();
      return Expr::pow(std::move(base), std::move(ex));
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    bool is_float = false;
    if (pos < text.size() && text[pos] == '.') {
      is_float = true;
      ++pos;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos])))
        ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos]))) {
        is_float = true;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos])))
          ++pos;
      } else {
        pos = mark;
      }
    }
    std::string_view tok = text.substr(start, pos - start);
    if (!is_float) {
      long long v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec == std::errc() && p == tok.data() + tok.size()) return Expr::num(v);
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc() || p != tok.data() + tok.size())
      fail("malformed number");
    return Expr::flt(d);
  }

  Expr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    std::string_view name = text.substr(start, pos - start);

    if (peek() == '(') {
      auto fn = match_fn(name);
      if (fn) {
        ++pos;
        Expr arg = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return Expr::fun(*fn, std::move(arg));
      }
      if (family) {
        int idx = family->index_of(name);
        if (idx >= 0) {
          ++pos;
          Expr arg = parse_expr();
          if (!eat(')')) fail("expected ')'");
          if (!(arg.kind() == Kind::Var && arg.node().var == Sym::X)) {
            pos = start;
            fail("external functions accept only the bare argument x");
          }
          return Expr::ext(family, idx);
        }
      }
      pos = start;
      fail("unknown function '" + std::string(name) + "'");
    }

    if (name == "x") return Expr::var(Sym::X);
    if (name == "u") return Expr::var(Sym::U);
    if (name == "ux") return Expr::var(Sym::Ux);
    if (name == "w") return Expr::var(Sym::W);
    if (name == "C") return Expr::var(Sym::C);
    if (name == "C1") return Expr::var(Sym::C1);
    if (name == "C2") return Expr::var(Sym::C2);
    if (name == "pi") return Expr::flt(3.14159265358979323846);
    pos = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  static std::optional<Fn> match_fn(std::string_view name) {
    if (name == "sqrt") return Fn::Sqrt;
    if (name == "exp") return Fn::Exp;
    if (name == "ln" || name == "log") return Fn::Ln;
    if (name == "sin") return Fn::Sin;
    if (name == "cos") return Fn::Cos;
    if (name == "tan") return Fn::Tan;
    if (name == "arctan" || name == "atan") return Fn::Arctan;
    if (name == "arctanh" || name == "atanh") return Fn::Arctanh;
    if (name == "tanh") return Fn::Tanh;
    if (name == "abs") return Fn::Abs;
    return std::nullopt;
  }
};

}  // namespace

Expr parse(std::string_view text, std::shared_ptr<const ExtFamily> family) {
  Parser p{text, 0, std::move(family)};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input", p.pos);
  return e;
}

}  // namespace lq
