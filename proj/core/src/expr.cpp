#include "lq/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace lq {

namespace {

std::shared_ptr<const Node> make_node(Node&& n) {
  return std::make_shared<const Node>(std::move(n));
}

long long checked_mul(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) * b;
  if (r > INT64_MAX || r < INT64_MIN)
    throw std::overflow_error("rational constant overflow");
  return static_cast<long long>(r);
}

long long checked_add(long long a, long long b) {
  __int128 r = static_cast<__int128>(a) + b;
  if (r > INT64_MAX || r < INT64_MIN)
    throw std::overflow_error("rational constant overflow");
  return static_cast<long long>(r);
}

struct Rat {
  long long n = 0, d = 1;
};

Rat norm(Rat r) {
  if (r.d == 0) throw std::domain_error("division by the constant zero");
  if (r.d < 0) {
    r.n = -r.n;
    r.d = -r.d;
  }
  long long g = std::gcd(r.n < 0 ? -r.n : r.n, r.d);
  if (g > 1) {
    r.n /= g;
    r.d /= g;
  }
  return r;
}

Rat rat_add(Rat a, Rat b) {
  return norm({checked_add(checked_mul(a.n, b.d), checked_mul(b.n, a.d)),
               checked_mul(a.d, b.d)});
}
Rat rat_mul(Rat a, Rat b) {
  return norm({checked_mul(a.n, b.n), checked_mul(a.d, b.d)});
}

bool is_const_kind(const Expr& e) {
  return e.kind() == Kind::Num || e.kind() == Kind::Flt;
}

double const_value(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Num)
    return static_cast<double>(n.num) / static_cast<double>(n.den);
  return n.flt;
}

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Var: return 0;
    case Kind::Ext: return 1;
    case Kind::Fun: return 2;
    case Kind::Pow: return 3;
    case Kind::Mul: return 4;
    case Kind::Div: return 5;
    case Kind::Add: return 6;
    case Kind::Neg: return 7;
    case Kind::Num: return 8;
    case Kind::Flt: return 9;
  }
  return 10;
}

}  // namespace

const char* sym_name(Sym s) {
  switch (s) {
    case Sym::X: return "x";
    case Sym::U: return "u";
    case Sym::Ux: return "ux";
    case Sym::W: return "w";
    case Sym::C: return "C";
    case Sym::C1: return "C1";
    case Sym::C2: return "C2";
  }
  return "?";
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sqrt: return "sqrt";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Arctan: return "arctan";
    case Fn::Arctanh: return "arctanh";
    case Fn::Tanh: return "tanh";
    case Fn::Abs: return "abs";
  }
  return "?";
}

int ExtFamily::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i].name == name) return static_cast<int>(i);
  return -1;
}

Expr make_expr(Node&& n) { return Expr(make_node(std::move(n))); }

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = [] {
    Node n;
    n.kind = Kind::Num;
    n.num = 0;
    n.den = 1;
    return make_node(std::move(n));
  }();
  p_ = zero;
}

Kind Expr::kind() const { return p_->kind; }

bool Expr::is_rational(long long n, long long d) const {
  Rat r = norm({n, d});
  return p_->kind == Kind::Num && p_->num == r.n && p_->den == r.d;
}

bool Expr::is_constant() const {
  return p_->kind == Kind::Num || p_->kind == Kind::Flt;
}

Expr Expr::num(long long n, long long d) {
  Rat r = norm({n, d});
  Node node;
  node.kind = Kind::Num;
  node.num = r.n;
  node.den = r.d;
  return make_expr(std::move(node));
}

Expr Expr::flt(double v) {
  Node node;
  node.kind = Kind::Flt;
  node.flt = v;
  return make_expr(std::move(node));
}

Expr Expr::var(Sym s) {
  Node node;
  node.kind = Kind::Var;
  node.var = s;
  return make_expr(std::move(node));
}

Expr Expr::ext(std::shared_ptr<const ExtFamily> family, int member) {
  if (!family || member < 0 ||
      member >= static_cast<int>(family->members.size()))
    throw std::invalid_argument("external function member out of range");
  Node node;
  node.kind = Kind::Ext;
  node.family = std::move(family);
  node.member = member;
  return make_expr(std::move(node));
}

int compare(const Expr& a, const Expr& b) {
  if (&a.node() == &b.node()) return 0;
  const Node& na = a.node();
  const Node& nb = b.node();
  if (na.kind != nb.kind) {
    return kind_rank(na.kind) < kind_rank(nb.kind) ? -1 : 1;
  }
  switch (na.kind) {
    case Kind::Num: {
      __int128 l = static_cast<__int128>(na.num) * nb.den;
      __int128 r = static_cast<__int128>(nb.num) * na.den;
      if (l != r) return l < r ? -1 : 1;
      return 0;
    }
    case Kind::Flt:
      if (na.flt != nb.flt) return na.flt < nb.flt ? -1 : 1;
      return 0;
    case Kind::Var:
      if (na.var != nb.var) return na.var < nb.var ? -1 : 1;
      return 0;
    case Kind::Ext: {
      const std::string& ta = na.family->tag;
      const std::string& tb = nb.family->tag;
      if (int c = ta.compare(tb)) return c < 0 ? -1 : 1;
      const std::string& ma = na.family->members[na.member].name;
      const std::string& mb = nb.family->members[nb.member].name;
      if (int c = ma.compare(mb)) return c < 0 ? -1 : 1;
      return 0;
    }
    case Kind::Fun:
      if (na.fn != nb.fn) return na.fn < nb.fn ? -1 : 1;
      return compare(na.kids[0], nb.kids[0]);
    default: {
      if (na.kids.size() != nb.kids.size())
        return na.kids.size() < nb.kids.size() ? -1 : 1;
      for (std::size_t i = 0; i < na.kids.size(); ++i)
        if (int c = compare(na.kids[i], nb.kids[i])) return c;
      return 0;
    }
  }
}

bool equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr Expr::add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rat rsum{0, 1};
  double fsum = 0.0;
  bool has_f = false;
  auto take = [&](auto&& self, const Expr& t) -> void {
    const Node& n = t.node();
    if (n.kind == Kind::Add) {
      for (const Expr& k : n.kids) self(self, k);
    } else if (n.kind == Kind::Num) {
      rsum = rat_add(rsum, {n.num, n.den});
    } else if (n.kind == Kind::Flt) {
      fsum += n.flt;
      has_f = true;
    } else {
      flat.push_back(t);
    }
  };
  for (const Expr& t : terms) take(take, t);

  std::sort(flat.begin(), flat.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });

  if (has_f) {
    const double c =
        fsum + static_cast<double>(rsum.n) / static_cast<double>(rsum.d);
    if (c != 0.0) flat.push_back(Expr::flt(c));
  } else if (rsum.n != 0) {
    flat.push_back(Expr::num(rsum.n, rsum.d));
  }

  if (flat.empty()) return Expr::num(0);
  if (flat.size() == 1) return flat[0];
  Node node;
  node.kind = Kind::Add;
  node.kids = std::move(flat);
  return make_expr(std::move(node));
}

Expr Expr::neg(Expr a) {
  const Node& n = a.node();
  switch (n.kind) {
    case Kind::Num:
      return Expr::num(-n.num, n.den);
    case Kind::Flt:
      return Expr::flt(-n.flt);
    case Kind::Neg:
      return n.kids[0];
    case Kind::Add: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const Expr& k : n.kids) kids.push_back(Expr::neg(k));
      return Expr::add(std::move(kids));
    }
    case Kind::Mul:
      if (is_const_kind(n.kids[0])) {
        std::vector<Expr> kids = n.kids;
        kids[0] = Expr::neg(kids[0]);
        return Expr::mul(std::move(kids));
      }
      break;
    default:
      break;
  }
  Node node;
  node.kind = Kind::Neg;
  node.kids = {std::move(a)};
  return make_expr(std::move(node));
}

Expr Expr::mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Rat rprod{1, 1};
  double fprod = 1.0;
  bool has_f = false;
  int neg_parity = 0;
  auto take = [&](auto&& self, const Expr& t) -> void {
    const Node& n = t.node();
    if (n.kind == Kind::Mul) {
      for (const Expr& k : n.kids) self(self, k);
    } else if (n.kind == Kind::Neg) {
      ++neg_parity;
      self(self, n.kids[0]);
    } else if (n.kind == Kind::Num) {
      rprod = rat_mul(rprod, {n.num, n.den});
    } else if (n.kind == Kind::Flt) {
      fprod *= n.flt;
      has_f = true;
    } else {
      flat.push_back(t);
    }
  };
  for (const Expr& t : factors) take(take, t);

  if (neg_parity % 2) rprod.n = -rprod.n;
  if (rprod.n == 0) return Expr::num(0);
  if (has_f && fprod == 0.0) return Expr::flt(0.0);

  std::sort(flat.begin(), flat.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });

  Expr cst = Expr::num(1);
  bool have_cst = false;
  if (has_f) {
    cst = Expr::flt(fprod * static_cast<double>(rprod.n) /
                    static_cast<double>(rprod.d));
    have_cst = true;
  } else if (!(rprod.n == 1 && rprod.d == 1)) {
    cst = Expr::num(rprod.n, rprod.d);
    have_cst = true;
  }

  if (flat.empty()) return have_cst ? cst : Expr::num(1);
  if (have_cst && cst.is_rational(-1)) {
    // Hoist a bare sign: -(a*b) renders better than -1*a*b.
    if (flat.size() == 1) return Expr::neg(flat[0]);
    Node inner;
    inner.kind = Kind::Mul;
    inner.kids = std::move(flat);
    return Expr::neg(make_expr(std::move(inner)));
  }
  if (have_cst) flat.insert(flat.begin(), cst);
  if (flat.size() == 1) return flat[0];
  Node node;
  node.kind = Kind::Mul;
  node.kids = std::move(flat);
  return make_expr(std::move(node));
}

Expr Expr::div(Expr a, Expr b) {
  const Node& nb = b.node();
  if (nb.kind == Kind::Num) {
    if (nb.num == 0) throw std::domain_error("division by the constant zero");
    if (nb.num == 1 && nb.den == 1) return a;
    if (a.node().kind == Kind::Num)
      return Expr::num(checked_mul(a.node().num, nb.den),
                       checked_mul(a.node().den, nb.num));
  }
  if (nb.kind == Kind::Flt) {
    if (nb.flt == 0.0) throw std::domain_error("division by the constant zero");
    if (a.is_constant()) return Expr::flt(const_value(a) / nb.flt);
  }
  if (a.is_zero()) return Expr::num(0);
  // Keep the quotient shape; fold only a negated numerator or denominator
  // into a front sign so -a/b, a/(-b) and -(a/b) coincide structurally.
  bool sign = false;
  if (a.kind() == Kind::Neg) {
    sign = !sign;
    a = a.node().kids[0];
  }
  if (b.kind() == Kind::Neg) {
    sign = !sign;
    b = b.node().kids[0];
  }
  Node node;
  node.kind = Kind::Div;
  node.kids = {std::move(a), std::move(b)};
  Expr q = make_expr(std::move(node));
  return sign ? Expr::neg(q) : q;
}

Expr Expr::pow(Expr base, Expr exponent) {
  const Node& nb = exponent.node();
  if (nb.kind == Kind::Num) {
    if (nb.num == 0 && nb.den == 1) return Expr::num(1);
    if (nb.num == 1 && nb.den == 1) return base;
    const Node& na = base.node();
    if (na.kind == Kind::Num && nb.den == 1 && nb.num >= -16 && nb.num <= 16) {
      Rat r{1, 1};
      Rat b0 = nb.num > 0 ? Rat{na.num, na.den} : Rat{na.den, na.num};
      long long k = nb.num > 0 ? nb.num : -nb.num;
      if (!(nb.num < 0 && na.num == 0)) {
        for (long long i = 0; i < k; ++i) r = rat_mul(r, b0);
        return Expr::num(r.n, r.d);
      }
    }
  }
  if (base.is_zero() && nb.kind == Kind::Num && nb.num > 0) return Expr::num(0);
  Node node;
  node.kind = Kind::Pow;
  node.kids = {std::move(base), std::move(exponent)};
  return make_expr(std::move(node));
}

Expr Expr::fun(Fn f, Expr arg) {
  Node node;
  node.kind = Kind::Fun;
  node.fn = f;
  node.kids = {std::move(arg)};
  return make_expr(std::move(node));
}

double eval(const Expr& e, const Bindings& b) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return static_cast<double>(n.num) / static_cast<double>(n.den);
    case Kind::Flt:
      return n.flt;
    case Kind::Var:
      if (!b.has(n.var))
        throw EvalError(std::string("unbound variable ") + sym_name(n.var), e);
      return b[n.var];
    case Kind::Ext: {
      if (!b.has(Sym::X)) throw EvalError("unbound variable x", e);
      double v = n.family->members[n.member].eval(b[Sym::X]);
      if (!std::isfinite(v))
        throw EvalError("external function value not finite", e);
      return v;
    }
    case Kind::Add: {
      double s = 0.0;
      for (const Expr& k : n.kids) s += eval(k, b);
      if (!std::isfinite(s)) throw EvalError("sum not finite", e);
      return s;
    }
    case Kind::Neg:
      return -eval(n.kids[0], b);
    case Kind::Mul: {
      double p = 1.0;
      for (const Expr& k : n.kids) p *= eval(k, b);
      if (!std::isfinite(p)) throw EvalError("product not finite", e);
      return p;
    }
    case Kind::Div: {
      double num = eval(n.kids[0], b);
      double den = eval(n.kids[1], b);
      if (den == 0.0) throw EvalError("division by zero", e);
      double q = num / den;
      if (!std::isfinite(q)) throw EvalError("quotient not finite", e);
      return q;
    }
    case Kind::Pow: {
      double base = eval(n.kids[0], b);
      double ex = eval(n.kids[1], b);
      double r = std::pow(base, ex);
      if (!std::isfinite(r)) throw EvalError("power not finite or complex", e);
      return r;
    }
    case Kind::Fun: {
      double a = eval(n.kids[0], b);
      double r = 0.0;
      switch (n.fn) {
        case Fn::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative value", e);
          r = std::sqrt(a);
          break;
        case Fn::Exp: r = std::exp(a); break;
        case Fn::Ln:
          if (a <= 0.0) throw EvalError("ln of a non-positive value", e);
          r = std::log(a);
          break;
        case Fn::Sin: r = std::sin(a); break;
        case Fn::Cos: r = std::cos(a); break;
        case Fn::Tan: r = std::tan(a); break;
        case Fn::Arctan: r = std::atan(a); break;
        case Fn::Arctanh:
          if (std::abs(a) >= 1.0)
            throw EvalError("arctanh argument outside (-1,1)", e);
          r = std::atanh(a);
          break;
        case Fn::Tanh: r = std::tanh(a); break;
        case Fn::Abs: r = std::abs(a); break;
      }
      if (!std::isfinite(r)) throw EvalError("function value not finite", e);
      return r;
    }
  }
  throw EvalError("unreachable node kind", e);
}

Expr diff(const Expr& e, Sym var) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Flt:
      return Expr::num(0);
    case Kind::Var:
      return n.var == var ? Expr::num(1) : Expr::num(0);
    case Kind::Ext: {
      if (var != Sym::X) return Expr::num(0);
      const ExtFamily::Member& m = n.family->members[n.member];
      if (!m.deriv_set)
        throw std::logic_error("external function derivative not set: " +
                               m.name);
      return m.deriv;
    }
    case Kind::Add: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const Expr& k : n.kids) kids.push_back(diff(k, var));
      return Expr::add(std::move(kids));
    }
    case Kind::Neg:
      return Expr::neg(diff(n.kids[0], var));
    case Kind::Mul: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        Expr d = diff(n.kids[i], var);
        if (d.is_zero()) continue;
        std::vector<Expr> fac;
        fac.reserve(n.kids.size());
        for (std::size_t j = 0; j < n.kids.size(); ++j)
          fac.push_back(j == i ? d : n.kids[j]);
        terms.push_back(Expr::mul(std::move(fac)));
      }
      return Expr::add(std::move(terms));
    }
    case Kind::Div: {
      const Expr& a = n.kids[0];
      const Expr& b = n.kids[1];
      Expr da = diff(a, var);
      Expr db = diff(b, var);
      std::vector<Expr> terms;
      if (!da.is_zero()) terms.push_back(Expr::div(da, b));
      if (!db.is_zero())
        terms.push_back(Expr::neg(
            Expr::div(Expr::mul({a, db}), Expr::pow(b, Expr::num(2)))));
      return Expr::add(std::move(terms));
    }
    case Kind::Pow: {
      const Expr& a = n.kids[0];
      const Expr& b = n.kids[1];
      Expr da = diff(a, var);
      if (b.is_constant()) {
        if (da.is_zero()) return Expr::num(0);
        Expr bm1 = b.node().kind == Kind::Num
                       ? Expr::num(b.node().num - b.node().den, b.node().den)
                       : Expr::flt(b.node().flt - 1.0);
        return Expr::mul({b, Expr::pow(a, bm1), da});
      }
      Expr db = diff(b, var);
      // a^b = exp(b ln a): derivative a^b (b' ln a + b a'/a).
      std::vector<Expr> inner;
      if (!db.is_zero()) inner.push_back(Expr::mul({db, Expr::fun(Fn::Ln, a)}));
      if (!da.is_zero()) inner.push_back(Expr::div(Expr::mul({b, da}), a));
      return Expr::mul({e, Expr::add(std::move(inner))});
    }
    case Kind::Fun: {
      const Expr& g = n.kids[0];
      Expr dg = diff(g, var);
      if (dg.is_zero()) return Expr::num(0);
      Expr d;
      switch (n.fn) {
        case Fn::Sqrt:
          d = Expr::div(dg, Expr::mul({Expr::num(2), e}));
          return d;
        case Fn::Exp:
          return Expr::mul({e, dg});
        case Fn::Ln:
          return Expr::div(dg, g);
        case Fn::Sin:
          return Expr::mul({Expr::fun(Fn::Cos, g), dg});
        case Fn::Cos:
          return Expr::neg(Expr::mul({Expr::fun(Fn::Sin, g), dg}));
        case Fn::Tan:
          return Expr::mul(
              {Expr::add({Expr::num(1), Expr::pow(e, Expr::num(2))}), dg});
        case Fn::Arctan:
          return Expr::div(
              dg, Expr::add({Expr::num(1), Expr::pow(g, Expr::num(2))}));
        case Fn::Arctanh:
          return Expr::div(dg, Expr::add({Expr::num(1),
                                          Expr::neg(Expr::pow(g, Expr::num(2)))}));
        case Fn::Tanh:
          return Expr::mul(
              {Expr::add({Expr::num(1), Expr::neg(Expr::pow(e, Expr::num(2)))}),
               dg});
        case Fn::Abs:
          return Expr::div(Expr::mul({g, dg}), e);
      }
      return d;
    }
  }
  return Expr::num(0);
}

Expr substitute(const Expr& e, Sym var, const Expr& replacement) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Flt:
    case Kind::Ext:
      return e;
    case Kind::Var:
      return n.var == var ? replacement : e;
    case Kind::Add: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const Expr& k : n.kids)
        kids.push_back(substitute(k, var, replacement));
      return Expr::add(std::move(kids));
    }
    case Kind::Neg:
      return Expr::neg(substitute(n.kids[0], var, replacement));
    case Kind::Mul: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const Expr& k : n.kids)
        kids.push_back(substitute(k, var, replacement));
      return Expr::mul(std::move(kids));
    }
    case Kind::Div:
      return Expr::div(substitute(n.kids[0], var, replacement),
                       substitute(n.kids[1], var, replacement));
    case Kind::Pow:
      return Expr::pow(substitute(n.kids[0], var, replacement),
                       substitute(n.kids[1], var, replacement));
    case Kind::Fun:
      return Expr::fun(n.fn, substitute(n.kids[0], var, replacement));
  }
  return e;
}

bool references(const Expr& e, Sym var) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Flt:
      return false;
    case Kind::Var:
      return n.var == var;
    case Kind::Ext:
      return var == Sym::X;
    default:
      for (const Expr& k : n.kids)
        if (references(k, var)) return true;
      return false;
  }
}

namespace {

// Rendering precedence levels; parenthesize a child whose level is lower
// than its context requires.
enum Prec : int {
  kPrecAdd = 1,
  kPrecMul = 2,
  kPrecUnary = 3,
  kPrecPow = 4,
  kPrecAtom = 5,
};

void render_rec(const Expr& e, int parent, std::string& out);

std::string render_num(long long n, long long d) {
  std::string s = std::to_string(n);
  if (d != 1) {
    s += '/';
    s += std::to_string(d);
  }
  return s;
}

std::string render_flt(double v) {
  std::array<char, 64> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), p);
  // Keep floats visually distinct from integers so parse(render(e)) is
  // structure-preserving.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

bool renders_negative(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Neg) return true;
  if (n.kind == Kind::Num) return n.num < 0;
  if (n.kind == Kind::Flt) return n.flt < 0.0 || std::signbit(n.flt);
  if (n.kind == Kind::Mul) return renders_negative(n.kids[0]);
  return false;
}

Expr strip_negative(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Neg) return n.kids[0];
  if (n.kind == Kind::Num) return Expr::num(-n.num, n.den);
  if (n.kind == Kind::Flt) return Expr::flt(-n.flt);
  if (n.kind == Kind::Mul) {
    std::vector<Expr> kids = n.kids;
    kids[0] = strip_negative(kids[0]);
    return Expr::mul(std::move(kids));
  }
  return e;
}

int prec_of(const Expr& e) {
  switch (e.kind()) {
    case Kind::Add: return kPrecAdd;
    case Kind::Mul:
    case Kind::Div: return kPrecMul;
    case Kind::Neg: return kPrecUnary;
    case Kind::Pow: return kPrecPow;
    case Kind::Num:
      return e.node().den != 1 ? kPrecMul
             : e.node().num < 0 ? kPrecUnary
                                : kPrecAtom;
    case Kind::Flt:
      return e.node().flt < 0.0 ? kPrecUnary : kPrecAtom;
    default: return kPrecAtom;
  }
}

void render_rec(const Expr& e, int parent, std::string& out) {
  const Node& n = e.node();
  const int mine = prec_of(e);
  const bool parens = mine < parent;
  if (parens) out += '(';
  switch (n.kind) {
    case Kind::Num:
      out += render_num(n.num, n.den);
      break;
    case Kind::Flt:
      out += render_flt(n.flt);
      break;
    case Kind::Var:
      out += sym_name(n.var);
      break;
    case Kind::Ext:
      out += n.family->members[n.member].name;
      out += "(x)";
      break;
    case Kind::Add:
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        const Expr& k = n.kids[i];
        if (i == 0) {
          render_rec(k, kPrecAdd, out);
        } else if (renders_negative(k)) {
          out += " - ";
          render_rec(strip_negative(k), kPrecAdd + 1, out);
        } else {
          out += " + ";
          render_rec(k, kPrecAdd + 1, out);
        }
      }
      break;
    case Kind::Neg:
      out += '-';
      render_rec(n.kids[0], kPrecUnary + 1, out);
      break;
    case Kind::Mul:
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += '*';
        render_rec(n.kids[i], kPrecMul + (i ? 1 : 0), out);
      }
      break;
    case Kind::Div:
      render_rec(n.kids[0], kPrecMul, out);
      out += '/';
      render_rec(n.kids[1], kPrecMul + 1, out);
      break;
    case Kind::Pow:
      render_rec(n.kids[0], kPrecPow + 1, out);
      out += '^';
      render_rec(n.kids[1], kPrecPow, out);
      break;
    case Kind::Fun:
      out += fn_name(n.fn);
      out += '(';
      render_rec(n.kids[0], 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_rec(e, 0, out);
  return out;
}

}  // namespace lq
