#pragma once

// Immutable symbolic expressions over the jet coordinates (x, u, ux), the
// reduced coordinate w, and the reserved constants C, C1, C2.  Construction
// goes through smart factories that apply weak canonicalization (constant
// folding, neutral elements, flatten + sort of sums and products); semantic
// zero-testing is a sampling concern, not a rewriting concern.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lq {

enum class Sym : int { X = 0, U = 1, Ux = 2, W = 3, C = 4, C1 = 5, C2 = 6 };
inline constexpr int kNumSyms = 7;

const char* sym_name(Sym s);

enum class Kind : int { Num, Flt, Var, Add, Neg, Mul, Div, Pow, Fun, Ext };

enum class Fn : int {
  Sqrt,
  Exp,
  Ln,
  Sin,
  Cos,
  Tan,
  Arctan,
  Arctanh,
  Tanh,
  Abs,
};

const char* fn_name(Fn f);

struct ExtFamily;
struct Node;

class Expr {
 public:
  Expr();  // the rational constant 0

  static Expr num(long long n, long long d = 1);
  static Expr flt(double v);
  static Expr var(Sym s);
  static Expr add(std::vector<Expr> terms);
  static Expr neg(Expr a);
  static Expr mul(std::vector<Expr> factors);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, Expr exponent);
  static Expr fun(Fn f, Expr arg);
  static Expr ext(std::shared_ptr<const ExtFamily> family, int member);

  const Node& node() const { return *p_; }
  Kind kind() const;

  bool is_rational(long long n, long long d = 1) const;
  bool is_zero() const { return is_rational(0); }
  bool is_one() const { return is_rational(1); }
  bool is_constant() const;  // Num or Flt

 private:
  explicit Expr(std::shared_ptr<const Node> p) : p_(std::move(p)) {}
  std::shared_ptr<const Node> p_;
  friend struct Node;
  friend Expr make_expr(Node&& n);
};

struct Node {
  Kind kind;
  long long num = 0;  // Num: numerator
  long long den = 1;  // Num: denominator (> 0, reduced)
  double flt = 0.0;
  Sym var = Sym::X;
  Fn fn = Fn::Sqrt;
  std::shared_ptr<const ExtFamily> family;
  int member = -1;
  std::vector<Expr> kids;
};

// External scalar functions of x (numerically generated basis solutions).
// Members carry an evaluator and a symbolic derivative slot; the derivative
// expressions reference the family itself, an intentional ownership cycle
// with process lifetime.
struct ExtFamily {
  struct Member {
    std::string name;
    std::function<double(double)> eval;
    Expr deriv;
    bool deriv_set = false;
  };
  std::string tag;  // stable identifier used for deterministic ordering
  std::vector<Member> members;

  int index_of(std::string_view name) const;
};

struct Bindings {
  std::array<double, kNumSyms> val{};
  std::array<bool, kNumSyms> set{};

  Bindings() = default;
  Bindings(double x, double u, double ux) {
    bind(Sym::X, x);
    bind(Sym::U, u);
    bind(Sym::Ux, ux);
  }
  void bind(Sym s, double v) {
    val[static_cast<int>(s)] = v;
    set[static_cast<int>(s)] = true;
  }
  double operator[](Sym s) const { return val[static_cast<int>(s)]; }
  bool has(Sym s) const { return set[static_cast<int>(s)]; }
};

class EvalError : public std::runtime_error {
 public:
  EvalError(std::string msg, Expr subtree)
      : std::runtime_error(std::move(msg)), subtree_(std::move(subtree)) {}
  const Expr& subtree() const { return subtree_; }

 private:
  Expr subtree_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, std::size_t offset)
      : std::runtime_error(std::move(msg)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Total order used for canonical sorting; 0 iff structurally equal.
int compare(const Expr& a, const Expr& b);
bool equal(const Expr& a, const Expr& b);

double eval(const Expr& e, const Bindings& b);
Expr diff(const Expr& e, Sym var);
Expr substitute(const Expr& e, Sym var, const Expr& replacement);
bool references(const Expr& e, Sym var);

std::string render(const Expr& e);
// Identifiers resolve to variables, function names, or (when a family is
// given) family members applied to x, e.g. "psi1(x)".
Expr parse(std::string_view text,
           std::shared_ptr<const ExtFamily> family = nullptr);

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) {
  return Expr::add({a, Expr::neg(b)});
}
inline Expr operator-(const Expr& a) { return Expr::neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }

}  // namespace lq
