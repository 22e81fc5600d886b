#pragma once

// Sampling boxes, low-discrepancy point generation, and the numerical
// zero-test that stands in for symbolic simplification.

#include <optional>
#include <vector>

#include "lq/expr.hpp"

namespace lq {

struct Point {
  double x = 0.0, u = 0.0, ux = 0.0;
};

struct Interval {
  double lo = 0.0, hi = 1.0;
  double width() const { return hi - lo; }
};

struct Box {
  Interval x{0.0, 1.0};
  Interval u{0.5, 2.0};
  Interval ux{-2.0, 2.0};
  std::optional<Interval> w;          // present for reduced-coordinate checks
  std::vector<std::pair<Sym, double>> bound;  // fixed parameter bindings (C, ...)
  std::vector<Expr> excluded;         // zero sets avoided while sampling
  double margin = 1e-3;               // |excluded| < margin rejects a sample

  Bindings bindings_at(const Point& p, double wv = 0.0) const;
  bool admissible(const Bindings& b) const;  // margin test on excluded loci
};

class BoxExhausted : public std::runtime_error {
 public:
  explicit BoxExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic low-discrepancy samples (Halton, bases 2/3/5/7); `seed`
// offsets the sequence start so re-sampling yields fresh points.
std::vector<Bindings> sample_box(const Box& box, int n, unsigned seed = 0);

struct ZeroCheck {
  bool ok = true;
  double worst = 0.0;           // worst relative residual
  double worst_value = 0.0;     // raw value at the worst point
  Bindings worst_point;
  int points_used = 0;
};

// |e| / (1 + local scale) <= tol at n quasi-random admissible points; the
// local scale is the largest top-level additive term of e at the point.
ZeroCheck is_zero_sampled(const Expr& e, const Box& box, int n = 200,
                          double tol = 1e-9, unsigned seed = 0);

double eval_at(const Expr& e, const Point& p);

}  // namespace lq
