#include "lq/sample.hpp"

#include <cmath>

namespace lq {

namespace {

// Radical-inverse (van der Corput) value of index i in the given base.
double halton(unsigned long long i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kBases[4] = {2, 3, 5, 7};

double stretch(const Interval& iv, double t) {
  return iv.lo + t * iv.width();
}

}  // namespace

Bindings Box::bindings_at(const Point& p, double wv) const {
  Bindings b(p.x, p.u, p.ux);
  if (w) b.bind(Sym::W, wv);
  for (const auto& [sym, value] : bound) b.bind(sym, value);
  return b;
}

bool Box::admissible(const Bindings& b) const {
  for (const Expr& locus : excluded) {
    try {
      if (std::abs(eval(locus, b)) < margin) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

std::vector<Bindings> sample_box(const Box& box, int n, unsigned seed) {
  std::vector<Bindings> out;
  out.reserve(static_cast<std::size_t>(n));
  // The leap past the warm-up region plus a seed offset keeps distinct seeds
  // on distinct subsequences while staying deterministic.
  unsigned long long index = 17 + static_cast<unsigned long long>(seed) * 7919;
  const long long budget = 500LL * n + 1000;
  long long attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > budget)
      throw BoxExhausted(
          "sampling box exhausted: excluded loci reject nearly all points");
    Point p;
    p.x = stretch(box.x, halton(index, kBases[0]));
    p.u = stretch(box.u, halton(index, kBases[1]));
    p.ux = stretch(box.ux, halton(index, kBases[2]));
    double wv = box.w ? stretch(*box.w, halton(index, kBases[3])) : 0.0;
    ++index;
    Bindings b = box.bindings_at(p, wv);
    if (!box.admissible(b)) continue;
    out.push_back(b);
  }
  return out;
}

namespace {

// Largest |term| among the top-level additive terms, used as the local
// scale: a residual is "zero" only relative to the sizes of the pieces
// that were supposed to cancel.
double local_scale(const Expr& e, const Bindings& b) {
  const Node& n = e.node();
  if (n.kind == Kind::Add) {
    double m = 0.0;
    for (const Expr& k : n.kids) m = std::max(m, std::abs(eval(k, b)));
    return m;
  }
  if (n.kind == Kind::Neg) return local_scale(n.kids[0], b);
  return std::abs(eval(e, b));
}

}  // namespace

ZeroCheck is_zero_sampled(const Expr& e, const Box& box, int n, double tol,
                          unsigned seed) {
  ZeroCheck res;
  std::vector<Bindings> pts = sample_box(box, n, seed);
  for (const Bindings& b : pts) {
    double value, scale;
    try {
      value = eval(e, b);
      scale = local_scale(e, b);
    } catch (const EvalError&) {
      continue;  // domain holes inside the box are skipped, not failed
    }
    double rel = std::abs(value) / (1.0 + scale);
    ++res.points_used;
    if (rel > res.worst) {
      res.worst = rel;
      res.worst_value = value;
      res.worst_point = b;
    }
  }
  if (res.points_used == 0)
    throw BoxExhausted("zero test: no evaluable points in box");
  res.ok = res.worst <= tol;
  return res;
}

double eval_at(const Expr& e, const Point& p) {
  return eval(e, Bindings(p.x, p.u, p.ux));
}

}  // namespace lq
