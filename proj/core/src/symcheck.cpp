#include "lq/symcheck.hpp"

#include <cmath>

namespace lq {

Expr determining_residual(const Expr& lambda, const Expr& phi) {
  Expr ux = Expr::var(Sym::Ux);
  return Expr::add({diff(lambda, Sym::X), diff(lambda, Sym::U) * ux,
                    diff(lambda, Sym::Ux) * phi,
                    Expr::pow(lambda, Expr::num(2)), -diff(phi, Sym::U),
                    -(lambda * diff(phi, Sym::Ux))});
}

JetField symmetry_defect(const LambdaPair& pair, const Expr& phi) {
  JetField A = evolution_field(phi);
  JetField prol = lambda_prolong(pair, phi);
  Expr mu = -(apply(A, pair.xi) + pair.lambda * pair.xi);
  JetField bracket = lie_bracket(prol, A);
  JetField expected = scale(pair.lambda, prol);
  expected = {expected.cx + mu * A.cx, expected.cu + mu * A.cu,
              expected.cux + mu * A.cux};
  return subtract(bracket, expected);
}

Expr canonical_lambda(const LambdaPair& pair, const Expr& phi) {
  Expr Q = pair.characteristic();
  if (Q.is_zero())
    throw std::invalid_argument(
        "canonical representative undefined: characteristic is zero");
  JetField A = evolution_field(phi);
  return pair.lambda + Expr::div(apply(A, Q), Q);
}

namespace {

Expr det3(const JetField& r0, const JetField& r1, const JetField& r2) {
  return Expr::add({r0.cx * (r1.cu * r2.cux), -(r0.cx * (r1.cux * r2.cu)),
                    -(r0.cu * (r1.cx * r2.cux)), r0.cu * (r1.cux * r2.cx),
                    r0.cux * (r1.cx * r2.cu), -(r0.cux * (r1.cu * r2.cx))});
}

double scaled_residual(const Expr& det, const Bindings& b) {
  const Node& n = det.node();
  double scale = 0.0;
  double value = 0.0;
  for (const Expr& term : n.kids) {
    double t = eval(term, b);
    value += t;
    scale = std::max(scale, std::abs(t));
  }
  return std::abs(value) / (1.0 + scale);
}

}  // namespace

EquivalenceResult are_equivalent(const LambdaPair& p1, const LambdaPair& p2,
                                 const Expr& phi, const Box& box, double tol,
                                 int samples, unsigned seed) {
  EquivalenceResult res;
  JetField A = evolution_field(phi);
  Expr det = det3(A, lambda_prolong(p1, phi), lambda_prolong(p2, phi));

  auto round = [&](unsigned s, const std::vector<Point>& avoid, int* failures,
                   ZeroCheck* check) {
    std::vector<Bindings> pts = sample_box(box, samples, s);
    *failures = 0;
    int used = 0;
    for (const Bindings& b : pts) {
      Point p{b[Sym::X], b[Sym::U], b[Sym::Ux]};
      bool near = false;
      for (const Point& q : avoid) {
        double d = std::max({std::abs(p.x - q.x) / (box.x.width() + 1e-300),
                             std::abs(p.u - q.u) / (box.u.width() + 1e-300),
                             std::abs(p.ux - q.ux) / (box.ux.width() + 1e-300)});
        if (d < 0.05) {
          near = true;
          break;
        }
      }
      if (near) continue;
      double rel;
      try {
        rel = scaled_residual(det, b);
      } catch (const EvalError&) {
        continue;
      }
      ++used;
      if (rel > check->worst) {
        check->worst = rel;
        check->worst_point = b;
        check->worst_value = rel;
      }
      if (rel > tol) {
        ++*failures;
        res.suspected_loci.push_back(p);
      }
    }
    check->points_used = used;
    if (used == 0)
      throw BoxExhausted("equivalence test: no evaluable points in box");
  };

  int failures = 0;
  round(seed, {}, &failures, &res.determinant_check);
  if (failures == 0) {
    res.equivalent = true;
  } else if (failures * 100 < res.determinant_check.points_used) {
    // Isolated failures may sit on singular loci of the prolongations;
    // one fresh draw avoiding them decides.
    std::vector<Point> avoid = res.suspected_loci;
    ZeroCheck second;
    int failures2 = 0;
    round(seed + 1, avoid, &failures2, &second);
    res.determinant_check = second;
    res.equivalent = failures2 == 0;
  } else {
    res.equivalent = false;
  }
  res.determinant_check.ok = res.equivalent;
  return res;
}

}  // namespace lq
