#include "lq/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lq {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

double gk15(const std::function<double(double)>& f, double a, double b,
            double* err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  resg *= h;
  resk *= h;
  *err = std::abs(resk - resg);
  return resk;
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol, double* err_out) {
  struct Piece {
    double a, b, tol;
    int depth;
  };
  std::vector<Piece> stack{{a, b, tol, 0}};
  double total = 0.0, err_total = 0.0;
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    double err = 0.0;
    double v = gk15(f, p.a, p.b, &err);
    if (err <= p.tol || p.depth >= 40) {
      if (err > p.tol)
        throw QuadFailure("quadrature did not converge on a segment");
      total += v;
      err_total += err;
      continue;
    }
    double mid = 0.5 * (p.a + p.b);
    stack.push_back({p.a, mid, 0.5 * p.tol, p.depth + 1});
    stack.push_back({mid, p.b, 0.5 * p.tol, p.depth + 1});
  }
  *err_out = err_total;
  return total;
}

constexpr double kPathMargin = 1e-2;
constexpr int kPathProbes = 41;
constexpr double kSegmentTol = 1e-10;

}  // namespace

std::vector<Expr> closedness_residuals(const OneForm& form) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < form.comps.size(); ++i)
    for (std::size_t j = i + 1; j < form.comps.size(); ++j) {
      const auto& [si, ei] = form.comps[i];
      const auto& [sj, ej] = form.comps[j];
      out.push_back(diff(ei, sj) - diff(ej, si));
    }
  return out;
}

ZeroCheck check_closedness(OneForm& form, int samples, double tol,
                           unsigned seed) {
  ZeroCheck merged;
  merged.ok = true;
  for (const Expr& r : closedness_residuals(form)) {
    ZeroCheck zc = is_zero_sampled(r, form.box, samples, tol, seed);
    merged.points_used += zc.points_used;
    if (zc.worst > merged.worst) {
      merged.worst = zc.worst;
      merged.worst_value = zc.worst_value;
      merged.worst_point = zc.worst_point;
    }
    merged.ok = merged.ok && zc.ok;
  }
  form.closedness_worst = merged.worst;
  return merged;
}

namespace {

struct Segment {
  Sym sym;
  const Expr* comp;
  double from, to;
};

// A segment is usable when every excluded locus stays clear of zero and
// every component evaluates along it.
bool segment_admissible(const OneForm& form, Bindings moving,
                        const Segment& seg) {
  for (int k = 0; k < kPathProbes; ++k) {
    double t = seg.from + (seg.to - seg.from) * k / (kPathProbes - 1);
    moving.bind(seg.sym, t);
    for (const Expr& locus : form.box.excluded) {
      try {
        if (std::abs(eval(locus, moving)) < kPathMargin) return false;
      } catch (const EvalError&) {
        return false;
      }
    }
    try {
      (void)eval(*seg.comp, moving);
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

}  // namespace

QuadratureResult path_integrate(const OneForm& form, const Bindings& base,
                                const Bindings& target) {
  const std::size_t n = form.comps.size();
  for (const auto& [sym, comp] : form.comps) {
    if (!base.has(sym) || !target.has(sym))
      throw QuadFailure(std::string("endpoint does not bind ") +
                        sym_name(sym));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  QuadratureResult best;
  do {
    Bindings current = base;
    QuadratureResult res;
    res.path.push_back(current);
    bool ok = true;
    for (std::size_t idx : order) {
      const auto& [sym, comp] = form.comps[idx];
      Segment seg{sym, &comp, current[sym], target[sym]};
      if (seg.from == seg.to) continue;
      if (!segment_admissible(form, current, seg)) {
        ok = false;
        break;
      }
      auto f = [&](double t) {
        Bindings b = current;
        b.bind(sym, t);
        return eval(comp, b);
      };
      double err = 0.0;
      try {
        res.value += adaptive_gk(f, seg.from, seg.to, kSegmentTol, &err);
      } catch (const EvalError&) {
        ok = false;
        break;
      }
      res.estimated_error += err;
      current.bind(sym, target[sym]);
      res.path.push_back(current);
    }
    if (ok) {
      res.closedness_residual = form.closedness_worst;
      return res;
    }
  } while (std::next_permutation(order.begin(), order.end()));

  throw QuadFailure(
      "no axis-aligned path between the endpoints clears the excluded loci");
}

std::pair<OneForm, OneForm> w_forms(const CommutingData& data, const Box& box,
                                    int samples, double tol, unsigned seed) {
  Expr d12 = data.lambda1 - data.lambda2;
  Expr den1 = data.f2 * d12;              // f2 (lambda1 - lambda2)
  Expr den2 = data.f1 * Expr::neg(d12);   // f1 (lambda2 - lambda1)

  OneForm dw1;
  dw1.box = box;
  dw1.comps = {{Sym::U, Expr::div(data.lambda1, den1)},
               {Sym::Ux, Expr::neg(Expr::div(Expr::num(1), den1))}};

  OneForm dw2;
  dw2.box = box;
  dw2.comps = {{Sym::U, Expr::div(data.lambda2, den2)},
               {Sym::Ux, Expr::neg(Expr::div(Expr::num(1), den2))}};

  check_closedness(dw1, samples, tol, seed);
  check_closedness(dw2, samples, tol, seed);
  return {std::move(dw1), std::move(dw2)};
}

double section_potential(const OneForm& wform, double x, double u0, double ux0,
                         double u, double ux) {
  Bindings base = wform.box.bindings_at({x, u0, ux0});
  Bindings target = wform.box.bindings_at({x, u, ux});
  return path_integrate(wform, base, target).value;
}

std::pair<OneForm, OneForm> I_forms(const CommutingData& data, const Expr& phi,
                                    const Box& box, int samples, double tol,
                                    unsigned seed) {
  Expr ux = Expr::var(Sym::Ux);
  Expr d21 = data.lambda2 - data.lambda1;
  Expr den1 = data.f2 * data.g2 * d21;             // f2 g2 (lambda2 - lambda1)
  Expr den2 = data.f1 * data.g1 * Expr::neg(d21);  // f1 g1 (lambda1 - lambda2)

  OneForm dI1;
  dI1.box = box;
  dI1.comps = {{Sym::X, Expr::div(data.lambda1 * ux - phi, den1)},
               {Sym::U, Expr::neg(Expr::div(data.lambda1, den1))},
               {Sym::Ux, Expr::div(Expr::num(1), den1)}};

  OneForm dI2;
  dI2.box = box;
  dI2.comps = {{Sym::X, Expr::div(data.lambda2 * ux - phi, den2)},
               {Sym::U, Expr::neg(Expr::div(data.lambda2, den2))},
               {Sym::Ux, Expr::div(Expr::num(1), den2)}};

  check_closedness(dI1, samples, tol, seed);
  check_closedness(dI2, samples, tol, seed);
  return {std::move(dI1), std::move(dI2)};
}

IntegratingFactors integrating_factors(
    const CommutingData& data, const Expr& phi,
    const std::pair<OneForm, OneForm>& dI) {
  Expr ux = Expr::var(Sym::Ux);
  Expr d21 = data.lambda2 - data.lambda1;
  IntegratingFactors out;
  out.mu1 = Expr::div(Expr::num(1), data.f2 * data.g2 * d21);
  out.mu2 = Expr::div(Expr::num(1), data.f1 * data.g1 * Expr::neg(d21));

  auto comp = [](const OneForm& f, Sym s) -> const Expr& {
    for (const auto& [sym, e] : f.comps)
      if (sym == s) return e;
    throw QuadFailure("form lacks a component");
  };
  const OneForm& I1 = dI.first;
  const OneForm& I2 = dI.second;
  out.residuals = {
      comp(I1, Sym::X) - out.mu1 * (data.lambda1 * ux - phi),
      comp(I1, Sym::U) + data.lambda1 * out.mu1,
      comp(I1, Sym::Ux) - out.mu1,
      comp(I2, Sym::X) - out.mu2 * (data.lambda2 * ux - phi),
      comp(I2, Sym::U) + data.lambda2 * out.mu2,
      comp(I2, Sym::Ux) - out.mu2,
  };
  return out;
}

JacobiMultiplier jacobi_last_multiplier(const CommutingData& data,
                                        const Expr& phi,
                                        const std::pair<OneForm, OneForm>& dI) {
  Expr ux = Expr::var(Sym::Ux);
  Expr d21 = data.lambda2 - data.lambda1;
  JacobiMultiplier out;
  out.M = Expr::div(Expr::num(1), data.f1 * data.g1 * data.f2 * data.g2 * d21);
  out.divergence = Expr::add({diff(out.M, Sym::X), diff(out.M * ux, Sym::U),
                              diff(out.M * phi, Sym::Ux)});
  const Expr* I1_ux = nullptr;
  for (const auto& [sym, e] : dI.first.comps)
    if (sym == Sym::Ux) I1_ux = &e;
  if (!I1_ux) throw QuadFailure("form lacks a ux component");
  out.cross_identity = Expr::div(out.M, *I1_ux) -
                       Expr::div(Expr::num(1), data.f1 * data.g1);
  return out;
}

ReducedFactors reduced_integrating_factors(const Expr& g1_red,
                                           const Expr& g2_red,
                                           const Expr& phi1_red,
                                           const Expr& phi2_red) {
  ReducedFactors out;
  out.nu1 = Expr::div(Expr::num(1), g2_red);
  out.nu2 = Expr::div(Expr::num(1), g1_red);
  out.pde1 = diff(out.nu1, Sym::X) + diff(phi1_red * out.nu1, Sym::W);
  out.pde2 = diff(out.nu2, Sym::X) + diff(phi2_red * out.nu2, Sym::W);
  return out;
}

AuxiliaryFactor auxiliary_factor(const CommutingData& data, const Expr& H,
                                 int which,
                                 const std::optional<Expr>& I_closed) {
  if (which != 1 && which != 2)
    throw std::invalid_argument("auxiliary_factor: which must be 1 or 2");
  const Expr& h = which == 1 ? data.h1 : data.h2;
  AuxiliaryFactor out;
  out.nu_tilde = Expr::div(Expr::num(1), substitute(h, Sym::Ux, H));
  out.pde = diff(out.nu_tilde, Sym::X) + diff(H * out.nu_tilde, Sym::U);
  if (I_closed)
    out.h_residual = substitute(*I_closed, Sym::Ux, H) - Expr::var(Sym::C);
  return out;
}

ReducedRhs reduced_rhs(const CommutingData& data, const Expr& phi,
                       const Expr& w_closed, const Expr& candidate_red,
                       const Box& box, int pairs, double tol, unsigned seed) {
  ReducedRhs out;
  JetField A = evolution_field(phi);
  out.a_of_w = apply(A, w_closed);
  out.candidate = candidate_red;
  out.match_residual = out.a_of_w - substitute(candidate_red, Sym::W, w_closed);

  // Paired-point dependence test: two jet points sharing (x, w) must give
  // the same A(w).  The partner's ux comes from a Newton solve on
  // w_closed(x, u2, .) = w.
  Expr dw_dux = diff(w_closed, Sym::Ux);
  std::vector<Bindings> pts = sample_box(box, 4 * pairs, seed);
  int made = 0;
  for (std::size_t i = 0; i + 1 < pts.size() && made < pairs; i += 2) {
    const Bindings& b1 = pts[i];
    Bindings b2 = pts[i + 1];
    b2.bind(Sym::X, b1[Sym::X]);
    if (std::abs(b2[Sym::U] - b1[Sym::U]) < 1e-3 * box.u.width()) continue;
    double w0, a1;
    try {
      w0 = eval(w_closed, b1);
      a1 = eval(out.a_of_w, b1);
    } catch (const EvalError&) {
      continue;
    }
    bool converged = false;
    double ux2 = b2[Sym::Ux];
    for (int it = 0; it < 60; ++it) {
      b2.bind(Sym::Ux, ux2);
      double g, dg;
      try {
        g = eval(w_closed, b2) - w0;
        dg = eval(dw_dux, b2);
      } catch (const EvalError&) {
        break;
      }
      if (std::abs(g) < 1e-12 * (1.0 + std::abs(w0))) {
        converged = true;
        break;
      }
      if (dg == 0.0 || !std::isfinite(dg)) break;
      double step = g / dg;
      if (!std::isfinite(step)) break;
      ux2 -= step;
      double pad = 2.0 * box.ux.width();
      if (ux2 < box.ux.lo - pad || ux2 > box.ux.hi + pad) break;
    }
    if (!converged) continue;
    if (!box.admissible(b2)) continue;
    double a2;
    try {
      a2 = eval(out.a_of_w, b2);
    } catch (const EvalError&) {
      continue;
    }
    double rel = std::abs(a2 - a1) / (1.0 + std::max(std::abs(a1), std::abs(a2)));
    out.dependence_worst = std::max(out.dependence_worst, rel);
    ++made;
  }
  out.pairs_used = made;
  (void)tol;
  return out;
}

}  // namespace lq
