#include "lq/integrate.hpp"

namespace lq {

Traj2 integrate_ode2(const Expr& phi, double x0, double u0, double ux0,
                     double x_end, double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-4))
    throw IntegrateError("tolerance outside [1e-13, 1e-4]");
  auto f = [&phi](double x, const std::array<double, 2>& y,
                  std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = eval(phi, Bindings(x, y[0], y[1]));
  };
  return dopri5<2>(f, x0, {u0, ux0}, x_end, tol, tol);
}

Traj1 integrate_ode1(const Expr& rhs, double x0, double w0, double x_end,
                     double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-4))
    throw IntegrateError("tolerance outside [1e-13, 1e-4]");
  auto f = [&rhs](double x, const std::array<double, 1>& y,
                  std::array<double, 1>& dy) {
    Bindings b;
    b.bind(Sym::X, x);
    b.bind(Sym::W, y[0]);
    dy[0] = eval(rhs, b);
  };
  return dopri5<1>(f, x0, {w0}, x_end, tol, tol);
}

double first_integral_drift(const Expr& I, const Traj2& traj, int grid) {
  double ref = 0.0;
  double drift = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double x =
        traj.x_begin + (traj.x_end - traj.x_begin) * k / (grid - 1);
    const auto y = traj.at(x);
    const double v = eval(I, Bindings(x, y[0], y[1]));  // strict: may throw
    if (k == 0)
      ref = v;
    else
      drift = std::max(drift, std::abs(v - ref));
  }
  return drift;
}

DriftResult drift_admissible_run(const Expr& I, const Traj2& traj, int grid) {
  DriftResult out;
  bool started = false, ended = false;
  for (int k = 0; k < grid; ++k) {
    const double x =
        traj.x_begin + (traj.x_end - traj.x_begin) * k / (grid - 1);
    const auto y = traj.at(x);
    double v;
    try {
      v = eval(I, Bindings(x, y[0], y[1]));
    } catch (const EvalError&) {
      if (started) ended = true;
      ++out.samples_skipped;
      continue;
    }
    if (ended) {
      ++out.samples_skipped;
      continue;
    }
    if (!started) {
      started = true;
      out.reference = v;
      out.x_first = x;
    }
    out.x_last = x;
    ++out.samples_used;
    out.drift = std::max(out.drift, std::abs(v - out.reference));
  }
  if (!started)
    throw IntegrateError("first integral inadmissible along the whole span");
  return out;
}

double check_closed_form(const ClosedFormSolution& sol, const Expr& phi,
                         int grid) {
  Expr du = diff(sol.u_of_x, Sym::X);
  Expr ddu = diff(du, Sym::X);
  double worst = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double x = sol.a + (sol.b - sol.a) * (k + 0.5) / grid;
    Bindings bx;
    bx.bind(Sym::X, x);
    bx.bind(Sym::C1, sol.c1);
    bx.bind(Sym::C2, sol.c2);
    const double u = eval(sol.u_of_x, bx);
    const double ux = eval(du, bx);
    const double uxx = eval(ddu, bx);
    const double p = eval(phi, Bindings(x, u, ux));
    worst = std::max(worst, std::abs(uxx - p) / (1.0 + std::abs(p)));
  }
  return worst;
}

double reduction_consistency(const Expr& w_closed, const Expr& phi_red,
                             const Traj2& traj, int grid, double fd_step) {
  double worst = 0.0;
  const double lo = std::min(traj.x_begin, traj.x_end);
  const double hi = std::max(traj.x_begin, traj.x_end);
  int used = 0;
  for (int k = 0; k < grid; ++k) {
    const double x = lo + (hi - lo) * (k + 0.5) / grid;
    const double h = std::min(fd_step, 0.25 * (hi - lo));
    if (x - h < lo || x + h > hi) continue;
    try {
      auto ym = traj.at(x - h);
      auto y0 = traj.at(x);
      auto yp = traj.at(x + h);
      const double wm = eval(w_closed, Bindings(x - h, ym[0], ym[1]));
      const double w0 = eval(w_closed, Bindings(x, y0[0], y0[1]));
      const double wp = eval(w_closed, Bindings(x + h, yp[0], yp[1]));
      const double dw = (wp - wm) / (2.0 * h);
      Bindings br;
      br.bind(Sym::X, x);
      br.bind(Sym::W, w0);
      const double rhs = eval(phi_red, br);
      worst = std::max(worst, std::abs(dw - rhs) / (1.0 + std::abs(rhs)));
      ++used;
    } catch (const EvalError&) {
      continue;
    }
  }
  if (used == 0)
    throw IntegrateError("reduction consistency: no admissible samples");
  return worst;
}

}  // namespace lq
