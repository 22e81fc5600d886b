#pragma once

// Embedded Dormand-Prince 5(4) with dense output, and trajectory-level
// certification: first-integral drift, closed-form solution residuals, and
// reduction consistency.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "lq/sample.hpp"

namespace lq {

class IntegrateError : public std::runtime_error {
 public:
  explicit IntegrateError(const std::string& msg) : std::runtime_error(msg) {}
};

template <int N>
struct DenseStep {
  double x0 = 0.0, h = 0.0;
  std::array<std::array<double, N>, 5> cont{};  // Hairer contd5 coefficients
};

template <int N>
struct Traj {
  double x_begin = 0.0, x_end = 0.0;
  std::array<double, N> y_end{};
  std::vector<DenseStep<N>> steps;
  std::size_t n_accepted = 0, n_rejected = 0;
  double max_local_error = 0.0;

  std::array<double, N> at(double x) const;
};

namespace detail {

// Coefficients of the Dormand-Prince RK5(4)7FM pair.
struct Dopri5Tab {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                          a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

template <int N>
std::array<double, N> Traj<N>::at(double x) const {
  if (steps.empty()) throw IntegrateError("empty trajectory");
  const double lo = std::min(x_begin, x_end), hi = std::max(x_begin, x_end);
  if (x < lo - 1e-12 || x > hi + 1e-12)
    throw IntegrateError("dense-output query outside trajectory span");
  // Steps are stored in traversal order; locate by signed progress.
  const bool fwd = x_end >= x_begin;
  std::size_t idx = steps.size() - 1;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double a = steps[i].x0, b = steps[i].x0 + steps[i].h;
    if (fwd ? (x <= b + 1e-15) : (x >= b - 1e-15)) {
      idx = i;
      break;
    }
    (void)a;
  }
  const DenseStep<N>& s = steps[idx];
  const double th = (x - s.x0) / s.h, th1 = 1.0 - th;
  std::array<double, N> y{};
  for (int i = 0; i < N; ++i) {
    y[i] = s.cont[0][i] +
           th * (s.cont[1][i] +
                 th1 * (s.cont[2][i] + th * (s.cont[3][i] + th1 * s.cont[4][i])));
  }
  return y;
}

// F: void(double x, const std::array<double,N>& y, std::array<double,N>& dy).
// May throw EvalError; a throwing stage rejects the step and halves h.
template <int N, class F>
Traj<N> dopri5(F&& f, double x0, std::array<double, N> y0, double x1,
               double rtol, double atol, double max_h = 0.0,
               double blowup = 1e6) {
  using Tab = detail::Dopri5Tab;
  Traj<N> out;
  out.x_begin = x0;
  if (x1 == x0) {
    out.x_end = x0;
    out.y_end = y0;
    return out;
  }
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double len = std::abs(x1 - x0);
  const double hmin = 1e-12 * len;
  if (max_h <= 0.0) max_h = len;

  std::array<double, N> k1{};
  auto stage = [&](double x, const std::array<double, N>& y,
                   std::array<double, N>& dy) { f(x, y, dy); };

  // One raw 5(4) step with dense coefficients; false on failed evaluation.
  struct StepOut {
    std::array<double, N> yn{}, k7{};
    double err = 0.0;
    DenseStep<N> ds;
  };
  auto one_step = [&](double xa, const std::array<double, N>& ya, double hs,
                      const std::array<double, N>& k1a, StepOut& o) -> bool {
    std::array<double, N> k2{}, k3{}, k4{}, k5{}, k6{}, yt{};
    try {
      for (int i = 0; i < N; ++i) yt[i] = ya[i] + hs * Tab::a21 * k1a[i];
      stage(xa + Tab::c2 * hs, yt, k2);
      for (int i = 0; i < N; ++i)
        yt[i] = ya[i] + hs * (Tab::a31 * k1a[i] + Tab::a32 * k2[i]);
      stage(xa + Tab::c3 * hs, yt, k3);
      for (int i = 0; i < N; ++i)
        yt[i] = ya[i] + hs * (Tab::a41 * k1a[i] + Tab::a42 * k2[i] +
                              Tab::a43 * k3[i]);
      stage(xa + Tab::c4 * hs, yt, k4);
      for (int i = 0; i < N; ++i)
        yt[i] = ya[i] + hs * (Tab::a51 * k1a[i] + Tab::a52 * k2[i] +
                              Tab::a53 * k3[i] + Tab::a54 * k4[i]);
      stage(xa + Tab::c5 * hs, yt, k5);
      for (int i = 0; i < N; ++i)
        yt[i] = ya[i] + hs * (Tab::a61 * k1a[i] + Tab::a62 * k2[i] +
                              Tab::a63 * k3[i] + Tab::a64 * k4[i] +
                              Tab::a65 * k5[i]);
      stage(xa + hs, yt, k6);
      for (int i = 0; i < N; ++i)
        o.yn[i] = ya[i] + hs * (Tab::a71 * k1a[i] + Tab::a73 * k3[i] +
                                Tab::a74 * k4[i] + Tab::a75 * k5[i] +
                                Tab::a76 * k6[i]);
      stage(xa + hs, o.yn, o.k7);
      o.err = 0.0;
      for (int i = 0; i < N; ++i) {
        const double e = hs * (Tab::e1 * k1a[i] + Tab::e3 * k3[i] +
                               Tab::e4 * k4[i] + Tab::e5 * k5[i] +
                               Tab::e6 * k6[i] + Tab::e7 * o.k7[i]);
        const double sc =
            atol + rtol * std::max(std::abs(ya[i]), std::abs(o.yn[i]));
        o.err += (e / sc) * (e / sc);
      }
      o.err = std::sqrt(o.err / N);
    } catch (const EvalError&) {
      return false;
    }
    if (!std::isfinite(o.err)) return false;
    o.ds.x0 = xa;
    o.ds.h = hs;
    for (int i = 0; i < N; ++i) {
      const double dy = o.yn[i] - ya[i];
      const double bspl = hs * k1a[i] - dy;
      o.ds.cont[0][i] = ya[i];
      o.ds.cont[1][i] = dy;
      o.ds.cont[2][i] = bspl;
      o.ds.cont[3][i] = dy - hs * o.k7[i] - bspl;
      o.ds.cont[4][i] = hs * (Tab::d1 * k1a[i] + Tab::d3 * k3[i] +
                              Tab::d4 * k4[i] + Tab::d5 * k5[i] +
                              Tab::d6 * k6[i] + Tab::d7 * o.k7[i]);
    }
    return true;
  };

  stage(x0, y0, k1);
  // Initial step: conservative scale-based guess, refined by the controller.
  double h = max_h;
  {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < N; ++i) {
      const double sc = atol + rtol * std::abs(y0[i]);
      d0 = std::max(d0, std::abs(y0[i]) / sc);
      d1n = std::max(d1n, std::abs(k1[i]) / sc);
    }
    double hg = (d1n > 1e-10) ? 0.01 * d0 / d1n : 1e-6 * len;
    if (hg <= 0.0 || !std::isfinite(hg)) hg = 1e-6 * len;
    h = std::min({max_h, std::max(hg, 100.0 * hmin), len});
  }

  double x = x0;
  std::array<double, N> y = y0;
  bool last = false;

  // Passage guard.  Crossing an integrable quasi-singularity (the right-hand
  // side stays finite on the orbit but its transversal derivatives blow up)
  // defeats the embedded error estimate: the stage errors of a step that
  // straddles the pinch cancel in the weighted difference, so an oversized
  // step is accepted right where the flow amplifies any injected error
  // linearly in the distance travelled afterwards.  The controller's own
  // step-size collapse is a reliable detector, so: arm a watch when h falls
  // well below its running maximum, wait for the collapse to bottom out,
  // locate the pinch from the collapse profile h ~ sigma*(P - x), rewind to
  // before the pinch window and re-traverse it with steps capped
  // proportionally to the distance from P.
  constexpr double kWatchRatio = 8.0;    // arm when h < h_ref / this
  constexpr double kDeepRatio = 64.0;    // collapse counts as deep below this
  constexpr double kRefDecay = 0.995;    // running-max decay per step
  constexpr double kPassGamma = 0.01;    // step cap: gamma * |P - x|
  constexpr double kCoreCheck = 1e-4;    // doubling check, fraction of sc
  constexpr int kMaxRewinds = 16;
  const double floor_h = std::max(1e-7 * len, 64.0 * hmin);
  double h_ref = 0.0;
  bool armed = false, in_window = false, settled = false;
  double arm_x = x0, pivot = 0.0, win_end = 0.0, dd_zone = 0.0;
  double last_win_end = x0;
  int rewinds = 0;

  while (!last) {
    if (h < hmin)
      throw IntegrateError("step size underflow (singularity approach)");
    if (in_window) {
      if (dir * (x - win_end) >= 0.0) {
        in_window = false;
        settled = false;  // no re-trigger until h recovers
      } else {
        const double cap = std::max(kPassGamma * std::abs(pivot - x), floor_h);
        if (h > cap) h = cap;
      }
    }
    if (dir * (x + dir * h - x1) >= 0.0) {
      h = std::abs(x1 - x);
      last = true;
    }
    const double hd = dir * h;
    StepOut full;
    if (!one_step(x, y, hd, k1, full)) {
      ++out.n_rejected;
      h *= 0.5;
      last = false;
      continue;
    }
    if (full.err > 1.0) {
      ++out.n_rejected;
      h *= std::max(0.2, 0.9 * std::pow(full.err, -0.2));
      last = false;
      continue;
    }

    // Inside the pinch core the embedded estimate cannot be trusted, so an
    // accepted step must also agree with its own two half-steps, whose
    // stages sample the pinch differently.  The halved result is adopted.
    const bool core =
        in_window && (std::abs(pivot - x) <= dd_zone ||
                      std::abs(pivot - (x + hd)) <= dd_zone);
    if (core) {
      StepOut h1, h2;
      if (!one_step(x, y, 0.5 * hd, k1, h1) ||
          !one_step(x + 0.5 * hd, h1.yn, 0.5 * hd, h1.k7, h2)) {
        ++out.n_rejected;
        h *= 0.5;
        last = false;
        continue;
      }
      bool pass = true;
      for (int i = 0; i < N; ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(y[i]), std::abs(full.yn[i]));
        const double noise = 50.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(y[i]), std::abs(full.yn[i]));
        if (std::abs(full.yn[i] - h2.yn[i]) > std::max(kCoreCheck * sc, noise))
          pass = false;
      }
      if (!pass) {
        ++out.n_rejected;
        h *= 0.5;
        last = false;
        continue;
      }
      out.steps.push_back(h1.ds);
      out.steps.push_back(h2.ds);
      full.yn = h2.yn;
      full.k7 = h2.k7;
    } else {
      out.steps.push_back(full.ds);
    }
    ++out.n_accepted;
    out.max_local_error = std::max(out.max_local_error, full.err);

    x += hd;
    y = full.yn;
    k1 = full.k7;  // FSAL
    for (int i = 0; i < N; ++i)
      if (std::abs(y[i]) > blowup) throw IntegrateError("solution blow-up");

    const double fac = std::min(
        10.0, std::max(0.2, 0.9 * std::pow(std::max(full.err, 1e-16), -0.2)));

    if (!last && !in_window) {
      const double h_acc = std::abs(hd);
      if (h_ref == 0.0) h_ref = h_acc;
      if (h_acc >= h_ref / kWatchRatio) {
        settled = true;
        armed = false;
        h_ref = std::max(kRefDecay * h_ref, h_acc);
      } else if (settled) {
        if (!armed) {
          armed = true;
          arm_x = x - hd;
        } else if (h_acc < h_ref / kDeepRatio && rewinds < kMaxRewinds) {
          // Deep collapse: a controlled approach keeps h below the
          // remaining distance, so the pinch has not been straddled yet.
          // Fit h_i = a + b*x_i over the collapse tail; the intercept
          // locates the pinch point P.
          pivot = x + dir * 2.0 * h_acc;
          {
            int n = 0;
            double prev = std::numeric_limits<double>::infinity();
            double sx = 0, sh = 0, sxx = 0, sxh = 0;
            for (int i = static_cast<int>(out.steps.size()) - 1;
                 i >= 0 && n < 8; --i) {
              const double hi = std::abs(out.steps[i].h);
              if (hi >= prev) break;
              const double xi = out.steps[i].x0;
              sx += xi;
              sh += hi;
              sxx += xi * xi;
              sxh += xi * hi;
              prev = hi;
              ++n;
            }
            if (n >= 4) {
              const double det = n * sxx - sx * sx;
              if (det != 0.0) {
                const double b = (n * sxh - sx * sh) / det;
                const double a = (sh - b * sx) / n;
                if (-b * dir > 0.02) {
                  const double p = -a / b;
                  const double ahead = dir * (p - x);
                  if (ahead > 0.0 && ahead < 100.0 * h_acc) pivot = p;
                }
              }
            }
          }
          double half = 2.0 * std::max(dir * (pivot - arm_x), 8.0 * h_acc);
          half = std::min(half, 0.25 * len);
          dd_zone = std::max(0.02 * half, 8.0 * floor_h);
          double wb = pivot - dir * half;
          win_end = pivot + dir * half;
          if (dir * (wb - last_win_end) < 0.0) wb = last_win_end;
          // Rewind to the last step boundary at or before the window start.
          std::size_t keep = out.steps.size();
          while (keep > 0 &&
                 dir * (out.steps[keep - 1].x0 + out.steps[keep - 1].h - wb) >
                     0.0)
            --keep;
          if (keep == 0) {
            x = x0;
            y = y0;
            out.steps.clear();
          } else {
            x = out.steps[keep].x0;
            for (int i = 0; i < N; ++i) y[i] = out.steps[keep].cont[0][i];
            out.steps.resize(keep);
          }
          stage(x, y, k1);
          in_window = true;
          armed = false;
          last_win_end = win_end;
          ++rewinds;
          h = std::max(floor_h, kPassGamma * std::abs(pivot - x));
          continue;
        }
      }
    }
    h = std::min(max_h, h * fac);
  }
  out.x_end = x1;
  out.y_end = y;
  return out;
}

using Traj1 = Traj<1>;
using Traj2 = Traj<2>;
using Traj4 = Traj<4>;

// u'' = phi(x, u, ux); tol must lie in [1e-13, 1e-4].
Traj2 integrate_ode2(const Expr& phi, double x0, double u0, double ux0,
                     double x_end, double tol);

// w' = rhs(x, w) with rhs over (Sym::X, Sym::W).
Traj1 integrate_ode1(const Expr& rhs, double x0, double w0, double x_end,
                     double tol);

struct DriftResult {
  double drift = 0.0;
  double reference = 0.0;  // I at the first admissible sample
  int samples_used = 0;
  int samples_skipped = 0;   // inadmissible tail (branch walls etc.)
  double x_first = 0.0, x_last = 0.0;
};

// Strict form: every sample must be admissible, else throws EvalError.
double first_integral_drift(const Expr& I, const Traj2& traj,
                            int grid = 129);

// Tolerant form used by trajectory reports: measures on the maximal
// admissible run that starts at the first admissible sample.
DriftResult drift_admissible_run(const Expr& I, const Traj2& traj,
                                 int grid = 129);

struct ClosedFormSolution {
  Expr u_of_x;  // over Sym::X with Sym::C1 / Sym::C2 placeholders
  double c1 = 0.0, c2 = 0.0;
  double a = 0.0, b = 1.0;  // validity interval
};

// max over a 200-point interior grid of |u'' - phi| / (1 + |phi|).
double check_closed_form(const ClosedFormSolution& sol, const Expr& phi,
                         int grid = 200);

// Residual of d/dx [w(x,traj)] - phi_red(x, w) with dense-output central
// differences; skips inadmissible samples.
double reduction_consistency(const Expr& w_closed, const Expr& phi_red,
                             const Traj2& traj, int grid = 101,
                             double fd_step = 1e-4);

}  // namespace lq
