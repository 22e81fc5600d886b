// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion exercises the public API end to end on the
// built-in catalog; tolerances are fixed here, not tunable from outside.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lq/catalog.hpp"
#include "lq/integrate.hpp"
#include "lq/quad.hpp"
#include "lq/symcheck.hpp"

using namespace lq;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

const Problem& by_name(const std::vector<Problem>& ps, const std::string& n) {
  for (const Problem& p : ps)
    if (p.name == n) return p;
  throw std::runtime_error("catalog problem missing: " + n);
}

// Commuting data rebuilt over the sampling box used for the one-forms.
CommutingData forms_data(const Problem& p) {
  CommuteInput ci = p.commute_input();
  ci.box = p.box_forms;
  return build_commuting(ci, 200, 1e-8, 0, nullptr);
}

double stddev(const std::vector<double>& d) {
  double m = 0.0;
  for (double v : d) m += v;
  m /= static_cast<double>(d.size());
  double s = 0.0;
  for (double v : d) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(d.size() - 1));
}

bool crit1(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst = 0.0, slowest = 0.0;
  for (const Problem& p : ps) {
    const auto t0 = Clock::now();
    ZeroCheck z1 =
        is_zero_sampled(determining_residual(p.lambda1, p.phi), p.box, 200, 1e-9);
    ZeroCheck z2 =
        is_zero_sampled(determining_residual(p.lambda2, p.phi), p.box, 200, 1e-9);
    const double dt = seconds_since(t0);
    ok = ok && z1.ok && z2.ok && dt < 1.0;
    worst = std::max({worst, z1.worst, z2.worst});
    slowest = std::max(slowest, dt);
  }
  *detail = "worst residual " + fmt(worst) + " at tol 1e-9, slowest problem " +
            fmt(slowest) + " s";
  return ok;
}

bool crit2(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst = 0.0, slowest = 0.0;
  for (const Problem& p : ps) {
    const auto t0 = Clock::now();
    std::vector<ResidualEntry> rep;
    build_commuting(p.commute_input(), 200, 1e-8, 0, &rep);
    const double dt = seconds_since(t0);
    for (const ResidualEntry& e : rep) {
      ok = ok && e.check.ok;
      worst = std::max(worst, e.check.worst);
    }
    ok = ok && dt < 5.0;
    slowest = std::max(slowest, dt);
  }
  *detail = "worst residual " + fmt(worst) + " at tol 1e-8, slowest problem " +
            fmt(slowest) + " s";
  return ok;
}

bool crit3(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst_sd = 0.0;
  int short_runs = 0;
  for (const std::string& name : {std::string("pg27_f0"), std::string("example9")}) {
    const Problem& p = by_name(ps, name);
    CommutingData data = forms_data(p);
    auto dw = w_forms(data, p.box_forms, 200, 1e-8);
    auto dI = I_forms(data, p.phi, p.box_forms, 200, 1e-8);
    auto pts = sample_box(p.box_forms, 400, 17);
    const Bindings base = p.box_forms.bindings_at(p.base);

    auto collect = [&](auto&& potential, const Expr& closed) {
      std::vector<double> d;
      for (const Bindings& b : pts) {
        if (d.size() == 50) break;
        try {
          d.push_back(potential(b) - eval(closed, b));
        } catch (const EvalError&) {
        } catch (const QuadFailure&) {
        }
      }
      if (d.size() < 50) {
        ++short_runs;
        return 1.0;
      }
      return stddev(d);
    };

    auto w_pot = [&](const OneForm& f) {
      return [&](const Bindings& b) {
        return section_potential(f, b[Sym::X], p.w_u0, p.w_ux0, b[Sym::U],
                                 b[Sym::Ux]);
      };
    };
    auto I_pot = [&](const OneForm& f) {
      return
          [&](const Bindings& b) { return path_integrate(f, base, b).value; };
    };

    const double sds[4] = {collect(w_pot(dw.first), *p.closed.w1),
                           collect(w_pot(dw.second), *p.closed.w2),
                           collect(I_pot(dI.first), *p.closed.I1),
                           collect(I_pot(dI.second), *p.closed.I2)};
    for (double s : sds) {
      ok = ok && s <= 1e-7;
      worst_sd = std::max(worst_sd, s);
    }
  }
  *detail = "worst stddev over 50 points " + fmt(worst_sd) + " at tol 1e-7";
  if (short_runs > 0)
    *detail += ", " + std::to_string(short_runs) + " forms short of 50 points";
  return ok;
}

bool crit4(const std::vector<Problem>& ps, std::string* detail) {
  struct Case {
    const char* name;
    double x0, u0, ux0, xe;
  };
  const Case cases[] = {{"pg27_f0", 0.0, 1.0, 0.0, 0.5},
                        {"pg27_airy", 0.0, 1.0, 0.0, 0.4},
                        {"example9", 0.0, 1.0, -1.0, 1.0}};
  bool ok = true;
  double worst = 0.0;
  for (const Case& c : cases) {
    const Problem& p = by_name(ps, c.name);
    Traj2 tr = integrate_ode2(p.phi, c.x0, c.u0, c.ux0, c.xe, 1e-10);
    const Expr& i1 = p.closed.I1_traj ? *p.closed.I1_traj : *p.closed.I1;
    const Expr& i2 = p.closed.I2_traj ? *p.closed.I2_traj : *p.closed.I2;
    const DriftResult d1 = drift_admissible_run(i1, tr);
    const DriftResult d2 = drift_admissible_run(i2, tr);
    ok = ok && d1.drift <= 1e-6 && d2.drift <= 1e-6;
    worst = std::max({worst, d1.drift, d2.drift});
  }
  *detail = "worst drift " + fmt(worst) + " at tol 1e-6";
  return ok;
}

bool crit5(const std::vector<Problem>& ps, std::string* detail) {
  const Problem& f0 = by_name(ps, "pg27_f0");
  const Problem& e9 = by_name(ps, "example9");
  const ClosedFormSolution sols[] = {
      {*f0.closed.solution, 0.3, 0.7, -0.3, 0.2},
      {*e9.closed.solution, 1.0, std::numbers::pi / 2.0, 0.0, 1.0}};
  const Problem* probs[] = {&f0, &e9};

  bool ok = true;
  double worst_res = 0.0, worst_gap = 0.0;
  for (int i = 0; i < 2; ++i) {
    const ClosedFormSolution& s = sols[i];
    const Expr& phi = probs[i]->phi;
    const double res = check_closed_form(s, phi);
    ok = ok && res <= 1e-9;
    worst_res = std::max(worst_res, res);

    auto closed_at = [&](double x) {
      Bindings b;
      b.bind(Sym::X, x);
      b.bind(Sym::C1, s.c1);
      b.bind(Sym::C2, s.c2);
      return std::pair<double, double>{eval(s.u_of_x, b),
                                       eval(diff(s.u_of_x, Sym::X), b)};
    };
    const auto [ua, uxa] = closed_at(s.a);
    Traj2 tr = integrate_ode2(phi, s.a, ua, uxa, s.b, 1e-10);
    const auto [ub, uxb] = closed_at(s.b);
    const double gap =
        std::max(std::abs(tr.y_end[0] - ub), std::abs(tr.y_end[1] - uxb));
    ok = ok && gap <= 1e-6;
    worst_gap = std::max(worst_gap, gap);
  }
  *detail = "worst grid residual " + fmt(worst_res) +
            " at tol 1e-9, worst endpoint gap " + fmt(worst_gap) +
            " at tol 1e-6";
  return ok;
}

bool crit6(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst_comp = 0.0, worst_div = 0.0, worst_cross = 0.0;
  for (const Problem& p : ps) {
    CommutingData data = forms_data(p);
    auto dI = I_forms(data, p.phi, p.box_forms, 200, 1e-8);
    IntegratingFactors mf = integrating_factors(data, p.phi, dI);
    for (const Expr& r : mf.residuals) {
      ZeroCheck z = is_zero_sampled(r, p.box_forms, 200, 1e-8);
      ok = ok && z.ok;
      worst_comp = std::max(worst_comp, z.worst);
    }
    JacobiMultiplier jm = jacobi_last_multiplier(data, p.phi, dI);
    ZeroCheck zd = is_zero_sampled(jm.divergence, p.box_forms, 200, 1e-9);
    ZeroCheck zc = is_zero_sampled(jm.cross_identity, p.box_forms, 200, 1e-8);
    ok = ok && zd.ok && zc.ok;
    worst_div = std::max(worst_div, zd.worst);
    worst_cross = std::max(worst_cross, zc.worst);
  }
  *detail = "components " + fmt(worst_comp) + " (1e-8), divergence " +
            fmt(worst_div) + " (1e-9), cross " + fmt(worst_cross) + " (1e-8)";
  return ok;
}

bool crit7(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst_red = 0.0, worst_aux = 0.0;
  for (const Problem& p : ps) {
    ReducedFactors rf = reduced_integrating_factors(p.g1_red, p.g2_red,
                                                    p.phi1_red, p.phi2_red);
    ZeroCheck z1 = is_zero_sampled(rf.pde1, p.box_red1, 200, 1e-8);
    ZeroCheck z2 = is_zero_sampled(rf.pde2, p.box_red2, 200, 1e-8);
    ok = ok && z1.ok && z2.ok;
    worst_red = std::max({worst_red, z1.worst, z2.worst});
  }
  {
    const Problem& pg = by_name(ps, "pg27_general");
    CommutingData data = forms_data(pg);
    AuxiliaryFactor af =
        auxiliary_factor(data, *pg.closed.H1, 1, pg.closed.I1);
    ZeroCheck zp = is_zero_sampled(af.pde, *pg.box_aux, 200, 1e-8);
    ok = ok && zp.ok;
    worst_aux = std::max(worst_aux, zp.worst);
    if (af.h_residual) {
      ZeroCheck zh = is_zero_sampled(*af.h_residual, *pg.box_aux, 200, 1e-8);
      ok = ok && zh.ok;
      worst_aux = std::max(worst_aux, zh.worst);
    }
  }
  *detail = "reduced PDE worst " + fmt(worst_red) + ", auxiliary worst " +
            fmt(worst_aux) + " at tol 1e-8";
  return ok;
}

bool crit8(const std::vector<Problem>& ps, std::string* detail) {
  bool ok = true;
  double worst = 0.0;
  for (const Problem& p : ps) {
    for (const StandardIc& ic : p.standard_ics) {
      Traj2 tr = integrate_ode2(p.phi, ic.x0, ic.u0, ic.ux0, ic.x_end, 1e-10);
      const double r1 = reduction_consistency(*p.closed.w1, p.phi1_red, tr);
      const double r2 = reduction_consistency(*p.closed.w2, p.phi2_red, tr);
      ok = ok && r1 <= 1e-5 && r2 <= 1e-5;
      worst = std::max({worst, r1, r2});
    }
  }
  *detail = "worst residual " + fmt(worst) + " at tol 1e-5";
  return ok;
}

bool crit9(const std::vector<Problem>& ps, std::string* detail) {
  const Problem& f0 = by_name(ps, "pg27_f0");
  const LambdaPair canon1{Expr::num(0), Expr::num(1), f0.lambda1};
  const LambdaPair canon2{Expr::num(0), Expr::num(1), f0.lambda2};
  const LambdaPair rescaled{Expr::num(0), parse("u^2"),
                            parse("-(ux + u^2 - 1)/u")};
  EquivalenceResult same = are_equivalent(canon1, rescaled, f0.phi, f0.box);
  EquivalenceResult diff2 = are_equivalent(canon1, canon2, f0.phi, f0.box);
  *detail = std::string("rescaled pair ") +
            (same.equivalent ? "equivalent" : "NOT equivalent") +
            ", second symmetry " +
            (diff2.equivalent ? "equivalent" : "not equivalent");
  return same.equivalent && !diff2.equivalent;
}

bool crit10(std::string* detail) {
  const std::string cli = LQ_CLI_PATH;
  const std::string fa = "lq_accept_run_a.json";
  const std::string fb = "lq_accept_run_b.json";
  const int rc1 = std::system((cli + " run pg27_f0 --out " + fa).c_str());
  const int rc2 = std::system((cli + " run pg27_f0 --out " + fb).c_str());
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(fa), b = slurp(fb);
  std::remove(fa.c_str());
  std::remove(fb.c_str());
  const bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  *detail = "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) +
            ", " + std::to_string(a.size()) + " bytes, " +
            (a == b ? "identical" : "DIFFERENT");
  return ok;
}

}  // namespace

int main() {
  std::vector<Problem> ps;
  try {
    for (const std::string& n : catalog_names()) ps.push_back(get_problem(n));
  } catch (const std::exception& e) {
    std::printf("FAIL criterion  0: catalog construction -- %s\n", e.what());
    return 1;
  }

  int failures = 0;
  auto run = [&](int n, const char* label, auto&& fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(&detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s -- %s\n", ok ? "PASS" : "FAIL", n, label,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };

  run(1, "determining equation residuals across the catalog",
      [&](std::string* d) { return crit1(ps, d); });
  run(2, "commuting pair construction and bracket identities",
      [&](std::string* d) { return crit2(ps, d); });
  run(3, "one-form potentials match closed expressions",
      [&](std::string* d) { return crit3(ps, d); });
  run(4, "first-integral drift along integrated trajectories",
      [&](std::string* d) { return crit4(ps, d); });
  run(5, "closed-form solutions certified and matched at endpoints",
      [&](std::string* d) { return crit5(ps, d); });
  run(6, "integrating factors, last multiplier and cross identity",
      [&](std::string* d) { return crit6(ps, d); });
  run(7, "reduced and auxiliary equation integrating factors",
      [&](std::string* d) { return crit7(ps, d); });
  run(8, "reduction consistency along standard trajectories",
      [&](std::string* d) { return crit8(ps, d); });
  run(9, "equivalence classification of symmetry pairs",
      [&](std::string* d) { return crit9(ps, d); });
  run(10, "command line reports are byte-identical across reruns",
      [&](std::string* d) { return crit10(d); });

  return failures == 0 ? 0 : 1;
}
