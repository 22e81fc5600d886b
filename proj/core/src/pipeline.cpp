#include "lq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "lq/symcheck.hpp"

namespace lq {

namespace {

using Json = nlohmann::ordered_json;

const char* route_name(Route r) {
  switch (r) {
    case Route::Central: return "central";
    case Route::Lateral: return "lateral";
    case Route::Both: return "both";
  }
  return "?";
}

Json entry_json(const std::string& name, double value, double tol,
                const ZeroCheck* zc = nullptr) {
  Json e;
  e["name"] = name;
  e["value"] = value;
  e["tol"] = tol;
  e["pass"] = value <= tol;
  if (zc) {
    e["witness"] = Json::array({zc->worst_point[Sym::X],
                                zc->worst_point[Sym::U],
                                zc->worst_point[Sym::Ux]});
    e["points"] = zc->points_used;
  }
  return e;
}

struct Section {
  Json entries = Json::array();
  bool pass = true;

  void add(Json e) {
    pass = pass && e.at("pass").get<bool>();
    entries.push_back(std::move(e));
  }
  void add_zero(const std::string& name, const Expr& e, const Box& box,
                const RunOptions& opt, double tol) {
    ZeroCheck zc = is_zero_sampled(e, box, opt.samples, tol, opt.seed);
    add(entry_json(name, zc.worst, tol, &zc));
  }
  void fail(const std::string& name, const std::string& msg) {
    Json e;
    e["name"] = name;
    e["error"] = msg;
    e["pass"] = false;
    pass = false;
    entries.push_back(std::move(e));
  }
  Json json() const {
    Json s;
    s["pass"] = pass;
    s["entries"] = entries;
    return s;
  }
};

double stddev(const std::vector<double>& d) {
  if (d.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double s = 0.0;
  for (double x : d) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(d.size() - 1));
}

// The potential reproduces the closed form up to one additive constant;
// the sample standard deviation of the differences is the residual.
void w_potential_entry(Section& sec, const std::string& name,
                       const OneForm& form, const Expr& closed,
                       const Problem& p, const RunOptions& opt, int points,
                       double tol) {
  std::vector<Bindings> pts;
  try {
    pts = sample_box(form.box, points, opt.seed);
  } catch (const BoxExhausted& ex) {
    sec.fail(name, ex.what());
    return;
  }
  std::vector<double> diffs;
  for (const Bindings& b : pts) {
    try {
      double pot = section_potential(form, b[Sym::X], p.w_u0, p.w_ux0,
                                     b[Sym::U], b[Sym::Ux]);
      diffs.push_back(pot - eval(closed, b));
    } catch (const EvalError&) {
      continue;
    } catch (const QuadFailure&) {
      continue;
    }
  }
  if (diffs.size() < 2) {
    sec.fail(name, "fewer than two admissible potential samples");
    return;
  }
  Json e = entry_json(name, stddev(diffs), tol);
  e["points"] = static_cast<int>(diffs.size());
  sec.add(std::move(e));
}

void I_potential_entry(Section& sec, const std::string& name,
                       const OneForm& form, const Expr& closed,
                       const Problem& p, const RunOptions& opt, int points,
                       double tol) {
  std::vector<Bindings> pts;
  try {
    pts = sample_box(form.box, points, opt.seed);
  } catch (const BoxExhausted& ex) {
    sec.fail(name, ex.what());
    return;
  }
  Bindings base = form.box.bindings_at(p.base);
  std::vector<double> diffs;
  for (const Bindings& b : pts) {
    try {
      double pot = path_integrate(form, base, b).value;
      diffs.push_back(pot - eval(closed, b));
    } catch (const EvalError&) {
      continue;
    } catch (const QuadFailure&) {
      continue;
    }
  }
  if (diffs.size() < 2) {
    sec.fail(name, "fewer than two admissible potential samples");
    return;
  }
  Json e = entry_json(name, stddev(diffs), tol);
  e["points"] = static_cast<int>(diffs.size());
  sec.add(std::move(e));
}

constexpr int kPotentialPoints = 16;
constexpr double kFormTol = 1e-8;

}  // namespace

namespace {
Json trajectory_json(const Problem& p, const IcRequest& ic, double itol,
                     std::optional<std::pair<double, double>> c12,
                     const std::string& csv_path, bool* pass);
}  // namespace

RunResult run_pipeline(const Problem& p, const RunOptions& opt) {
  Json report;
  report["problem"] = p.name;
  Json options;
  options["tol"] = opt.tol;
  options["samples"] = opt.samples;
  options["seed"] = opt.seed;
  options["route"] = route_name(opt.route);
  report["options"] = options;
  Json steps;
  bool pass = true;
  const bool central = opt.route != Route::Lateral;
  const bool lateral = opt.route != Route::Central;

  // Step 0: both pairs are lambda-symmetries and are not equivalent.
  Section s0;
  try {
    s0.add_zero("determining(lambda1)", determining_residual(p.lambda1, p.phi),
                p.box, opt, opt.tol);
    s0.add_zero("determining(lambda2)", determining_residual(p.lambda2, p.phi),
                p.box, opt, opt.tol);
    LambdaPair c1{Expr::num(0), Expr::num(1), p.lambda1};
    LambdaPair c2{Expr::num(0), Expr::num(1), p.lambda2};
    JetField d1 = symmetry_defect(c1, p.phi);
    JetField d2 = symmetry_defect(c2, p.phi);
    s0.add_zero("defect(lambda1).du", d1.cu, p.box, opt, opt.tol);
    s0.add_zero("defect(lambda1).dux", d1.cux, p.box, opt, opt.tol);
    s0.add_zero("defect(lambda2).du", d2.cu, p.box, opt, opt.tol);
    s0.add_zero("defect(lambda2).dux", d2.cux, p.box, opt, opt.tol);
    EquivalenceResult eq =
        are_equivalent(c1, c2, p.phi, p.box, opt.tol, opt.samples, opt.seed);
    Json e;
    e["name"] = "pairs_non_equivalent";
    e["value"] = eq.determinant_check.worst;
    e["pass"] = !eq.equivalent;
    s0.add(std::move(e));
  } catch (const std::exception& ex) {
    s0.fail("step0", ex.what());
  }
  steps["symmetries"] = s0.json();
  pass = pass && s0.pass;

  // Step 1: rho, the rescaling pair, the straightening pair, and the six
  // commutation identities.
  CommutingData data;
  bool have_data = false;
  Section s1;
  try {
    std::vector<ResidualEntry> entries;
    data = build_commuting(p.commute_input(), opt.samples, opt.tol, opt.seed,
                           &entries);
    have_data = true;
    for (const ResidualEntry& re : entries)
      s1.add(entry_json(re.name, re.check.worst, re.tol, &re.check));
  } catch (const ResidualFailure& ex) {
    s1.add(entry_json(ex.entry().name, ex.entry().check.worst, ex.entry().tol,
                      &ex.entry().check));
    s1.fail("commuting", ex.what());
  } catch (const std::exception& ex) {
    s1.fail("commuting", ex.what());
  }
  steps["commuting"] = s1.json();
  pass = pass && s1.pass;

  // Step 2: straightened coordinates; dw closedness, agreement with the
  // closed forms, and the reduced right-hand sides.
  Section s2;
  if (have_data) {
    try {
      auto dw = w_forms(data, p.box_forms, opt.samples, kFormTol, opt.seed);
      s2.add(entry_json("closed(dw1)", dw.first.closedness_worst, kFormTol));
      s2.add(entry_json("closed(dw2)", dw.second.closedness_worst, kFormTol));
      if (p.closed.w1)
        w_potential_entry(s2, "potential(dw1)-w1", dw.first, *p.closed.w1, p,
                          opt, kPotentialPoints, 1e-7);
      if (p.closed.w2)
        w_potential_entry(s2, "potential(dw2)-w2", dw.second, *p.closed.w2, p,
                          opt, kPotentialPoints, 1e-7);
      if (p.closed.w1) {
        ReducedRhs rr = reduced_rhs(data, p.phi, *p.closed.w1, p.phi1_red,
                                    p.box, 24, 1e-6, opt.seed);
        s2.add_zero("A(w1)-phi1_red", rr.match_residual, p.box, opt, opt.tol);
        Json e = entry_json("A(w1) (x,w)-dependence", rr.dependence_worst, 1e-6);
        e["pairs"] = rr.pairs_used;
        s2.add(std::move(e));
      }
      if (p.closed.w2) {
        ReducedRhs rr = reduced_rhs(data, p.phi, *p.closed.w2, p.phi2_red,
                                    p.box, 24, 1e-6, opt.seed);
        s2.add_zero("A(w2)-phi2_red", rr.match_residual, p.box, opt, opt.tol);
        Json e = entry_json("A(w2) (x,w)-dependence", rr.dependence_worst, 1e-6);
        e["pairs"] = rr.pairs_used;
        s2.add(std::move(e));
      }
    } catch (const std::exception& ex) {
      s2.fail("straightening", ex.what());
    }
  } else {
    s2.fail("straightening", "commuting data unavailable");
  }
  steps["straightening"] = s2.json();
  pass = pass && s2.pass;

  if (central) {
    // Central route: first integrals by quadrature, integrating factors,
    // Jacobi last multiplier.
    Section s3;
    if (have_data) {
      try {
        auto dI =
            I_forms(data, p.phi, p.box_forms, opt.samples, kFormTol, opt.seed);
        s3.add(entry_json("closed(dI1)", dI.first.closedness_worst, kFormTol));
        s3.add(
            entry_json("closed(dI2)", dI.second.closedness_worst, kFormTol));
        if (p.closed.I1)
          I_potential_entry(s3, "potential(dI1)-I1", dI.first, *p.closed.I1, p,
                            opt, kPotentialPoints, 1e-7);
        if (p.closed.I2)
          I_potential_entry(s3, "potential(dI2)-I2", dI.second, *p.closed.I2,
                            p, opt, kPotentialPoints, 1e-7);
        IntegratingFactors mf = integrating_factors(data, p.phi, dI);
        const char* mu_names[6] = {"I1_x-mu1*(lambda1*ux-phi)",
                                   "I1_u+lambda1*mu1",
                                   "I1_ux-mu1",
                                   "I2_x-mu2*(lambda2*ux-phi)",
                                   "I2_u+lambda2*mu2",
                                   "I2_ux-mu2"};
        for (int i = 0; i < 6; ++i)
          s3.add_zero(mu_names[i], mf.residuals[i], p.box, opt, opt.tol);
        if (p.closed.mu1)
          s3.add_zero("mu1-closed", mf.mu1 - *p.closed.mu1, p.box, opt,
                      opt.tol);
        if (p.closed.mu2)
          s3.add_zero("mu2-closed", mf.mu2 - *p.closed.mu2, p.box, opt,
                      opt.tol);
        JacobiMultiplier jm = jacobi_last_multiplier(data, p.phi, dI);
        s3.add_zero("div(M)", jm.divergence, p.box, opt, opt.tol);
        s3.add_zero("M/I1_ux-1/(f1*g1)", jm.cross_identity, p.box, opt,
                    opt.tol);
        if (p.closed.M)
          s3.add_zero("M-closed", jm.M - *p.closed.M, p.box, opt, opt.tol);
      } catch (const std::exception& ex) {
        s3.fail("first_integrals", ex.what());
      }
    } else {
      s3.fail("first_integrals", "commuting data unavailable");
    }
    steps["first_integrals"] = s3.json();
    pass = pass && s3.pass;
  }

  if (lateral) {
    // Lateral route: integrating factors of the reduced equations and of
    // the auxiliary first-order family.
    Section s4;
    try {
      ReducedFactors rf = reduced_integrating_factors(p.g1_red, p.g2_red,
                                                      p.phi1_red, p.phi2_red);
      s4.add_zero("nu1: pde(x,w1)", rf.pde1, p.box_red1, opt, opt.tol);
      s4.add_zero("nu2: pde(x,w2)", rf.pde2, p.box_red2, opt, opt.tol);
      if (have_data && p.closed.H1 && p.box_aux) {
        AuxiliaryFactor af =
            auxiliary_factor(data, *p.closed.H1, 1, p.closed.I1);
        s4.add_zero("nu~1: pde(x,u)", af.pde, *p.box_aux, opt, opt.tol);
        if (af.h_residual)
          s4.add_zero("I1(ux=H1)-C", *af.h_residual, *p.box_aux, opt, opt.tol);
      }
      if (have_data && p.closed.H2 && p.box_aux) {
        AuxiliaryFactor af =
            auxiliary_factor(data, *p.closed.H2, 2, p.closed.I2);
        s4.add_zero("nu~2: pde(x,u)", af.pde, *p.box_aux, opt, opt.tol);
        if (af.h_residual)
          s4.add_zero("I2(ux=H2)-C", *af.h_residual, *p.box_aux, opt, opt.tol);
      }
    } catch (const std::exception& ex) {
      s4.fail("reduced_factors", ex.what());
    }
    steps["reduced_factors"] = s4.json();
    pass = pass && s4.pass;
  }

  report["steps"] = steps;

  if (!p.standard_ics.empty()) {
    // Numeric cross-check: drift of both first integrals and consistency of
    // both reductions along the stock trajectories.
    Json trajs = Json::array();
    const double itol = std::clamp(std::min(opt.tol, 1e-10), 1e-13, 1e-4);
    for (const StandardIc& sic : p.standard_ics) {
      IcRequest ic{sic.x0, sic.u0, sic.ux0, sic.x_end};
      bool tpass = true;
      trajs.push_back(trajectory_json(p, ic, itol, std::nullopt, "", &tpass));
      pass = pass && tpass;
    }
    report["trajectories"] = trajs;
  }

  report["pass"] = pass;
  RunResult result;
  result.pass = pass;
  result.report_json = report.dump(2) + "\n";
  return result;
}

namespace {

void drift_entries(Section& sec, const std::string& label, const Expr& I,
                   const Traj2& traj, double tol) {
  try {
    DriftResult dr = drift_admissible_run(I, traj);
    Json e = entry_json(label, dr.drift, tol);
    e["reference"] = dr.reference;
    e["x_first"] = dr.x_first;
    e["x_last"] = dr.x_last;
    e["samples"] = dr.samples_used;
    e["skipped"] = dr.samples_skipped;
    sec.add(std::move(e));
  } catch (const std::exception& ex) {
    sec.fail(label, ex.what());
  }
}

// Drift of both first integrals and consistency of both reductions along
// one trajectory; shared by the run report and the verify report.
Json trajectory_json(const Problem& p, const IcRequest& ic, double itol,
                     std::optional<std::pair<double, double>> c12,
                     const std::string& csv_path, bool* pass) {
  Json tj;
  tj["ic"] = Json::array({ic.x0, ic.u0, ic.ux0});
  tj["x_end"] = ic.x_end;
  Section sec;
  Traj2 traj;
  bool integrated = false;
  try {
    (void)eval(p.phi, Bindings(ic.x0, ic.u0, ic.ux0));
    traj = integrate_ode2(p.phi, ic.x0, ic.u0, ic.ux0, ic.x_end, itol);
    integrated = true;
    tj["steps_accepted"] = traj.n_accepted;
    tj["u_end"] = traj.y_end[0];
    tj["ux_end"] = traj.y_end[1];
  } catch (const EvalError& ex) {
    sec.fail("integrate",
             std::string("inadmissible initial condition: ") + ex.what());
  } catch (const std::exception& ex) {
    sec.fail("integrate", ex.what());
  }

  if (integrated) {
    const Expr* I1 = p.closed.I1_traj ? &*p.closed.I1_traj
                     : p.closed.I1    ? &*p.closed.I1
                                      : nullptr;
    const Expr* I2 = p.closed.I2_traj ? &*p.closed.I2_traj
                     : p.closed.I2    ? &*p.closed.I2
                                      : nullptr;
    if (I1) drift_entries(sec, "drift(I1)", *I1, traj, 1e-6);
    if (I2) drift_entries(sec, "drift(I2)", *I2, traj, 1e-6);

    if (p.closed.w1)
      try {
        double r = reduction_consistency(*p.closed.w1, p.phi1_red, traj);
        sec.add(entry_json("reduction(w1)", r, 1e-5));
      } catch (const std::exception& ex) {
        sec.fail("reduction(w1)", ex.what());
      }
    if (p.closed.w2)
      try {
        double r = reduction_consistency(*p.closed.w2, p.phi2_red, traj);
        sec.add(entry_json("reduction(w2)", r, 1e-5));
      } catch (const std::exception& ex) {
        sec.fail("reduction(w2)", ex.what());
      }

    if (c12 && p.closed.solution) {
      try {
        ClosedFormSolution sol{*p.closed.solution, c12->first, c12->second,
                               std::min(ic.x0, ic.x_end),
                               std::max(ic.x0, ic.x_end)};
        sec.add(entry_json("closed_form_residual",
                           check_closed_form(sol, p.phi), 1e-9));
        Bindings bend;
        bend.bind(Sym::X, ic.x_end);
        bend.bind(Sym::C1, c12->first);
        bend.bind(Sym::C2, c12->second);
        double ue = eval(*p.closed.solution, bend);
        double uxe = eval(diff(*p.closed.solution, Sym::X), bend);
        sec.add(entry_json("endpoint_u", std::abs(ue - traj.y_end[0]), 1e-6));
        sec.add(
            entry_json("endpoint_ux", std::abs(uxe - traj.y_end[1]), 1e-6));
      } catch (const std::exception& ex) {
        sec.fail("closed_form", ex.what());
      }
    }

    if (!csv_path.empty()) {
      std::ofstream out(csv_path);
      out << "x,u,ux\n";
      out.precision(17);
      for (int i = 0; i < 129; ++i) {
        double x = ic.x0 + (ic.x_end - ic.x0) * i / 128.0;
        auto y = traj.at(x);
        out << x << ',' << y[0] << ',' << y[1] << '\n';
      }
      tj["csv"] = csv_path;
    }
  }

  tj["checks"] = sec.json();
  *pass = sec.pass;
  return tj;
}

}  // namespace

RunResult verify_trajectories(const Problem& p,
                              const std::vector<IcRequest>& ics,
                              const RunOptions& opt,
                              std::optional<std::pair<double, double>> c12,
                              const std::string& csv_prefix) {
  Json report;
  report["problem"] = p.name;
  Json options;
  options["tol"] = opt.tol;
  options["samples"] = opt.samples;
  options["seed"] = opt.seed;
  options["route"] = route_name(opt.route);
  report["options"] = options;
  Json trajs = Json::array();
  bool pass = true;
  const double itol = std::clamp(opt.tol, 1e-13, 1e-4);

  for (std::size_t k = 0; k < ics.size(); ++k) {
    std::string csv_path;
    if (!csv_prefix.empty())
      csv_path = csv_prefix + p.name + "_ic" + std::to_string(k) + ".csv";
    bool tpass = true;
    trajs.push_back(trajectory_json(p, ics[k], itol, c12, csv_path, &tpass));
    pass = pass && tpass;
  }

  report["trajectories"] = trajs;
  report["pass"] = pass;
  RunResult result;
  result.pass = pass;
  result.report_json = report.dump(2) + "\n";
  return result;
}

}  // namespace lq
