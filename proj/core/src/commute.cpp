#include "lq/commute.hpp"

namespace lq {

namespace {

JetField pointing_field(const Expr& lambda) {
  return {Expr::num(0), Expr::num(1), lambda};
}

void push_zero_checks(const std::string& name, const JetField& defect,
                      const Box& box, int samples, double tol, unsigned seed,
                      std::vector<ResidualEntry>* report) {
  if (!report) return;
  const char* comp[3] = {".dx", ".du", ".dux"};
  const Expr* c[3] = {&defect.cx, &defect.cu, &defect.cux};
  for (int i = 0; i < 3; ++i) {
    ResidualEntry entry;
    entry.name = name + comp[i];
    entry.tol = tol;
    entry.check = is_zero_sampled(*c[i], box, samples, tol, seed);
    report->push_back(std::move(entry));
  }
}

ResidualEntry checked_residual(const std::string& name, const Expr& r,
                               const Box& box, int samples, double tol,
                               unsigned seed) {
  ResidualEntry entry;
  entry.name = name;
  entry.tol = tol;
  entry.check = is_zero_sampled(r, box, samples, tol, seed);
  return entry;
}

}  // namespace

Expr rho_fn(const Expr& lambda1, const Expr& lambda2, const Box& box,
            double tol, int samples, unsigned seed) {
  Expr delta = lambda1 - lambda2;
  ZeroCheck zc = is_zero_sampled(delta, box, samples, tol, seed);
  if (zc.ok)
    throw EquivalentPairsError(
        "equivalent symmetry pairs: lambda1 - lambda2 vanishes on the box, "
        "so the pair spans no 2-dimensional module");
  JetField X1 = pointing_field(lambda1);
  JetField X2 = pointing_field(lambda2);
  return Expr::div(apply(X1, lambda2) - apply(X2, lambda1), delta);
}

std::vector<Expr> verify_f_pair(const Expr& f1, const Expr& f2,
                                const Expr& rho, const Expr& lambda1,
                                const Expr& lambda2) {
  JetField X1 = pointing_field(lambda1);
  JetField X2 = pointing_field(lambda2);
  return {apply(X2, f1) - rho * f1, apply(X1, f2) - rho * f2};
}

std::vector<Expr> verify_g_pair(const Expr& g1, const Expr& g2,
                                const Expr& rho1, const Expr& rho2,
                                const Expr& phi, const JetField& Y1,
                                const JetField& Y2) {
  JetField A = evolution_field(phi);
  return {apply(A, g1) - rho1 * g1, apply(Y2, g1), apply(A, g2) - rho2 * g2,
          apply(Y1, g2)};
}

CommutingData build_commuting(const CommuteInput& in, int samples, double tol,
                              unsigned seed,
                              std::vector<ResidualEntry>* report) {
  CommutingData d;
  d.lambda1 = in.lambda1;
  d.lambda2 = in.lambda2;
  d.f1 = in.f1;
  d.f2 = in.f2;
  d.g1 = in.g1;
  d.g2 = in.g2;
  d.rho = rho_fn(in.lambda1, in.lambda2, in.box, tol, samples, seed);

  d.A = evolution_field(in.phi);
  d.X1 = pointing_field(in.lambda1);
  d.X2 = pointing_field(in.lambda2);
  d.rho1 = in.lambda1 - Expr::div(apply(d.A, in.f1), in.f1);
  d.rho2 = in.lambda2 - Expr::div(apply(d.A, in.f2), in.f2);
  d.Y1 = scale(in.f1, d.X1);
  d.Y2 = scale(in.f2, d.X2);
  d.h1 = in.f1 * in.g1;
  d.h2 = in.f2 * in.g2;
  d.Z1 = scale(d.h1, d.X1);
  d.Z2 = scale(d.h2, d.X2);

  const char* fnames[2] = {"X2(f1)-rho*f1", "X1(f2)-rho*f2"};
  std::vector<Expr> fres =
      verify_f_pair(in.f1, in.f2, d.rho, in.lambda1, in.lambda2);
  for (int i = 0; i < 2; ++i) {
    ResidualEntry e =
        checked_residual(fnames[i], fres[i], in.box, samples, tol, seed);
    bool ok = e.check.ok;
    if (report) report->push_back(e);
    if (!ok)
      throw ResidualFailure("rescaling pair rejected: " + e.name,
                            std::move(e));
  }

  const char* gnames[4] = {"A(g1)-rho1*g1", "Y2(g1)", "A(g2)-rho2*g2",
                           "Y1(g2)"};
  std::vector<Expr> gres =
      verify_g_pair(in.g1, in.g2, d.rho1, d.rho2, in.phi, d.Y1, d.Y2);
  for (int i = 0; i < 4; ++i) {
    ResidualEntry e =
        checked_residual(gnames[i], gres[i], in.box, samples, tol, seed);
    bool ok = e.check.ok;
    if (report) report->push_back(e);
    if (!ok)
      throw ResidualFailure("straightening pair rejected: " + e.name,
                            std::move(e));
  }

  // The six commutation identities; each defect field should vanish.
  auto minus_scaled = [](JetField br, const Expr& c, const JetField& V) {
    return subtract(br, scale(c, V));
  };
  push_zero_checks("[Y1,A]-rho1*Y1",
                   minus_scaled(lie_bracket(d.Y1, d.A), d.rho1, d.Y1), in.box,
                   samples, tol, seed, report);
  push_zero_checks("[Y2,A]-rho2*Y2",
                   minus_scaled(lie_bracket(d.Y2, d.A), d.rho2, d.Y2), in.box,
                   samples, tol, seed, report);
  push_zero_checks("[Y1,Y2]", lie_bracket(d.Y1, d.Y2), in.box, samples, tol,
                   seed, report);
  push_zero_checks("[Z1,A]", lie_bracket(d.Z1, d.A), in.box, samples, tol,
                   seed, report);
  push_zero_checks("[Z2,A]", lie_bracket(d.Z2, d.A), in.box, samples, tol,
                   seed, report);
  push_zero_checks("[Z1,Z2]", lie_bracket(d.Z1, d.Z2), in.box, samples, tol,
                   seed, report);
  return d;
}

}  // namespace lq
