#pragma once

// Built-in fully specified problems, and the numerically generated linear
// bases used by the general-F family.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lq/integrate.hpp"
#include "lq/quad.hpp"

namespace lq {

struct LinearBasis {
  // State (psi1, psi1', psi2, psi2') of psi'' = q(x) psi with initial data
  // (1,0) and (0,1) at x0, so the Wronskian is exactly 1 at x0.
  std::shared_ptr<const Traj4> traj;
  double x0 = 0.0;
  double span_lo = 0.0, span_hi = 1.0;
  double wronskian_drift = 0.0;  // max |W(x) - 1| over the span

  std::array<double, 4> values(double x) const { return traj->at(x); }
};

// Integrates the pair of initial-value problems; throws on failure.
LinearBasis make_linear_basis(const Expr& q, double x0, double span_lo,
                              double span_hi, double tol = 1e-13);

struct BasisRecipe {
  std::string q_psi, q_theta;  // rendered expressions in x
  double x0 = 0.0;
  double span_lo = 0.0, span_hi = 1.0;
};

struct ClosedForms {
  std::optional<Expr> w1, w2;
  std::optional<Expr> I1, I2;
  // Trajectory-branch representatives of the same integrals, used for drift
  // on standard initial conditions whose orbit leaves the I1/I2 branch.
  std::optional<Expr> I1_traj, I2_traj;
  std::optional<Expr> mu1, mu2, M;
  std::optional<Expr> H1, H2;        // over (x, u, C)
  std::optional<Expr> solution;      // over (x, C1, C2)
};

struct StandardIc {
  double x0 = 0.0, u0 = 0.0, ux0 = 0.0, x_end = 1.0;
};

struct Problem {
  std::string name;
  Expr phi;
  std::optional<Expr> F;
  Expr lambda1, lambda2;
  Expr f1, f2;
  Expr g1, g2;            // jet coordinates
  Expr g1_red, g2_red;    // over (x, w): g1(x, w2), g2(x, w1)
  Expr phi1_red, phi2_red;  // reduced right-hand sides over (x, w)
  Box box;        // identity checks
  Box box_forms;  // potential sampling (criteria on closed forms)
  Box box_red1, box_red2;       // (x, w) boxes for the reduced factor PDEs
  std::optional<Box> box_aux;   // (x, u) box with C bound, for nu-tilde
  Point base;                   // base point for I-potentials
  double w_u0 = 1.0, w_ux0 = 0.0;  // w-gauge base section
  ClosedForms closed;
  std::shared_ptr<const ExtFamily> basis;  // null when no linear basis
  std::optional<BasisRecipe> basis_recipe;
  std::vector<StandardIc> standard_ics;

  CommuteInput commute_input() const {
    return CommuteInput{phi, lambda1, lambda2, f1, f2, g1, g2, box};
  }
};

std::vector<std::string> catalog_names();

// Names: pg27_general (optional ":<F-expr>" suffix), pg27_f0, pg27_airy,
// example9.  Throws std::invalid_argument for unknown names.
Problem get_problem(const std::string& name);

// JSON round-trip; export of a catalog problem re-imports to an equivalent
// problem (bases are rebuilt from the embedded recipe).
std::string export_problem(const Problem& p);
Problem import_problem(const std::string& json_text);

}  // namespace lq
