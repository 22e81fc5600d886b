#pragma once

// Exact-1-form machinery: closedness residuals, path integration by
// adaptive Gauss-Kronrod over axis-aligned polylines, the w- and I-forms,
// integrating factors, the Jacobi last multiplier, and the reduced- and
// auxiliary-equation factors.

#include <functional>
#include <optional>
#include <vector>

#include "lq/commute.hpp"

namespace lq {

struct OneForm {
  std::vector<std::pair<Sym, Expr>> comps;  // ordered axes
  Box box;
  // Worst sampled closedness residual, filled by builders / check_closedness.
  double closedness_worst = -1.0;
};

struct QuadratureResult {
  double value = 0.0;
  std::vector<Bindings> path;  // polyline corners, base first
  double estimated_error = 0.0;
  double closedness_residual = -1.0;
};

class QuadFailure : public std::runtime_error {
 public:
  explicit QuadFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// One residual expression per unordered axis pair: d(comp_a)/db - d(comp_b)/da.
std::vector<Expr> closedness_residuals(const OneForm& form);

// Samples the residuals over the form's box and caches the worst value.
ZeroCheck check_closedness(OneForm& form, int samples = 200, double tol = 1e-8,
                           unsigned seed = 0);

// Axis-aligned path integral from base to target (both must bind every
// symbol the components use).  Segment order permutations are tried until
// every segment stays clear of the excluded loci; adaptive 15-point
// Gauss-Kronrod per segment at 1e-10 absolute tolerance.
QuadratureResult path_integrate(const OneForm& form, const Bindings& base,
                                const Bindings& target);

// dw1, dw2 over {u, ux} with x a fixed parameter:
//   (w1)_u = lambda1/(f2 (lambda1-lambda2)),  (w1)_ux = -1/(f2 (lambda1-lambda2))
//   (w2)_u = lambda2/(f1 (lambda2-lambda1)),  (w2)_ux = -1/(f1 (lambda2-lambda1))
std::pair<OneForm, OneForm> w_forms(const CommutingData& data, const Box& box,
                                    int samples = 200, double tol = 1e-8,
                                    unsigned seed = 0);

// Potential of a w-form at p in the fixed-x gauge w(x, u0, ux0) = 0.
double section_potential(const OneForm& wform, double x, double u0, double ux0,
                         double u, double ux);

// dI1, dI2 over {x, u, ux}:
//   dI1 = ((lambda1 ux - phi) dx - lambda1 du + dux) / (f2 g2 (lambda2-lambda1))
//   dI2 = ((lambda2 ux - phi) dx - lambda2 du + dux) / (f1 g1 (lambda1-lambda2))
std::pair<OneForm, OneForm> I_forms(const CommutingData& data, const Expr& phi,
                                    const Box& box, int samples = 200,
                                    double tol = 1e-8, unsigned seed = 0);

struct IntegratingFactors {
  Expr mu1, mu2;
  // Component identities against the I-forms: I_x - mu(lambda ux - phi),
  // I_u + lambda mu, I_ux - mu for each factor.
  std::vector<Expr> residuals;
};
IntegratingFactors integrating_factors(const CommutingData& data,
                                       const Expr& phi,
                                       const std::pair<OneForm, OneForm>& dI);

struct JacobiMultiplier {
  Expr M;             // 1/(f1 g1 f2 g2 (lambda2 - lambda1))
  Expr divergence;    // M_x + d/du(M ux) + d/dux(M phi)
  Expr cross_identity;  // M/(I1)_ux - 1/(f1 g1)
};
JacobiMultiplier jacobi_last_multiplier(const CommutingData& data,
                                        const Expr& phi,
                                        const std::pair<OneForm, OneForm>& dI);

struct ReducedFactors {
  Expr nu1, nu2;  // nu1(x, w1) = 1/g2(x, w1), nu2(x, w2) = 1/g1(x, w2); Sym::W
  Expr pde1, pde2;  // (nu_i)_x + d/dw(phi_i nu_i)
};
// g1_red, g2_red and phi1_red, phi2_red are expressions in (x, w).
ReducedFactors reduced_integrating_factors(const Expr& g1_red,
                                           const Expr& g2_red,
                                           const Expr& phi1_red,
                                           const Expr& phi2_red);

struct AuxiliaryFactor {
  Expr nu_tilde;     // 1/(f_i g_i) at ux = H(x, u, C); in (x, u, C)
  Expr pde;          // (nu~)_x + d/du(H nu~)
  std::optional<Expr> h_residual;  // I_closed|_{ux=H} - C when I_closed given
};
AuxiliaryFactor auxiliary_factor(const CommutingData& data, const Expr& H,
                                 int which,  // 1 or 2
                                 const std::optional<Expr>& I_closed);

struct ReducedRhs {
  Expr a_of_w;      // A(w_closed) in jet coordinates
  Expr candidate;   // the (x, w) closed form it must equal
  Expr match_residual;   // a_of_w - candidate(x, w := w_closed)
  double dependence_worst = 0.0;  // paired-point (x,w)-dependence check
  int pairs_used = 0;
};
// Verifies that A(w_i) depends only on (x, w_i): pairs of box points sharing
// (x, w_i) but differing in u are produced by a 1-D Newton solve on ux.
ReducedRhs reduced_rhs(const CommutingData& data, const Expr& phi,
                       const Expr& w_closed, const Expr& candidate_red,
                       const Box& box, int pairs = 24, double tol = 1e-6,
                       unsigned seed = 0);

}  // namespace lq
