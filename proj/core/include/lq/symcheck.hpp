#pragma once

// Verification of lambda-symmetry claims: determining-equation residuals,
// the bracket form of the symmetry condition, canonical representatives,
// and equivalence of symmetry pairs over the module of the evolution field.

#include <vector>

#include "lq/jetfield.hpp"
#include "lq/sample.hpp"

namespace lq {

// lambda_x + lambda_u ux + lambda_ux phi + lambda^2 - phi_u - lambda phi_ux.
Expr determining_residual(const Expr& lambda, const Expr& phi);

// [prol, A] - lambda*prol - mu*A with mu = -(A+lambda)(xi); the zero field
// exactly when the pair is a generalized symmetry.
JetField symmetry_defect(const LambdaPair& pair, const Expr& phi);

// lambda + A(Q)/Q, the lambda of the equivalent pair (d/du, .).
// Throws std::invalid_argument when Q is structurally zero.
Expr canonical_lambda(const LambdaPair& pair, const Expr& phi);

struct EquivalenceResult {
  bool equivalent = false;
  ZeroCheck determinant_check;
  std::vector<Point> suspected_loci;  // isolated determinant failures
};

// True iff det(A, prol(p1), prol(p2)) vanishes on the box by sampling.
// Isolated failures (< 1% of samples) trigger one re-sample away from the
// suspected loci before the verdict flips to false.
EquivalenceResult are_equivalent(const LambdaPair& p1, const LambdaPair& p2,
                                 const Expr& phi, const Box& box,
                                 double tol = 1e-9, int samples = 200,
                                 unsigned seed = 0);

}  // namespace lq
