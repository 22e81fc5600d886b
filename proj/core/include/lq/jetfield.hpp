#pragma once

// Vector-field calculus on the first-order jet space with coordinates
// (x, u, ux): the evolution field A of u'' = phi, lambda-prolongations,
// directional derivatives, and Lie brackets.

#include "lq/expr.hpp"

namespace lq {

struct JetField {
  Expr cx, cu, cux;  // coefficients of d/dx, d/du, d/dux
};

struct LambdaPair {
  Expr xi, eta;  // infinitesimals, may depend on (x, u, ux)
  Expr lambda;

  Expr characteristic() const;  // Q = eta - xi*ux
};

// A = d/dx + ux d/du + phi d/dux.
JetField evolution_field(const Expr& phi);

// xi d/dx + eta d/du + ((A+lambda)(eta) - (A+lambda)(xi) ux) d/dux.
JetField lambda_prolong(const LambdaPair& pair, const Expr& phi);

// V(f) = cx f_x + cu f_u + cux f_ux.
Expr apply(const JetField& V, const Expr& f);

// [V, W] componentwise: V(W_k) - W(V_k).
JetField lie_bracket(const JetField& V, const JetField& W);

JetField scale(const Expr& f, const JetField& V);
JetField subtract(const JetField& V, const JetField& W);

}  // namespace lq
