#include "lq/jetfield.hpp"

namespace lq {

Expr LambdaPair::characteristic() const {
  return eta - xi * Expr::var(Sym::Ux);
}

JetField evolution_field(const Expr& phi) {
  return {Expr::num(1), Expr::var(Sym::Ux), phi};
}

Expr apply(const JetField& V, const Expr& f) {
  return Expr::add({V.cx * diff(f, Sym::X), V.cu * diff(f, Sym::U),
                    V.cux * diff(f, Sym::Ux)});
}

JetField lambda_prolong(const LambdaPair& pair, const Expr& phi) {
  JetField A = evolution_field(phi);
  auto a_plus_lambda = [&](const Expr& f) {
    return apply(A, f) + pair.lambda * f;
  };
  Expr cux = a_plus_lambda(pair.eta) -
             a_plus_lambda(pair.xi) * Expr::var(Sym::Ux);
  return {pair.xi, pair.eta, cux};
}

JetField lie_bracket(const JetField& V, const JetField& W) {
  return {apply(V, W.cx) - apply(W, V.cx), apply(V, W.cu) - apply(W, V.cu),
          apply(V, W.cux) - apply(W, V.cux)};
}

JetField scale(const Expr& f, const JetField& V) {
  return {f * V.cx, f * V.cu, f * V.cux};
}

JetField subtract(const JetField& V, const JetField& W) {
  return {V.cx - W.cx, V.cu - W.cu, V.cux - W.cux};
}

}  // namespace lq
