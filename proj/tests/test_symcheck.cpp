// Determining-equation residuals, the bracket defect, canonical
// representatives, and A-equivalence classification on catalog problems.

#include <stdexcept>

#include "doctest.h"
#include "lq/catalog.hpp"
#include "lq/symcheck.hpp"

using namespace lq;

TEST_SUITE("symcheck") {

TEST_CASE("catalog lambdas satisfy their determining equations") {
  for (const std::string& name :
       {"pg27_f0", "pg27_airy", "pg27_general", "example9"}) {
    Problem p = get_problem(name);
    CAPTURE(name);
    CHECK(is_zero_sampled(determining_residual(p.lambda1, p.phi), p.box, 200,
                          1e-9)
              .ok);
    CHECK(is_zero_sampled(determining_residual(p.lambda2, p.phi), p.box, 200,
                          1e-9)
              .ok);
  }
}

TEST_CASE("a non-symmetry fails the determining equation") {
  Problem p = get_problem("pg27_f0");
  Expr bogus = parse("x + u");
  CHECK_FALSE(is_zero_sampled(determining_residual(bogus, p.phi), p.box).ok);
}

TEST_CASE("bracket defect vanishes exactly for canonical symmetry pairs") {
  Problem p = get_problem("pg27_f0");
  for (const Expr& lambda : {p.lambda1, p.lambda2}) {
    LambdaPair pair{Expr::num(0), Expr::num(1), lambda};
    JetField d = symmetry_defect(pair, p.phi);
    CHECK(is_zero_sampled(d.cx, p.box, 100).ok);
    CHECK(is_zero_sampled(d.cu, p.box, 100).ok);
    CHECK(is_zero_sampled(d.cux, p.box, 100).ok);
  }
}

TEST_CASE("bracket defect vanishes for a genuine point symmetry") {
  // The autonomous equation admits translation in x: (d/dx, lambda = 0).
  Problem p = get_problem("example9");
  LambdaPair shift{Expr::num(1), Expr::num(0), Expr::num(0)};
  JetField d = symmetry_defect(shift, p.phi);
  CHECK(is_zero_sampled(d.cx, p.box, 100).ok);
  CHECK(is_zero_sampled(d.cu, p.box, 100).ok);
  CHECK(is_zero_sampled(d.cux, p.box, 100).ok);
}

TEST_CASE("canonical representative of the x-translation pair") {
  // Q = -ux, so the canonical lambda is A(Q)/Q = phi/ux, which is the
  // catalog's first lambda for this problem.
  Problem p = get_problem("example9");
  LambdaPair shift{Expr::num(1), Expr::num(0), Expr::num(0)};
  Expr canon = canonical_lambda(shift, p.phi);
  CHECK(is_zero_sampled(canon - p.lambda1, p.box, 200).ok);
}

TEST_CASE("canonical representative rejects a vanishing characteristic") {
  Problem p = get_problem("example9");
  LambdaPair degenerate{Expr::num(0), Expr::num(0), Expr::num(0)};
  CHECK_THROWS_AS(canonical_lambda(degenerate, p.phi), std::invalid_argument);
}

TEST_CASE("A-equivalence holds for a pair and its f-rescaled image") {
  Problem p = get_problem("pg27_f0");
  // rho1 = lambda1 - A(f1)/f1 with f1 = u^2.
  Expr rho1 = parse("-(ux + u^2 - 1)/u");
  LambdaPair a{Expr::num(0), Expr::num(1), p.lambda1};
  LambdaPair b{Expr::num(0), parse("u^2"), rho1};
  EquivalenceResult r = are_equivalent(a, b, p.phi, p.box);
  CHECK(r.equivalent);
}

TEST_CASE("the two catalog pairs are not A-equivalent") {
  Problem p = get_problem("pg27_f0");
  LambdaPair a{Expr::num(0), Expr::num(1), p.lambda1};
  LambdaPair b{Expr::num(0), Expr::num(1), p.lambda2};
  EquivalenceResult r = are_equivalent(a, b, p.phi, p.box);
  CHECK_FALSE(r.equivalent);
  CHECK_FALSE(r.determinant_check.ok);
}

}  // TEST_SUITE
