// Integrator and trajectory certification. Expected values are frozen from
// independent high-precision computations, never from the code under test.

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lq/catalog.hpp"
#include "lq/integrate.hpp"

using namespace lq;

TEST_SUITE("integrate") {

TEST_CASE("oscillator trajectory matches sin/cos") {
  Traj2 t = integrate_ode2(parse("-u"), 0.0, 0.0, 1.0, 1.0, 1e-10);
  CHECK(std::abs(t.y_end[0] - 0.841470984807896507) < 1e-9);
  CHECK(std::abs(t.y_end[1] - 0.540302305868139717) < 1e-9);
  // Dense output agrees in the interior and at the endpoint.
  CHECK(std::abs(t.at(0.7)[0] - std::sin(0.7)) < 1e-9);
  CHECK(std::abs(t.at(1.0)[0] - t.y_end[0]) < 1e-14);
  CHECK(t.n_accepted > 0);
}

TEST_CASE("tolerance outside the supported range is rejected") {
  CHECK_THROWS_AS(integrate_ode2(parse("-u"), 0.0, 0.0, 1.0, 1.0, 1e-3),
                  IntegrateError);
  CHECK_THROWS_AS(integrate_ode2(parse("-u"), 0.0, 0.0, 1.0, 1.0, 0.0),
                  IntegrateError);
}

TEST_CASE("finite-time blow-up is detected") {
  // w' = w^2 from w(0) = 1 explodes at x = 1.
  CHECK_THROWS_AS(integrate_ode1(parse("w^2"), 0.0, 1.0, 2.0, 1e-10),
                  IntegrateError);
}

TEST_CASE("first-order solver reproduces the Riccati closed form") {
  // w' = w^2 - 1/2, w(0) = 0 has w(x) = -tanh(x/sqrt2)/sqrt2.
  Traj1 t = integrate_ode1(parse("w^2 - 1/2"), 0.0, 0.0, 0.5, 1e-12);
  CHECK(std::abs(t.y_end[0] - (-0.240079085427227386)) < 1e-10);
}

TEST_CASE("pg27_f0 standard trajectory hits its frozen endpoint") {
  Problem p = get_problem("pg27_f0");
  Traj2 t = integrate_ode2(p.phi, 0.0, 1.0, 0.0, 0.5, 1e-10);
  CHECK(std::abs(t.y_end[0] - 0.910111065866232246) < 1e-8);
  CHECK(std::abs(t.y_end[1] - (-0.303316889934313010)) < 1e-8);
}

TEST_CASE("trajectory through the u = 0 crossing stays accurate") {
  // The exact solution crosses u = 0 at x ~ 0.8658 where the right-hand
  // side has a removable singularity along the orbit.
  Problem p = get_problem("example9");
  Traj2 t = integrate_ode2(p.phi, 0.0, 1.0, -1.0, 1.0, 1e-10);
  CHECK(std::abs(t.y_end[0] - (-0.122211611195378699)) < 1e-6);
  CHECK(std::abs(t.y_end[1] - (-0.809666692681795684)) < 1e-6);
}

TEST_CASE("drift decreases when the tolerance tightens") {
  Problem p = get_problem("pg27_airy");
  auto drift_at = [&](double tol) {
    Traj2 t = integrate_ode2(p.phi, 0.0, 1.0, 0.0, 0.4, tol);
    return first_integral_drift(*p.closed.I1, t);
  };
  const double loose = drift_at(1e-5);
  const double mid = drift_at(1e-8);
  const double tight = drift_at(1e-11);
  CHECK(mid < loose);
  CHECK(tight < mid);
  CHECK(tight < 1e-9);
}

TEST_CASE("admissible-run drift skips branch walls that strict drift hits") {
  Problem p = get_problem("example9");
  Traj2 t = integrate_ode2(p.phi, 0.0, 1.0, -1.0, 1.0, 1e-10);
  // I2 divides by ux + 1, which vanishes exactly at the initial point.
  CHECK_THROWS_AS(first_integral_drift(*p.closed.I2, t), EvalError);
  DriftResult d2 = drift_admissible_run(*p.closed.I2, t);
  CHECK(d2.samples_skipped >= 1);
  CHECK(d2.x_first > 0.0);
  CHECK(d2.drift <= 1e-6);
  CHECK(std::abs(d2.reference - (-1.5707963267948966)) < 1e-5);

  DriftResult d1 = drift_admissible_run(*p.closed.I1_traj, t);
  CHECK(d1.drift <= 1e-6);
  CHECK(std::abs(d1.reference - 1.0) < 1e-5);
}

TEST_CASE("closed-form certificates for both general solutions") {
  Problem f0 = get_problem("pg27_f0");
  ClosedFormSolution s1{*f0.closed.solution, 0.3, 0.7, -0.3, 0.2};
  CHECK(check_closed_form(s1, f0.phi) <= 1e-9);

  Problem e9 = get_problem("example9");
  ClosedFormSolution s2{*e9.closed.solution, 1.0, 1.5707963267948966, 0.0,
                        1.0};
  CHECK(check_closed_form(s2, e9.phi) <= 1e-9);
}

TEST_CASE("a wrong closed form fails its certificate") {
  Problem p = get_problem("pg27_f0");
  ClosedFormSolution bad{parse("C1 + C2*x + x^2"), 0.3, 0.7, -0.3, 0.2};
  CHECK(check_closed_form(bad, p.phi) > 1e-3);
}

TEST_CASE("reduction consistency along a trajectory") {
  Problem p = get_problem("pg27_f0");
  Traj2 t = integrate_ode2(p.phi, 0.0, 1.0, 0.0, 0.5, 1e-10);
  CHECK(reduction_consistency(*p.closed.w1, p.phi1_red, t) <= 1e-5);
  CHECK(reduction_consistency(*p.closed.w2, p.phi2_red, t) <= 1e-5);
  // A mismatched reduced equation is detected.
  CHECK(reduction_consistency(*p.closed.w1, p.phi2_red, t) > 1e-3);
}

TEST_CASE("linear basis with q = 0 is (1, x - x0)") {
  LinearBasis b = make_linear_basis(Expr(), 0.0, 0.0, 1.0);
  auto y = b.values(0.7);
  CHECK(std::abs(y[0] - 1.0) < 1e-12);
  CHECK(std::abs(y[1]) < 1e-12);
  CHECK(std::abs(y[2] - 0.7) < 1e-12);
  CHECK(std::abs(y[3] - 1.0) < 1e-12);
}

TEST_CASE("linear basis keeps the Wronskian pinned at one") {
  LinearBasis b = make_linear_basis(parse("1 + x"), 0.0, 0.0, 1.0);
  CHECK(b.wronskian_drift <= 1e-8);
  auto y = b.values(0.83);
  CHECK(std::abs(y[0] * y[3] - y[1] * y[2] - 1.0) < 1e-10);
}

TEST_CASE("linear basis with constant q matches hyperbolic functions") {
  // q = 1/2: psi1 = cosh(x/sqrt2), psi2 = sqrt2 sinh(x/sqrt2).
  LinearBasis b = make_linear_basis(parse("1/2"), 0.0, 0.0, 1.0);
  auto y = b.values(1.0);
  CHECK(std::abs(y[0] - 1.260591836521356119) < 1e-8);
  CHECK(std::abs(y[1] - 0.542720820636303501) < 1e-8);
  CHECK(std::abs(y[2] - 1.085441641272607002) < 1e-8);
  CHECK(std::abs(y[3] - 1.260591836521356119) < 1e-8);
}

TEST_CASE("basis origin must be a span endpoint") {
  CHECK_THROWS_AS(make_linear_basis(Expr(), 0.5, 0.0, 1.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
