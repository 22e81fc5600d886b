// Catalog data: closed forms against frozen spot values, box admissibility,
// the numerically generated bases, and spec round-tripping.

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lq/catalog.hpp"
#include "lq/sample.hpp"

using namespace lq;

TEST_SUITE("catalog") {

TEST_CASE("catalog lists exactly the built-in problems") {
  auto names = catalog_names();
  REQUIRE(names.size() == 4);
  CHECK(names[0] == "pg27_general");
  CHECK(names[1] == "pg27_f0");
  CHECK(names[2] == "pg27_airy");
  CHECK(names[3] == "example9");
  CHECK_THROWS_AS(get_problem("nope"), std::invalid_argument);
}

TEST_CASE("family lambdas and phi at spot points") {
  Problem p = get_problem("pg27_f0");
  CHECK(eval(p.lambda1, Bindings(0.0, 2.0, 1.0)) == doctest::Approx(-1.0));
  CHECK(eval(p.phi, Bindings(0.0, 1.0, 0.0)) == doctest::Approx(-1.0));
  // lambda1 - lambda2 = 2/u for the whole family.
  CHECK(is_zero_sampled(p.lambda1 - p.lambda2 - parse("2/u"), p.box, 100).ok);
}

TEST_CASE("frozen closed-form values for the f0 problem") {
  Problem p = get_problem("pg27_f0");
  Bindings b(0.3, 1.1, -1.9);
  CHECK(std::abs(eval(*p.closed.I1, b) - (-0.00717996555494076104)) < 1e-15);
  CHECK(std::abs(eval(*p.closed.I2, b) - (-0.434616965856359102)) < 1e-15);
  CHECK(eval(*p.closed.mu1, Bindings(0.0, 1.0, -2.0)) ==
        doctest::Approx(0.5));
  CHECK(eval(*p.closed.M, Bindings(0.0, 1.0, -2.0)) ==
        doctest::Approx(1.0 / 6.0));
}

TEST_CASE("frozen closed-form values for the autonomous problem") {
  Problem p = get_problem("example9");
  CHECK(std::abs(eval(*p.closed.I1, Bindings(0.0, 1.0, 1.0)) -
                 0.792432502320979354) < 1e-15);
  // I2 = arctan(u/(1+ux)) - x.
  CHECK(eval(*p.closed.I2, Bindings(0.0, 1.0, 0.0)) ==
        doctest::Approx(std::atan(1.0)));
}

TEST_CASE("general family accepts a custom forcing term") {
  Problem p = get_problem("pg27_general:2*x + 1");
  REQUIRE(p.F);
  CHECK(eval(*p.F, Bindings(0.5, 1.0, 0.0)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(get_problem("pg27_general:u"), std::invalid_argument);
  CHECK_THROWS_AS(get_problem("pg27_general:ux + x"), std::invalid_argument);
}

TEST_CASE("generated basis values for the default forcing term") {
  // psi'' = ((x+1)/2) psi and theta'' = ((x-1)/2) theta from (1,0), (0,1).
  Problem p = get_problem("pg27_general");
  REQUIRE(p.basis);
  auto at = [&](const char* name) {
    int idx = p.basis->index_of(name);
    REQUIRE(idx >= 0);
    return p.basis->members[idx].eval(1.0);
  };
  CHECK(std::abs(at("psi1") - 1.35397205511063650) < 1e-8);
  CHECK(std::abs(at("psi1p") - 0.84511238870533430) < 1e-8);
  CHECK(std::abs(at("psi2") - 1.12974623051536752) < 1e-8);
  CHECK(std::abs(at("psi2p") - 1.44372443147799005) < 1e-8);
  CHECK(std::abs(at("theta1") - 0.83677811276458970) < 1e-8);
  CHECK(std::abs(at("theta1p") - (-0.24175303511256791)) < 1e-8);
  CHECK(std::abs(at("theta2") - 0.95882661816154268) < 1e-8);
  CHECK(std::abs(at("theta2p") - 0.91804594694130737) < 1e-8);
}

TEST_CASE("basis members differentiate through the family") {
  Problem p = get_problem("pg27_general");
  Expr psi1 = Expr::ext(p.basis, p.basis->index_of("psi1"));
  Expr d = diff(psi1, Sym::X);
  Bindings b;
  b.bind(Sym::X, 1.0);
  CHECK(std::abs(eval(d, b) - 0.84511238870533430) < 1e-8);
  // Second derivative folds back to q(x) psi1.
  Expr dd = diff(d, Sym::X);
  CHECK(std::abs(eval(dd, b) - 1.35397205511063650) < 1e-8);
  CHECK(diff(psi1, Sym::U).is_zero());
}

TEST_CASE("sampling is deterministic and respects exclusions") {
  Problem p = get_problem("pg27_f0");
  auto pts1 = sample_box(p.box_forms, 50, 0);
  auto pts2 = sample_box(p.box_forms, 50, 0);
  auto pts3 = sample_box(p.box_forms, 50, 1);
  REQUIRE(pts1.size() == 50);
  CHECK(pts1[0][Sym::X] == pts2[0][Sym::X]);
  CHECK(pts1[0][Sym::U] == pts2[0][Sym::U]);
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i)
    differs = differs || pts1[i][Sym::X] != pts3[i][Sym::X];
  CHECK(differs);
  for (const Bindings& b : pts1) CHECK(p.box_forms.admissible(b));
}

TEST_CASE("a fully excluded box is reported, not spun on") {
  Box dead;
  dead.x = {0.0, 1.0};
  dead.u = {0.5, 2.0};
  dead.ux = {-1.0, 1.0};
  dead.excluded = {Expr()};  // identically zero: no admissible points
  CHECK_THROWS_AS(sample_box(dead, 10, 0), BoxExhausted);
}

TEST_CASE("auxiliary box has admissible points under the bound constant") {
  Problem p = get_problem("pg27_general");
  REQUIRE(p.box_aux);
  auto pts = sample_box(*p.box_aux, 50, 0);
  CHECK(pts.size() == 50);
}

TEST_CASE("standard initial conditions are present") {
  for (const std::string& name :
       {"pg27_f0", "pg27_airy", "pg27_general", "example9"}) {
    CAPTURE(name);
    Problem p = get_problem(name);
    REQUIRE(!p.standard_ics.empty());
    // The IC itself must be admissible for phi.
    const StandardIc& ic = p.standard_ics.front();
    CHECK(std::isfinite(eval(p.phi, Bindings(ic.x0, ic.u0, ic.ux0))));
  }
}

TEST_CASE("export/import round-trips byte-identically") {
  for (const std::string& name :
       {"pg27_f0", "pg27_airy", "pg27_general", "example9"}) {
    CAPTURE(name);
    std::string once = export_problem(get_problem(name));
    std::string twice = export_problem(import_problem(once));
    CHECK(once == twice);
  }
}

TEST_CASE("a minimal spec imports with defaults") {
  const char* minimal = R"json({
    "name": "osc",
    "phi": "-u",
    "lambda1": "ux/u",
    "lambda2": "-ux/u - 2/u^2",
    "f1": "u^2",
    "f2": "1",
    "box": {"x": [0, 1], "u": [0.5, 2], "ux": [-2, 2]}
  })json";
  Problem p = import_problem(minimal);
  CHECK(p.name == "osc");
  CHECK(p.g1.is_one());
  CHECK(p.g2.is_one());
  CHECK(p.phi1_red.is_zero());
  CHECK(p.standard_ics.empty());
  CHECK(p.box_forms.u.lo == doctest::Approx(0.5));
  CHECK(p.base.u == doctest::Approx(1.25));
}

}  // TEST_SUITE
