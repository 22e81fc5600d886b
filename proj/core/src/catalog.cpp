#include "lq/catalog.hpp"

#include <cmath>

#include "json.hpp"

namespace lq {

namespace {

using Json = nlohmann::ordered_json;

Expr v(Sym s) { return Expr::var(s); }
Expr n(long long k) { return Expr::num(k); }
Expr sq(const Expr& e) { return Expr::pow(e, n(2)); }

}  // namespace

LinearBasis make_linear_basis(const Expr& q, double x0, double span_lo,
                              double span_hi, double tol) {
  if (x0 != span_lo && x0 != span_hi)
    throw std::invalid_argument("basis origin must be a span endpoint");
  auto f = [&q](double x, const std::array<double, 4>& y,
                std::array<double, 4>& dy) {
    Bindings b;
    b.bind(Sym::X, x);
    const double qv = eval(q, b);
    dy[0] = y[1];
    dy[1] = qv * y[0];
    dy[2] = y[3];
    dy[3] = qv * y[2];
  };
  const double target = (x0 == span_lo) ? span_hi : span_lo;
  Traj4 t = dopri5<4>(f, x0, {1.0, 0.0, 0.0, 1.0}, target, tol, tol);

  LinearBasis basis;
  basis.traj = std::make_shared<const Traj4>(std::move(t));
  basis.x0 = x0;
  basis.span_lo = span_lo;
  basis.span_hi = span_hi;
  for (int k = 0; k <= 200; ++k) {
    const double x = span_lo + (span_hi - span_lo) * k / 200.0;
    const auto y = basis.traj->at(x);
    const double w = y[0] * y[3] - y[1] * y[2];
    basis.wronskian_drift = std::max(basis.wronskian_drift, std::abs(w - 1.0));
  }
  if (!(basis.wronskian_drift <= 1e-8))
    throw IntegrateError("basis Wronskian drifts beyond 1e-8 over the span");
  return basis;
}

namespace {

// Family of the two linear-basis pairs psi'' = q_psi psi, theta'' = q_theta
// theta, each solved for initial data (1,0) and (0,1) so both Wronskians
// are 1.  Members: psi1, psi1p, psi2, psi2p, theta1, theta1p, theta2,
// theta2p.
std::shared_ptr<const ExtFamily> make_pg27_family(const std::string& tag,
                                                  const Expr& q_psi,
                                                  const Expr& q_theta,
                                                  double x0, double lo,
                                                  double hi) {
  LinearBasis psi = make_linear_basis(q_psi, x0, lo, hi);
  LinearBasis theta = make_linear_basis(q_theta, x0, lo, hi);

  auto fam = std::make_shared<ExtFamily>();
  fam->tag = tag;
  auto add = [&](const char* name, const LinearBasis& b, int comp) {
    ExtFamily::Member m;
    m.name = name;
    m.eval = [b, comp](double x) { return b.values(x)[comp]; };
    fam->members.push_back(std::move(m));
  };
  add("psi1", psi, 0);
  add("psi1p", psi, 1);
  add("psi2", psi, 2);
  add("psi2p", psi, 3);
  add("theta1", theta, 0);
  add("theta1p", theta, 1);
  add("theta2", theta, 2);
  add("theta2p", theta, 3);

  std::shared_ptr<const ExtFamily> cfam = fam;
  auto mem = [&](const char* name) {
    return Expr::ext(cfam, fam->index_of(name));
  };
  auto set_deriv = [&](const char* name, Expr d) {
    ExtFamily::Member& m = fam->members[fam->index_of(name)];
    m.deriv = std::move(d);
    m.deriv_set = true;
  };
  set_deriv("psi1", mem("psi1p"));
  set_deriv("psi1p", q_psi * mem("psi1"));
  set_deriv("psi2", mem("psi2p"));
  set_deriv("psi2p", q_psi * mem("psi2"));
  set_deriv("theta1", mem("theta1p"));
  set_deriv("theta1p", q_theta * mem("theta1"));
  set_deriv("theta2", mem("theta2p"));
  set_deriv("theta2p", q_theta * mem("theta2"));
  return cfam;
}

// Shared skeleton of the Painleve-Gambier XXVII family
//   u'' = ux^2/(2u) - 2 u ux - u^3/2 + F(x) u - 1/(2u).
void fill_pg27_core(Problem& p, const Expr& F) {
  Expr u = v(Sym::U), ux = v(Sym::Ux), w = v(Sym::W);
  p.F = F;
  p.phi = sq(ux) / (n(2) * u) - n(2) * u * ux - Expr::pow(u, n(3)) / n(2) +
          F * u - n(1) / (n(2) * u);
  p.lambda1 = ux / u - u + n(1) / u;
  p.lambda2 = ux / u - u - n(1) / u;
  p.f1 = sq(u);
  p.f2 = sq(u);
  p.phi1_red = sq(w) - (F + n(1)) / n(2);
  p.phi2_red = -sq(w) + (F - n(1)) / n(2);
  p.closed.w1 = -(ux + sq(u) + n(1)) / (n(2) * u);
  p.closed.w2 = (ux + sq(u) - n(1)) / (n(2) * u);
}

Problem make_pg27_f0() {
  Problem p;
  p.name = "pg27_f0";
  fill_pg27_core(p, n(0));

  Expr x = v(Sym::X), u = v(Sym::U), ux = v(Sym::Ux), w = v(Sym::W);
  Expr s2 = Expr::fun(Fn::Sqrt, n(2));
  Expr A = sq(sq(u) + ux - n(1)) + n(2) * sq(u);  // 2 f1 g1
  Expr B = sq(sq(u) + ux + n(1)) - n(2) * sq(u);  // 2 f2 g2

  p.g1 = sq(ux + sq(u) - n(1)) / (n(2) * sq(u)) + n(1);
  p.g2 = sq(ux + sq(u) + n(1)) / (n(2) * sq(u)) - n(1);
  p.g1_red = n(2) * sq(w) + n(1);
  p.g2_red = n(2) * sq(w) - n(1);

  p.closed.I1 =
      -(x - s2 * Expr::fun(Fn::Arctanh, (sq(u) + ux + n(1)) / (s2 * u))) /
      n(2);
  p.closed.I2 =
      (x + s2 * Expr::fun(Fn::Arctan, (sq(u) + ux - n(1)) / (s2 * u))) / n(2);
  // Branch-free variants obtained through the tanh / tan addition laws,
  // single-valued along the standard orbit.
  Expr T = Expr::fun(Fn::Tanh, x / s2);
  p.closed.I1_traj =
      (sq(u) + ux + n(1) - s2 * u * T) / (s2 * u - (sq(u) + ux + n(1)) * T);
  Expr z2 = (sq(u) + ux - n(1)) / (s2 * u);
  Expr tn = Expr::fun(Fn::Tan, x / s2);
  p.closed.I2_traj = (z2 + tn) / (n(1) - z2 * tn);
  p.closed.mu1 = -(u / B);
  p.closed.mu2 = u / A;
  p.closed.M = -(n(2) * u / (A * B));
  p.closed.solution =
      s2 / (Expr::fun(Fn::Tanh, s2 / n(2) * (x + n(2) * v(Sym::C1))) -
            Expr::fun(Fn::Tan, s2 / n(2) * (-x + n(2) * v(Sym::C2))));

  p.box.x = {0.0, 1.0};
  p.box.u = {0.5, 2.0};
  p.box.ux = {-2.0, 2.0};
  p.box.excluded = {u};

  p.box_forms.x = {0.0, 0.5};
  p.box_forms.u = {0.8, 1.2};
  p.box_forms.ux = {-2.2, -1.6};
  p.box_forms.excluded = {u, B};
  p.base = {0.0, 1.0, -2.0};
  p.w_u0 = 1.0;
  p.w_ux0 = -2.0;

  p.box_red1.x = {0.0, 0.5};
  p.box_red1.w = Interval{0.8, 1.5};
  p.box_red1.excluded = {p.g2_red};
  p.box_red2.x = {0.0, 0.5};
  p.box_red2.w = Interval{-1.5, 1.5};

  p.standard_ics = {{0.0, 1.0, 0.0, 0.5}};
  return p;
}

// Basis-backed member of the family; the g's and the closed I's are written
// through the numerically generated solutions of the two linear equations.
Problem make_pg27_basis(const std::string& name, const Expr& F,
                        double span_hi, bool with_aux) {
  Problem p;
  p.name = name;
  fill_pg27_core(p, F);

  Expr q_psi = (F + n(1)) / n(2);
  Expr q_theta = (F - n(1)) / n(2);
  p.basis = make_pg27_family(name, q_psi, q_theta, 0.0, 0.0, span_hi);
  p.basis_recipe =
      BasisRecipe{render(q_psi), render(q_theta), 0.0, 0.0, span_hi};

  auto mem = [&](const char* nm) {
    return Expr::ext(p.basis, p.basis->index_of(nm));
  };
  Expr psi1 = mem("psi1"), psi1p = mem("psi1p");
  Expr psi2 = mem("psi2"), psi2p = mem("psi2p");
  Expr th1 = mem("theta1"), th1p = mem("theta1p");
  Expr th2 = mem("theta2"), th2p = mem("theta2p");

  Expr u = v(Sym::U), ux = v(Sym::Ux), w = v(Sym::W);
  Expr D1 = (sq(u) + ux + n(1)) * psi2 - n(2) * u * psi2p;
  Expr D2 = (sq(u) + ux - n(1)) * th2 - n(2) * u * th2p;

  p.g1 = sq(th2 * *p.closed.w2 - th2p);
  p.g2 = sq(psi2 * *p.closed.w1 + psi2p);
  p.g1_red = sq(th2 * w - th2p);
  p.g2_red = sq(psi2 * w + psi2p);

  p.closed.I1 = ((sq(u) + ux + n(1)) * psi1 - n(2) * u * psi1p) / D1;
  p.closed.I2 = ((sq(u) + ux - n(1)) * th1 - n(2) * u * th1p) / D2;
  p.closed.mu1 = -(n(2) * u / sq(D1));
  p.closed.mu2 = n(2) * u / sq(D2);
  p.closed.M = -(n(8) * u / (sq(D1) * sq(D2)));

  p.box.x = {0.0, span_hi};
  p.box.u = {0.5, 2.0};
  p.box.ux = {-2.0, 2.0};
  p.box.excluded = {u};

  p.box_forms.x = {0.0, std::min(span_hi, 0.5)};
  p.box_forms.u = {0.8, 1.2};
  p.box_forms.ux = {-0.5, 0.5};
  p.box_forms.excluded = {u, D1, D2};
  p.base = {0.0, 1.0, 0.0};
  p.w_u0 = 1.0;
  p.w_ux0 = 0.0;

  p.box_red1.x = {0.0, std::min(span_hi, 0.5)};
  p.box_red1.w = Interval{-1.0, 1.0};
  p.box_red1.excluded = {p.g2_red};
  p.box_red2.x = {0.0, std::min(span_hi, 0.5)};
  p.box_red2.w = Interval{-1.0, 1.0};
  p.box_red2.excluded = {p.g1_red};

  if (with_aux) {
    Expr C = v(Sym::C);
    Expr P1 = (C * psi2p - psi1p) / (C * psi2 - psi1);
    p.closed.H1 = n(2) * u * P1 - sq(u) - n(1);
    Expr P2 = (C * th2p - th1p) / (C * th2 - th1);
    p.closed.H2 = n(2) * u * P2 - sq(u) + n(1);
    Box aux;
    aux.x = {0.0, span_hi};
    aux.u = {0.5, 2.0};
    aux.ux = {-2.0, 2.0};
    aux.bound = {{Sym::C, 0.3}};
    aux.excluded = {u, C * psi2 - psi1, C * th2 - th1};
    p.box_aux = aux;
  }

  p.standard_ics = {{0.0, 1.0, 0.0, std::min(span_hi, 0.5)}};
  return p;
}

Problem make_example9() {
  Problem p;
  p.name = "example9";
  Expr x = v(Sym::X), u = v(Sym::U), ux = v(Sym::Ux);
  p.phi = -(ux / u) - n(1) / u - u;
  p.lambda1 = -(n(1) / u) - (sq(u) + n(1)) / (u * ux);
  p.lambda2 = (ux + n(1)) / u;
  p.f1 = ux;
  Expr r = Expr::fun(Fn::Sqrt, sq(u) + sq(ux + n(1)));
  p.f2 = u / r;
  p.g1 = n(1);
  p.g2 = n(1);
  p.g1_red = n(1);
  p.g2_red = n(1);
  p.phi1_red = n(0);
  p.phi2_red = n(1);

  p.closed.w1 = r - Expr::fun(Fn::Arctanh, (ux + n(1)) / r);
  p.closed.w2 = Expr::fun(Fn::Arctan, u / (n(1) + ux));
  p.closed.I1 = p.closed.w1;
  p.closed.I2 = *p.closed.w2 - x;
  // w1 flips sign where a trajectory crosses u = 0; -sgn(ux+1)*w1 stays on
  // one branch there (trajectories cross that locus with ux+1 and u changing
  // sign together), so drift checks use it.
  Expr sgn1 = (ux + n(1)) / Expr::fun(Fn::Abs, ux + n(1));
  p.closed.I1_traj = Expr::neg(sgn1 * *p.closed.w1);
  p.closed.solution =
      Expr::fun(Fn::Sin, v(Sym::C2) - x) *
      (v(Sym::C1) - Expr::fun(Fn::Arctanh, Expr::fun(Fn::Cos, v(Sym::C2) - x)));

  p.box.x = {0.0, 1.0};
  p.box.u = {0.5, 2.0};
  p.box.ux = {0.3, 2.0};
  p.box.excluded = {u, ux};
  p.box_forms = p.box;
  p.base = {0.0, 1.0, 1.0};
  p.w_u0 = 1.0;
  p.w_ux0 = 1.0;

  p.box_red1.x = {0.0, 1.0};
  p.box_red1.w = Interval{0.5, 2.0};
  p.box_red2.x = {0.0, 1.0};
  p.box_red2.w = Interval{0.2, 1.2};

  p.standard_ics = {{0.0, 1.0, -1.0, 1.0}};
  return p;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"pg27_general", "pg27_f0", "pg27_airy", "example9"};
}

Problem get_problem(const std::string& name) {
  if (name == "pg27_f0") return make_pg27_f0();
  if (name == "pg27_airy")
    return make_pg27_basis("pg27_airy", n(2) * v(Sym::X) + n(1), 0.4, false);
  if (name == "pg27_general")
    return make_pg27_basis("pg27_general", v(Sym::X), 1.0, true);
  if (name.rfind("pg27_general:", 0) == 0) {
    Expr F = parse(name.substr(13));
    if (references(F, Sym::U) || references(F, Sym::Ux))
      throw std::invalid_argument("the forcing term may depend on x only");
    return make_pg27_basis(name, F, 1.0, true);
  }
  if (name == "example9") return make_example9();
  throw std::invalid_argument("unknown catalog problem: " + name);
}

namespace {

Json interval_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Interval interval_from(const Json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json box_json(const Box& b) {
  Json j;
  j["x"] = interval_json(b.x);
  j["u"] = interval_json(b.u);
  j["ux"] = interval_json(b.ux);
  j["w"] = b.w ? interval_json(*b.w) : Json(nullptr);
  Json bound = Json::array();
  for (const auto& [s, val] : b.bound)
    bound.push_back(Json::array({sym_name(s), val}));
  j["bound"] = bound;
  Json excl = Json::array();
  for (const Expr& e : b.excluded) excl.push_back(render(e));
  j["excluded"] = excl;
  j["margin"] = b.margin;
  return j;
}

Sym sym_from_name(const std::string& s) {
  for (int i = 0; i < kNumSyms; ++i)
    if (s == sym_name(static_cast<Sym>(i))) return static_cast<Sym>(i);
  throw std::invalid_argument("unknown symbol name: " + s);
}

Box box_from(const Json& j, const std::shared_ptr<const ExtFamily>& fam) {
  auto has = [&](const char* key) {
    return j.contains(key) && !j.at(key).is_null();
  };
  Box b;
  b.x = interval_from(j.at("x"));
  if (has("u")) b.u = interval_from(j.at("u"));
  if (has("ux")) b.ux = interval_from(j.at("ux"));
  if (has("w")) b.w = interval_from(j.at("w"));
  if (has("bound"))
    for (const auto& e : j.at("bound"))
      b.bound.emplace_back(sym_from_name(e.at(0).get<std::string>()),
                           e.at(1).get<double>());
  if (has("excluded"))
    for (const auto& e : j.at("excluded"))
      b.excluded.push_back(parse(e.get<std::string>(), fam));
  if (has("margin")) b.margin = j.at("margin").get<double>();
  return b;
}

constexpr const char* kClosedKeys[] = {"w1", "w2",  "I1", "I2",
                                       "I1_traj", "I2_traj", "mu1", "mu2",
                                       "M",  "H1", "H2", "solution"};

std::optional<Expr>* closed_slot(ClosedForms& c, const std::string& key) {
  if (key == "w1") return &c.w1;
  if (key == "w2") return &c.w2;
  if (key == "I1") return &c.I1;
  if (key == "I2") return &c.I2;
  if (key == "I1_traj") return &c.I1_traj;
  if (key == "I2_traj") return &c.I2_traj;
  if (key == "mu1") return &c.mu1;
  if (key == "mu2") return &c.mu2;
  if (key == "M") return &c.M;
  if (key == "H1") return &c.H1;
  if (key == "H2") return &c.H2;
  if (key == "solution") return &c.solution;
  return nullptr;
}

}  // namespace

std::string export_problem(const Problem& p) {
  Json j;
  j["name"] = p.name;
  j["phi"] = render(p.phi);
  j["F"] = p.F ? Json(render(*p.F)) : Json(nullptr);
  j["lambda1"] = render(p.lambda1);
  j["lambda2"] = render(p.lambda2);
  j["f1"] = render(p.f1);
  j["f2"] = render(p.f2);
  j["g1"] = render(p.g1);
  j["g2"] = render(p.g2);
  j["g1_red"] = render(p.g1_red);
  j["g2_red"] = render(p.g2_red);
  j["phi1_red"] = render(p.phi1_red);
  j["phi2_red"] = render(p.phi2_red);
  j["box"] = box_json(p.box);
  j["box_forms"] = box_json(p.box_forms);
  j["box_red1"] = box_json(p.box_red1);
  j["box_red2"] = box_json(p.box_red2);
  j["box_aux"] = p.box_aux ? box_json(*p.box_aux) : Json(nullptr);
  j["base_point"] = Json::array({p.base.x, p.base.u, p.base.ux});
  j["w_gauge"] = Json::array({p.w_u0, p.w_ux0});
  Json closed;
  ClosedForms copy = p.closed;
  for (const char* key : kClosedKeys) {
    const std::optional<Expr>& slot = *closed_slot(copy, key);
    closed[key] = slot ? Json(render(*slot)) : Json(nullptr);
  }
  j["closed_forms"] = closed;
  if (p.basis_recipe) {
    Json r;
    r["q_psi"] = p.basis_recipe->q_psi;
    r["q_theta"] = p.basis_recipe->q_theta;
    r["x0"] = p.basis_recipe->x0;
    r["span"] = Json::array({p.basis_recipe->span_lo, p.basis_recipe->span_hi});
    j["basis"] = r;
  } else {
    j["basis"] = nullptr;
  }
  Json ics = Json::array();
  for (const StandardIc& ic : p.standard_ics)
    ics.push_back(Json::array({ic.x0, ic.u0, ic.ux0, ic.x_end}));
  j["standard_ics"] = ics;
  return j.dump(2) + "\n";
}

Problem import_problem(const std::string& json_text) {
  Json j = Json::parse(json_text);
  auto has = [&](const char* key) {
    return j.contains(key) && !j.at(key).is_null();
  };
  Problem p;
  p.name = j.at("name").get<std::string>();

  if (has("basis")) {
    const Json& r = j.at("basis");
    BasisRecipe recipe;
    recipe.q_psi = r.at("q_psi").get<std::string>();
    recipe.q_theta = r.at("q_theta").get<std::string>();
    recipe.x0 = r.at("x0").get<double>();
    recipe.span_lo = r.at("span").at(0).get<double>();
    recipe.span_hi = r.at("span").at(1).get<double>();
    p.basis = make_pg27_family(p.name, parse(recipe.q_psi),
                               parse(recipe.q_theta), recipe.x0,
                               recipe.span_lo, recipe.span_hi);
    p.basis_recipe = recipe;
  }
  const auto& fam = p.basis;
  auto expr_at = [&](const char* key, const Expr& fallback) {
    return has(key) ? parse(j.at(key).get<std::string>(), fam) : fallback;
  };
  p.phi = parse(j.at("phi").get<std::string>(), fam);
  if (has("F")) p.F = parse(j.at("F").get<std::string>(), fam);
  p.lambda1 = parse(j.at("lambda1").get<std::string>(), fam);
  p.lambda2 = parse(j.at("lambda2").get<std::string>(), fam);
  p.f1 = parse(j.at("f1").get<std::string>(), fam);
  p.f2 = parse(j.at("f2").get<std::string>(), fam);
  p.g1 = expr_at("g1", Expr::num(1));
  p.g2 = expr_at("g2", Expr::num(1));
  p.g1_red = expr_at("g1_red", Expr::num(1));
  p.g2_red = expr_at("g2_red", Expr::num(1));
  p.phi1_red = expr_at("phi1_red", Expr());
  p.phi2_red = expr_at("phi2_red", Expr());
  p.box = box_from(j.at("box"), fam);
  p.box_forms = has("box_forms") ? box_from(j.at("box_forms"), fam) : p.box;
  Box red_default;
  red_default.x = p.box.x;
  red_default.w = Interval{-1.0, 1.0};
  p.box_red1 =
      has("box_red1") ? box_from(j.at("box_red1"), fam) : red_default;
  p.box_red2 =
      has("box_red2") ? box_from(j.at("box_red2"), fam) : red_default;
  if (has("box_aux")) p.box_aux = box_from(j.at("box_aux"), fam);
  if (has("base_point")) {
    p.base = {j.at("base_point").at(0).get<double>(),
              j.at("base_point").at(1).get<double>(),
              j.at("base_point").at(2).get<double>()};
  } else {
    p.base = {p.box.x.lo, 0.5 * (p.box.u.lo + p.box.u.hi),
              0.5 * (p.box.ux.lo + p.box.ux.hi)};
  }
  if (has("w_gauge")) {
    p.w_u0 = j.at("w_gauge").at(0).get<double>();
    p.w_ux0 = j.at("w_gauge").at(1).get<double>();
  } else {
    p.w_u0 = p.base.u;
    p.w_ux0 = p.base.ux;
  }
  if (has("closed_forms")) {
    const Json& cf = j.at("closed_forms");
    for (const char* key : kClosedKeys) {
      if (cf.contains(key) && !cf.at(key).is_null())
        *closed_slot(p.closed, key) =
            parse(cf.at(key).get<std::string>(), fam);
    }
  }
  if (has("standard_ics"))
    for (const auto& e : j.at("standard_ics"))
      p.standard_ics.push_back({e.at(0).get<double>(), e.at(1).get<double>(),
                                e.at(2).get<double>(), e.at(3).get<double>()});
  return p;
}

}  // namespace lq
