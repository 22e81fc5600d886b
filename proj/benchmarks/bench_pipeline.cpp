// Hot paths of the verification pipeline: residual sampling, the commuting
// construction, path quadrature, and the ODE integrator. The acceptance gate
// bounds the first two (determining residuals under 1s per problem, bracket
// residuals under 5s total), so regressions here matter.

#include <benchmark/benchmark.h>

#include "lq/catalog.hpp"
#include "lq/commute.hpp"
#include "lq/integrate.hpp"
#include "lq/quad.hpp"
#include "lq/sample.hpp"
#include "lq/symcheck.hpp"

namespace {

const lq::Problem& pg27_f0() {
  static const lq::Problem p = lq::get_problem("pg27_f0");
  return p;
}

const lq::Problem& pg27_airy() {
  static const lq::Problem p = lq::get_problem("pg27_airy");
  return p;
}

void BM_DeterminingResidual(benchmark::State& state) {
  const lq::Problem& p = pg27_f0();
  const lq::Expr res = lq::determining_residual(p.lambda1, p.phi);
  for (auto _ : state) {
    lq::ZeroCheck zc = lq::is_zero_sampled(res, p.box, 200, 1e-9, 0);
    benchmark::DoNotOptimize(zc.worst);
  }
}
BENCHMARK(BM_DeterminingResidual);

void BM_BuildCommuting(benchmark::State& state) {
  const lq::Problem& p = pg27_f0();
  for (auto _ : state) {
    std::vector<lq::ResidualEntry> entries;
    lq::CommutingData data =
        lq::build_commuting(p.commute_input(), 200, 1e-8, 0, &entries);
    benchmark::DoNotOptimize(data.rho);
    benchmark::DoNotOptimize(entries.size());
  }
}
BENCHMARK(BM_BuildCommuting);

void BM_PathIntegrate(benchmark::State& state) {
  const lq::Problem& p = pg27_f0();
  lq::CommuteInput ci = p.commute_input();
  ci.box = p.box_forms;
  std::vector<lq::ResidualEntry> entries;
  lq::CommutingData data = lq::build_commuting(ci, 200, 1e-8, 0, &entries);
  auto forms = lq::I_forms(data, p.phi, p.box_forms, 200, 1e-8, 0);
  lq::Bindings from = p.box_forms.bindings_at(p.base);
  lq::Bindings to = p.box_forms.bindings_at({0.3, 1.1, -1.9});
  for (auto _ : state) {
    lq::QuadratureResult q = lq::path_integrate(forms.first, from, to);
    benchmark::DoNotOptimize(q.value);
  }
}
BENCHMARK(BM_PathIntegrate);

void BM_IntegrateOde2(benchmark::State& state) {
  const lq::Problem& p = pg27_airy();
  for (auto _ : state) {
    lq::Traj2 t = lq::integrate_ode2(p.phi, 0.0, 1.0, 0.0, 0.4, 1e-10);
    benchmark::DoNotOptimize(t.y_end);
  }
}
BENCHMARK(BM_IntegrateOde2);

void BM_EvalPhi(benchmark::State& state) {
  const lq::Problem& p = pg27_f0();
  lq::Bindings b(0.3, 1.1, -1.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lq::eval(p.phi, b));
  }
}
BENCHMARK(BM_EvalPhi);

}  // namespace

BENCHMARK_MAIN();
