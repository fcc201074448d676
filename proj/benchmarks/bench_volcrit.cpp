#include <benchmark/benchmark.h>

#include "volcrit/spaceform.hpp"
#include "volcrit/ttensor.hpp"
#include "volcrit/variation.hpp"
#include "volcrit/yamabe.hpp"

using namespace volcrit;

static void BM_ScalarCurvature(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const SpaceFormBall ball = make_ball(Model::hyperbolic, n, 0.8);
  Point p = Point::zero(n);
  p[0] = 0.2;
  p[1] = -0.1;
  for (auto _ : state) benchmark::DoNotOptimize(scalar_curvature_at(ball.metric, p));
}
BENCHMARK(BM_ScalarCurvature)->DenseRange(3, 6);

static void BM_CriticalResidual(benchmark::State& state) {
  const SpaceFormBall ball = make_ball(Model::spherical, 3, 0.7);
  const CriticalPotential cp = critical_potential(ball);
  const BallQuadrature q(3, ball.coord_radius, {16, 8});
  for (auto _ : state) benchmark::DoNotOptimize(critical_residual(ball.metric, cp.lambda, q).sup);
}
BENCHMARK(BM_CriticalResidual)->Unit(benchmark::kMillisecond);

static void BM_SecondVariationSaddle(benchmark::State& state) {
  const SpaceFormBall ball = make_ball(Model::euclidean, 3, 1.0);
  const CriticalPotential cp = critical_potential(ball);
  const SymTensorField h = parallel_tracefree_direction(ball, {1, 0, 0, 0, -1, 0, 0, 0, 0});
  const BallQuadrature q(3, 1.0, {static_cast<int>(state.range(0)), 8});
  for (auto _ : state) benchmark::DoNotOptimize(second_variation(ball.metric, cp.lambda, h, q).total);
}
BENCHMARK(BM_SecondVariationSaddle)->RangeMultiplier(2)->Range(8, 32)->Unit(benchmark::kMillisecond);

static void BM_TTAssembleAndVerify(benchmark::State& state) {
  const WarpedMetric w = space_form_warped(2, -1.0, 1.0);
  const auto pts = annulus_points(3, 0.25, 0.8, 50, 3);
  for (auto _ : state) {
    const TTProfile prof = solve_profile(w, bump_profile(0.25, 0.8), SphericalHarmonic::catalogue(2, 0));
    benchmark::DoNotOptimize(verify_tt(w.metric(), assemble_tt(prof), pts).max_div);
  }
}
BENCHMARK(BM_TTAssembleAndVerify)->Unit(benchmark::kMillisecond);

static void BM_FirstEigenvalue(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(first_eigenvalue_radial(Model::hyperbolic, 3, 1.0).value);
}
BENCHMARK(BM_FirstEigenvalue)->Unit(benchmark::kMillisecond);

static void BM_ConformalSolveRadial(benchmark::State& state) {
  const SpaceFormBall ball = make_ball(Model::hyperbolic, 3, 1.0);
  const SymTensorField h = conformal_direction(ball, {0.4, 0.3});
  GridSpec g;
  g.radial_modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_conformal(ball, h, 0.05, g).residual);
}
BENCHMARK(BM_ConformalSolveRadial)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_LinearizedGalerkin(benchmark::State& state) {
  const SpaceFormBall ball = make_ball(Model::spherical, 3, 0.7);
  const SymTensorField h = polynomial_direction(ball, {{0, 0, 0.3, {}}, {0, 1, -0.4, {1, 1, 0}}});
  GridSpec g;
  g.mode = GridMode::full;
  g.full_degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(linearized_conformal(ball, h, g).sup);
}
BENCHMARK(BM_LinearizedGalerkin)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
