#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "volcrit/errors.hpp"
#include "volcrit/spaceform.hpp"
#include "volcrit/ttensor.hpp"
#include "volcrit/variation.hpp"
#include "volcrit/yamabe.hpp"

using namespace volcrit;

namespace {
constexpr double kPi = std::numbers::pi;

GridSpec radial_grid(int modes = 24) {
  GridSpec g;
  g.mode = GridMode::radial;
  g.radial_modes = modes;
  return g;
}
}  // namespace

// ---------------------------------------------------------------------------
// first eigenvalue

TEST(FirstEigenvalue, EuclideanBallsMatchBesselZeros) {
  for (int n = 3; n <= 6; ++n) {
    const double R = 1.3;
    const double j = boost::math::cyl_bessel_j_zero(0.5 * n - 1.0, 1);
    const auto e = first_eigenvalue_radial(Model::euclidean, n, R);
    EXPECT_NEAR(e.value, j * j / (R * R), 1e-8 * e.value) << n;
    EXPECT_LE(e.upper - e.lower, 1e-6 * e.value);
    EXPECT_LE(e.lower, e.upper);
  }
  EXPECT_NEAR(first_eigenvalue_radial(Model::euclidean, 3, 1.0).value, kPi * kPi, 1e-8);
}

TEST(FirstEigenvalue, HyperbolicThreeBallClosedForm) {
  // n = 3, k = 1: lambda_1 = 1 + pi^2 / R^2
  for (double R : {0.5, 1.0, 2.0}) {
    const auto e = first_eigenvalue_radial(Model::hyperbolic, 3, R);
    EXPECT_NEAR(e.value, 1.0 + kPi * kPi / (R * R), 1e-8 * e.value);
    EXPECT_TRUE(e.exceeds_shift);
  }
}

TEST(FirstEigenvalue, HemisphereEqualsDimension) {
  // the first Dirichlet eigenfunction of the hemisphere is cos r with eigenvalue n
  for (int n = 3; n <= 6; ++n) {
    const auto e = first_eigenvalue_radial(Model::spherical, n, kPi / 2);
    EXPECT_NEAR(e.value, n, 1e-8) << n;
  }
}

TEST(FirstEigenvalue, SphericalThresholdAtTheEquator) {
  for (int n = 3; n <= 5; ++n) {
    EXPECT_TRUE(first_eigenvalue_radial(Model::spherical, n, 0.4).exceeds_shift);
    EXPECT_GT(first_eigenvalue_radial(Model::spherical, n, 0.4).value, n);
    EXPECT_FALSE(first_eigenvalue_radial(Model::spherical, n, 2.0).exceeds_shift);
  }
}

TEST(FirstEigenvalue, RejectsBadInput) {
  EXPECT_THROW(first_eigenvalue_radial(Model::spherical, 3, 3.2), DomainError);
  EXPECT_THROW(first_eigenvalue_radial(Model::euclidean, 2, 1.0), DomainError);
  EXPECT_THROW(first_eigenvalue_radial(Model::euclidean, 3, -1.0), DomainError);
}

// ---------------------------------------------------------------------------
// conformal factor

TEST(SolveConformal, TrivialAtTimeZero) {
  const auto ball = make_ball(Model::hyperbolic, 3, 0.8);
  const auto h = radial_normal_direction(ball, {1.0});
  const auto sol = solve_conformal(ball, h, 0.0, radial_grid());
  EXPECT_EQ(sol.iterations, 0);
  EXPECT_NEAR(sol.min_u, 1.0, 1e-15);
  EXPECT_NEAR(sol.max_u, 1.0, 1e-15);
}

TEST(SolveConformal, RadialFamiliesReachConstantScalarCurvature) {
  struct Case {
    Model model;
    int n;
    double R;
    int family;
  };
  for (const Case c : {Case{Model::euclidean, 3, 1.0, 0}, Case{Model::euclidean, 4, 1.0, 1},
                       Case{Model::hyperbolic, 3, 1.0, 0}, Case{Model::spherical, 5, 0.7, 2},
                       Case{Model::hyperbolic, 6, 0.5, 1}}) {
    const auto ball = make_ball(c.model, c.n, c.R);
    const SymTensorField h = c.family == 0   ? radial_normal_direction(ball, {1.0, -0.5})
                             : c.family == 1 ? tangential_direction(ball, {0.7})
                                             : conformal_direction(ball, {0.4, 0.3});
    const auto sol = solve_conformal(ball, h, 0.1, radial_grid());
    EXPECT_LE(sol.residual, 1e-10);
    EXPECT_GT(sol.iterations, 0);
    const MetricField gh = conformal_metric(ball, h, sol);
    for (const Point& p : {Point::zero(c.n), sol.basis.nodes()[5]}) {
      Point q = p;
      // an off-axis point: the solution is used on the whole ball
      if (q.norm() > 0) std::swap(q[0], q[c.n - 1]);
      EXPECT_NEAR(scalar_curvature_at(gh, q), ball.scalar_curvature, 1e-8);
    }
    // boundary values
    Point b = Point::zero(c.n);
    b[1] = ball.coord_radius;
    EXPECT_NEAR(sol.value(b), 1.0, 1e-14);
  }
}

TEST(SolveConformal, RadialModeRejectsAsymmetricDirections) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  const auto h = parallel_tracefree_direction(ball, {1, 0, 0, 0, -1, 0, 0, 0, 0});
  EXPECT_THROW(solve_conformal(ball, h, 0.1, radial_grid()), DomainError);
}

TEST(SolveConformal, ReportsNonConvergenceWithHistory) {
  // K = 0 makes the problem linear, so use a curved ball
  const auto ball = make_ball(Model::hyperbolic, 3, 1.0);
  const auto h = radial_normal_direction(ball, {1.0});
  GridSpec g = radial_grid();
  g.max_iterations = 1;
  try {
    solve_conformal(ball, h, 0.3, g);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("residual history"), std::string::npos);
  }
}

TEST(SolveConformal, DegenerateMetricIsRejected) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  const auto h = conformal_direction(ball, {1.0});
  EXPECT_THROW(solve_conformal(ball, h, -1.5, radial_grid()), SingularMetricError);
}

TEST(SolveConformal, LargeSphericalBallFailsThePositivityCheck) {
  const auto ball = make_ball(Model::spherical, 3, 2.0);
  const auto h = radial_normal_direction(ball, {1.0});
  EXPECT_THROW(solve_conformal(ball, h, 0.01, radial_grid()), EigenvalueCollisionError);
}

TEST(SolveConformal, DeviationIsLinearInT) {
  const auto ball = make_ball(Model::hyperbolic, 4, 1.0);
  const auto h = radial_normal_direction(ball, {1.0});
  double prev = 0.0;
  for (double t : {0.02, 0.04, 0.08}) {
    const auto sol = solve_conformal(ball, h, t, radial_grid());
    const double dev = std::max(std::abs(sol.min_u - 1), std::abs(sol.max_u - 1));
    if (prev > 0) {
      EXPECT_NEAR(dev / prev, 2.0, 0.15);
    }
    prev = dev;
  }
}

// ---------------------------------------------------------------------------
// linearization

TEST(LinearizedConformal, ConstantSourceOnEuclideanBall) {
  // h = f g with f = -c |x|^2 / (2n(n-1)) has DR(h) = c, so
  // v = (n-2) c (|x|^2 - R^2) / (8 n (n-1)).
  for (int n = 3; n <= 5; ++n) {
    const double R = 1.2, c = 0.7;
    const auto ball = make_ball(Model::euclidean, n, R);
    const ScalarField f(n, [n, c](std::span<const Jet2> x) {
      Jet2 s(0.0);
      for (int i = 0; i < n; ++i) s += x[i] * x[i];
      return -c * s / (2.0 * n * (n - 1));
    });
    const SymTensorField h = f * ball.metric.tensor();
    const auto v = linearized_conformal(ball, h, radial_grid(12));
    for (double rho : {0.0, 0.4, 0.9, 1.2}) {
      Point p = Point::zero(n);
      p[n - 1] = rho;
      EXPECT_NEAR(v.value(p), (n - 2) * c * (rho * rho - R * R) / (8.0 * n * (n - 1)), 1e-12);
    }
  }
}

TEST(LinearizedConformal, MatchesDerivativeOfNonlinearSolution) {
  const auto ball = make_ball(Model::hyperbolic, 3, 1.0);
  const auto h = conformal_direction(ball, {1.0, 0.5});
  const auto v = linearized_conformal(ball, h, radial_grid());
  const double t = 1e-3;
  const auto up = solve_conformal(ball, h, t, radial_grid());
  const auto um = solve_conformal(ball, h, -t, radial_grid());
  for (double rho : {0.1, 0.5, 0.8}) {
    Point p = Point::zero(3);
    p[1] = rho * ball.coord_radius;
    const double fd = (up.value(p) - um.value(p)) / (2 * t);
    EXPECT_NEAR(v.value(p), fd, 1e-4 * std::abs(fd));
  }
  EXPECT_GT(v.sup, 1e-3);
}

TEST(LinearizedConformal, VanishesInTheFlatLimitOfTheUnitFamily) {
  double prev = INFINITY;
  GridSpec g;
  g.mode = GridMode::full;
  g.full_degree = 4;
  g.even_symmetry = true;
  for (double kappa : {0.4, 0.2, 0.1}) {
    const auto ball = make_unit_family(Model::hyperbolic, 3, kappa);
    const auto h = parallel_tracefree_direction(ball, {1, 0, 0, 0, -1, 0, 0, 0, 0});
    const double sup = linearized_conformal(ball, h, g).sup;
    EXPECT_GT(sup, 0.0);
    EXPECT_LT(sup, 0.5 * prev);
    prev = sup;
  }
}

TEST(LinearizedConformal, VanishesForParallelTraceFreeDirection) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  const auto h = parallel_tracefree_direction(ball, {1, 0, 0, 0, -1, 0, 0, 0, 0});
  GridSpec g;
  g.mode = GridMode::full;
  g.full_degree = 4;
  const auto v = linearized_conformal(ball, h, g);
  EXPECT_LE(v.sup, 1e-10);
}

// ---------------------------------------------------------------------------
// volume along the path

TEST(PathVolume, RotationallySymmetricPathsAreRigid) {
  // A rotationally symmetric metric of constant scalar curvature with a smooth
  // centre and a fixed boundary sphere is isometric to the original ball, so V
  // is constant along these paths and the second variation of g'(0) vanishes.
  struct Case {
    Model model;
    int n;
    double R;
    int family;
  };
  for (const Case c : {Case{Model::euclidean, 3, 1.0, 0}, Case{Model::euclidean, 3, 1.0, 1},
                       Case{Model::hyperbolic, 3, 1.0, 0}, Case{Model::spherical, 4, 0.6, 2}}) {
    const auto ball = make_ball(c.model, c.n, c.R);
    const SymTensorField h = c.family == 0   ? radial_normal_direction(ball, {1.0, -0.5})
                             : c.family == 1 ? tangential_direction(ball, {0.7})
                                             : conformal_direction(ball, {0.4, 0.3});
    PathOptions opts;
    opts.grid = radial_grid();
    const auto pv = path_volume(ball, h, opts);
    EXPECT_LE(std::abs(pv.first_derivative), 1e-8);
    EXPECT_LE(std::abs(pv.second_derivative), 1e-6);
    EXPECT_LE(pv.max_residual, 1e-10);
    EXPECT_LE(pv.max_scalar_defect, 1e-7);

    const auto v = linearized_conformal(ball, h, opts.grid);
    const auto heff = effective_direction(ball, h, v);
    const BallQuadrature q(c.n, ball.coord_radius, {48, c.n == 3 ? 8 : 6});
    const auto sv = second_variation(ball.metric, critical_potential(ball).lambda, heff, q);
    EXPECT_LE(std::abs(sv.total), 1e-8 * (1.0 + sv.int_lambda_grad2))
        << to_string(c.model) << " family " << c.family;
    EXPECT_LE(std::abs(first_variation(ball.metric, heff, q)), 1e-10);
  }
}

TEST(PathVolume, GeneralDirectionsAgreeWithSecondVariation) {
  const auto hyp = make_ball(Model::hyperbolic, 3, 1.0);
  const auto sph = make_ball(Model::spherical, 3, 0.7);
  std::vector<PolynomialTerm> terms;
  terms.push_back({0, 0, 0.3, {}});
  terms.push_back({1, 2, 0.2, {1, 0, 0}});
  terms.push_back({0, 1, -0.4, {1, 1, 0}});
  terms.push_back({2, 2, 0.5, {0, 0, 1}});
  struct Case {
    const SpaceFormBall* ball;
    SymTensorField h;
    bool even;
  };
  const std::vector<Case> cases{
      {&hyp, parallel_tracefree_direction(hyp, {1, 0, 0, 0, -1, 0, 0, 0, 0}), true},
      {&sph, polynomial_direction(sph, terms), false}};
  for (const auto& c : cases) {
    PathOptions opts;
    opts.grid.mode = GridMode::full;
    opts.grid.full_degree = 6;
    opts.grid.even_symmetry = c.even;
    opts.volume_orders = {32, 16};
    const auto pv = path_volume(*c.ball, c.h, opts);
    EXPECT_LE(std::abs(pv.first_derivative), 1e-6);
    EXPECT_LE(pv.max_residual, 1e-10);
    const auto v = linearized_conformal(*c.ball, c.h, opts.grid);
    EXPECT_GT(v.sup, 1e-4);  // DR(h) != 0: the conformal correction matters
    const auto heff = effective_direction(*c.ball, c.h, v);
    const BallQuadrature q(3, c.ball->coord_radius, {32, 16});
    const auto sv = second_variation(c.ball->metric, critical_potential(*c.ball).lambda, heff, q);
    EXPECT_NEAR(pv.second_derivative, sv.total, 1e-3 * std::abs(sv.total));
  }
}

TEST(PathVolume, TransverseTracelessDirectionIncreasesVolume) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  RadialProfile rp = bump_profile(0.15, 0.95, 0.02);
  const auto prof = solve_profile(warped_for(ball), rp, SphericalHarmonic::catalogue(2, 0));
  const auto h = transplant_to_chart(assemble_tt(prof), prof, ball);
  PathOptions opts;
  opts.grid.mode = GridMode::full;
  opts.grid.full_degree = 8;
  opts.grid.even_symmetry = true;
  opts.volume_orders = {48, 24};
  const auto pv = path_volume(ball, h, opts);
  EXPECT_LE(std::abs(pv.first_derivative), 1e-8);
  EXPECT_GT(pv.second_derivative, 0.0);

  // DR(h) = 0, so u - 1 is second order in t
  const auto u1 = solve_conformal(ball, h, 0.02, opts.grid);
  const auto u2 = solve_conformal(ball, h, 0.04, opts.grid);
  const double d1 = std::max(std::abs(u1.min_u - 1), std::abs(u1.max_u - 1));
  const double d2 = std::max(std::abs(u2.min_u - 1), std::abs(u2.max_u - 1));
  EXPECT_NEAR(d2 / d1, 4.0, 0.1);
  EXPECT_LE(linearized_conformal(ball, h, opts.grid).sup, 1e-10);
}

TEST(PathVolume, ParallelTraceFreeSaddleOnTheUnitBall) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  const auto h = parallel_tracefree_direction(ball, {1, 0, 0, 0, -1, 0, 0, 0, 0});
  PathOptions opts;
  opts.grid.mode = GridMode::full;
  opts.grid.full_degree = 8;
  opts.grid.even_symmetry = true;
  opts.volume_orders = {32, 16};
  const auto pv = path_volume(ball, h, opts);
  EXPECT_LE(std::abs(pv.first_derivative), 1e-6);
  EXPECT_NEAR(pv.second_derivative, -kPi / 140, 1e-3 * kPi / 140);
}

TEST(PathVolume, LargestSolvableTimeIsReported) {
  const auto ball = make_ball(Model::euclidean, 3, 1.0);
  const auto h = conformal_direction(ball, {1.0});
  const double t = largest_solvable_t(ball, h, 0.05, 3.2, radial_grid());
  EXPECT_GE(t, 0.4);
  EXPECT_LT(t, 1.6);  // g - t h degenerates at the centre for t >= 1
}
