#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "volcrit/errors.hpp"
#include "volcrit/riemann.hpp"
#include "volcrit/spaceform.hpp"

using namespace volcrit;

namespace {

// A generic non-conformal metric: delta + small smooth polynomial perturbation.
MetricField generic_metric(int n) {
  SymTensorField g(n, [n](std::span<const Jet2> x, JetMatrix& out) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet2 v = (i == j ? 1.0 : 0.0) + 0.1 * x[i] * x[j] +
                 0.05 * (i + 1.0) * (j + 1.0) * sin(x[(i + j) % n] + 0.3) * x[0];
        if (i == j) v += 0.2 * x[(i + 1) % n] * x[(i + 1) % n];
        out.set_sym(i, j, v);
      }
  });
  return MetricField(Chart(n, ChartKind::conformal_ball, 1.0), g);
}

// g = e^{2 phi} delta with phi = 0.3 x_0 + 0.2 x_1^2 - 0.1 x_0 x_2.
double phi(const Point& p) { return 0.3 * p[0] + 0.2 * p[1] * p[1] - 0.1 * p[0] * p[2]; }

MetricField conformal_metric(int n) {
  SymTensorField g(n, [n](std::span<const Jet2> x, JetMatrix& out) {
    const Jet2 e = exp(2.0 * (0.3 * x[0] + 0.2 * x[1] * x[1] - 0.1 * x[0] * x[2]));
    Jet2 z(0.0);
    z.dim = e.dim;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = i == j ? e : z;
  });
  return MetricField(Chart(n, ChartKind::conformal_ball, 1.0), g);
}

}  // namespace

TEST(Riemann, ConstantCurvatureModels) {
  for (int n = 3; n <= 6; ++n) {
    const SpaceFormBall hyp = make_ball(Model::hyperbolic, n, 1.0, 1.0);
    const SpaceFormBall sph = make_ball(Model::spherical, n, 1.0, 1.0);
    const Point p = [n] {
      Point q = Point::zero(n);
      for (int i = 0; i < n; ++i) q[i] = 0.1 * (i + 1) - 0.2;
      return q;
    }();
    EXPECT_NEAR(scalar_curvature_at(hyp.metric, p), -n * (n - 1.0), 1e-11);
    EXPECT_NEAR(scalar_curvature_at(sph.metric, p), n * (n - 1.0), 1e-11);
    const CurvaturePoint c = curvature_at(sph.metric, p);
    const LocalGeometry geo = local_geometry(sph.metric, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            EXPECT_NEAR(c.riemann(i, j, k, l),
                        geo.g(i, k) * geo.g(j, l) - geo.g(i, l) * geo.g(j, k), 1e-11);
  }
}

TEST(Riemann, SymmetriesAndFirstBianchi) {
  const int n = 4;
  const MetricField g = generic_metric(n);
  const CurvaturePoint c = curvature_at(g, Point{0.2, -0.3, 0.1, 0.4});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = c.riemann(i, j, k, l);
          EXPECT_NEAR(r, -c.riemann(j, i, k, l), 1e-12);
          EXPECT_NEAR(r, -c.riemann(i, j, l, k), 1e-12);
          EXPECT_NEAR(r, c.riemann(k, l, i, j), 1e-12);
          EXPECT_NEAR(r + c.riemann(j, k, i, l) + c.riemann(k, i, j, l), 0.0, 1e-12);
        }
}

TEST(Riemann, RicciMatchesFiniteDifferencesOfChristoffelSymbols) {
  const int n = 3;
  const MetricField g = generic_metric(n);
  const Point p{0.15, -0.2, 0.3};
  const double e = 1e-5;
  auto gamma_at = [&](const Point& q) { return curvature_at(g, q).christoffel; };
  std::array<Tensor3<double>, 3> dgamma{};
  for (int a = 0; a < n; ++a) {
    Point pp = p, pm = p;
    pp[a] += e;
    pm[a] -= e;
    const auto gp = gamma_at(pp), gm = gamma_at(pm);
    for (std::size_t k = 0; k < gp.a.size(); ++k) dgamma[a].a[k] = (gp.a[k] - gm.a[k]) / (2 * e);
  }
  const CurvaturePoint c = curvature_at(g, p);
  const auto& G = c.christoffel;
  // Ric_jl = d_a G^a_jl - d_l G^a_ja + G^a_ab G^b_jl - G^a_lb G^b_ja
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double ric = 0.0;
      for (int a = 0; a < n; ++a) {
        ric += dgamma[a](a, j, l) - dgamma[l](a, j, a);
        for (int b = 0; b < n; ++b) ric += G(a, a, b) * G(b, j, l) - G(a, l, b) * G(b, j, a);
      }
      EXPECT_NEAR(c.ricci(j, l), ric, 1e-7);
    }
}

TEST(Riemann, ConformalScalarCurvatureFormula) {
  // R = e^{-2 phi} (-2(n-1) Delta phi - (n-2)(n-1) |d phi|^2)
  for (int n = 3; n <= 5; ++n) {
    Point p = Point::zero(n);
    p[0] = 0.2;
    p[1] = -0.4;
    p[2] = 0.3;
    const double lap = 0.4 - 0.0;  // Delta phi = 2 * 0.2
    const double g0 = 0.3 - 0.1 * p[2], g1 = 0.4 * p[1], g2 = -0.1 * p[0];
    const double grad2 = g0 * g0 + g1 * g1 + g2 * g2;
    const double expect =
        std::exp(-2 * phi(p)) * (-2.0 * (n - 1) * lap - (n - 2.0) * (n - 1) * grad2);
    EXPECT_NEAR(scalar_curvature_at(conformal_metric(n), p), expect, 1e-12);
  }
}

TEST(Riemann, LaplacianOfConformalMetric) {
  // Delta_g f = e^{-2 phi} (Delta_0 f + (n-2) <d phi, d f>)
  const int n = 4;
  const MetricField g = conformal_metric(n);
  const ScalarField f(n, [](std::span<const Jet2> x) { return x[0] * x[1] + x[2] * x[2] * x[3]; });
  const Point p{0.1, 0.2, -0.3, 0.25};
  const double lap0 = 2 * p[3];
  const double dphi[4] = {0.3 - 0.1 * p[2], 0.4 * p[1], -0.1 * p[0], 0.0};
  const double df[4] = {p[1], p[0], 2 * p[2] * p[3], p[2] * p[2]};
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += dphi[i] * df[i];
  const LocalGeometry geo = local_geometry(g, p);
  const ScalarDerivatives s = covariant_scalar(geo, eval_jet(g.chart(), f, p));
  EXPECT_NEAR(s.laplacian, std::exp(-2 * phi(p)) * (lap0 + (n - 2) * dot), 1e-12);
}

TEST(Riemann, TensorOperatorsOnPureTrace) {
  // h = f g: nabla h = df (x) g, div h = df, nabla div h = Hess f, tr h = n f.
  const int n = 3;
  const MetricField g = generic_metric(n);
  const ScalarField f(n, [](std::span<const Jet2> x) { return exp(x[0]) * x[1] + x[2]; });
  SymTensorField gt = g.tensor();
  const SymTensorField h = f * gt;
  const Point p{0.3, 0.1, -0.2};
  const CovariantOps ops = covariant_ops(g, f, h, p);
  const LocalGeometry geo = local_geometry(g, p);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(ops.tensor.div[i], ops.scalar.grad[i], 1e-12);
    for (int j = 0; j < n; ++j) {
      EXPECT_NEAR(ops.tensor.nabla_div(i, j), ops.scalar.hessian(i, j), 1e-11);
      for (int k = 0; k < n; ++k)
        EXPECT_NEAR(ops.tensor.nabla(i, j, k), ops.scalar.grad[k] * geo.g(i, j), 1e-12);
    }
  }
  EXPECT_NEAR(ops.tensor.div_div, ops.scalar.laplacian, 1e-11);
  EXPECT_NEAR(ops.tensor.trace.value, n * ops.scalar.value, 1e-12);
  EXPECT_NEAR(ops.tensor.trace_derivs.laplacian, n * ops.scalar.laplacian, 1e-11);
}

TEST(Riemann, DivergenceTheoremOnHyperbolicBall) {
  const SpaceFormBall ball = make_ball(Model::hyperbolic, 3, 0.8, 1.0);
  const ScalarField f(3, [](std::span<const Jet2> x) { return x[0] * x[0] * x[1] + exp(x[2]); });
  const BallQuadrature q(3, ball.coord_radius, {24, 12});
  const double lhs = integrate_ball(
      q,
      [&](const Point& p) {
        return covariant_scalar(local_geometry(ball.metric, p), eval_jet(ball.chart, f, p)).laplacian;
      },
      [&](const Point& p) { return ball.metric.volume_density(p); });
  const double rhs = integrate_sphere(
      q,
      [&](const Point& p) {
        const BoundaryGeometry b = boundary_geometry(ball.metric, p);
        const Jet2 fj = eval_jet(ball.chart, f, p);
        double dn = 0.0;
        for (int i = 0; i < 3; ++i) dn += b.normal[i] * fj.d(i);
        return dn;
      },
      [&](const Point& p) { return sphere_area_density(ball.metric, p); });
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
}

TEST(Riemann, BoundaryGeometryOfEuclideanUnitBall) {
  const SpaceFormBall ball = make_ball(Model::euclidean, 3, 1.0);
  const BoundaryGeometry b = boundary_geometry(ball.metric, Point{0.6, 0.0, 0.8});
  EXPECT_NEAR(b.mean_curvature, 2.0, 1e-12);
  EXPECT_NEAR(2 * b.ricci_normal + b.boundary_scalar, 2.0, 1e-10);
  EXPECT_NEAR(b.area_density, 1.0, 1e-12);
}

TEST(Riemann, BoundaryGeometryOfCurvedBalls) {
  for (int n = 3; n <= 5; ++n)
    for (Model m : {Model::hyperbolic, Model::spherical}) {
      const double k = 1.3, R = 0.9;
      const SpaceFormBall ball = make_ball(m, n, R, k);
      Point p = Point::zero(n);
      p[0] = 0.6 * ball.coord_radius;
      p[n - 1] = 0.8 * ball.coord_radius;
      const BoundaryGeometry b = boundary_geometry(ball.metric, p);
      const double sn = m == Model::hyperbolic ? std::sinh(k * R) / k : std::sin(k * R) / k;
      const double cn = m == Model::hyperbolic ? std::cosh(k * R) : std::cos(k * R);
      EXPECT_NEAR(b.mean_curvature, (n - 1) * cn / sn, 1e-10);
      EXPECT_NEAR(b.boundary_scalar, (n - 1.0) * (n - 2.0) / (sn * sn), 1e-8);
      EXPECT_NEAR(b.ricci_normal, (n - 1) * ball.sectional, 1e-10);
      EXPECT_NEAR(level_set_mean_curvature(ball.metric, p), b.mean_curvature, 1e-10);
      EXPECT_NEAR(b.area_density, std::pow(sn / ball.coord_radius, n - 1), 1e-10);
      for (int a = 0; a < n - 1; ++a)
        for (int c = 0; c < n - 1; ++c) EXPECT_NEAR(b.induced(a, c), a == c ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Riemann, DegenerateMetricThrows) {
  SymTensorField g(3, [](std::span<const Jet2> x, JetMatrix& out) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out(i, j) = i == j ? (i == 2 ? x[0] * 0.0 : 1.0 + 0.0 * x[0]) : 0.0 * x[0];
  });
  const MetricField m(Chart(3, ChartKind::conformal_ball, 1.0), g);
  EXPECT_THROW(curvature_at(m, Point{0.1, 0.1, 0.1}), SingularMetricError);
}
