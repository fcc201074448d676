#include "volcrit/spaceform.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "volcrit/errors.hpp"

namespace volcrit {

std::string to_string(Model m) {
  switch (m) {
    case Model::euclidean:
      return "euclidean";
    case Model::hyperbolic:
      return "hyperbolic";
    case Model::spherical:
      return "spherical";
  }
  return "euclidean";
}

Model model_from_string(const std::string& s) {
  if (s == "euclidean") return Model::euclidean;
  if (s == "hyperbolic") return Model::hyperbolic;
  if (s == "spherical") return Model::spherical;
  throw DomainError("unknown model '" + s + "'");
}

namespace {
double sign_of(Model m) {
  return m == Model::hyperbolic ? -1.0 : (m == Model::spherical ? 1.0 : 0.0);
}

Jet2 coord_norm2(std::span<const Jet2> x) {
  Jet2 s(0.0);
  for (const auto& c : x) s += c * c;
  return s;
}
}  // namespace

Jet2 SpaceFormBall::conformal_factor(std::span<const Jet2> x) const {
  if (model == Model::euclidean) {
    Jet2 one(1.0);
    for (const auto& c : x) one.dim = std::max(one.dim, c.dim);
    return one;
  }
  const double s = sign_of(model);
  return reciprocal(1.0 + coord_norm2(x) * (s * curvature_scale * curvature_scale / 4.0));
}

double SpaceFormBall::area_radius(double r) const {
  if (model == Model::euclidean) return r;
  const double s = sign_of(model);
  return r / (1.0 + s * curvature_scale * curvature_scale * r * r / 4.0);
}

double SpaceFormBall::coord_radius_of(double geo_r) const {
  const double k = curvature_scale;
  switch (model) {
    case Model::euclidean:
      return geo_r;
    case Model::hyperbolic:
      return 2.0 / k * std::tanh(0.5 * k * geo_r);
    case Model::spherical:
      return 2.0 / k * std::tan(0.5 * k * geo_r);
  }
  return geo_r;
}

double SpaceFormBall::geodesic_distance(const Point& x) const {
  const double r = x.norm();
  const double k = curvature_scale;
  switch (model) {
    case Model::euclidean:
      return r;
    case Model::hyperbolic:
      return 2.0 / k * std::atanh(0.5 * k * r);
    case Model::spherical:
      return 2.0 / k * std::atan(0.5 * k * r);
  }
  return r;
}

SpaceFormBall make_ball(Model model, int dim, double R, double k) {
  if (dim < 3 || dim > kMaxDim) throw DomainError("dimension must lie in [3, 6]");
  if (!(R > 0.0)) throw DomainError("geodesic radius must be positive");
  SpaceFormBall b;
  b.dim = dim;
  b.model = model;
  b.geodesic_radius = R;
  if (model == Model::euclidean) {
    b.curvature_scale = 0.0;
  } else {
    if (!(k > 0.0)) throw DomainError("curvature scale must be positive for curved models");
    b.curvature_scale = k;
  }
  b.sectional = sign_of(model) * b.curvature_scale * b.curvature_scale;
  b.scalar_curvature = dim * (dim - 1) * b.sectional;
  if (model == Model::spherical) {
    const double kr = k * R;
    if (kr >= std::numbers::pi) throw DomainError("spherical geodesic ball must have k R < pi");
    if (std::abs(kr - 0.5 * std::numbers::pi) < 1e-12)
      throw UnsupportedRadiusError("hemisphere (k R = pi/2) has no critical potential");
    b.regime = kr < 0.5 * std::numbers::pi ? SphericalRegime::small : SphericalRegime::large;
  }
  b.coord_radius = b.coord_radius_of(R);
  if (model == Model::hyperbolic && !(b.coord_radius < 2.0 / k))
    throw DomainError("hyperbolic chart radius must stay below 2/k");
  b.chart = Chart(dim, ChartKind::conformal_ball, b.coord_radius);

  const SpaceFormBall shape = b;  // captured by value; metric left empty
  SymTensorField g(dim, [shape, dim](std::span<const Jet2> x, JetMatrix& out) {
    const Jet2 psi = shape.conformal_factor(x);
    const Jet2 psi2 = psi * psi;
    Jet2 zero(0.0);
    zero.dim = psi2.dim;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) out(i, j) = i == j ? psi2 : zero;
  });
  b.metric = MetricField(b.chart, std::move(g));
  return b;
}

SpaceFormBall make_unit_family(Model model, int dim, double kappa) {
  if (model == Model::euclidean || kappa == 0.0) return make_ball(Model::euclidean, dim, 1.0);
  if (!(kappa > 0.0 && kappa < 2.0)) throw DomainError("kappa must lie in (0, 2)");
  const double R = model == Model::hyperbolic ? 2.0 / kappa * std::atanh(0.5 * kappa)
                                              : 2.0 / kappa * std::atan(0.5 * kappa);
  SpaceFormBall b = make_ball(model, dim, R, kappa);
  b.coord_radius = 1.0;  // exact; avoids tanh(atanh(.)) rounding
  b.chart = Chart(dim, ChartKind::conformal_ball, 1.0);
  b.metric = MetricField(b.chart, b.metric.tensor());
  return b;
}

CriticalPotential critical_potential(const SpaceFormBall& ball) {
  const int n = ball.dim;
  const double k = ball.curvature_scale;
  const double R = ball.geodesic_radius;
  CriticalPotential cp;
  cp.scalar_curvature = ball.scalar_curvature;
  switch (ball.model) {
    case Model::euclidean: {
      const double c = 1.0 / (2.0 * (n - 1));
      const double R2 = R * R;
      cp.lambda = ScalarField(n, [c, R2](std::span<const Jet2> x) {
        return (R2 - coord_norm2(x)) * c;
      });
      cp.normal_derivative = -R / (n - 1);
      cp.center_value = c * R2;
      break;
    }
    case Model::hyperbolic: {
      // cosh(k r) = (1 + z^2) / (1 - z^2),  z = k|x|/2
      const double c = 1.0 / ((n - 1) * k * k);
      const double inv_cosh_R = 1.0 / std::cosh(k * R);
      const double q = k * k / 4.0;
      cp.lambda = ScalarField(n, [c, inv_cosh_R, q](std::span<const Jet2> x) {
        const Jet2 z2 = coord_norm2(x) * q;
        return (1.0 - (1.0 + z2) / (1.0 - z2) * inv_cosh_R) * c;
      });
      cp.normal_derivative = -std::tanh(k * R) / ((n - 1) * k);
      cp.center_value = c * (1.0 - inv_cosh_R);
      break;
    }
    case Model::spherical: {
      // cos(k r) = (1 - z^2) / (1 + z^2)
      const double c = 1.0 / ((n - 1) * k * k);
      const double cosR = std::cos(k * R);
      if (std::abs(cosR) < 1e-12)
        throw UnsupportedRadiusError("hemisphere (k R = pi/2) has no critical potential");
      const double inv_cos_R = 1.0 / cosR;
      const double q = k * k / 4.0;
      cp.lambda = ScalarField(n, [c, inv_cos_R, q](std::span<const Jet2> x) {
        const Jet2 z2 = coord_norm2(x) * q;
        return ((1.0 - z2) / (1.0 + z2) * inv_cos_R - 1.0) * c;
      });
      cp.normal_derivative = -std::tan(k * R) / ((n - 1) * k);
      cp.center_value = c * (inv_cos_R - 1.0);
      break;
    }
  }
  return cp;
}

ScalarField euclidean_unit_potential(int dim) {
  const double c = 1.0 / (2.0 * (dim - 1));
  return ScalarField(dim, [c](std::span<const Jet2> x) { return (1.0 - coord_norm2(x)) * c; });
}

std::vector<LimitRow> euclidean_limit_check(Model model, int dim, const std::vector<double>& kappas,
                                            QuadratureOrders orders) {
  const BallQuadrature q(dim, 1.0, orders);
  std::vector<Point> samples;
  for (std::size_t k = 0; k < q.ball_size(); ++k) samples.push_back(q.ball_node(k));
  for (std::size_t k = 0; k < q.sphere_size(); ++k) samples.push_back(q.sphere_node(k));
  const ScalarField lambda0 = euclidean_unit_potential(dim);

  std::vector<LimitRow> rows;
  for (double kappa : kappas) {
    if (kappa < 0.0 || kappa > 1.0) throw DomainError("kappa must lie in [0, 1]");
    const SpaceFormBall ball = make_unit_family(model, dim, kappa);
    const CriticalPotential cp = critical_potential(ball);
    LimitRow row;
    row.kappa = kappa;
    for (const Point& p : samples) {
      const JetMatrix g = ball.metric.tensor().at(p);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          row.metric_sup = std::max(row.metric_sup, std::abs(g(i, j).value - (i == j ? 1.0 : 0.0)));
      row.potential_sup =
          std::max(row.potential_sup, std::abs(cp.lambda.value(p) - lambda0.value(p)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace volcrit
