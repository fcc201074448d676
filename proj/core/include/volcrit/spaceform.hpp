#pragma once

// Geodesic balls in R^n, H^n and S^n in the conformally flat chart
//   g = (1 + s k^2 |x|^2 / 4)^{-2} g_euclid,  s = -1 (hyperbolic), +1 (spherical),
// which has constant sectional curvature s k^2, together with the closed-form
// critical potential of each ball.

#include <string>
#include <vector>

#include "volcrit/fields.hpp"
#include "volcrit/riemann.hpp"

namespace volcrit {

enum class Model { euclidean, hyperbolic, spherical };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

enum class SphericalRegime { not_spherical, small, large };

struct SpaceFormBall {
  int dim = 3;
  Model model = Model::euclidean;
  double curvature_scale = 0.0;  // k >= 0; sectional curvature is 0, -k^2 or +k^2
  double sectional = 0.0;
  double geodesic_radius = 1.0;
  double scalar_curvature = 0.0;  // K = n(n-1) * sectional
  double coord_radius = 1.0;
  SphericalRegime regime = SphericalRegime::not_spherical;
  Chart chart;
  MetricField metric;

  /// Geodesic distance from the center to x.
  double geodesic_distance(const Point& x) const;
  /// Conformal factor psi with g = psi^2 g_euclid, as a jet of the coordinates.
  Jet2 conformal_factor(std::span<const Jet2> x) const;
  /// Area radius psi(|x|) |x| of the coordinate sphere through x.
  double area_radius(double coord_r) const;
  /// Coordinate radius of the geodesic sphere of radius r.
  double coord_radius_of(double geodesic_r) const;
};

/// Throws UnsupportedRadiusError for a hemisphere (k R = pi/2) and
/// DomainError for invalid parameters (n < 3, R <= 0, k R >= pi on spheres).
SpaceFormBall make_ball(Model model, int dim, double geodesic_radius, double curvature_scale = 1.0);

/// The kappa family on the unit coordinate ball: g_kappa = (1 -/+ kappa^2|x|^2/4)^{-2} g0.
/// kappa == 0 gives the Euclidean unit ball.
SpaceFormBall make_unit_family(Model model, int dim, double kappa);

struct CriticalPotential {
  ScalarField lambda;
  double scalar_curvature = 0.0;
  /// d lambda / d nu on the boundary (outward unit normal).
  double normal_derivative = 0.0;
  /// lambda at the center.
  double center_value = 0.0;
};

CriticalPotential critical_potential(const SpaceFormBall& ball);

/// lambda_0 = (1 - |x|^2) / (2(n-1)) on the unit Euclidean ball.
ScalarField euclidean_unit_potential(int dim);

struct LimitRow {
  double kappa = 0.0;
  double metric_sup = 0.0;     // sup over samples and components of |g_kappa - g_0|
  double potential_sup = 0.0;  // sup |lambda_kappa - lambda_0|
};

/// Sup-norm distances of the kappa family from the Euclidean unit ball,
/// sampled on the nodes of `orders` plus the boundary sphere.
std::vector<LimitRow> euclidean_limit_check(Model model, int dim, const std::vector<double>& kappas,
                                            QuadratureOrders orders = {16, 8});

}  // namespace volcrit
