#pragma once

// Trace-free, divergence-free symmetric 2-tensors with compact support on a
// warped product g = N(r)^{-2} dr^2 + r^2 g_S, built from a radial function a(r)
// and a spherical harmonic Y:
//   h(d_r, d_r) = a Y,  h(d_r, .) = b dY,  h|_{T S_r} = r^2 (c Hess_S Y + d Y g_S).
//
// Fields are expressed in warped Cartesian coordinates y = r w, where
//   g_ij = delta_ij + (N^{-2} - 1) w_i w_j,
// and can be pushed forward to the conformal chart of a space-form ball.

#include <functional>
#include <string>
#include <vector>

#include "volcrit/fields.hpp"
#include "volcrit/riemann.hpp"
#include "volcrit/spaceform.hpp"
#include "volcrit/taylor.hpp"

namespace volcrit {

inline constexpr int kProfileOrder = 8;
using RadialSeries = Taylor<kProfileOrder>;
using RadialMap = std::function<RadialSeries(const RadialSeries&)>;

struct WarpedMetric {
  int m = 2;                 // sphere dimension, n - 1
  double outer_radius = 1.0;  // R in the warped radial coordinate
  double sectional = 0.0;    // curvature of the model this N describes
  RadialMap lapse;           // N(r)

  int dim() const { return m + 1; }
  double lapse_value(double r) const;
  Chart chart() const { return Chart(dim(), ChartKind::warped_cartesian, outer_radius); }
  MetricField metric() const;
};

/// N = sqrt(1 - c r^2) for sectional curvature c: 1, sqrt(1 + k^2 r^2), sqrt(1 - k^2 r^2).
/// For spherical models the warped radius is capped below 1/k (the equator).
WarpedMetric space_form_warped(int m, double sectional, double outer_radius);
/// The warped description of a ball; for spherical balls past the equator the
/// warped chart only covers geodesic radii below pi/(2k).
WarpedMetric warped_for(const SpaceFormBall& ball);

struct SphericalHarmonic {
  int m = 2;
  int degree = 2;
  std::array<double, kMaxDim * kMaxDim> q{};  // degree 2: Y = w^T Q w, Q symmetric trace-free
  std::array<double, kMaxDim> v{};            // degree 1: Y = v . w
  double kappa = 0.0;                         // Delta_S Y + kappa Y = 0

  double qm(int i, int j) const { return q[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double value(const Point& w) const;
  std::string label;

  /// Catalogue of degree-2 harmonics, kappa = 2(m+1). Index 0..m-1 gives
  /// w_i^2 - w_{i+1}^2, further indices give w_i w_j (i < j) in lexicographic order.
  static SphericalHarmonic catalogue(int m, int index);
  static int catalogue_size(int m);
  /// Degree 2 from a symmetric trace-free (m+1)x(m+1) matrix (row-major).
  static SphericalHarmonic from_matrix(int m, const std::vector<double>& entries);
  /// Degree 1 (kappa = m); accepted here but rejected by solve_profile.
  static SphericalHarmonic linear(int m, const std::vector<double>& coeffs);
};

/// a(r) = amplitude * P(r) * exp(-sharpness/((r - r1)(r2 - r))) * exp(4 sharpness/(r2 - r1)^2)
/// on (r1, r2), zero elsewhere; P is a polynomial (default 1).
struct RadialProfile {
  double r1 = 0.2;
  double r2 = 0.6;
  double amplitude = 1.0;
  double sharpness = 1.0;
  std::vector<double> poly{1.0};
  /// Overrides the bump when set (user-supplied profile on (r1, r2)).
  RadialMap custom;
  std::string label = "bump";

  RadialSeries series(double r0) const;
};

RadialProfile bump_profile(double r1, double r2, double amplitude = 1.0);

/// Throws SupportError unless 0 < r1 < r2 < outer radius and |a|, |a'|, |a''| < 1e-10
/// at r1 + eps and r2 - eps, eps = 0.01 (r2 - r1).
void check_endpoint_decay(const RadialProfile& a, double outer_radius);

struct ProfileValues {
  RadialSeries a, b, c, d;
};

struct TTProfile {
  WarpedMetric metric;
  SphericalHarmonic harmonic;
  RadialProfile radial;
  double determinant = 0.0;  // (m-1)(kappa-m)

  /// a, b, c, d as series about r (zero outside (r1, r2)).
  ProfileValues at(double r) const;
};

/// Throws DegenerateSystemError when kappa <= m and SupportError for profiles
/// that are not compactly supported in (0, R).
TTProfile solve_profile(const WarpedMetric& metric, const RadialProfile& a,
                        const SphericalHarmonic& y);

/// The tensor on the warped chart; boundary flag vanishes_on_boundary.
SymTensorField assemble_tt(const TTProfile& profile);

/// Pushforward along x -> y = psi(|x|) x from the conformal chart of `ball`.
/// Throws DomainError when the warped metric does not describe the ball or the
/// support does not fit inside it.
SymTensorField transplant_to_chart(const SymTensorField& h, const TTProfile& profile,
                                   const SpaceFormBall& ball);

/// Coordinate radius in the conformal chart of the sphere with warped radius r.
double conformal_radius_of_area_radius(const SpaceFormBall& ball, double r);

struct TTCheck {
  std::size_t points = 0;
  double max_trace = 0.0;   // |tr_g h|
  double max_div = 0.0;     // |div_g h|_g
  double max_divdiv = 0.0;  // |div div h|
  double max_norm = 0.0;    // max |h|_g, for scale
};

TTCheck verify_tt(const MetricField& g, const SymTensorField& h, const std::vector<Point>& pts);

/// `count` deterministic pseudo-random points with |x| in (rho1, rho2).
std::vector<Point> annulus_points(int dim, double rho1, double rho2, std::size_t count,
                                  unsigned seed);

}  // namespace volcrit
