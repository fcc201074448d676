#pragma once

// Constant-scalar-curvature paths g(t) = u(t)^{4/(n-2)} (g + t h) through a
// space-form ball, obtained from the Dirichlet problem
//   alpha Delta_{g+th} u - R(g+th) u + K u^a = 0,  u = 1 on the boundary,
//   alpha = 4(n-1)/(n-2), a = (n+2)/(n-2),
// its linearization (n-1) Delta v + K v = (n-2)/4 DR(h), and the first
// Dirichlet eigenvalue of geodesic balls.

#include <string>
#include <vector>

#include "volcrit/fields.hpp"
#include "volcrit/riemann.hpp"
#include "volcrit/spaceform.hpp"

namespace volcrit {

enum class GridMode { radial, full };

std::string to_string(GridMode m);

struct GridSpec {
  GridMode mode = GridMode::radial;
  /// radial: number of Chebyshev modes in s = |x|^2/R^2.
  int radial_modes = 24;
  /// full: total polynomial degree of the interior factor.
  int full_degree = 8;
  /// full: keep only monomials even in every coordinate.
  bool even_symmetry = false;
  /// full: Galerkin quadrature; zero entries are chosen from full_degree.
  QuadratureOrders galerkin_orders{0, 0};
  double newton_tolerance = 1e-10;
  int max_iterations = 40;
};

/// u = 1 + b(x) sum_k c_k phi_k(x) with b = 1 - |x|^2/R^2. Radial mode uses
/// phi_k = T_k(2s - 1), s = |x|^2/R^2, and collocation on one axis; full mode
/// uses products of T_k(x_i/R) and a Galerkin formulation.
class ConformalBasis {
 public:
  ConformalBasis() = default;
  ConformalBasis(int dim, double coord_radius, const GridSpec& grid);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  std::size_t size() const { return size_; }
  const GridSpec& grid() const { return grid_; }
  /// Jets of every basis function (boundary factor included) at x.
  std::vector<Jet2> eval(std::span<const Jet2> x) const;
  /// 1 + sum c_k phi_k as a jet.
  Jet2 combine(std::span<const Jet2> x, const std::vector<double>& c, double constant) const;
  /// Radial mode: collocation points. Full mode: Galerkin quadrature nodes.
  std::vector<Point> nodes() const;
  /// Quadrature used by the Galerkin (full) mode.
  QuadratureOrders galerkin_orders() const;

 private:
  int dim_ = 3;
  double radius_ = 1.0;
  GridSpec grid_;
  std::size_t size_ = 0;
  std::vector<std::array<int, kMaxDim>> exponents_;  // full mode
};

struct ConformalSolution {
  double t = 0.0;
  ConformalBasis basis;
  std::vector<double> coeffs;
  int iterations = 0;
  double residual = 0.0;  // max |F| of the discrete equations
  std::vector<double> residual_trace;
  double min_u = 1.0, max_u = 1.0;

  double value(const Point& x) const;
  ScalarField field() const;  // u as a field
};

/// Throws NonConvergenceError (with the residual history) when Newton fails,
/// SingularMetricError when g + t h degenerates, DomainError when the radial mode
/// is used with a direction that is not rotationally symmetric, and
/// EigenvalueCollisionError when (n-1) lambda_1 - K <= 0.
ConformalSolution solve_conformal(const SpaceFormBall& ball, const SymTensorField& h, double t,
                                  const GridSpec& grid = {});

struct LinearizedSolution {
  ConformalBasis basis;
  std::vector<double> coeffs;
  double residual = 0.0;
  double sup = 0.0;  // sup |v| over the collocation points

  double value(const Point& x) const;
  ScalarField field() const;
};

/// (n-1) Delta v + K v = (n-2)/4 DR(h), v = 0 on the boundary.
LinearizedSolution linearized_conformal(const SpaceFormBall& ball, const SymTensorField& h,
                                        const GridSpec& grid = {});

/// h + 4/(n-2) v g: the velocity of the constant-scalar-curvature path.
SymTensorField effective_direction(const SpaceFormBall& ball, const SymTensorField& h,
                                   const LinearizedSolution& v);

/// u^{4/(n-2)} (g + t h).
MetricField conformal_metric(const SpaceFormBall& ball, const SymTensorField& h,
                             const ConformalSolution& u);

struct PathVolume {
  std::vector<double> t;
  std::vector<double> volume;
  double first_derivative = 0.0;
  double second_derivative = 0.0;
  double first_truncation = 0.0;   // |Richardson - plain difference|
  double second_truncation = 0.0;
  double max_residual = 0.0;
  double bracket_constant = 0.0;   // max |u - 1| / |t|
  double max_scalar_defect = 0.0;  // sup |R(g(t)) - K| at check points
  int max_iterations = 0;
};

struct PathOptions {
  double step = 0.02;  // samples at 0, +-step, +-2 step
  GridSpec grid;
  QuadratureOrders volume_orders{64, 4};
  std::size_t defect_points = 8;
};

PathVolume path_volume(const SpaceFormBall& ball, const SymTensorField& h,
                       const PathOptions& opts = {});

/// Largest |t| in {t_start, 2 t_start, ...} <= t_max for which the solve succeeds.
double largest_solvable_t(const SpaceFormBall& ball, const SymTensorField& h, double t_start,
                          double t_max, const GridSpec& grid = {});

// ---------------------------------------------------------------------------
// Direction families. f is a polynomial in s = |x|^2/R^2 (coefficients in
// increasing degree), R the coordinate radius.

/// f(s) x_i x_j: rotationally symmetric, normal-normal only on the boundary.
SymTensorField radial_normal_direction(const SpaceFormBall& ball, std::vector<double> f);
/// f(s)(1 - s)(|x|^2 delta_ij - x_i x_j)/R^2: rotationally symmetric, vanishes on the boundary.
SymTensorField tangential_direction(const SpaceFormBall& ball, std::vector<double> f);
/// f(s)(1 - s) g.
SymTensorField conformal_direction(const SpaceFormBall& ball, std::vector<double> f);
/// lambda * H with H a constant trace-free matrix in chart coordinates (row-major).
SymTensorField parallel_tracefree_direction(const SpaceFormBall& ball,
                                            const std::vector<double>& entries);

struct PolynomialTerm {
  int i = 0, j = 0;  // component (symmetrized)
  double coeff = 0.0;
  std::array<int, kMaxDim> powers{};  // monomial in x / R
};

/// (1 - s) * sum of terms: a general (non-symmetric) direction vanishing on the boundary.
SymTensorField polynomial_direction(const SpaceFormBall& ball, std::vector<PolynomialTerm> terms);

struct EigenEstimate {
  int dim = 3;
  Model model = Model::euclidean;
  double geodesic_radius = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;       // midpoint of the bracket
  double shift = 0.0;       // K/(n-1): the linearized operator is positive iff value > shift
  bool exceeds_shift = false;
};

/// First Dirichlet eigenvalue of -Delta on the geodesic ball of radius R by
/// Sturm shooting on the radial equation f'' + (n-1)(sn'/sn) f' + mu f = 0.
EigenEstimate first_eigenvalue_radial(Model model, int dim, double geodesic_radius,
                                      double curvature_scale = 1.0);
EigenEstimate first_eigenvalue_radial(const SpaceFormBall& ball);

}  // namespace volcrit
