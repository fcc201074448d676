#pragma once

// Variational formulas for the volume functional on constant-scalar-curvature
// metrics: linearized and second-order scalar curvature, first and second
// variation of volume, the linearized mean curvature of the boundary and the
// integral boundary identities.

#include <optional>
#include <string>
#include <vector>

#include "volcrit/fields.hpp"
#include "volcrit/riemann.hpp"
#include "volcrit/spaceform.hpp"

namespace volcrit {

/// DR_g(h) = -Delta tr h + div div h - <h, Ric>.
double linearized_scalar(const MetricField& g, const SymTensorField& h, const Point& p);

/// d^2/dt^2 R(g + t h + t^2/2 h') at t = 0.
double second_scalar(const MetricField& g, const SymTensorField& h, const SymTensorField& hprime,
                     const Point& p);

/// Pointwise residual -(Delta lambda) g + Hess lambda - lambda Ric - g.
Mat critical_residual_at(const MetricField& g, const ScalarField& lambda, const Point& p);

struct ResidualReport {
  double sup = 0.0;            // sup over nodes of the g-norm
  double l2 = 0.0;             // (int |T|^2 dV)^{1/2}
  double boundary_lambda = 0.0;  // sup |lambda| on the boundary nodes
};

ResidualReport critical_residual(const MetricField& g, const ScalarField& lambda,
                                 const BallQuadrature& q);

double volume(const MetricField& g, const BallQuadrature& q);
/// (1/2) int tr_g h dV_g.
double first_variation(const MetricField& g, const SymTensorField& h, const BallQuadrature& q);

struct SecondVariationBreakdown {
  double term_trace2 = 0.0;     // 1/4 int (tr h)^2
  double term_divfree = 0.0;    // int lambda |div h - 1/2 d tr h|^2
  double term_gradient = 0.0;   // 1/4 int lambda |nabla h|^2
  double term_cross = 0.0;      // int lambda (<nabla div h, h> - <h, Hess tr h>)
  double term_div2 = 0.0;       // -1/2 int lambda |div h|^2
  double term_curvature = 0.0;  // -1/2 int lambda h^{sp} R_{kpls} h^{lk}
  double total = 0.0;
  // Filled when the TT reduction was requested.
  std::optional<double> reduced;
  std::optional<double> reduced_rel_error;
  // Auxiliary integrals.
  double int_lambda_h2 = 0.0;     // int lambda |h|^2
  double int_lambda_grad2 = 0.0;  // int lambda |nabla h|^2
  double residual_sup = 0.0;
};

struct SecondVariationOptions {
  double residual_tolerance = 1e-6;
  QuadratureOrders residual_orders{6, 4};
  /// Compare against the TT reduction 1/4 int lambda |nabla h|^2 + K/(2n(n-1)) int lambda |h|^2
  /// using this scalar curvature K.
  std::optional<double> tt_scalar_curvature;
  bool require_boundary_flag = true;
};

/// Throws InvalidCriticalPointError when the critical residual of (g, lambda)
/// exceeds the tolerance and SupportError when h carries no boundary certificate.
SecondVariationBreakdown second_variation(const MetricField& g, const ScalarField& lambda,
                                          const SymTensorField& h, const BallQuadrature& q,
                                          const SecondVariationOptions& opts = {});

/// H'(0) = 1/2 h_{nn;n} + 1/2 H h_{nn} - <II, h> - (div h - 1/2 d tr h)(nu)
/// at a point of the coordinate sphere through p.
double mean_curvature_prime(const MetricField& g, const SymTensorField& h, const Point& p);

// ---------------------------------------------------------------------------

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool relative = true;
  bool pass = false;
  std::string anchor;
};

struct PathVariation {
  std::string name;
  SymTensorField h;  // tangent g'(0) of a path with constant scalar curvature and fixed boundary metric
  double tolerance = 1e-4;
};

struct BoundaryIdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
};

/// Round-ball identities (Euclidean volume chain, Minkowski equality, the
/// critical-potential flux identity) and, for each path, DV = int_Sigma lambda H'(0)
/// with a solution lambda of the critical equation that is constant on the boundary.
BoundaryIdentityReport boundary_identity_suite(const SpaceFormBall& ball,
                                               const CriticalPotential& cp,
                                               const BallQuadrature& q,
                                               const std::vector<PathVariation>& paths = {});

IdentityCheck make_check(std::string name, double lhs, double rhs, double tol, bool relative,
                         std::string anchor);

}  // namespace volcrit
