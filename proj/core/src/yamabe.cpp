#include "volcrit/yamabe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "volcrit/errors.hpp"
#include "volcrit/parallel.hpp"
#include "volcrit/ttensor.hpp"
#include "volcrit/variation.hpp"

namespace volcrit {

std::string to_string(GridMode m) { return m == GridMode::radial ? "radial" : "full"; }

namespace {

double conformal_exponent_alpha(int n) { return 4.0 * (n - 1) / (n - 2.0); }
double critical_power(int n) { return (n + 2.0) / (n - 2.0); }

// Chebyshev T_0..T_{count-1} at z.
std::vector<Jet2> chebyshev(const Jet2& z, int count) {
  std::vector<Jet2> t(static_cast<std::size_t>(std::max(count, 2)));
  t[0] = Jet2(1.0);
  t[1] = z;
  for (int k = 2; k < count; ++k) t[k] = 2.0 * z * t[k - 1] - t[k - 2];
  t.resize(static_cast<std::size_t>(count));
  return t;
}

}  // namespace

ConformalBasis::ConformalBasis(int dim, double coord_radius, const GridSpec& grid)
    : dim_(dim), radius_(coord_radius), grid_(grid) {
  if (grid.mode == GridMode::radial) {
    if (grid.radial_modes < 2) throw DomainError("radial_modes must be at least 2");
    size_ = static_cast<std::size_t>(grid.radial_modes);
    return;
  }
  if (grid.full_degree < 0) throw DomainError("full_degree must be non-negative");
  std::array<int, kMaxDim> e{};
  // enumerate multi-indices of total degree <= D
  const int D = grid.full_degree;
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == dim_) {
      exponents_.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      if (grid.even_symmetry && k % 2) continue;
      e[static_cast<std::size_t>(i)] = k;
      rec(i + 1, left - k);
    }
    e[static_cast<std::size_t>(i)] = 0;
  };
  rec(0, D);
  size_ = exponents_.size();
}

std::vector<Jet2> ConformalBasis::eval(std::span<const Jet2> x) const {
  Jet2 s(0.0);
  for (int i = 0; i < dim_; ++i) s += x[i] * x[i];
  s = s / (radius_ * radius_);
  const Jet2 bump = 1.0 - s;
  std::vector<Jet2> out;
  out.reserve(size_);
  if (grid_.mode == GridMode::radial) {
    for (const auto& t : chebyshev(2.0 * s - 1.0, static_cast<int>(size_))) out.push_back(bump * t);
    return out;
  }
  std::vector<std::vector<Jet2>> axis(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) axis[i] = chebyshev(x[i] / radius_, grid_.full_degree + 1);
  for (const auto& e : exponents_) {
    Jet2 m = bump;
    for (int i = 0; i < dim_; ++i)
      if (e[i] > 0) m = m * axis[i][static_cast<std::size_t>(e[i])];
    out.push_back(m);
  }
  return out;
}

Jet2 ConformalBasis::combine(std::span<const Jet2> x, const std::vector<double>& c,
                             double constant) const {
  const auto phi = eval(x);
  Jet2 u(constant);
  for (std::size_t k = 0; k < phi.size() && k < c.size(); ++k) u += c[k] * phi[k];
  return u;
}

QuadratureOrders ConformalBasis::galerkin_orders() const {
  QuadratureOrders q = grid_.galerkin_orders;
  if (q.radial_nodes <= 0) q.radial_nodes = std::max(16, grid_.full_degree + 8);
  if (q.angular_degree <= 0) q.angular_degree = 2 * grid_.full_degree + 8;
  return q;
}

std::vector<Point> ConformalBasis::nodes() const {
  std::vector<Point> pts;
  if (grid_.mode == GridMode::radial) {
    const int N = static_cast<int>(size_);
    for (int j = 0; j < N; ++j) {
      const double s = 0.5 * (1.0 + std::cos(std::numbers::pi * (j + 0.5) / N));
      Point p = Point::zero(dim_);
      p[0] = radius_ * std::sqrt(s);
      pts.push_back(p);
    }
    return pts;
  }
  const BallQuadrature q(dim_, radius_, galerkin_orders());
  pts.reserve(q.ball_size());
  for (std::size_t k = 0; k < q.ball_size(); ++k) pts.push_back(q.ball_node(k));
  return pts;
}

namespace {

ScalarField basis_field(const ConformalBasis& basis, const std::vector<double>& c, double constant) {
  return ScalarField(basis.dim(), [basis, c, constant](std::span<const Jet2> x) {
    return basis.combine(x, c, constant);
  });
}

double basis_value(const ConformalBasis& basis, const std::vector<double>& c, double constant,
                   const Point& p) {
  const auto x = seed(p);
  return basis.combine(std::span<const Jet2>(x.data(), static_cast<std::size_t>(p.dim)), c,
                       constant)
      .value;
}

// Radial mode: rows are collocation points and lap holds Delta phi.
// Full mode: rows are quadrature nodes, weight = quadrature weight * sqrt(det g)
// and stiffness_kl = int <d phi_k, d phi_l>_g dV.
struct Discretization {
  GridMode mode = GridMode::radial;
  std::vector<Point> points;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd lap;
  Eigen::VectorXd weight;
  Eigen::MatrixXd stiffness;
  Eigen::VectorXd scalar;
};

Discretization discretize(const MetricField& g, const ConformalBasis& basis) {
  Discretization d;
  d.mode = basis.grid().mode;
  d.points = basis.nodes();
  const int n = basis.dim();
  const auto P = static_cast<Eigen::Index>(d.points.size());
  const auto B = static_cast<Eigen::Index>(basis.size());
  const bool full = d.mode == GridMode::full;
  std::optional<BallQuadrature> quad;
  if (full) quad.emplace(n, basis.radius(), basis.galerkin_orders());
  d.phi.resize(P, B);
  d.scalar.resize(P);
  Eigen::MatrixXd grad;  // rows scaled so that grad^T grad is the stiffness matrix
  if (full) {
    d.weight.resize(P);
    grad.resize(P * n, B);
  } else {
    d.lap.resize(P, B);
  }
  parallel_for(d.points.size(), [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const Point& p = d.points[idx];
    if (g.min_eigenvalue(p) <= 0.0)
      throw SingularMetricError("metric g + t h is not positive definite at a discretization node");
    const LocalGeometry geo = local_geometry(g, p);
    d.scalar(i) = curvature(geo).scalar;
    const auto x = seed(p);
    const auto phi = basis.eval(std::span<const Jet2>(x.data(), static_cast<std::size_t>(p.dim)));
    if (!full) {
      for (Eigen::Index k = 0; k < B; ++k) {
        const auto sd = covariant_scalar(geo, phi[static_cast<std::size_t>(k)]);
        d.phi(i, k) = sd.value;
        d.lap(i, k) = sd.laplacian;
      }
      return;
    }
    Eigen::MatrixXd ginv(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) ginv(a, b) = geo.ginv(a, b);
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(ginv).matrixL();
    d.weight(i) = quad->ball_weight(idx) * std::sqrt(geo.det);
    const double sw = std::sqrt(d.weight(i));
    for (Eigen::Index k = 0; k < B; ++k) {
      const Jet2& f = phi[static_cast<std::size_t>(k)];
      d.phi(i, k) = f.value;
      for (int a = 0; a < n; ++a) {
        double v = 0.0;
        for (int b = a; b < n; ++b) v += L(b, a) * f.d(b);
        grad(i * n + a, k) = sw * v;
      }
    }
  });
  if (full) d.stiffness = grad.transpose() * grad;
  return d;
}

// In radial mode the equation is only imposed on one axis; check that the
// metric is rotationally symmetric enough for that to mean anything.
void require_rotational_symmetry(const MetricField& g, const ConformalBasis& basis,
                                 double radius) {
  const int n = basis.dim();
  for (double frac : {0.3, 0.6, 0.85}) {
    Point a = Point::zero(n), b = Point::zero(n);
    a[0] = frac * radius;
    for (int i = 0; i < n; ++i) b[i] = frac * radius / std::sqrt(static_cast<double>(n));
    b[n - 1] *= -1.0;
    const LocalGeometry ga = local_geometry(g, a), gb = local_geometry(g, b);
    const double ra = curvature(ga).scalar, rb = curvature(gb).scalar;
    const auto xa = seed(a), xb = seed(b);
    const auto pa = basis.eval(std::span<const Jet2>(xa.data(), static_cast<std::size_t>(n)));
    const auto pb = basis.eval(std::span<const Jet2>(xb.data(), static_cast<std::size_t>(n)));
    const double la = covariant_scalar(ga, pa[1]).laplacian;
    const double lb = covariant_scalar(gb, pb[1]).laplacian;
    const double dets = std::abs(std::sqrt(ga.det) - std::sqrt(gb.det));
    if (std::abs(ra - rb) > 1e-8 * (1.0 + std::abs(ra)) ||
        std::abs(la - lb) > 1e-8 * (1.0 + std::abs(la)) || dets > 1e-10 * std::sqrt(ga.det))
      throw DomainError(
          "radial mode needs a rotationally symmetric direction; use the full grid mode");
  }
}

void require_positive_operator(const SpaceFormBall& ball) {
  if (ball.scalar_curvature <= 0.0) return;
  const EigenEstimate e = first_eigenvalue_radial(ball);
  if (!e.exceeds_shift) {
    std::ostringstream os;
    os << "(n-1) lambda_1 - K <= 0 on this ball (lambda_1 = " << e.value
       << ", K/(n-1) = " << e.shift << ")";
    throw EigenvalueCollisionError(os.str());
  }
}

Eigen::VectorXd solve_square(const Eigen::MatrixXd& J, const Eigen::VectorXd& rhs) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (!lu.isInvertible()) throw EigenvalueCollisionError("discrete operator is singular");
  return lu.solve(rhs);
}

// Discrete form of alpha Delta u - R u + K u^a = 0 with u = 1 + phi c.
// Radial: the equation at the collocation points. Full: its weak form tested
// against every basis function (sign flipped so the Jacobian is a stiffness
// matrix plus lower-order terms).
struct ConformalSystem {
  const Discretization& d;
  double alpha, a, K;

  // returns false when u is not positive at some node
  bool residual(const Eigen::VectorXd& c, Eigen::VectorXd& u, Eigen::VectorXd& F) const {
    u = Eigen::VectorXd::Ones(d.phi.rows()) + d.phi * c;
    if (!(u.minCoeff() > 0.0)) return false;
    Eigen::VectorXd pw(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) pw(i) = std::pow(u(i), a);
    if (d.mode == GridMode::radial) {
      F = alpha * (d.lap * c) - d.scalar.cwiseProduct(u) + K * pw;
    } else {
      const Eigen::VectorXd local = d.weight.cwiseProduct(d.scalar.cwiseProduct(u) - K * pw);
      F = alpha * (d.stiffness * c) + d.phi.transpose() * local;
    }
    return F.allFinite();
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
    Eigen::VectorXd react(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) react(i) = K * a * std::pow(u(i), a - 1.0);
    if (d.mode == GridMode::radial)
      return alpha * d.lap + (react - d.scalar).asDiagonal() * d.phi;
    const Eigen::VectorXd w = d.weight.cwiseProduct(d.scalar - react);
    return alpha * d.stiffness + d.phi.transpose() * w.asDiagonal() * d.phi;
  }
};

}  // namespace

double ConformalSolution::value(const Point& x) const { return basis_value(basis, coeffs, 1.0, x); }
ScalarField ConformalSolution::field() const { return basis_field(basis, coeffs, 1.0); }
double LinearizedSolution::value(const Point& x) const { return basis_value(basis, coeffs, 0.0, x); }
ScalarField LinearizedSolution::field() const { return basis_field(basis, coeffs, 0.0); }

ConformalSolution solve_conformal(const SpaceFormBall& ball, const SymTensorField& h, double t,
                                  const GridSpec& grid) {
  const int n = ball.dim;
  require_positive_operator(ball);
  const MetricField gt = ball.metric.perturbed(h, t);
  ConformalSolution sol;
  sol.t = t;
  sol.basis = ConformalBasis(n, ball.coord_radius, grid);
  if (grid.mode == GridMode::radial && t != 0.0)
    require_rotational_symmetry(gt, sol.basis, ball.coord_radius);

  const Discretization d = discretize(gt, sol.basis);
  const ConformalSystem sys{d, conformal_exponent_alpha(n), critical_power(n),
                            ball.scalar_curvature};

  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sol.basis.size()));
  Eigen::VectorXd u, F;
  sys.residual(c, u, F);
  double fnorm = F.lpNorm<Eigen::Infinity>();
  sol.residual_trace.push_back(fnorm);
  int it = 0;
  while (fnorm > grid.newton_tolerance && it < grid.max_iterations) {
    ++it;
    const Eigen::VectorXd step = solve_square(sys.jacobian(u), -F);
    // backtracking on the Euclidean residual norm
    const double f2 = F.norm();
    double damping = 1.0;
    Eigen::VectorXd trial_u, trial_F;
    bool accepted = false;
    while (damping >= 1e-4) {
      if (sys.residual(c + damping * step, trial_u, trial_F) &&
          trial_F.norm() <= (1.0 - 1e-4 * damping) * f2) {
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) break;
    c += damping * step;
    u = trial_u;
    F = trial_F;
    fnorm = F.lpNorm<Eigen::Infinity>();
    sol.residual_trace.push_back(fnorm);
  }
  if (fnorm > grid.newton_tolerance) {
    std::ostringstream os;
    os << "Newton iteration for the conformal factor did not converge at t = " << t
       << "; residual history:";
    for (double r : sol.residual_trace) os << ' ' << r;
    throw NonConvergenceError(os.str());
  }
  sol.iterations = it;
  sol.residual = fnorm;
  sol.coeffs.assign(c.data(), c.data() + c.size());
  sol.min_u = u.minCoeff();
  sol.max_u = u.maxCoeff();
  return sol;
}

LinearizedSolution linearized_conformal(const SpaceFormBall& ball, const SymTensorField& h,
                                        const GridSpec& grid) {
  const int n = ball.dim;
  const double K = ball.scalar_curvature;
  LinearizedSolution sol;
  sol.basis = ConformalBasis(n, ball.coord_radius, grid);
  const Discretization d = discretize(ball.metric, sol.basis);
  Eigen::VectorXd src(static_cast<Eigen::Index>(d.points.size()));
  parallel_for(d.points.size(), [&](std::size_t i) {
    src(static_cast<Eigen::Index>(i)) =
        0.25 * (n - 2) * linearized_scalar(ball.metric, h, d.points[i]);
  });
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  if (grid.mode == GridMode::radial) {
    A = (n - 1.0) * d.lap + K * d.phi;
    rhs = src;
  } else {
    // weak form: (n-1) int <dv, dphi> - K int v phi = -int src phi
    A = (n - 1.0) * d.stiffness - K * (d.phi.transpose() * d.weight.asDiagonal() * d.phi);
    rhs = -(d.phi.transpose() * d.weight.cwiseProduct(src));
  }
  Eigen::VectorXd c;
  if (src.lpNorm<Eigen::Infinity>() == 0.0) {
    c = Eigen::VectorXd::Zero(A.cols());
  } else {
    if (grid.mode == GridMode::radial)
      require_rotational_symmetry(ball.metric.perturbed(h, 1e-3), sol.basis, ball.coord_radius);
    c = solve_square(A, rhs);
  }
  sol.residual = (A * c - rhs).lpNorm<Eigen::Infinity>();
  sol.coeffs.assign(c.data(), c.data() + c.size());
  sol.sup = (d.phi * c).lpNorm<Eigen::Infinity>();
  return sol;
}

SymTensorField effective_direction(const SpaceFormBall& ball, const SymTensorField& h,
                                   const LinearizedSolution& v) {
  const double s = 4.0 / (ball.dim - 2.0);
  SymTensorField heff = h + (s * v.field()) * ball.metric.tensor();
  // v vanishes on the boundary, so the boundary behaviour is that of h.
  return heff.with_flag(h.boundary_flag());
}

MetricField conformal_metric(const SpaceFormBall& ball, const SymTensorField& h,
                             const ConformalSolution& u) {
  const int n = ball.dim;
  const double p = 4.0 / (n - 2.0);
  const ScalarField uf = u.field();
  const ScalarField w(n, [uf, p](std::span<const Jet2> x) { return pow(uf(x), p); });
  const MetricField gt = ball.metric.perturbed(h, u.t);
  return MetricField(ball.chart, w * gt.tensor());
}

PathVolume path_volume(const SpaceFormBall& ball, const SymTensorField& h,
                       const PathOptions& opts) {
  const int n = ball.dim;
  const double tau = opts.step;
  if (!(tau > 0.0)) throw DomainError("path step must be positive");
  PathVolume out;
  out.t = {-2 * tau, -tau, 0.0, tau, 2 * tau};
  out.volume.assign(out.t.size(), 0.0);
  const BallQuadrature q(n, ball.coord_radius, opts.volume_orders);
  const double vol_power = 2.0 * n / (n - 2.0);
  const auto check_pts = annulus_points(n, 0.05 * ball.coord_radius, 0.9 * ball.coord_radius,
                                        opts.defect_points, 17u);

  for (std::size_t s = 0; s < out.t.size(); ++s) {
    const double t = out.t[s];
    const ConformalSolution sol = solve_conformal(ball, h, t, opts.grid);
    out.max_residual = std::max(out.max_residual, sol.residual);
    out.max_iterations = std::max(out.max_iterations, sol.iterations);
    if (t != 0.0) {
      const double dev = std::max(std::abs(sol.min_u - 1.0), std::abs(sol.max_u - 1.0));
      out.bracket_constant = std::max(out.bracket_constant, dev / std::abs(t));
      const MetricField gh = conformal_metric(ball, h, sol);
      for (const auto& p : check_pts)
        out.max_scalar_defect = std::max(
            out.max_scalar_defect, std::abs(scalar_curvature_at(gh, p) - ball.scalar_curvature));
    }
    const MetricField gt = ball.metric.perturbed(h, t);
    out.volume[s] = integrate_ball(
        q, [&](const Point& p) { return std::pow(sol.value(p), vol_power); },
        [&](const Point& p) { return gt.volume_density(p); });
  }
  const auto& V = out.volume;
  const double d1a = (V[3] - V[1]) / (2 * tau), d1b = (V[4] - V[0]) / (4 * tau);
  const double d2a = (V[3] - 2 * V[2] + V[1]) / (tau * tau);
  const double d2b = (V[4] - 2 * V[2] + V[0]) / (4 * tau * tau);
  out.first_derivative = (4 * d1a - d1b) / 3;
  out.second_derivative = (4 * d2a - d2b) / 3;
  out.first_truncation = std::abs(out.first_derivative - d1a);
  out.second_truncation = std::abs(out.second_derivative - d2a);
  return out;
}

double largest_solvable_t(const SpaceFormBall& ball, const SymTensorField& h, double t_start,
                          double t_max, const GridSpec& grid) {
  double best = 0.0;
  for (double t = t_start; t <= t_max * (1 + 1e-12); t *= 2.0) {
    try {
      solve_conformal(ball, h, t, grid);
      solve_conformal(ball, h, -t, grid);
    } catch (const Error&) {
      break;
    }
    best = t;
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

Jet2 poly_in_s(std::span<const Jet2> x, int n, double R, const std::vector<double>& f, Jet2* s_out) {
  Jet2 s(0.0);
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  s = s / (R * R);
  Jet2 acc(0.0);
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * s + *it;
  if (s_out) *s_out = s;
  return acc;
}

}  // namespace

SymTensorField radial_normal_direction(const SpaceFormBall& ball, std::vector<double> f) {
  const int n = ball.dim;
  const double R = ball.coord_radius;
  return SymTensorField(
      n,
      [n, R, f](std::span<const Jet2> x, JetMatrix& out) {
        const Jet2 a = poly_in_s(x, n, R, f, nullptr);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) out.set_sym(i, j, a * x[i] * x[j]);
      },
      std::nullopt, BoundaryFlag::tangential_part_vanishes);
}

SymTensorField tangential_direction(const SpaceFormBall& ball, std::vector<double> f) {
  const int n = ball.dim;
  const double R = ball.coord_radius;
  return SymTensorField(
      n,
      [n, R, f](std::span<const Jet2> x, JetMatrix& out) {
        Jet2 s;
        const Jet2 poly = poly_in_s(x, n, R, f, &s);
        const Jet2 a = poly * (1.0 - s);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            Jet2 e = -(x[i] * x[j]) / (R * R);
            if (i == j) e += s;
            out.set_sym(i, j, a * e);
          }
      },
      std::nullopt, BoundaryFlag::vanishes_on_boundary);
}

SymTensorField conformal_direction(const SpaceFormBall& ball, std::vector<double> f) {
  const int n = ball.dim;
  const double R = ball.coord_radius;
  const ScalarField w(n, [n, R, f](std::span<const Jet2> x) {
    Jet2 s;
    const Jet2 a = poly_in_s(x, n, R, f, &s);
    return a * (1.0 - s);
  });
  return (w * ball.metric.tensor()).with_flag(BoundaryFlag::vanishes_on_boundary);
}

SymTensorField parallel_tracefree_direction(const SpaceFormBall& ball,
                                            const std::vector<double>& entries) {
  const int n = ball.dim;
  if (entries.size() != static_cast<std::size_t>(n * n))
    throw DomainError("trace-free matrix must have n*n entries");
  double tr = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    tr += entries[static_cast<std::size_t>(i * n + i)];
    for (int j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(entries[static_cast<std::size_t>(i * n + j)]));
      if (std::abs(entries[static_cast<std::size_t>(i * n + j)] -
                   entries[static_cast<std::size_t>(j * n + i)]) > 1e-14 * (1 + scale))
        throw DomainError("matrix must be symmetric");
    }
  }
  if (std::abs(tr) > 1e-12 * (1 + scale)) throw DomainError("matrix must be trace-free");
  const CriticalPotential cp = critical_potential(ball);
  return (cp.lambda * SymTensorField::constant(n, entries))
      .with_flag(BoundaryFlag::vanishes_on_boundary);
}

SymTensorField polynomial_direction(const SpaceFormBall& ball, std::vector<PolynomialTerm> terms) {
  const int n = ball.dim;
  const double R = ball.coord_radius;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n)
      throw DomainError("polynomial term component out of range");
    for (int k = 0; k < kMaxDim; ++k)
      if (t.powers[k] < 0 || (k >= n && t.powers[k] != 0))
        throw DomainError("polynomial term has invalid powers");
  }
  return SymTensorField(
      n,
      [n, R, terms](std::span<const Jet2> x, JetMatrix& out) {
        Jet2 s(0.0);
        for (int i = 0; i < n; ++i) s += x[i] * x[i];
        const Jet2 bump = 1.0 - s / (R * R);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) out.set_sym(i, j, Jet2(0.0));
        for (const auto& t : terms) {
          Jet2 m(t.coeff);
          for (int k = 0; k < n; ++k)
            for (int p = 0; p < t.powers[k]; ++p) m = m * (x[k] / R);
          const int a = std::min(t.i, t.j), b = std::max(t.i, t.j);
          out.set_sym(a, b, out(a, b) + m);
        }
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) out.set_sym(i, j, bump * out(i, j));
      },
      std::nullopt, BoundaryFlag::vanishes_on_boundary);
}

namespace {

struct RadialShoot {
  int n;
  Model model;
  double k;
  double mu;

  double log_derivative(double r) const {  // sn'/sn
    switch (model) {
      case Model::euclidean: return 1.0 / r;
      case Model::hyperbolic: return k / std::tanh(k * r);
      case Model::spherical: return k / std::tan(k * r);
    }
    return 0.0;
  }
  void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy, double r) const {
    dy[0] = y[1];
    dy[1] = -(n - 1) * log_derivative(r) * y[1] - mu * y[0];
  }
};

struct ShootResult {
  double end_value;
  bool crossed;  // f vanishes somewhere in (0, R]
};

ShootResult shoot(Model model, int n, double R, double k, double mu) {
  using namespace boost::numeric::odeint;
  const double r0 = 1e-5 * R;
  std::array<double, 2> y{1.0 - mu * r0 * r0 / (2.0 * n), -mu * r0 / n};
  RadialShoot sys{n, model, k, mu};
  bool crossed = false;
  auto stepper = make_controlled(1e-13, 1e-13, runge_kutta_dopri5<std::array<double, 2>>());
  integrate_adaptive(stepper, sys, y, r0, R, R * 1e-3,
                     [&](const std::array<double, 2>& s, double) {
                       if (s[0] <= 0.0) crossed = true;
                     });
  return {y[0], crossed || y[0] <= 0.0};
}

}  // namespace

EigenEstimate first_eigenvalue_radial(Model model, int dim, double geodesic_radius,
                                      double curvature_scale) {
  if (dim < 3 || dim > kMaxDim) throw DomainError("dimension must lie in [3, 6]");
  if (!(geodesic_radius > 0.0)) throw DomainError("radius must be positive");
  const double k = model == Model::euclidean ? 0.0 : curvature_scale;
  if (model != Model::euclidean && !(k > 0.0)) throw DomainError("curvature scale must be positive");
  if (model == Model::spherical && k * geodesic_radius >= std::numbers::pi)
    throw DomainError("spherical ball must not contain the antipode");
  const double R = geodesic_radius;
  EigenEstimate e;
  e.dim = dim;
  e.model = model;
  e.geodesic_radius = R;
  const double sectional = model == Model::hyperbolic ? -k * k : (model == Model::spherical ? k * k : 0.0);
  e.shift = dim * sectional;  // K/(n-1)

  double lo = 0.0, hi = 1.0 / (R * R);
  while (!shoot(model, dim, R, k, hi).crossed) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8 / (R * R)) throw NonConvergenceError("eigenvalue bracket search diverged");
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (shoot(model, dim, R, k, mid).crossed ? hi : lo) = mid;
  }
  std::uintmax_t iters = 200;
  const auto br = boost::math::tools::toms748_solve(
      [&](double mu) { return shoot(model, dim, R, k, mu).end_value; }, lo, hi,
      boost::math::tools::eps_tolerance<double>(44), iters);
  e.lower = br.first;
  e.upper = br.second;
  e.value = 0.5 * (br.first + br.second);
  e.exceeds_shift = e.value > e.shift;
  return e;
}

EigenEstimate first_eigenvalue_radial(const SpaceFormBall& ball) {
  return first_eigenvalue_radial(ball.model, ball.dim, ball.geodesic_radius, ball.curvature_scale);
}

}  // namespace volcrit
