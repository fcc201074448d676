#include "volcrit/variation.hpp"

#include <cmath>
#include <numbers>

#include "volcrit/errors.hpp"
#include "volcrit/parallel.hpp"

namespace volcrit {

namespace {

struct NodeData {
  LocalGeometry geo;
  CurvaturePoint curv;
  TensorDerivatives td;
};

NodeData node_data(const MetricField& g, const SymTensorField& h, const Point& p) {
  NodeData d;
  d.geo = local_geometry(g, p);
  d.curv = curvature(d.geo);
  d.td = covariant_tensor(d.geo, h.at(p));
  return d;
}

double contract(const Mat& ginv, const Mat& a, const Mat& b, int n) {
  // a_ij b_kl g^ik g^jl
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double aij_up = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) aij_up += ginv(i, k) * ginv(j, l) * a(k, l);
      s += aij_up * b(i, j);
    }
  return s;
}

double covector_norm2(const Mat& ginv, const std::array<double, kMaxDim>& v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += ginv(i, j) * v[i] * v[j];
  return s;
}

double up_contract(const Mat& up, const Mat& low, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += up(i, j) * low(i, j);
  return s;
}

// Fully raised nabla h: h^{ab;c}.
Tensor3<double> raise3(const LocalGeometry& geo, const Tensor3<double>& t) {
  const int n = geo.n;
  Tensor3<double> a{}, b{}, c{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int p = 0; p < n; ++p) v += geo.ginv(k, p) * t(i, j, p);
        a(i, j, k) = v;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int p = 0; p < n; ++p) v += geo.ginv(j, p) * a(i, p, k);
        b(i, j, k) = v;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int p = 0; p < n; ++p) v += geo.ginv(i, p) * b(p, j, k);
        c(i, j, k) = v;
      }
  return c;
}

double grad_norm2(const Tensor3<double>& low, const Tensor3<double>& up, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += low(i, j, k) * up(i, j, k);
  return s;
}

std::array<double, kMaxDim> divfree_part(const TensorDerivatives& td, int n) {
  std::array<double, kMaxDim> w{};
  for (int k = 0; k < n; ++k) w[k] = td.div[k] - 0.5 * td.trace.d(k);
  return w;
}

double linearized_scalar(const NodeData& d) {
  const int n = d.geo.n;
  return -d.td.trace_derivs.laplacian + d.td.div_div - up_contract(d.td.h_up, d.curv.ricci, n);
}

}  // namespace

double linearized_scalar(const MetricField& g, const SymTensorField& h, const Point& p) {
  return linearized_scalar(node_data(g, h, p));
}

double second_scalar(const MetricField& g, const SymTensorField& h, const SymTensorField& hprime,
                     const Point& p) {
  const NodeData d = node_data(g, h, p);
  const int n = d.geo.n;
  const LocalGeometry& geo = d.geo;
  const TensorDerivatives& td = d.td;

  // |h|^2 as a jet: tr(M M) with M = g^{-1} h
  const JetMatrix hj = h.at(p);
  Tensor2<Jet2> m{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet2 v(0.0);
      v.dim = n;
      for (int a = 0; a < n; ++a) v += geo.ginv_jet(i, a) * hj(a, j);
      m(i, j) = v;
    }
  Jet2 h2(0.0);
  h2.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h2 += m(i, j) * m(j, i);
  const double lap_h2 = covariant_scalar(geo, h2).laplacian;

  const Tensor3<double> up = raise3(geo, td.nabla);
  double mixed = 0.0;  // g^{pq} h^{lk}_{;p} h_{lq;k}
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q) mixed += up(l, k, q) * td.nabla(l, q, k);

  double curv = 0.0;  // h^{lp} R_{lkps} h^{sk}
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int pp = 0; pp < n; ++pp)
        for (int s = 0; s < n; ++s)
          curv += td.h_up(l, pp) * d.curv.riemann(l, k, pp, s) * td.h_up(s, k);

  const auto w = divfree_part(td, n);
  const double dr_prime = linearized_scalar(node_data(g, hprime, p));

  return lap_h2 + 2.0 * up_contract(td.h_up, td.trace_derivs.hessian, n) -
         4.0 * up_contract(td.h_up, td.nabla_div, n) - 2.0 * covector_norm2(geo.ginv, w, n) -
         0.5 * grad_norm2(td.nabla, up, n) - mixed + 2.0 * curv + dr_prime;
}

Mat critical_residual_at(const MetricField& g, const ScalarField& lambda, const Point& p) {
  const LocalGeometry geo = local_geometry(g, p);
  const CurvaturePoint c = curvature(geo);
  const ScalarDerivatives s = covariant_scalar(geo, lambda.at(p));
  Mat r{};
  for (int i = 0; i < geo.n; ++i)
    for (int j = 0; j < geo.n; ++j)
      r(i, j) = -s.laplacian * geo.g(i, j) + s.hessian(i, j) - s.value * c.ricci(i, j) - geo.g(i, j);
  return r;
}

ResidualReport critical_residual(const MetricField& g, const ScalarField& lambda,
                                 const BallQuadrature& q) {
  const int n = g.dim();
  ResidualReport rep;
  const std::vector<double> norms = map_ball_nodes(q, [&](const Point& p) {
    const LocalGeometry geo = local_geometry(g, p);
    const Mat r = critical_residual_at(g, lambda, p);
    return std::sqrt(std::max(0.0, contract(geo.ginv, r, r, n)));
  });
  double l2 = 0.0;
  for (std::size_t k = 0; k < norms.size(); ++k) {
    rep.sup = std::max(rep.sup, norms[k]);
    const Point p = q.ball_node(k);
    l2 += q.ball_weight(k) * norms[k] * norms[k] * g.volume_density(p);
  }
  rep.l2 = std::sqrt(l2);
  for (std::size_t k = 0; k < q.sphere_size(); ++k)
    rep.boundary_lambda = std::max(rep.boundary_lambda, std::abs(lambda.value(q.sphere_node(k))));
  return rep;
}

double volume(const MetricField& g, const BallQuadrature& q) {
  return integrate_ball(q, [](const Point&) { return 1.0; },
                        [&](const Point& p) { return g.volume_density(p); });
}

double first_variation(const MetricField& g, const SymTensorField& h, const BallQuadrature& q) {
  const int n = g.dim();
  return 0.5 * integrate_ball(
                   q,
                   [&](const Point& p) {
                     const LocalGeometry geo = local_geometry(g, p);
                     const JetMatrix hj = h.at(p);
                     double tr = 0.0;
                     for (int i = 0; i < n; ++i)
                       for (int j = 0; j < n; ++j) tr += geo.ginv(i, j) * hj(i, j).value;
                     return tr;
                   },
                   [&](const Point& p) { return g.volume_density(p); });
}

SecondVariationBreakdown second_variation(const MetricField& g, const ScalarField& lambda,
                                          const SymTensorField& h, const BallQuadrature& q,
                                          const SecondVariationOptions& opts) {
  if (opts.require_boundary_flag && h.boundary_flag() == BoundaryFlag::unconstrained)
    throw SupportError("second variation needs h with vanishing tangential part on the boundary");
  SecondVariationBreakdown out;
  const BallQuadrature rq(g.dim(), q.coord_radius(), opts.residual_orders);
  const ResidualReport res = critical_residual(g, lambda, rq);
  out.residual_sup = std::max(res.sup, res.boundary_lambda);
  if (!(out.residual_sup <= opts.residual_tolerance))
    throw InvalidCriticalPointError("critical residual " + std::to_string(out.residual_sup) +
                                    " exceeds tolerance " +
                                    std::to_string(opts.residual_tolerance));

  const int n = g.dim();
  constexpr int kTerms = 8;
  const std::size_t count = q.ball_size();
  std::vector<double> values(count * kTerms, 0.0);
  parallel_for(count, [&](std::size_t k) {
    const Point p = q.ball_node(k);
    const NodeData d = node_data(g, h, p);
    const TensorDerivatives& td = d.td;
    const double lam = lambda.value(p);
    const double w = q.ball_weight(k) * std::sqrt(d.geo.det);
    const Tensor3<double> up = raise3(d.geo, td.nabla);
    const double grad2 = grad_norm2(td.nabla, up, n);
    double curv = 0.0;  // h^{sp} R_{kpls} h^{lk}
    for (int kk = 0; kk < n; ++kk)
      for (int pp = 0; pp < n; ++pp)
        for (int l = 0; l < n; ++l)
          for (int s = 0; s < n; ++s)
            curv += td.h_up(s, pp) * d.curv.riemann(kk, pp, l, s) * td.h_up(l, kk);
    const double tr = td.trace.value;
    double* v = &values[k * kTerms];
    v[0] = w * 0.25 * tr * tr;
    v[1] = w * lam * covector_norm2(d.geo.ginv, divfree_part(td, n), n);
    v[2] = w * 0.25 * lam * grad2;
    v[3] = w * lam *
           (up_contract(td.h_up, td.nabla_div, n) - up_contract(td.h_up, td.trace_derivs.hessian, n));
    v[4] = w * -0.5 * lam * covector_norm2(d.geo.ginv, td.div, n);
    v[5] = w * -0.5 * lam * curv;
    v[6] = w * lam * up_contract(td.h_up, td.h, n);
    v[7] = w * lam * grad2;
    for (int t = 0; t < kTerms; ++t)
      if (!std::isfinite(v[t]))
        throw NumericError("non-finite second-variation integrand at node " + std::to_string(k));
  });
  std::array<double, kTerms> sums{};
  std::vector<double> column(count);
  for (int t = 0; t < kTerms; ++t) {
    for (std::size_t k = 0; k < count; ++k) column[k] = values[k * kTerms + t];
    sums[t] = ordered_sum(column);
  }
  out.term_trace2 = sums[0];
  out.term_divfree = sums[1];
  out.term_gradient = sums[2];
  out.term_cross = sums[3];
  out.term_div2 = sums[4];
  out.term_curvature = sums[5];
  out.int_lambda_h2 = sums[6];
  out.int_lambda_grad2 = sums[7];
  out.total = out.term_trace2 + out.term_divfree + out.term_gradient + out.term_cross +
              out.term_div2 + out.term_curvature;
  if (opts.tt_scalar_curvature) {
    const double K = *opts.tt_scalar_curvature;
    const double red = 0.25 * out.int_lambda_grad2 + K / (2.0 * n * (n - 1)) * out.int_lambda_h2;
    out.reduced = red;
    out.reduced_rel_error = std::abs(red - out.total) / std::max(std::abs(out.total), 1e-300);
  }
  return out;
}

double mean_curvature_prime(const MetricField& g, const SymTensorField& h, const Point& p) {
  const int n = g.dim();
  const BoundaryGeometry b = boundary_geometry(g, p);
  const LocalGeometry geo = local_geometry(g, p);
  const TensorDerivatives td = covariant_tensor(geo, h.at(p));
  const Point& nu = b.normal;
  double hnnn = 0.0, hnn = 0.0, divfree_n = 0.0;
  for (int i = 0; i < n; ++i) {
    divfree_n += (td.div[i] - 0.5 * td.trace.d(i)) * nu[i];
    for (int j = 0; j < n; ++j) {
      hnn += td.h(i, j) * nu[i] * nu[j];
      for (int k = 0; k < n; ++k) hnnn += td.nabla(i, j, k) * nu[i] * nu[j] * nu[k];
    }
  }
  double ii_h = 0.0;
  for (int a = 0; a < n - 1; ++a)
    for (int c = 0; c < n - 1; ++c) {
      double hac = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hac += td.h(i, j) * b.frame[a][i] * b.frame[c][j];
      ii_h += b.second_fundamental(a, c) * hac;
    }
  return 0.5 * hnnn + 0.5 * b.mean_curvature * hnn - ii_h - divfree_n;
}

// ---------------------------------------------------------------------------

IdentityCheck make_check(std::string name, double lhs, double rhs, double tol, bool relative,
                         std::string anchor) {
  IdentityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tolerance = tol;
  c.relative = relative;
  const double err = std::abs(lhs - rhs) / (relative ? std::max(std::abs(rhs), 1.0) : 1.0);
  c.pass = std::isfinite(err) && err <= tol;
  c.anchor = std::move(anchor);
  return c;
}

bool BoundaryIdentityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

BoundaryIdentityReport boundary_identity_suite(const SpaceFormBall& ball,
                                               const CriticalPotential& cp,
                                               const BallQuadrature& q,
                                               const std::vector<PathVariation>& paths) {
  const int n = ball.dim;
  const MetricField& g = ball.metric;
  auto area_density = [&](const Point& p) { return sphere_area_density(g, p); };
  BoundaryIdentityReport rep;

  const double area = integrate_sphere(q, [](const Point&) { return 1.0; }, area_density);
  const double total_h =
      integrate_sphere(q, [&](const Point& p) { return boundary_geometry(g, p).mean_curvature; },
                       area_density);
  const double H = total_h / area;
  const double V = volume(g, q);
  const double flux = integrate_sphere(
      q,
      [&](const Point& p) {
        const BoundaryGeometry b = boundary_geometry(g, p);
        const Jet2 l = cp.lambda.at(p);
        double dn = 0.0;
        for (int i = 0; i < n; ++i) dn += b.normal[i] * l.d(i);
        return -b.mean_curvature * dn;
      },
      area_density);
  const double int_lap = integrate_ball(
      q,
      [&](const Point& p) {
        return covariant_scalar(local_geometry(g, p), cp.lambda.at(p)).laplacian;
      },
      [&](const Point& p) { return g.volume_density(p); });
  const double int_lambda = integrate_ball(q, [&](const Point& p) { return cp.lambda.value(p); },
                                           [&](const Point& p) { return g.volume_density(p); });

  constexpr double kExact = 1e-9;
  constexpr double kChain = 1e-10;
  // pointwise: H dlambda/dnu = -1 and 2 Ric(nu, nu) + R_Sigma = K + (n-2)/(n-1) H^2
  double umbilic = 0.0, ric_boundary = 0.0;
  for (std::size_t k = 0; k < q.sphere_size(); ++k) {
    const Point p = q.sphere_node(k);
    const BoundaryGeometry b = boundary_geometry(g, p);
    const Jet2 l = cp.lambda.at(p);
    double dn = 0.0;
    for (int i = 0; i < n; ++i) dn += b.normal[i] * l.d(i);
    umbilic = std::max(umbilic, std::abs(b.mean_curvature * dn + 1.0));
    const double lhs = 2.0 * b.ricci_normal + b.boundary_scalar;
    const double rhs = ball.scalar_curvature + (n - 2.0) / (n - 1.0) * b.mean_curvature * b.mean_curvature;
    ric_boundary = std::max(ric_boundary, std::abs(lhs - rhs));
  }
  rep.checks.push_back(make_check("sup |H dlambda/dnu + 1|", umbilic, 0.0, kExact, false,
                                  "H dlambda/dnu = -1 on the boundary"));
  rep.checks.push_back(make_check("sup |2 Ric(nu,nu) + R_Sigma - K - (n-2)/(n-1) H^2|",
                                  ric_boundary, 0.0, 1e-6, false,
                                  "boundary Gauss equation for critical metrics"));
  rep.checks.push_back(make_check("area = -oint H dlambda/dnu", flux, area, kChain, true,
                                  "H dlambda/dnu = -1 on the boundary"));
  rep.checks.push_back(make_check("area = -H int Delta lambda", -H * int_lap, area, kChain, true,
                                  "divergence theorem"));
  // Trace of the critical equation: (n-1) Delta lambda + K lambda = -n.
  rep.checks.push_back(make_check("area = H (n V + K int lambda)/(n-1)",
                                  H * (n * V + ball.scalar_curvature * int_lambda) / (n - 1), area,
                                  kChain, true, "traced critical equation"));
  if (ball.model == Model::euclidean)
    rep.checks.push_back(make_check("area = n/(n-1) H V", n / (n - 1.0) * H * V, area, kChain, true,
                                    "volume identity for zero scalar curvature"));

  // Round boundary: Sigma_0 is the Euclidean sphere with the same area.
  const double omega = unit_sphere_area(n);
  const double r0 = std::pow(area / omega, 1.0 / (n - 1));
  const double V0 = euclidean_ball_volume(n, r0);
  const double oint_H0 = (n - 1) / r0 * area;
  rep.checks.push_back(make_check("Minkowski equality |Sigma|^2 = n/(n-1) V0 oint H0",
                                  n / (n - 1.0) * V0 * oint_H0, area * area, kChain, true,
                                  "Minkowski inequality, equality for round spheres"));
  if (ball.model == Model::euclidean) {
    rep.checks.push_back(make_check("oint H0 = |Sigma| H", total_h, oint_H0, kChain, true,
                                    "boundary mean curvature comparison, equality case"));
    rep.checks.push_back(make_check("V = V0", V, V0, kChain, true, "volume comparison, equality"));
  }

  // lambda_b solves the critical equation and is constant on the boundary.
  const double lambda_b =
      ball.scalar_curvature != 0.0 ? -static_cast<double>(n) / ball.scalar_curvature : 1.0;
  for (const PathVariation& path : paths) {
    const double dv = first_variation(g, path.h, q);
    const double flux_h = integrate_sphere(
        q, [&](const Point& p) { return lambda_b * mean_curvature_prime(g, path.h, p); },
        area_density);
    IdentityCheck c = make_check("DV = oint lambda H'(0) [" + path.name + "]", flux_h, dv,
                                 path.tolerance, true,
                                 ball.scalar_curvature != 0.0
                                     ? "first variation along constant-K paths, lambda = -n/K"
                                     : "first variation along constant-K paths, lambda = lambda_crit + 1");
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace volcrit
