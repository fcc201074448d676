#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "volcrit/errors.hpp"
#include "volcrit/riemann.hpp"
#include "volcrit/spaceform.hpp"
#include "volcrit/ttensor.hpp"
#include "volcrit/variation.hpp"
#include "volcrit/yamabe.hpp"

namespace volcrit::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureOrders orders_for(const ScenarioConfig& cfg) {
  return cfg.quadrature_given ? cfg.quadrature : default_orders(cfg.model.dim);
}

SpaceFormBall ball_for(const ModelSpec& m) {
  return make_ball(m.model, m.dim, m.radius, m.curvature_scale);
}

std::vector<double> default_hat(int n) {
  std::vector<double> e(static_cast<std::size_t>(n * n), 0.0);
  e[0] = 1.0;
  e[static_cast<std::size_t>(n + 1)] = -1.0;
  return e;
}

json model_json(const SpaceFormBall& ball) {
  return {{"model", to_string(ball.model)},
          {"dim", ball.dim},
          {"geodesic_radius", ball.geodesic_radius},
          {"curvature_scale", ball.curvature_scale},
          {"sectional", ball.sectional},
          {"scalar_curvature", ball.scalar_curvature},
          {"coord_radius", ball.coord_radius}};
}

struct BuiltTT {
  TTProfile profile;
  SymTensorField warped;  // on the warped chart
  SymTensorField chart;   // pushed to the ball chart
};

BuiltTT build_tt(const SpaceFormBall& ball, const TTSpec& spec) {
  const WarpedMetric w = warped_for(ball);
  RadialProfile a = bump_profile(spec.r1 * w.outer_radius, spec.r2 * w.outer_radius, spec.amplitude);
  a.sharpness = spec.sharpness;
  a.poly = spec.poly;
  const int m = ball.dim - 1;
  const SphericalHarmonic y = spec.harmonic_matrix.empty()
                                  ? SphericalHarmonic::catalogue(m, spec.harmonic)
                                  : SphericalHarmonic::from_matrix(m, spec.harmonic_matrix);
  BuiltTT out;
  out.profile = solve_profile(w, a, y);
  out.warped = assemble_tt(out.profile);
  out.chart = transplant_to_chart(out.warped, out.profile, ball);
  return out;
}

SymTensorField build_direction(const SpaceFormBall& ball, const DirectionSpec& d) {
  switch (d.kind) {
    case DirectionKind::tt_profile: return build_tt(ball, d.tt).chart;
    case DirectionKind::parallel_tracefree:
      return parallel_tracefree_direction(ball, d.matrix.empty() ? default_hat(ball.dim) : d.matrix);
    case DirectionKind::conformal: return conformal_direction(ball, d.coeffs);
    case DirectionKind::custom_polynomial: return polynomial_direction(ball, d.terms);
    case DirectionKind::radial_normal: return radial_normal_direction(ball, d.coeffs);
    case DirectionKind::tangential: return tangential_direction(ball, d.coeffs);
  }
  throw ConfigError("direction: unsupported kind");
}

DirectionSpec direction_or_default(const ScenarioConfig& cfg) {
  if (cfg.direction) return *cfg.direction;
  return DirectionSpec{};
}

// Components are random quadratic polynomials in x with coefficients in
// [-amplitude, amplitude].
SymTensorField random_polynomial_tensor(int n, std::mt19937_64& rng, double amplitude = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int terms = 1 + n + n * n;
  std::vector<double> c(static_cast<std::size_t>(n * n * terms));
  for (auto& v : c) v = amplitude * u(rng);
  return SymTensorField(n, [n, terms, c](std::span<const Jet2> x, JetMatrix& out) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double* a = &c[static_cast<std::size_t>((i * n + j) * terms)];
        Jet2 v(a[0]);
        v.dim = n;
        for (int k = 0; k < n; ++k) v += a[1 + k] * x[k];
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) v += a[1 + n + k * n + l] * x[k] * x[l];
        out.set_sym(i, j, v);
      }
  });
}

Point random_point(int n, std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p = Point::zero(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = nd(rng);
    s += p[i] * p[i];
  }
  const double r = radius * std::pow(u(rng), 1.0 / n) / std::sqrt(s);
  for (int i = 0; i < n; ++i) p[i] *= r;
  return p;
}

double richardson_first(const std::function<double(double)>& f, double t) {
  const double d1 = (f(t) - f(-t)) / (2 * t);
  const double d2 = (f(t / 2) - f(-t / 2)) / t;
  return (4 * d2 - d1) / 3;
}

double richardson_second(const std::function<double(double)>& f, double t) {
  const double f0 = f(0.0);
  const double s1 = (f(t) - 2 * f0 + f(-t)) / (t * t);
  const double s2 = (f(t / 2) - 2 * f0 + f(-t / 2)) / (t * t / 4);
  return (4 * s2 - s1) / 3;
}

void add_identity(Report& rep, const IdentityCheck& c) {
  rep.check(c.name, c.lhs, c.rhs, c.tolerance, c.relative ? Compare::rel_le : Compare::abs_le,
            c.anchor);
}

bool is_volume_chain(const std::string& name) {
  return name.rfind("area", 0) == 0 || name.rfind("Minkowski", 0) == 0 ||
         name.rfind("oint H0", 0) == 0 || name.rfind("V = V0", 0) == 0;
}

json breakdown_json(const SecondVariationBreakdown& sv) {
  json j{{"term_trace2", sv.term_trace2},
         {"term_divfree", sv.term_divfree},
         {"term_gradient", sv.term_gradient},
         {"term_cross", sv.term_cross},
         {"term_div2", sv.term_div2},
         {"term_curvature", sv.term_curvature},
         {"total", sv.total},
         {"int_lambda_h2", sv.int_lambda_h2},
         {"int_lambda_grad2", sv.int_lambda_grad2},
         {"residual_sup", sv.residual_sup}};
  if (sv.reduced) j["reduced"] = *sv.reduced;
  if (sv.reduced_rel_error) j["reduced_rel_error"] = *sv.reduced_rel_error;
  return j;
}

// ---------------------------------------------------------------------------

void critical_check(const ScenarioConfig& cfg, Report& rep) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const CriticalPotential cp = critical_potential(ball);
  const BallQuadrature q(ball.dim, ball.coord_radius, orders_for(cfg));
  const ResidualReport rr = critical_residual(ball.metric, cp.lambda, q);
  rep.data()["ball"] = model_json(ball);
  rep.data()["potential"] = {{"center_value", cp.center_value},
                             {"normal_derivative", cp.normal_derivative},
                             {"residual_l2", rr.l2}};
  rep.check("critical residual sup", rr.sup, std::nullopt, cfg.tolerances.critical_residual,
            Compare::le, "critical equation -(Delta lambda) g + Hess lambda - lambda Ric = g");
  rep.check("sup |lambda| on the boundary", rr.boundary_lambda, std::nullopt, 1e-10, Compare::le,
            "critical potential vanishes on the boundary");
  if (cfg.doubling_check) {
    const ResidualReport r2 = critical_residual(ball.metric, cp.lambda, q.refined());
    rep.check("critical residual sup, doubled quadrature", r2.sup, std::nullopt,
              cfg.tolerances.critical_residual, Compare::le, "quadrature convergence");
  }

  // A genuine constant-scalar-curvature path: conformal direction plus its
  // conformal correction.
  std::vector<PathVariation> paths;
  GridSpec grid;
  grid.mode = GridMode::radial;
  const SymTensorField h = conformal_direction(ball, {1.0, 0.5});
  const LinearizedSolution v = linearized_conformal(ball, h, grid);
  paths.push_back({"conformal path", effective_direction(ball, h, v), 1e-6});
  for (const IdentityCheck& c : boundary_identity_suite(ball, cp, q, paths).checks)
    if (!is_volume_chain(c.name)) add_identity(rep, c);
}

void volume_chain(const ScenarioConfig& cfg, Report& rep) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const CriticalPotential cp = critical_potential(ball);
  const BallQuadrature q(ball.dim, ball.coord_radius, orders_for(cfg));
  rep.data()["ball"] = model_json(ball);
  rep.data()["volume"] = volume(ball.metric, q);
  for (const IdentityCheck& c : boundary_identity_suite(ball, cp, q).checks)
    if (is_volume_chain(c.name)) add_identity(rep, c);
  rep.out_of_scope("V(g) >= V0 for non-round convex boundaries",
                   "depends on positive-mass type inputs; not reproducible numerically");
  rep.out_of_scope("rigidity in the equality cases", "not a finite computation");
}

void linearization_check(const ScenarioConfig& cfg, Report& rep, bool second) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const int n = ball.dim;
  const int points = cfg.points > 0 ? cfg.points : 20;
  const double step = cfg.fd_step > 0 ? cfg.fd_step : (second ? 1e-2 : 1e-3);
  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0, worst_value = 0.0, worst_fd = 0.0;
  std::size_t samples = 0;
  for (int d = 0; d < cfg.directions; ++d) {
    const SymTensorField h = random_polynomial_tensor(n, rng);
    const SymTensorField hp = second ? random_polynomial_tensor(n, rng) : SymTensorField::zero(n);
    for (int k = 0; k < points; ++k) {
      const Point p = random_point(n, rng, 0.8 * ball.coord_radius);
      double exact, fd;
      if (second) {
        exact = second_scalar(ball.metric, h, hp, p);
        fd = richardson_second(
            [&](double t) { return scalar_curvature_at(ball.metric.perturbed(h, hp, t), p); }, step);
      } else {
        exact = linearized_scalar(ball.metric, h, p);
        fd = richardson_first(
            [&](double t) { return scalar_curvature_at(ball.metric.perturbed(h, t), p); }, step);
      }
      const double err = std::abs(exact - fd) / std::max(std::abs(fd), 1.0);
      if (err >= worst) {
        worst = err;
        worst_value = exact;
        worst_fd = fd;
      }
      ++samples;
    }
  }
  rep.data()["ball"] = model_json(ball);
  rep.data()["samples"] = samples;
  rep.data()["fd_step"] = step;
  rep.data()["worst"] = {{"formula", worst_value}, {"finite_difference", worst_fd}};
  if (second)
    rep.check("max relative error of the second-order scalar curvature", worst, std::nullopt,
              cfg.tolerances.second_scalar, Compare::le,
              "second derivative of R along g + t h + t^2/2 h'");
  else
    rep.check("max relative error of DR(h)", worst, std::nullopt, cfg.tolerances.linearization,
              Compare::le, "DR(h) = -Delta tr h + div div h - <h, Ric>");
}

void tt_build(const ScenarioConfig& cfg, Report& rep) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const DirectionSpec d = direction_or_default(cfg);
  if (cfg.direction && d.kind != DirectionKind::tt_profile)
    throw ConfigError("direction.kind: tt-build needs tt_profile");
  const BuiltTT tt = build_tt(ball, d.tt);
  const int points = cfg.points > 0 ? cfg.points : 200;
  const RadialProfile& a = tt.profile.radial;
  const auto seed = static_cast<unsigned>(cfg.seed);

  const TTCheck w = verify_tt(tt.profile.metric.metric(), tt.warped,
                              annulus_points(ball.dim, a.r1, a.r2, static_cast<std::size_t>(points), seed));
  const double rho1 = conformal_radius_of_area_radius(ball, a.r1);
  const double rho2 = conformal_radius_of_area_radius(ball, a.r2);
  const TTCheck c = verify_tt(ball.metric, tt.chart,
                              annulus_points(ball.dim, rho1, rho2, static_cast<std::size_t>(points), seed + 1));

  rep.data()["ball"] = model_json(ball);
  rep.data()["profile"] = {{"harmonic", tt.profile.harmonic.label},
                           {"kappa", tt.profile.harmonic.kappa},
                           {"determinant", tt.profile.determinant},
                           {"r1", a.r1},
                           {"r2", a.r2},
                           {"warped_outer_radius", tt.profile.metric.outer_radius}};
  rep.data()["points"] = points;
  const std::string anchor = "transverse-traceless construction on warped products";
  for (const auto& [label, chk] : {std::pair<std::string, TTCheck>{"warped chart", w},
                                   std::pair<std::string, TTCheck>{"ball chart", c}}) {
    const double scale = std::max(1.0, chk.max_norm);
    rep.data()[label] = {{"max_trace", chk.max_trace}, {"max_div", chk.max_div},
                         {"max_divdiv", chk.max_divdiv}, {"max_norm", chk.max_norm}};
    rep.check("max |tr_g h| / max(1, |h|), " + label, chk.max_trace / scale, std::nullopt,
              cfg.tolerances.tt_trace, Compare::le, anchor);
    rep.check("max |div_g h| / max(1, |h|), " + label, chk.max_div / scale, std::nullopt,
              cfg.tolerances.tt_div, Compare::le, anchor);
    rep.check("max |h|_g, " + label, chk.max_norm, std::nullopt, 0.0, Compare::positive,
              "non-trivial field");
  }
}

void second_variation_cmd(const ScenarioConfig& cfg, Report& rep) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const DirectionSpec d = direction_or_default(cfg);
  const SymTensorField h = build_direction(ball, d);
  const BallQuadrature q(ball.dim, ball.coord_radius, orders_for(cfg));
  SecondVariationOptions opts;
  if (d.kind == DirectionKind::tt_profile) opts.tt_scalar_curvature = ball.scalar_curvature;
  const SecondVariationBreakdown sv =
      second_variation(ball.metric, critical_potential(ball).lambda, h, q, opts);
  rep.data()["ball"] = model_json(ball);
  rep.data()["direction"] = to_string(d.kind);
  rep.data()["breakdown"] = breakdown_json(sv);
  rep.data()["first_variation"] = first_variation(ball.metric, h, q);
  rep.check("critical residual sup (precondition)", sv.residual_sup, std::nullopt,
            cfg.tolerances.critical_residual, Compare::le, "critical equation");
  if (sv.reduced_rel_error)
    rep.check("TT reduction 1/4 int lambda |nabla h|^2 + K/(2n(n-1)) int lambda |h|^2", sv.total,
              *sv.reduced, 1e-8, Compare::rel_strict, "second variation for TT directions");
  if (cfg.expect_sign == "positive")
    rep.check("second variation total", sv.total, std::nullopt, 0.0, Compare::positive,
              "local minimum in TT directions");
  else if (cfg.expect_sign == "negative")
    rep.check("second variation total", sv.total, std::nullopt, 0.0, Compare::negative,
              "negative direction");
  else
    rep.check("second variation total", sv.total, std::nullopt, 0.0, Compare::diagnostic,
              "second variation of volume");
  if (cfg.doubling_check) {
    const SecondVariationBreakdown s2 =
        second_variation(ball.metric, critical_potential(ball).lambda, h, q.refined(), opts);
    rep.check("total change under doubled quadrature", s2.total, sv.total, cfg.tolerances.doubling,
              Compare::rel_le, "quadrature convergence");
  }
}

// (1/8)(n-6)/(n-1) int lambda^2 |hat h|^2 with lambda = (1 - |x|^2)/(2(n-1)),
// |hat h|^2 = 2: int_0^1 (1 - r^2)^2 r^{n-1} dr = 8 / (n (n+2) (n+4)).
double saddle_closed_form(int n) {
  const double radial = 8.0 / (n * (n + 2.0) * (n + 4.0));
  const double i2 = 2.0 * unit_sphere_area(n) * radial / (4.0 * (n - 1.0) * (n - 1.0));
  return (n - 6.0) / (8.0 * (n - 1.0)) * i2;
}

void saddle_demo(const ScenarioConfig& cfg, Report& rep) {
  json rows = json::array();
  for (int n : cfg.dims) {
    const SpaceFormBall ball = make_ball(Model::euclidean, n, 1.0);
    const CriticalPotential cp = critical_potential(ball);
    const SymTensorField h = parallel_tracefree_direction(ball, default_hat(n));
    const QuadratureOrders o = cfg.quadrature_given ? cfg.quadrature : default_orders(n);
    const SecondVariationBreakdown sv =
        second_variation(ball.metric, cp.lambda, h, BallQuadrature(n, 1.0, o));
    const double coeff = (n - 6.0) / (8.0 * (n - 1.0));
    const double closed = saddle_closed_form(n);
    const std::string tag = "n=" + std::to_string(n);
    rows.push_back({{"n", n}, {"coefficient", coeff}, {"total", sv.total}, {"closed_form", closed}});
    if (n == 6) {
      rep.check("coefficient (n-6)/(8(n-1)), " + tag + " (boundary case, no sign claim)", coeff, 0.0,
                0.0, Compare::diagnostic, "saddle coefficient vanishes at n = 6");
      rep.check("second variation, " + tag + " (boundary case)", sv.total, closed, 0.0,
                Compare::diagnostic, "saddle coefficient vanishes at n = 6");
      continue;
    }
    rep.check("second variation vs (1/8)(n-6)/(n-1) int lambda^2 |hat h|^2, " + tag, sv.total,
              closed, 1e-8, Compare::rel_strict, "second variation along lambda * hat h");
    rep.check("second variation sign, " + tag, sv.total, std::nullopt, 0.0,
              n < 6 ? Compare::negative : Compare::positive, "negative direction for n < 6");
    if (n == 3)
      rep.check("second variation = -pi/140, n=3", sv.total, -kPi / 140, 1e-6, Compare::rel_strict,
                "Euclidean saddle value");
  }
  rep.data()["euclidean"] = rows;

  if (cfg.kappas.empty()) return;
  // Perturbation to the curved unit balls: h_kappa = h_0 + 4/(n-2) v_kappa g_kappa.
  const int n = cfg.kappa_dim;
  const Model model = cfg.model.model == Model::spherical ? Model::spherical : Model::hyperbolic;
  GridSpec grid = cfg.grid;
  grid.mode = GridMode::full;
  grid.even_symmetry = true;
  const QuadratureOrders o = cfg.quadrature_given ? cfg.quadrature : default_orders(n);
  const BallQuadrature q(n, 1.0, o);
  const SymTensorField h0 =
      (euclidean_unit_potential(n) * SymTensorField::constant(n, default_hat(n)))
          .with_flag(BoundaryFlag::vanishes_on_boundary);
  const SpaceFormBall flat = make_unit_family(model, n, 0.0);
  const double f0 = second_variation(flat.metric, euclidean_unit_potential(n), h0, q).total;

  json sweep = json::array();
  std::vector<double> lk, ld;
  std::optional<double> f_tenth;
  double c_max = 0.0, c_signed = 0.0;
  for (double kappa : cfg.kappas) {
    const SpaceFormBall ball = make_unit_family(model, n, kappa);
    const CriticalPotential cp = critical_potential(ball);
    const LinearizedSolution v = linearized_conformal(ball, h0, grid);
    const SymTensorField hk = effective_direction(ball, h0, v);
    const double fk = second_variation(ball.metric, cp.lambda, hk, q).total;
    const double diff = std::abs(fk - f0);
    sweep.push_back({{"kappa", kappa}, {"F", fk}, {"diff", diff}, {"v_sup", v.sup}});
    lk.push_back(std::log(kappa));
    ld.push_back(std::log(diff));
    if (std::abs(kappa - 0.1) < 1e-12) f_tenth = fk;
    if (diff / (kappa * kappa) > c_max) {
      c_max = diff / (kappa * kappa);
      c_signed = (fk - f0) / (kappa * kappa);
    }
  }
  double order = 0.0;
  if (lk.size() >= 2) {
    const double mk = std::accumulate(lk.begin(), lk.end(), 0.0) / static_cast<double>(lk.size());
    const double md = std::accumulate(ld.begin(), ld.end(), 0.0) / static_cast<double>(ld.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lk.size(); ++i) {
      sxy += (lk[i] - mk) * (ld[i] - md);
      sxx += (lk[i] - mk) * (lk[i] - mk);
    }
    order = sxy / sxx;
  }
  // Largest kappa for which F_0 + C kappa^2 stays negative under the fitted constant.
  const double kappa0 = c_signed > 0 ? std::sqrt(-f0 / c_signed) : INFINITY;
  rep.data()["kappa_family"] = {{"model", to_string(model)},
                                {"n", n},
                                {"F0", f0},
                                {"sweep", sweep},
                                {"fitted_order", order},
                                {"C", c_max},
                                {"kappa0_estimate", std::isfinite(kappa0) ? json(kappa0) : json("inf")}};
  rep.check("fitted order of |F_kappa - F_0|", order, std::nullopt, cfg.tolerances.order,
            Compare::ge, "continuity of the second variation in kappa");
  if (f_tenth)
    rep.check("F_kappa at kappa = 0.1", *f_tenth, std::nullopt, 0.0, Compare::negative,
              "negative direction persists for small kappa");
  rep.check("kappa0 estimate sqrt(-F_0 / C)", std::isfinite(kappa0) ? kappa0 : 1e300, std::nullopt,
            0.0, Compare::diagnostic, "negative direction persists for small kappa");
}

void large_ball_demo(const ScenarioConfig& cfg, Report& rep) {
  const ModelSpec& m = cfg.model;
  const double k = m.curvature_scale;
  if (m.model != Model::spherical || !(m.radius * k > kPi / 2 && m.radius * k < kPi))
    throw ConfigError("model: large-ball-demo needs a spherical ball with pi/2 < k R < pi");
  const SpaceFormBall ball = ball_for(m);
  const CriticalPotential cp = critical_potential(ball);
  const BallQuadrature q(ball.dim, ball.coord_radius, orders_for(cfg));
  const double R = ball.geodesic_radius * k;
  rep.data()["ball"] = model_json(ball);
  rep.data()["cap"] = {{"R", R}, {"a", 1.0 / std::cos(R)}};
  rep.check("lambda at the center", cp.center_value, std::nullopt, 0.0, Compare::negative,
            "critical potential is negative on large balls");
  const EigenEstimate e = first_eigenvalue_radial(ball);
  rep.check("lambda_1 - n (below the hemisphere value)", e.value - ball.dim, std::nullopt, 0.0,
            Compare::negative, "first eigenvalue below n past the equator");
  DirectionSpec d = direction_or_default(cfg);
  if (cfg.direction && d.kind != DirectionKind::tt_profile)
    throw ConfigError("direction.kind: large-ball-demo needs tt_profile");
  json rows = json::array();
  for (int idx : cfg.harmonics) {
    TTSpec spec = d.tt;
    spec.harmonic = idx;
    spec.harmonic_matrix.clear();
    const BuiltTT tt = build_tt(ball, spec);
    SecondVariationOptions opts;
    opts.tt_scalar_curvature = ball.scalar_curvature;
    const SecondVariationBreakdown sv = second_variation(ball.metric, cp.lambda, tt.chart, q, opts);
    const std::string tag = tt.profile.harmonic.label;
    rows.push_back({{"harmonic", tag}, {"breakdown", breakdown_json(sv)}});
    rep.check("second variation, TT " + tag, sv.total, std::nullopt, 0.0, Compare::negative,
              "TT directions decrease volume on large balls");
    rep.check("TT reduction agreement, " + tag, sv.total, *sv.reduced, 1e-8, Compare::rel_strict,
              "second variation for TT directions");
  }
  rep.data()["directions"] = rows;
}

void yamabe_path(const ScenarioConfig& cfg, Report& rep) {
  const SpaceFormBall ball = ball_for(cfg.model);
  const DirectionSpec d = direction_or_default(cfg);
  const SymTensorField h = build_direction(ball, d);
  PathOptions opts;
  opts.step = cfg.step;
  opts.grid = cfg.grid;
  const bool radial = cfg.grid.mode == GridMode::radial;
  const QuadratureOrders o = cfg.quadrature_given ? cfg.quadrature
                             : radial ? QuadratureOrders{48, ball.dim == 3 ? 8 : 6}
                                      : QuadratureOrders{32, 16};
  opts.volume_orders = o;
  const PathVolume pv = path_volume(ball, h, opts);
  const LinearizedSolution v = linearized_conformal(ball, h, cfg.grid);
  const SymTensorField heff = effective_direction(ball, h, v);
  const BallQuadrature q(ball.dim, ball.coord_radius, o);
  const SecondVariationBreakdown sv =
      second_variation(ball.metric, critical_potential(ball).lambda, heff, q);
  const double dv = first_variation(ball.metric, heff, q);

  json samples = json::array();
  for (std::size_t i = 0; i < pv.t.size(); ++i) samples.push_back({{"t", pv.t[i]}, {"V", pv.volume[i]}});
  rep.data()["ball"] = model_json(ball);
  rep.data()["direction"] = to_string(d.kind);
  rep.data()["samples"] = samples;
  rep.data()["path"] = {{"first_derivative", pv.first_derivative},
                        {"second_derivative", pv.second_derivative},
                        {"first_truncation", pv.first_truncation},
                        {"second_truncation", pv.second_truncation},
                        {"max_newton_residual", pv.max_residual},
                        {"max_newton_iterations", pv.max_iterations},
                        {"bracket_constant", pv.bracket_constant},
                        {"max_scalar_defect", pv.max_scalar_defect},
                        {"v_sup", v.sup}};
  rep.data()["second_variation"] = breakdown_json(sv);

  rep.check("|V'(0)| along the path", std::abs(pv.first_derivative), std::nullopt,
            cfg.tolerances.path_first, Compare::le, "criticality: DV = 0 along constant-K paths");
  rep.check("DV(h_eff)", dv, 0.0, cfg.tolerances.path_first, Compare::abs_le,
            "criticality: DV = 0 along constant-K paths");
  rep.check("max Newton residual", pv.max_residual, std::nullopt, 10 * cfg.grid.newton_tolerance,
            Compare::le, "conformal factor solves the constant-K problem");
  rep.check("sup |R(g(t)) - K| at sample points", pv.max_scalar_defect, std::nullopt, 0.0,
            Compare::diagnostic, "constant scalar curvature along the path");
  if (radial) {
    // Rotationally symmetric constant-K deformations fixing the boundary are
    // isometric to the ball: V'' and F(h_eff) both vanish.
    rep.check("|V''(0)| (rotationally symmetric path)", std::abs(pv.second_derivative), std::nullopt,
              cfg.tolerances.rigidity, Compare::le, "second variation along the path");
    rep.check("|F(h_eff)| (rotationally symmetric path)", std::abs(sv.total), std::nullopt,
              cfg.tolerances.rigidity, Compare::le, "second variation along the path");
  } else {
    rep.check("V''(0) vs second variation of h_eff", pv.second_derivative, sv.total,
              cfg.tolerances.path_second, Compare::rel_strict, "second variation along the path");
  }
  if (cfg.largest_t)
    rep.data()["largest_solvable_t"] = largest_solvable_t(ball, h, cfg.step, cfg.t_max, cfg.grid);

  if (!cfg.csv.empty()) {
    std::ofstream out(cfg.csv);
    if (!out) throw ConfigError("path.csv: cannot open " + cfg.csv);
    out << "t,V\n" << std::setprecision(17);
    for (std::size_t i = 0; i < pv.t.size(); ++i) out << pv.t[i] << ',' << pv.volume[i] << '\n';
  }
}

void eigen_check(const ScenarioConfig& cfg, Report& rep) {
  const int n = cfg.model.dim;
  const double j = boost::math::cyl_bessel_j_zero(0.5 * n - 1.0, 1);
  const EigenEstimate eu = first_eigenvalue_radial(Model::euclidean, n, 1.0);
  rep.check("lambda_1, Euclidean unit ball (Bessel zero j^2)", eu.value, j * j,
            cfg.tolerances.eigen_euclidean, Compare::abs_le, "Dirichlet eigenvalue of the unit ball");
  const EigenEstimate hemi = first_eigenvalue_radial(Model::spherical, n, kPi / 2);
  rep.check("lambda_1, hemisphere", hemi.value, static_cast<double>(n),
            cfg.tolerances.eigen_hemisphere, Compare::abs_le, "hemisphere eigenvalue equals n");
  json rows = json::array();
  for (double R : {0.5, 1.0, 1.5}) {
    const EigenEstimate e = first_eigenvalue_radial(Model::spherical, n, R);
    rows.push_back({{"R", R}, {"lambda_1", e.value}});
    rep.check("lambda_1 - n, spherical R=" + std::to_string(R).substr(0, 3), e.value - n,
              std::nullopt, 0.0, Compare::positive, "lambda_1 > n inside the hemisphere");
  }
  if (n == 3)
    for (double R : {0.5, 1.0}) {
      const EigenEstimate e = first_eigenvalue_radial(Model::hyperbolic, 3, R);
      rep.check("lambda_1 = 1 + pi^2/R^2, hyperbolic R=" + std::to_string(R).substr(0, 3), e.value,
                1.0 + kPi * kPi / (R * R), 1e-8, Compare::rel_strict, "hyperbolic 3-ball closed form");
    }
  const SpaceFormBall ball = ball_for(cfg.model);
  const EigenEstimate e = first_eigenvalue_radial(ball);
  rows.push_back({{"configured", model_json(ball)},
                  {"lambda_1", e.value},
                  {"lower", e.lower},
                  {"upper", e.upper},
                  {"shift", e.shift},
                  {"exceeds_shift", e.exceeds_shift}});
  rep.data()["estimates"] = rows;
  rep.check("lambda_1 of the configured ball", e.value, std::nullopt, 0.0, Compare::diagnostic,
            "first Dirichlet eigenvalue");
}

}  // namespace

QuadratureOrders default_orders(int n) {
  switch (n) {
    case 3: return {48, 20};
    case 4: return {24, 12};
    case 5: return {16, 8};
    default: return {12, 6};
  }
}

void run_command(const ScenarioConfig& cfg, Report& rep) {
  const std::string& c = cfg.command;
  if (c == "critical-check") return critical_check(cfg, rep);
  if (c == "volume-chain") return volume_chain(cfg, rep);
  if (c == "linearization-check") return linearization_check(cfg, rep, false);
  if (c == "second-scalar-check") return linearization_check(cfg, rep, true);
  if (c == "tt-build") return tt_build(cfg, rep);
  if (c == "second-variation") return second_variation_cmd(cfg, rep);
  if (c == "saddle-demo") return saddle_demo(cfg, rep);
  if (c == "large-ball-demo") return large_ball_demo(cfg, rep);
  if (c == "yamabe-path") return yamabe_path(cfg, rep);
  if (c == "eigen-check") return eigen_check(cfg, rep);
  throw ConfigError("command: unknown command '" + c + "'");
}

}  // namespace volcrit::cli
