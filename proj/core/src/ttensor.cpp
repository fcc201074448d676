#include "volcrit/ttensor.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "volcrit/errors.hpp"

namespace volcrit {

namespace {
Jet2 jet_norm(std::span<const Jet2> y) {
  Jet2 s(0.0);
  for (const auto& c : y) s += c * c;
  return sqrt(s);
}
}  // namespace

// ---------------------------------------------------------------------------
// Warped metric

double WarpedMetric::lapse_value(double r) const { return lapse(RadialSeries(r)).value(); }

MetricField WarpedMetric::metric() const {
  const int n = dim();
  const RadialMap N = lapse;
  SymTensorField g(n, [n, N](std::span<const Jet2> y, JetMatrix& out) {
    const Jet2 r = jet_norm(y);
    const RadialSeries nn = N(RadialSeries::variable(r.value));
    const Jet2 f = compose(1.0 / (nn * nn) - 1.0, r) / (r * r);  // (N^{-2} - 1) / r^2
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.set_sym(i, j, (i == j ? 1.0 : 0.0) + f * y[i] * y[j]);
  });
  return MetricField(chart(), std::move(g));
}

WarpedMetric space_form_warped(int m, double sectional, double outer_radius) {
  if (m < 2 || m + 1 > kMaxDim) throw DomainError("sphere dimension must lie in [2, 5]");
  if (!(outer_radius > 0.0)) throw DomainError("warped outer radius must be positive");
  if (sectional > 0.0 && !(outer_radius * std::sqrt(sectional) <= 1.0))
    throw DomainError("warped radius of a spherical model cannot pass the equator");
  WarpedMetric w;
  w.m = m;
  w.outer_radius = outer_radius;
  w.sectional = sectional;
  w.lapse = [sectional](const RadialSeries& r) { return sqrt(1.0 - sectional * r * r); };
  return w;
}

WarpedMetric warped_for(const SpaceFormBall& ball) {
  double outer = ball.area_radius(ball.coord_radius);
  if (ball.model == Model::spherical && ball.regime == SphericalRegime::large)
    outer = 1.0 / ball.curvature_scale;
  if (ball.model == Model::spherical) outer = std::min(outer, (1.0 - 1e-12) / ball.curvature_scale);
  return space_form_warped(ball.dim - 1, ball.sectional, outer);
}

// ---------------------------------------------------------------------------
// Harmonics

double SphericalHarmonic::value(const Point& w) const {
  const int d = m + 1;
  double s = 0.0;
  if (degree == 1) {
    for (int i = 0; i < d; ++i) s += v[i] * w[i];
    return s;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += w[i] * qm(i, j) * w[j];
  return s;
}

int SphericalHarmonic::catalogue_size(int m) { return m + (m + 1) * m / 2; }

SphericalHarmonic SphericalHarmonic::catalogue(int m, int index) {
  if (m < 2 || m + 1 > kMaxDim) throw DomainError("sphere dimension must lie in [2, 5]");
  if (index < 0 || index >= catalogue_size(m))
    throw DomainError("harmonic catalogue index out of range");
  SphericalHarmonic y;
  y.m = m;
  y.degree = 2;
  y.kappa = 2.0 * (m + 1);
  std::ostringstream os;
  if (index < m) {
    y.q[static_cast<std::size_t>(index * kMaxDim + index)] = 1.0;
    y.q[static_cast<std::size_t>((index + 1) * kMaxDim + index + 1)] = -1.0;
    os << "w" << index + 1 << "^2 - w" << index + 2 << "^2";
  } else {
    int k = index - m;
    for (int i = 0; i <= m; ++i)
      for (int j = i + 1; j <= m; ++j, --k)
        if (k == 0) {
          y.q[static_cast<std::size_t>(i * kMaxDim + j)] = 0.5;
          y.q[static_cast<std::size_t>(j * kMaxDim + i)] = 0.5;
          os << "w" << i + 1 << " w" << j + 1;
        }
  }
  y.label = os.str();
  return y;
}

SphericalHarmonic SphericalHarmonic::from_matrix(int m, const std::vector<double>& e) {
  const int d = m + 1;
  if (m < 2 || d > kMaxDim) throw DomainError("sphere dimension must lie in [2, 5]");
  if (static_cast<int>(e.size()) != d * d)
    throw DomainError("harmonic matrix must have (m+1)^2 entries");
  SphericalHarmonic y;
  y.m = m;
  y.degree = 2;
  y.kappa = 2.0 * (m + 1);
  double tr = 0.0, norm = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double a = e[static_cast<std::size_t>(i * d + j)];
      if (std::abs(a - e[static_cast<std::size_t>(j * d + i)]) > 1e-12)
        throw DomainError("harmonic matrix must be symmetric");
      y.q[static_cast<std::size_t>(i * kMaxDim + j)] = a;
      norm += a * a;
    }
  for (int i = 0; i < d; ++i) tr += e[static_cast<std::size_t>(i * d + i)];
  if (std::abs(tr) > 1e-12 * std::max(1.0, std::sqrt(norm)))
    throw DomainError("harmonic matrix must be trace-free");
  if (norm == 0.0) throw DomainError("harmonic matrix must be nonzero");
  y.label = "custom quadratic";
  return y;
}

SphericalHarmonic SphericalHarmonic::linear(int m, const std::vector<double>& coeffs) {
  if (static_cast<int>(coeffs.size()) != m + 1) throw DomainError("linear harmonic needs m+1 coefficients");
  SphericalHarmonic y;
  y.m = m;
  y.degree = 1;
  y.kappa = m;
  for (int i = 0; i <= m; ++i) y.v[i] = coeffs[static_cast<std::size_t>(i)];
  y.label = "linear";
  return y;
}

// ---------------------------------------------------------------------------
// Radial profiles

RadialSeries RadialProfile::series(double r0) const {
  if (!(r0 > r1 && r0 < r2)) return RadialSeries(0.0);
  const RadialSeries t = RadialSeries::variable(r0);
  if (custom) return custom(t);
  const double w = r2 - r1;
  const RadialSeries u = -sharpness / ((t - r1) * (r2 - t)) + 4.0 * sharpness / (w * w);
  RadialSeries p(0.0);
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * t + *it;
  return amplitude * p * exp(u);
}

RadialProfile bump_profile(double r1, double r2, double amplitude) {
  RadialProfile a;
  a.r1 = r1;
  a.r2 = r2;
  a.amplitude = amplitude;
  return a;
}

void check_endpoint_decay(const RadialProfile& a, double outer_radius) {
  if (!(a.r1 > 0.0 && a.r1 < a.r2 && a.r2 < outer_radius)) {
    std::ostringstream os;
    os << "profile support (" << a.r1 << ", " << a.r2 << ") must satisfy 0 < r1 < r2 < "
       << outer_radius;
    throw SupportError(os.str());
  }
  const double eps = 0.01 * (a.r2 - a.r1);
  for (double r : {a.r1 + eps, a.r2 - eps}) {
    const RadialSeries s = a.series(r);
    for (int k = 0; k <= 2; ++k)
      if (!(std::abs(s.derivative(k)) < 1e-10)) {
        std::ostringstream os;
        os << "profile '" << a.label << "' does not decay at r = " << r << ": |a^(" << k
           << ")| = " << std::abs(s.derivative(k));
        throw SupportError(os.str());
      }
  }
}

// ---------------------------------------------------------------------------
// Profile equations

ProfileValues TTProfile::at(double r0) const {
  ProfileValues v;
  if (!(r0 > radial.r1 && r0 < radial.r2)) return v;
  const int m = metric.m;
  const double kappa = harmonic.kappa;
  const RadialSeries t = RadialSeries::variable(r0);
  const RadialSeries N = metric.lapse(t);
  const RadialSeries N2 = N * N;
  v.a = radial.series(r0);
  const RadialSeries F = N2 * v.a;
  v.b = (t * t / kappa) * (differentiate(F) + (m + 1.0) * F / t);
  const RadialSeries rhs = -(N * differentiate(N * v.b)) - m * N2 * v.b / t;
  v.c = (-F - m * rhs) / determinant;
  v.d = (-kappa * rhs + (m - 1.0 - kappa) * F) / determinant;
  return v;
}

TTProfile solve_profile(const WarpedMetric& metric, const RadialProfile& a,
                        const SphericalHarmonic& y) {
  if (y.m != metric.m) throw DomainError("harmonic and metric sphere dimensions differ");
  if (!(y.kappa > y.m)) {
    std::ostringstream os;
    os << "harmonic eigenvalue " << y.kappa << " must exceed m = " << y.m
       << "; the profile system is singular";
    throw DegenerateSystemError(os.str());
  }
  check_endpoint_decay(a, metric.outer_radius);
  TTProfile p;
  p.metric = metric;
  p.harmonic = y;
  p.radial = a;
  p.determinant = (metric.m - 1.0) * (y.kappa - metric.m);
  return p;
}

SymTensorField assemble_tt(const TTProfile& profile) {
  const int n = profile.metric.dim();
  const TTProfile prof = profile;
  SymTensorField h(
      n,
      [n, prof](std::span<const Jet2> y, JetMatrix& out) {
        const Jet2 r = jet_norm(y);
        const ProfileValues pv = prof.at(r.value);
        const Jet2 a = compose(pv.a, r), b = compose(pv.b, r), c = compose(pv.c, r),
                   d = compose(pv.d, r);
        std::array<Jet2, kMaxDim> w, qw, dy;
        for (int i = 0; i < n; ++i) w[i] = y[i] / r;
        Jet2 Y(0.0);
        for (int i = 0; i < n; ++i) {
          Jet2 s(0.0);
          for (int j = 0; j < n; ++j)
            if (prof.harmonic.qm(i, j) != 0.0) s += prof.harmonic.qm(i, j) * w[j];
          qw[i] = s;
          Y += w[i] * s;
        }
        for (int i = 0; i < n; ++i) dy[i] = 2.0 * (qw[i] - Y * w[i]) / r;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            const Jet2 wij = w[i] * w[j];
            const Jet2 pij = (i == j ? 1.0 : 0.0) - wij;
            const Jet2 pqp = prof.harmonic.qm(i, j) - w[i] * qw[j] - qw[i] * w[j] + Y * wij;
            out.set_sym(i, j,
                        a * Y * wij + b * (w[i] * dy[j] + dy[i] * w[j]) +
                            c * (2.0 * pqp - 2.0 * Y * pij) + d * Y * pij);
          }
      },
      Support{profile.radial.r1, profile.radial.r2}, BoundaryFlag::vanishes_on_boundary);
  return h;
}

// ---------------------------------------------------------------------------
// Transplant

double conformal_radius_of_area_radius(const SpaceFormBall& ball, double r) {
  const double k = ball.curvature_scale;
  switch (ball.model) {
    case Model::euclidean:
      return r;
    case Model::hyperbolic:
      return ball.coord_radius_of(std::asinh(k * r) / k);
    case Model::spherical:
      if (!(k * r < 1.0)) throw DomainError("warped radius beyond the equator");
      return ball.coord_radius_of(std::asin(k * r) / k);
  }
  return r;
}

SymTensorField transplant_to_chart(const SymTensorField& h, const TTProfile& profile,
                                   const SpaceFormBall& ball) {
  const int n = ball.dim;
  if (profile.metric.dim() != n || std::abs(profile.metric.sectional - ball.sectional) > 1e-14)
    throw DomainError("warped metric does not describe this ball");
  const double rho1 = conformal_radius_of_area_radius(ball, profile.radial.r1);
  const double rho2 = conformal_radius_of_area_radius(ball, profile.radial.r2);
  if (!(rho2 < ball.coord_radius)) {
    std::ostringstream os;
    os << "support radius " << profile.radial.r2 << " does not fit inside the ball";
    throw DomainError(os.str());
  }
  const double quarter_c = 0.25 * ball.sectional;
  const SymTensorField src = h;
  return SymTensorField(
      n,
      [n, src, quarter_c](std::span<const Jet2> x, JetMatrix& out) {
        Jet2 rho2(0.0);
        for (int i = 0; i < n; ++i) rho2 += x[i] * x[i];
        const Jet2 psi = reciprocal(1.0 + quarter_c * rho2);
        std::array<Jet2, kMaxDim> y, dpsi;
        for (int i = 0; i < n; ++i) {
          y[i] = psi * x[i];
          dpsi[i] = -2.0 * quarter_c * psi * psi * x[i];
        }
        JetMatrix hy(n);
        src.eval(std::span<const Jet2>(y.data(), static_cast<std::size_t>(n)), hy);
        // J(i, a) = d y^a / d x^i
        Tensor2<Jet2> J{};
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) J(i, a) = (i == a ? psi : Jet2(0.0)) + x[a] * dpsi[i];
        Tensor2<Jet2> hj{};
        for (int i = 0; i < n; ++i)
          for (int b = 0; b < n; ++b) {
            Jet2 s(0.0);
            for (int a = 0; a < n; ++a) s += J(i, a) * hy(a, b);
            hj(i, b) = s;
          }
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            Jet2 s(0.0);
            for (int b = 0; b < n; ++b) s += hj(i, b) * J(j, b);
            out.set_sym(i, j, s);
          }
      },
      Support{rho1, rho2}, BoundaryFlag::vanishes_on_boundary);
}

// ---------------------------------------------------------------------------
// Verification

TTCheck verify_tt(const MetricField& g, const SymTensorField& h, const std::vector<Point>& pts) {
  TTCheck c;
  c.points = pts.size();
  const int n = g.dim();
  for (const Point& p : pts) {
    const LocalGeometry geo = local_geometry(g, p);
    const TensorDerivatives td = covariant_tensor(geo, h.at(p));
    double div2 = 0.0, h2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        div2 += geo.ginv(i, j) * td.div[i] * td.div[j];
        h2 += td.h_up(i, j) * td.h(i, j);
      }
    c.max_trace = std::max(c.max_trace, std::abs(td.trace.value));
    c.max_div = std::max(c.max_div, std::sqrt(std::max(0.0, div2)));
    c.max_divdiv = std::max(c.max_divdiv, std::abs(td.div_div));
    c.max_norm = std::max(c.max_norm, std::sqrt(std::max(0.0, h2)));
  }
  return c;
}

std::vector<Point> annulus_points(int dim, double rho1, double rho2, std::size_t count,
                                  unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(rho1, rho2);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point p = Point::zero(dim);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      p[i] = nd(rng);
      s += p[i] * p[i];
    }
    const double r = u(rng) / std::sqrt(s);
    for (int i = 0; i < dim; ++i) p[i] *= r;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace volcrit
