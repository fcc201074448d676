#include "volcrit/riemann.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "volcrit/errors.hpp"

namespace volcrit {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

MetricField::MetricField(Chart chart, SymTensorField g) : chart_(chart), g_(std::move(g)) {
  if (g_.dim() != chart_.dim) throw DomainError("metric dimension does not match its chart");
}

MetricField MetricField::perturbed(const SymTensorField& h, double t) const {
  return MetricField(chart_, g_ + t * h);
}

MetricField MetricField::perturbed(const SymTensorField& h, const SymTensorField& h2,
                                   double t) const {
  return MetricField(chart_, g_ + (t * h + (0.5 * t * t) * h2));
}

namespace {
SmallMatrix values(const JetMatrix& m) {
  SmallMatrix a(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) a(i, j) = m(i, j).value;
  return a;
}
}  // namespace

double MetricField::volume_density(const Point& p) const {
  return std::sqrt(values(g_.at(p)).determinant());
}

double MetricField::min_eigenvalue(const Point& p) const {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(values(g_.at(p)));
  return es.eigenvalues()(0);
}

LocalGeometry local_geometry(const JetMatrix& gj, const Point& p) {
  const int n = gj.dim;
  LocalGeometry geo;
  geo.n = n;
  geo.p = p;
  geo.gjet = gj;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      geo.gjet(i, j).dim = n;  // constant entries carry no seeds
      geo.g(i, j) = gj(i, j).value;
    }

  const SmallMatrix gm = values(gj);
  Eigen::LLT<SmallMatrix> llt(gm);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "metric is not positive definite at |x| = " << p.norm();
    throw SingularMetricError(os.str());
  }
  const SmallMatrix G = llt.solve(SmallMatrix::Identity(n, n));
  geo.det = gm.determinant();
  if (!(geo.det > 0.0) || !std::isfinite(geo.det)) throw SingularMetricError("degenerate metric");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geo.ginv(i, j) = G(i, j);

  // g^{-1} as a second-order jet:
  //   d_k G = -G (d_k g) G
  //   d_k d_l G = G dk g G dl g G + G dl g G dk g G - G dkl g G
  std::array<SmallMatrix, kMaxDim> dg;
  std::array<SmallMatrix, kMaxDim> GdgG;
  for (int k = 0; k < n; ++k) {
    dg[k].resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[k](i, j) = geo.gjet(i, j).d(k);
    GdgG[k] = G * dg[k] * G;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet2& e = geo.ginv_jet(i, j);
      e = Jet2(G(i, j));
      e.dim = n;
      for (int k = 0; k < n; ++k) e.grad[k] = -GdgG[k](i, j);
    }
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      SmallMatrix ddg(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddg(i, j) = geo.gjet(i, j).dd(k, l);
      const SmallMatrix hkl = GdgG[k] * dg[l] * G + GdgG[l] * dg[k] * G - G * ddg * G;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          geo.ginv_jet(i, j).dd(k, l) = hkl(i, j);
          geo.ginv_jet(i, j).dd(l, k) = hkl(i, j);
        }
    }

  // Christoffel symbols with first derivatives.
  Tensor3<Jet1> first_kind;  // Gamma_{l j k}
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Jet1 c = partial(geo.gjet(l, k), j) + partial(geo.gjet(l, j), k) -
                 partial(geo.gjet(j, k), l);
        c *= 0.5;
        first_kind(l, j, k) = c;
        first_kind(l, k, j) = c;
      }
  Tensor2<Jet1> ginv1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ginv1(i, j) = truncate(geo.ginv_jet(i, j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Jet1 s(0.0);
        s.dim = n;
        for (int l = 0; l < n; ++l) s += ginv1(i, l) * first_kind(l, j, k);
        geo.christoffel(i, j, k) = s;
        geo.christoffel(i, k, j) = s;
      }
  return geo;
}

LocalGeometry local_geometry(const MetricField& g, const Point& p) {
  g.chart().require_contains(p);
  return local_geometry(g.tensor().at(p), p);
}

CurvaturePoint curvature(const LocalGeometry& geo) {
  const int n = geo.n;
  CurvaturePoint c;
  c.n = n;
  c.riemann = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) c.christoffel(i, j, k) = geo.gamma(i, j, k);

  // R^a_{l i j} = d_i Gamma^a_{jl} - d_j Gamma^a_{il}
  //             + Gamma^a_{ie} Gamma^e_{jl} - Gamma^a_{je} Gamma^e_{il}
  // R_{ijkl} = g_{ka} R^a_{lij}
  std::vector<double> up(static_cast<std::size_t>(n * n * n * n));
  auto U = [&](int a, int l, int i, int j) -> double& {
    return up[static_cast<std::size_t>(((a * n + l) * n + i) * n + j)];
  };
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double v = geo.christoffel(a, j, l).d(i) - geo.christoffel(a, i, l).d(j);
          for (int e = 0; e < n; ++e)
            v += geo.gamma(a, i, e) * geo.gamma(e, j, l) - geo.gamma(a, j, e) * geo.gamma(e, i, l);
          U(a, l, i, j) = v;
          U(a, l, j, i) = -v;
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int a = 0; a < n; ++a) v += geo.g(k, a) * U(a, l, i, j);
          c.riemann(i, j, k, l) = v;
        }
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double v = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) v += geo.ginv(i, k) * c.riemann(i, j, k, l);
      c.ricci(j, l) = v;
    }
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) s += geo.ginv(j, l) * c.ricci(j, l);
  c.scalar = s;
  return c;
}

CurvaturePoint curvature_at(const MetricField& g, const Point& p) {
  return curvature(local_geometry(g, p));
}

double scalar_curvature_at(const MetricField& g, const Point& p) {
  return curvature_at(g, p).scalar;
}

ScalarDerivatives covariant_scalar(const LocalGeometry& geo, const Jet2& f) {
  const int n = geo.n;
  ScalarDerivatives s;
  s.value = f.value;
  for (int k = 0; k < n; ++k) s.grad[k] = f.d(k);
  double lap = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = f.dd(i, j);
      for (int k = 0; k < n; ++k) v -= geo.gamma(k, i, j) * f.d(k);
      s.hessian(i, j) = v;
      lap += geo.ginv(i, j) * v;
    }
  s.laplacian = lap;
  return s;
}

TensorDerivatives covariant_tensor(const LocalGeometry& geo, const JetMatrix& h) {
  const int n = geo.n;
  TensorDerivatives t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.h(i, j) = h(i, j).value;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += geo.ginv(i, a) * t.h(a, b) * geo.ginv(b, j);
      t.h_up(i, j) = v;
    }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = h(i, j).d(k);
        for (int p = 0; p < n; ++p)
          v -= geo.gamma(p, k, i) * t.h(p, j) + geo.gamma(p, k, j) * t.h(i, p);
        t.nabla(i, j, k) = v;
      }

  // div h as a first-order jet so that its covariant derivative is exact.
  std::array<Jet1, kMaxDim> divj;
  for (int k = 0; k < n; ++k) {
    Jet1 acc(0.0);
    acc.dim = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet1 cov = partial(h(i, k), j);
        cov.dim = n;
        for (int p = 0; p < n; ++p) {
          Jet1 hpk = truncate(h(p, k));
          Jet1 hip = truncate(h(i, p));
          cov -= geo.christoffel(p, j, i) * hpk + geo.christoffel(p, j, k) * hip;
        }
        acc += truncate(geo.ginv_jet(i, j)) * cov;
      }
    divj[k] = acc;
    t.div[k] = acc.value;
  }
  double dd = 0.0;
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      double v = divj[k].d(m);
      for (int p = 0; p < n; ++p) v -= geo.gamma(p, m, k) * t.div[p];
      t.nabla_div(k, m) = v;
    }
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) dd += geo.ginv(k, m) * t.nabla_div(k, m);
  t.div_div = dd;

  Jet2 tr(0.0);
  tr.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr += geo.ginv_jet(i, j) * h(i, j);
  t.trace = tr;
  t.trace_derivs = covariant_scalar(geo, tr);
  return t;
}

CovariantOps covariant_ops(const MetricField& g, const ScalarField& f, const SymTensorField& h,
                           const Point& p) {
  const LocalGeometry geo = local_geometry(g, p);
  CovariantOps ops;
  ops.scalar = covariant_scalar(geo, f.at(p));
  ops.tensor = covariant_tensor(geo, h.at(p));
  return ops;
}

double inner(const Mat& g, const Point& u, const Point& v) {
  double s = 0.0;
  for (int i = 0; i < u.dim; ++i)
    for (int j = 0; j < v.dim; ++j) s += g(i, j) * u[i] * v[j];
  return s;
}

std::vector<Point> sphere_tangent_directions(const Point& p) {
  const int n = p.dim;
  const double r = p.norm();
  if (!(r > 0.0)) throw DomainError("the coordinate sphere through the origin is degenerate");
  int drop = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(p[i]) > std::abs(p[drop])) drop = i;
  std::vector<Point> dirs;
  for (int i = 0; i < n; ++i) {
    if (i == drop) continue;
    Point v = Point::zero(n);
    v[i] = 1.0;
    const double c = p[i] / r;
    for (int k = 0; k < n; ++k) v[k] -= c * p[k] / r;
    for (const auto& e : dirs) {
      double d = 0.0;
      for (int k = 0; k < n; ++k) d += v[k] * e[k];
      for (int k = 0; k < n; ++k) v[k] -= d * e[k];
    }
    const double len = v.norm();
    for (int k = 0; k < n; ++k) v[k] /= len;
    dirs.push_back(v);
  }
  return dirs;
}

double sphere_area_density(const MetricField& g, const Point& p) {
  const auto dirs = sphere_tangent_directions(p);
  const JetMatrix gj = g.tensor().at(p);
  Mat gv;
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.dim; ++j) gv(i, j) = gj(i, j).value;
  const int m = static_cast<int>(dirs.size());
  SmallMatrix gam(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) gam(a, b) = inner(gv, dirs[a], dirs[b]);
  return std::sqrt(gam.determinant());
}

namespace {
// Unit normal field nu^i of the level sets of |x| as first-order jets.
std::array<Jet1, kMaxDim> unit_normal_field(const LocalGeometry& geo) {
  const int n = geo.n;
  std::array<Jet1, kMaxDim> x;
  for (int i = 0; i < n; ++i) x[i] = Jet1::variable(geo.p[i], i, n);
  std::array<Jet1, kMaxDim> raw;
  Jet1 norm2(0.0);
  norm2.dim = n;
  for (int i = 0; i < n; ++i) {
    Jet1 s(0.0);
    s.dim = n;
    for (int j = 0; j < n; ++j) s += truncate(geo.ginv_jet(i, j)) * x[j];
    raw[i] = s;
    norm2 += s * x[i];
  }
  const Jet1 inv = reciprocal(sqrt(norm2));
  for (int i = 0; i < n; ++i) raw[i] = raw[i] * inv;
  return raw;
}

double intrinsic_sphere_scalar(const MetricField& g, const Point& p) {
  const int n = p.dim;
  const int m = n - 1;
  const double rho = p.norm();
  const auto dirs = sphere_tangent_directions(p);
  // X(y) = rho w / |w|,  w = p/rho + y_A f_A
  std::array<Jet2, kMaxDim> y;
  for (int a = 0; a < m; ++a) y[a] = Jet2::variable(0.0, a, m);
  std::array<Jet2, kMaxDim> w;
  for (int i = 0; i < n; ++i) {
    Jet2 wi(p[i] / rho);
    wi.dim = m;
    for (int a = 0; a < m; ++a) wi += y[a] * dirs[a][i];
    w[i] = wi;
  }
  Jet2 ww(0.0);
  ww.dim = m;
  for (int i = 0; i < n; ++i) ww += w[i] * w[i];
  const Jet2 inv_len = reciprocal(sqrt(ww));
  const Jet2 inv_len3 = inv_len * inv_len * inv_len;
  std::array<Jet2, kMaxDim> X;
  for (int i = 0; i < n; ++i) X[i] = w[i] * inv_len * rho;
  // dX/dy_A = rho (f_A/|w| - w (w.f_A)/|w|^3)
  std::vector<std::array<Jet2, kMaxDim>> dX(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    Jet2 wf(0.0);
    wf.dim = m;
    for (int i = 0; i < n; ++i) wf += w[i] * dirs[a][i];
    for (int i = 0; i < n; ++i) dX[a][i] = (inv_len * dirs[a][i] - w[i] * wf * inv_len3) * rho;
  }
  JetMatrix gX(n);
  g.eval(std::span<const Jet2>(X.data(), static_cast<std::size_t>(n)), gX);
  JetMatrix gamma(m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Jet2 s(0.0);
      s.dim = m;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += gX(i, j) * dX[a][i] * dX[b][j];
      gamma.set_sym(a, b, s);
    }
  return curvature(local_geometry(gamma, Point::zero(m))).scalar;
}
}  // namespace

BoundaryGeometry boundary_geometry(const MetricField& g, const Point& p) {
  const LocalGeometry geo = local_geometry(g, p);
  const int n = geo.n;
  BoundaryGeometry b;
  b.n = n;
  const auto nu = unit_normal_field(geo);
  b.normal = Point::zero(n);
  for (int i = 0; i < n; ++i) b.normal[i] = nu[i].value;

  // g-orthonormal tangent frame by Gram-Schmidt in fixed order.
  for (const Point& f : sphere_tangent_directions(p)) {
    Point v = f;
    for (const Point& e : b.frame) {
      const double c = inner(geo.g, v, e);
      for (int k = 0; k < n; ++k) v[k] -= c * e[k];
    }
    const double len2 = inner(geo.g, v, v);
    if (!(len2 > 1e-300)) throw SingularMetricError("degenerate induced metric on the sphere");
    const double len = std::sqrt(len2);
    for (int k = 0; k < n; ++k) v[k] /= len;
    b.frame.push_back(v);
  }
  const int m = n - 1;
  // nabla_X nu = X^i (d_i nu^k + Gamma^k_il nu^l)
  std::vector<Point> dnu;
  for (const Point& e : b.frame) {
    Point v = Point::zero(n);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double c = nu[k].d(i);
        for (int l = 0; l < n; ++l) c += geo.gamma(k, i, l) * nu[l].value;
        s += e[i] * c;
      }
      v[k] = s;
    }
    dnu.push_back(v);
  }
  SmallMatrix induced(m, m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      b.second_fundamental(a, c) = inner(geo.g, dnu[a], b.frame[c]);
      b.induced(a, c) = inner(geo.g, b.frame[a], b.frame[c]);
      induced(a, c) = b.induced(a, c);
    }
  const SmallMatrix ind_inv = induced.inverse();
  double H = 0.0;
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) H += ind_inv(a, c) * b.second_fundamental(a, c);
  b.mean_curvature = H;

  const CurvaturePoint curv = curvature(geo);
  double rnn = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rnn += curv.ricci(i, j) * b.normal[i] * b.normal[j];
  b.ricci_normal = rnn;
  b.boundary_scalar = intrinsic_sphere_scalar(g, p);
  b.area_density = sphere_area_density(g, p);
  return b;
}

double level_set_mean_curvature(const MetricField& g, const Point& p) {
  const LocalGeometry geo = local_geometry(g, p);
  const int n = geo.n;
  const auto nu = unit_normal_field(geo);
  // div nu = d_i nu^i + 1/2 nu^i g^{ab} d_i g_ab
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    div += nu[i].d(i);
    double dlogdet = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) dlogdet += geo.ginv(a, c) * geo.gjet(a, c).d(i);
    div += 0.5 * nu[i].value * dlogdet;
  }
  return div;
}

}  // namespace volcrit
