#include "volcrit/fields.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

#include "volcrit/errors.hpp"
#include "volcrit/parallel.hpp"

namespace volcrit {

Point::Point(std::initializer_list<double> coords) : dim(static_cast<int>(coords.size())) {
  if (dim > kMaxDim) throw DomainError("point dimension exceeds kMaxDim");
  std::size_t i = 0;
  for (double c : coords) x[i++] = c;
}

Point Point::zero(int dim) {
  Point p;
  p.dim = dim;
  return p;
}

double Point::norm() const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

Chart::Chart(int dim_, ChartKind kind_, double coord_radius_)
    : dim(dim_), kind(kind_), coord_radius(coord_radius_) {
  if (dim < 3 || dim > kMaxDim) throw DomainError("chart dimension must lie in [3, 6]");
  if (!(coord_radius > 0.0)) throw DomainError("chart coordinate radius must be positive");
}

bool Chart::contains(const Point& p, double slack) const {
  if (p.dim != dim) return false;
  if (kind == ChartKind::warped_cartesian) {
    const double r = p.norm();
    return r > 0.0 && r <= coord_radius * (1.0 + slack);
  }
  return p.norm() <= coord_radius * (1.0 + slack);
}

void Chart::require_contains(const Point& p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "point with |x| = " << p.norm() << " lies outside the chart of radius "
       << coord_radius;
    throw DomainError(os.str());
  }
}

std::array<Jet2, kMaxDim> seed(const Point& p) {
  std::array<Jet2, kMaxDim> x;
  for (int i = 0; i < p.dim; ++i) x[i] = Jet2::variable(p[i], i, p.dim);
  return x;
}

std::string to_string(BoundaryFlag flag) {
  switch (flag) {
    case BoundaryFlag::vanishes_on_boundary:
      return "vanishes_on_boundary";
    case BoundaryFlag::tangential_part_vanishes:
      return "tangential_part_vanishes";
    case BoundaryFlag::unconstrained:
      return "unconstrained";
  }
  return "unconstrained";
}

namespace detail {
double coord_norm(std::span<const Jet2> x) {
  double s = 0.0;
  for (const auto& c : x) s += c.value * c.value;
  return std::sqrt(s);
}
}  // namespace detail

namespace {
int max_seed_dim(std::span<const Jet2> x) {
  int d = 0;
  for (const auto& c : x) d = std::max(d, c.dim);
  return d;
}

Jet2 zero_jet(int dim) {
  Jet2 z;
  z.dim = dim;
  return z;
}

bool outside(const std::optional<Support>& s, std::span<const Jet2> x) {
  return s && !s->contains(detail::coord_norm(x));
}
}  // namespace

// ---------------------------------------------------------------------------

ScalarField::ScalarField(int dim, ScalarEvaluator eval, std::optional<Support> support)
    : dim_(dim), eval_(std::move(eval)), support_(support) {}

Jet2 ScalarField::operator()(std::span<const Jet2> x) const {
  if (outside(support_, x)) return zero_jet(max_seed_dim(x));
  return eval_(x);
}

Jet2 ScalarField::at(const Point& p) const {
  auto x = seed(p);
  return (*this)(std::span<const Jet2>(x.data(), static_cast<std::size_t>(p.dim)));
}

double ScalarField::value(const Point& p) const { return at(p).value; }

ScalarField ScalarField::constant(int dim, double c) {
  return ScalarField(dim, [c](std::span<const Jet2> x) {
    Jet2 r(c);
    r.dim = max_seed_dim(x);
    return r;
  });
}

ScalarField operator*(double s, const ScalarField& f) {
  return ScalarField(
      f.dim_, [s, f](std::span<const Jet2> x) { return f(x) * s; }, f.support_);
}

SymTensorField::SymTensorField(int dim, TensorEvaluator eval, std::optional<Support> support,
                               BoundaryFlag flag)
    : dim_(dim), eval_(std::move(eval)), support_(support), flag_(flag) {}

SymTensorField SymTensorField::with_flag(BoundaryFlag flag) const {
  SymTensorField h = *this;
  h.flag_ = flag;
  return h;
}

void SymTensorField::eval(std::span<const Jet2> x, JetMatrix& out) const {
  out.dim = dim_;
  if (outside(support_, x)) {
    const Jet2 z = zero_jet(max_seed_dim(x));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) out(i, j) = z;
    return;
  }
  eval_(x, out);
}

JetMatrix SymTensorField::at(const Point& p) const {
  auto x = seed(p);
  JetMatrix m(dim_);
  eval(std::span<const Jet2>(x.data(), static_cast<std::size_t>(p.dim)), m);
  return m;
}

SymTensorField SymTensorField::zero(int dim) {
  return SymTensorField(
      dim,
      [dim](std::span<const Jet2> x, JetMatrix& out) {
        const Jet2 z = zero_jet(max_seed_dim(x));
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) out(i, j) = z;
      },
      std::nullopt, BoundaryFlag::vanishes_on_boundary);
}

SymTensorField SymTensorField::constant(int dim, std::span<const double> entries) {
  std::vector<double> e(entries.begin(), entries.end());
  if (static_cast<int>(e.size()) != dim * dim)
    throw DomainError("constant tensor needs dim*dim entries");
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(e[i * dim + j] - e[j * dim + i]) > 0.0)
        throw DomainError("constant tensor must be symmetric");
  return SymTensorField(dim, [dim, e](std::span<const Jet2> x, JetMatrix& out) {
    const int sd = max_seed_dim(x);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        Jet2 c(e[i * dim + j]);
        c.dim = sd;
        out(i, j) = c;
      }
  });
}

namespace {
std::optional<Support> support_union(const std::optional<Support>& a,
                                     const std::optional<Support>& b) {
  if (!a || !b) return std::nullopt;
  return Support{std::min(a->inner, b->inner), std::max(a->outer, b->outer)};
}

BoundaryFlag weaker(BoundaryFlag a, BoundaryFlag b) {
  return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}
}  // namespace

SymTensorField operator+(const SymTensorField& a, const SymTensorField& b) {
  return SymTensorField(
      a.dim_,
      [a, b](std::span<const Jet2> x, JetMatrix& out) {
        JetMatrix tmp(a.dim_);
        a.eval(x, out);
        b.eval(x, tmp);
        for (int i = 0; i < a.dim_; ++i)
          for (int j = 0; j < a.dim_; ++j) out(i, j) += tmp(i, j);
      },
      support_union(a.support_, b.support_), weaker(a.flag_, b.flag_));
}

SymTensorField operator*(double s, const SymTensorField& a) {
  return SymTensorField(
      a.dim_,
      [s, a](std::span<const Jet2> x, JetMatrix& out) {
        a.eval(x, out);
        for (int i = 0; i < a.dim_; ++i)
          for (int j = 0; j < a.dim_; ++j) out(i, j) *= s;
      },
      a.support_, a.flag_);
}

SymTensorField operator*(const ScalarField& f, const SymTensorField& h) {
  return SymTensorField(
      h.dim_,
      [f, h](std::span<const Jet2> x, JetMatrix& out) {
        h.eval(x, out);
        const Jet2 fv = f(x);
        for (int i = 0; i < h.dim_; ++i)
          for (int j = 0; j < h.dim_; ++j) out(i, j) = out(i, j) * fv;
      },
      h.support_, h.flag_);
}

VectorField::VectorField(int dim, VectorEvaluator eval) : dim_(dim), eval_(std::move(eval)) {}

void VectorField::eval(std::span<const Jet2> x, std::span<Jet2> out) const { eval_(x, out); }

std::array<Jet2, kMaxDim> VectorField::at(const Point& p) const {
  auto x = seed(p);
  std::array<Jet2, kMaxDim> out;
  eval(std::span<const Jet2>(x.data(), static_cast<std::size_t>(p.dim)),
       std::span<Jet2>(out.data(), static_cast<std::size_t>(dim_)));
  return out;
}

Jet2 eval_jet(const Chart& chart, const ScalarField& f, const Point& p) {
  chart.require_contains(p);
  return f.at(p);
}

JetMatrix eval_jet(const Chart& chart, const SymTensorField& h, const Point& p) {
  chart.require_contains(p);
  return h.at(p);
}

// ---------------------------------------------------------------------------
// Quadrature

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (count == 1) p0 = 1.0;
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(count - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(count - 1 - i)] = w;
  }
}

void gauss_gegenbauer(int count, double alpha, std::vector<double>& nodes,
                      std::vector<double>& weights) {
  if (alpha == 0.0) {
    gauss_legendre(count, nodes, weights);
    return;
  }
  // Golub-Welsch on the symmetric Jacobi matrix of the weight (1-t^2)^alpha.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
  for (int j = 1; j < count; ++j) {
    const double a = alpha;
    const double s = 2.0 * j + 2.0 * a;
    const double beta = 4.0 * j * (j + a) * (j + a) * (j + 2.0 * a) / (s * s * (s + 1.0) * (s - 1.0));
    J(j, j - 1) = J(j - 1, j) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, 2.0 * alpha + 1.0) * std::exp(2.0 * std::lgamma(alpha + 1.0) -
                                                                 std::lgamma(2.0 * alpha + 2.0));
  nodes.resize(static_cast<std::size_t>(count));
  weights.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
}

namespace {
// Product rule on S^{d}, d = dim - 1, in hyperspherical angles.
void sphere_rule(int dim, int degree, std::vector<Point>& dirs, std::vector<double>& weights) {
  const int polar_angles = dim - 2;
  const int polar_count = degree / 2 + 1;
  const int azimuth_count = degree + 1;

  std::vector<std::vector<double>> t(static_cast<std::size_t>(polar_angles));
  std::vector<std::vector<double>> w(static_cast<std::size_t>(polar_angles));
  for (int j = 0; j < polar_angles; ++j) {
    // angle j carries the weight sin^{k} with k = dim - 2 - j
    const int k = dim - 2 - j;
    gauss_gegenbauer(polar_count, 0.5 * (k - 1), t[j], w[j]);
  }

  dirs.clear();
  weights.clear();
  std::vector<int> idx(static_cast<std::size_t>(polar_angles), 0);
  while (true) {
    for (int a = 0; a < azimuth_count; ++a) {
      const double phi = 2.0 * std::numbers::pi * (a + 0.5) / azimuth_count;
      Point p = Point::zero(dim);
      double weight = 2.0 * std::numbers::pi / azimuth_count;
      double sprod = 1.0;
      for (int j = 0; j < polar_angles; ++j) {
        const double c = t[j][idx[j]];
        p[j] = sprod * c;
        sprod *= std::sqrt(std::max(0.0, 1.0 - c * c));
        weight *= w[j][idx[j]];
      }
      p[dim - 2] = sprod * std::cos(phi);
      p[dim - 1] = sprod * std::sin(phi);
      dirs.push_back(p);
      weights.push_back(weight);
    }
    int j = polar_angles - 1;
    while (j >= 0 && ++idx[j] == polar_count) idx[j--] = 0;
    if (j < 0) break;
  }
}
}  // namespace

BallQuadrature::BallQuadrature(int dim, double coord_radius, QuadratureOrders orders)
    : dim_(dim), radius_(coord_radius), orders_(orders) {
  if (dim < 3 || dim > kMaxDim) throw DomainError("quadrature dimension must lie in [3, 6]");
  if (!(coord_radius > 0.0)) throw DomainError("quadrature radius must be positive");
  if (orders.radial_nodes < 1 || orders.angular_degree < 0)
    throw DomainError("invalid quadrature orders");
  std::vector<double> t, w;
  gauss_legendre(orders.radial_nodes, t, w);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = 0.5 * coord_radius * (t[i] + 1.0);
    radial_nodes_.push_back(r);
    radial_weights_.push_back(0.5 * coord_radius * w[i] * std::pow(r, dim - 1));
  }
  sphere_rule(dim, orders.angular_degree, directions_, direction_weights_);
}

Point BallQuadrature::ball_node(std::size_t k) const {
  const std::size_t nd = directions_.size();
  const double r = radial_nodes_[k / nd];
  Point p = directions_[k % nd];
  for (int i = 0; i < dim_; ++i) p[i] *= r;
  return p;
}

double BallQuadrature::ball_weight(std::size_t k) const {
  const std::size_t nd = directions_.size();
  return radial_weights_[k / nd] * direction_weights_[k % nd];
}

Point BallQuadrature::sphere_node(std::size_t k) const {
  Point p = directions_[k];
  for (int i = 0; i < dim_; ++i) p[i] *= radius_;
  return p;
}

double BallQuadrature::sphere_weight(std::size_t k) const {
  return direction_weights_[k] * std::pow(radius_, dim_ - 1);
}

BallQuadrature BallQuadrature::refined() const {
  return BallQuadrature(dim_, radius_,
                        {2 * orders_.radial_nodes, 2 * orders_.angular_degree});
}

namespace {
[[noreturn]] void throw_non_finite(const Point& p, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite integrand value " << v << " at node (";
  for (int i = 0; i < p.dim; ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  throw NumericError(os.str());
}
}  // namespace

std::vector<double> map_ball_nodes(const BallQuadrature& q, const PointFunction& f) {
  std::vector<double> values(q.ball_size());
  parallel_for(values.size(), [&](std::size_t k) { values[k] = f(q.ball_node(k)); });
  return values;
}

double integrate_ball(const BallQuadrature& q, const PointFunction& integrand,
                      const PointFunction& volume_density) {
  std::vector<double> terms(q.ball_size());
  parallel_for(terms.size(), [&](std::size_t k) {
    const Point p = q.ball_node(k);
    double v = integrand(p);
    if (volume_density) v *= volume_density(p);
    if (!std::isfinite(v)) throw_non_finite(p, v);
    terms[k] = v * q.ball_weight(k);
  });
  return ordered_sum(terms);
}

double integrate_sphere(const BallQuadrature& q, const PointFunction& integrand,
                        const PointFunction& area_density) {
  std::vector<double> terms(q.sphere_size());
  parallel_for(terms.size(), [&](std::size_t k) {
    const Point p = q.sphere_node(k);
    double v = integrand(p);
    if (area_density) v *= area_density(p);
    if (!std::isfinite(v)) throw_non_finite(p, v);
    terms[k] = v * q.sphere_weight(k);
  });
  return ordered_sum(terms);
}

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double euclidean_ball_volume(int dim, double radius) {
  return unit_sphere_area(dim) * std::pow(radius, dim) / dim;
}

}  // namespace volcrit
