#pragma once

// Charts, analytic fields evaluated through second-order jets, and
// deterministic product quadrature on coordinate balls and spheres.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volcrit/jet.hpp"

namespace volcrit {

struct Point {
  int dim = 0;
  std::array<double, kMaxDim> x{};

  Point() = default;
  Point(std::initializer_list<double> coords);
  static Point zero(int dim);

  double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
  double norm() const;
};

enum class ChartKind { conformal_ball, warped_cartesian };

/// Coordinate domain of a field. conformal_ball charts are Cartesian
/// coordinates on {|x| < coord_radius}. warped_cartesian charts use y = r w,
/// with r the radial coordinate of a warped product N^{-2} dr^2 + r^2 g_S and
/// w on the unit sphere; the pole y = 0 is excluded.
struct Chart {
  int dim = 3;
  ChartKind kind = ChartKind::conformal_ball;
  double coord_radius = 1.0;

  Chart() = default;
  Chart(int dim, ChartKind kind, double coord_radius);

  bool contains(const Point& p, double slack = 1e-12) const;
  void require_contains(const Point& p) const;
};

/// Seeds x as independent variables of a Jet2 point.
std::array<Jet2, kMaxDim> seed(const Point& p);

/// Closed coordinate annulus inner <= |x| <= outer outside which a field
/// vanishes identically. inner == 0 describes a ball.
struct Support {
  double inner = 0.0;
  double outer = 0.0;
  bool contains(double radius) const { return radius >= inner && radius <= outer; }
};

enum class BoundaryFlag { vanishes_on_boundary, tangential_part_vanishes, unconstrained };

std::string to_string(BoundaryFlag flag);

/// Symmetric n x n block of jets.
struct JetMatrix {
  int dim = 0;
  std::array<Jet2, kMaxDim * kMaxDim> a{};

  explicit JetMatrix(int n = 0) : dim(n) {}
  Jet2& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  const Jet2& operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i * kMaxDim + j)];
  }
  void set_sym(int i, int j, const Jet2& v) {
    (*this)(i, j) = v;
    (*this)(j, i) = v;
  }
};

using ScalarEvaluator = std::function<Jet2(std::span<const Jet2>)>;
using TensorEvaluator = std::function<void(std::span<const Jet2>, JetMatrix&)>;
using VectorEvaluator = std::function<void(std::span<const Jet2>, std::span<Jet2>)>;

namespace detail {
/// Euclidean norm of the coordinate values (no derivative information).
double coord_norm(std::span<const Jet2> x);
}  // namespace detail

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int dim, ScalarEvaluator eval, std::optional<Support> support = std::nullopt);

  int dim() const { return dim_; }
  const std::optional<Support>& support() const { return support_; }

  /// Evaluates at already-seeded jet coordinates (composition with a map).
  Jet2 operator()(std::span<const Jet2> x) const;
  Jet2 at(const Point& p) const;
  double value(const Point& p) const;

  static ScalarField constant(int dim, double c);

  friend ScalarField operator*(double s, const ScalarField& f);

 private:
  int dim_ = 0;
  ScalarEvaluator eval_;
  std::optional<Support> support_;
};

class SymTensorField {
 public:
  SymTensorField() = default;
  SymTensorField(int dim, TensorEvaluator eval, std::optional<Support> support = std::nullopt,
                 BoundaryFlag flag = BoundaryFlag::unconstrained);

  int dim() const { return dim_; }
  const std::optional<Support>& support() const { return support_; }
  BoundaryFlag boundary_flag() const { return flag_; }
  SymTensorField with_flag(BoundaryFlag flag) const;

  void eval(std::span<const Jet2> x, JetMatrix& out) const;
  JetMatrix at(const Point& p) const;

  static SymTensorField zero(int dim);
  /// Constant-coefficient matrix field (row-major n*n entries).
  static SymTensorField constant(int dim, std::span<const double> entries);

  friend SymTensorField operator+(const SymTensorField& a, const SymTensorField& b);
  friend SymTensorField operator*(double s, const SymTensorField& a);
  /// Pointwise product f * h.
  friend SymTensorField operator*(const ScalarField& f, const SymTensorField& h);

 private:
  int dim_ = 0;
  TensorEvaluator eval_;
  std::optional<Support> support_;
  BoundaryFlag flag_ = BoundaryFlag::unconstrained;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(int dim, VectorEvaluator eval);

  int dim() const { return dim_; }
  void eval(std::span<const Jet2> x, std::span<Jet2> out) const;
  std::array<Jet2, kMaxDim> at(const Point& p) const;

 private:
  int dim_ = 0;
  VectorEvaluator eval_;
};

/// Value, gradient and Hessian of a scalar field at p. Throws DomainError
/// when p lies outside the chart.
Jet2 eval_jet(const Chart& chart, const ScalarField& f, const Point& p);
JetMatrix eval_jet(const Chart& chart, const SymTensorField& h, const Point& p);

// ---------------------------------------------------------------------------
// Quadrature

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss rule for the weight (1 - t^2)^alpha on [-1, 1], alpha > -1.
void gauss_gegenbauer(int count, double alpha, std::vector<double>& nodes,
                      std::vector<double>& weights);

struct QuadratureOrders {
  int radial_nodes = 48;
  int angular_degree = 20;
};

/// Product rule for the coordinate ball {|x| < coord_radius} in R^n:
/// Gauss-Legendre in the radius times a product Gauss rule on S^{n-1} that
/// is exact for polynomials of degree angular_degree.
class BallQuadrature {
 public:
  BallQuadrature(int dim, double coord_radius, QuadratureOrders orders = {});

  int dim() const { return dim_; }
  double coord_radius() const { return radius_; }
  const QuadratureOrders& orders() const { return orders_; }

  std::size_t ball_size() const { return radial_nodes_.size() * directions_.size(); }
  std::size_t sphere_size() const { return directions_.size(); }

  /// Node k of the ball rule and its Euclidean weight (r^{n-1} included).
  Point ball_node(std::size_t k) const;
  double ball_weight(std::size_t k) const;

  /// Node k on the sphere of radius coord_radius and its Euclidean area weight.
  Point sphere_node(std::size_t k) const;
  double sphere_weight(std::size_t k) const;

  /// Unit direction k and its weight on the unit sphere.
  const Point& direction(std::size_t k) const { return directions_[k]; }
  double direction_weight(std::size_t k) const { return direction_weights_[k]; }

  /// Same rule with node counts doubled (convergence checks).
  BallQuadrature refined() const;

 private:
  int dim_;
  double radius_;
  QuadratureOrders orders_;
  std::vector<double> radial_nodes_;
  std::vector<double> radial_weights_;
  std::vector<Point> directions_;
  std::vector<double> direction_weights_;
};

using PointFunction = std::function<double(const Point&)>;

/// sum_k w_k f(x_k) rho(x_k) over the ball nodes. rho is the volume density
/// sqrt(det g) relative to dx (pass nullptr for the Euclidean density).
/// Throws NumericError naming the node when a term is not finite.
double integrate_ball(const BallQuadrature& q, const PointFunction& integrand,
                      const PointFunction& volume_density = nullptr);

/// Same over the boundary sphere with the area density relative to the
/// Euclidean area element.
double integrate_sphere(const BallQuadrature& q, const PointFunction& integrand,
                        const PointFunction& area_density = nullptr);

/// Evaluates f at every ball node (parallel) and returns the values in node
/// order; useful when one pass produces several integrands.
std::vector<double> map_ball_nodes(const BallQuadrature& q, const PointFunction& f);

double euclidean_ball_volume(int dim, double radius);
double unit_sphere_area(int dim);  // area of S^{dim-1}

}  // namespace volcrit
