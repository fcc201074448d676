#pragma once

// Pointwise Riemannian geometry of a metric given by jets in a chart.
//
// Conventions (all indices are coordinate indices, summation implied):
//   Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk})
//   riemann(i,j,k,l) = R_{ijkl} = < R(d_i, d_j) d_l , d_k >,
//     R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
//   so a metric of constant sectional curvature c has
//     R_{ijkl} = c (g_{ik} g_{jl} - g_{il} g_{jk}),
//   Ric_{jl} = g^{ik} R_{ijkl}, scalar = g^{jl} Ric_{jl}.
//   Laplacian is the trace of the Hessian (negative spectrum).
//   (div h)_k = g^{ij} h_{ik;j};  h_{ij;k} is the k-th covariant derivative.

#include <array>
#include <vector>

#include "volcrit/fields.hpp"

namespace volcrit {

template <typename T>
struct Tensor2 {
  std::array<T, kMaxDim * kMaxDim> a{};
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  const T& operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i * kMaxDim + j)];
  }
};

template <typename T>
struct Tensor3 {
  std::array<T, kMaxDim * kMaxDim * kMaxDim> a{};
  T& operator()(int i, int j, int k) {
    return a[static_cast<std::size_t>((i * kMaxDim + j) * kMaxDim + k)];
  }
  const T& operator()(int i, int j, int k) const {
    return a[static_cast<std::size_t>((i * kMaxDim + j) * kMaxDim + k)];
  }
};

struct Tensor4 {
  std::vector<double> a;
  int n = 0;
  Tensor4() = default;
  explicit Tensor4(int dim) : a(static_cast<std::size_t>(dim * dim * dim * dim), 0.0), n(dim) {}
  double& operator()(int i, int j, int k, int l) {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

using Mat = Tensor2<double>;

/// A positive-definite metric on a chart.
class MetricField {
 public:
  MetricField() = default;
  MetricField(Chart chart, SymTensorField g);

  const Chart& chart() const { return chart_; }
  const SymTensorField& tensor() const { return g_; }
  int dim() const { return chart_.dim; }

  /// g + t h on the same chart.
  MetricField perturbed(const SymTensorField& h, double t) const;
  /// g + t h + t^2/2 h2.
  MetricField perturbed(const SymTensorField& h, const SymTensorField& h2, double t) const;

  /// Componentwise jets at seeded coordinates.
  void eval(std::span<const Jet2> x, JetMatrix& out) const { g_.eval(x, out); }

  /// sqrt(det g) at p.
  double volume_density(const Point& p) const;

  /// Smallest eigenvalue of g at p.
  double min_eigenvalue(const Point& p) const;

 private:
  Chart chart_;
  SymTensorField g_;
};

/// Metric data at a point: values, inverse, Christoffel symbols and their
/// first derivatives. Built once and shared by the operators below.
struct LocalGeometry {
  int n = 0;
  Point p;
  Mat g{};
  Mat ginv{};
  JetMatrix gjet;                  // g_ij as second-order jets
  Tensor2<Jet2> ginv_jet{};        // g^ij as second-order jets
  Tensor3<Jet1> christoffel{};     // Gamma^i_jk with first derivatives
  double det = 0.0;

  double gamma(int i, int j, int k) const { return christoffel(i, j, k).value; }
};

/// Builds LocalGeometry from the metric jets at a seeded point. Throws
/// SingularMetricError when g is not invertible.
LocalGeometry local_geometry(const JetMatrix& g, const Point& p);
LocalGeometry local_geometry(const MetricField& g, const Point& p);

struct CurvaturePoint {
  int n = 0;
  Tensor3<double> christoffel{};
  Tensor4 riemann;
  Mat ricci{};
  double scalar = 0.0;
};

CurvaturePoint curvature(const LocalGeometry& geo);
/// Throws DomainError outside the chart and SingularMetricError when the
/// metric is degenerate.
CurvaturePoint curvature_at(const MetricField& g, const Point& p);

/// Scalar curvature only (cheaper; used by finite-difference oracles).
double scalar_curvature_at(const MetricField& g, const Point& p);

// ---------------------------------------------------------------------------
// Covariant operators

struct ScalarDerivatives {
  double value = 0.0;
  std::array<double, kMaxDim> grad{};
  Mat hessian{};        // nabla^2 f
  double laplacian = 0.0;
};

ScalarDerivatives covariant_scalar(const LocalGeometry& geo, const Jet2& f);

/// Covariant data of a symmetric 2-tensor h at a point.
struct TensorDerivatives {
  Mat h{};                         // h_ij
  Mat h_up{};                      // h^ij
  Tensor3<double> nabla{};         // h_{ij;k}
  std::array<double, kMaxDim> div{};        // (div h)_k
  Mat nabla_div{};                 // (div h)_{k;m}
  double div_div = 0.0;            // div(div h)
  Jet2 trace;                      // tr_g h with derivatives
  ScalarDerivatives trace_derivs;  // nabla^2 tr h, Delta tr h
};

TensorDerivatives covariant_tensor(const LocalGeometry& geo, const JetMatrix& h);

/// Bundle requested by the covariant_ops operation.
struct CovariantOps {
  ScalarDerivatives scalar;   // hessian/laplacian of f
  TensorDerivatives tensor;   // nabla h, div h, div div h
};

CovariantOps covariant_ops(const MetricField& g, const ScalarField& f, const SymTensorField& h,
                           const Point& p);

/// Euclidean-orthonormal tangent directions to the coordinate sphere through p,
/// built from the coordinate axes in fixed order (the axis most aligned with p
/// is dropped).
std::vector<Point> sphere_tangent_directions(const Point& p);

double inner(const Mat& g, const Point& u, const Point& v);

// ---------------------------------------------------------------------------
// Boundary geometry of the coordinate sphere |x| = |p|

struct BoundaryGeometry {
  int n = 0;
  Point normal;                    // outward unit normal nu (contravariant)
  std::vector<Point> frame;        // g-orthonormal tangent frame e_A
  Mat second_fundamental{};        // II_AB = < nabla_{e_A} nu, e_B > in the frame
  Mat induced{};                   // gamma_AB in the frame (identity up to rounding)
  double mean_curvature = 0.0;     // tr_gamma II
  double boundary_scalar = 0.0;    // intrinsic scalar curvature of gamma
  double ricci_normal = 0.0;       // Ric(nu, nu)
  double area_density = 0.0;       // dA_g / dA_euclid
};

/// Throws DomainError if p is the origin; SingularMetricError when the induced
/// metric degenerates.
BoundaryGeometry boundary_geometry(const MetricField& g, const Point& p);

/// sqrt(det g(f_A, f_B)) over Euclidean-orthonormal tangent directions f_A.
double sphere_area_density(const MetricField& g, const Point& p);

/// Mean curvature of the coordinate sphere through p computed as the
/// divergence of the unit normal field of the level sets of |x|. Independent
/// of boundary_geometry's frame computation.
double level_set_mean_curvature(const MetricField& g, const Point& p);

}  // namespace volcrit
