#pragma once

// Forward-mode jets: truncated multivariate Taylor data (value, gradient and,
// for order 2, Hessian) propagated exactly through arithmetic and elementary
// functions. Jet<1> is used where a quantity already involves one derivative
// of the metric (Christoffel symbols, divergences) and only its first
// derivative is still exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace volcrit {

inline constexpr int kMaxDim = 6;

template <int Order>
struct Jet {
  static_assert(Order == 1 || Order == 2, "only first and second order jets");

  double value = 0.0;
  std::array<double, kMaxDim> grad{};
  std::array<double, kMaxDim * kMaxDim> hess{};  // unused for Order == 1
  int dim = 0;  // number of active seed variables; 0 for constants

  constexpr Jet() = default;
  constexpr Jet(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr Jet constant(double v) { return Jet(v); }

  /// Seed variable `index` of `dim` independent variables at `v`.
  static constexpr Jet variable(double v, int index, int dim) {
    Jet j(v);
    j.dim = dim;
    j.grad[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  constexpr double d(int i) const { return grad[static_cast<std::size_t>(i)]; }
  constexpr double dd(int i, int j) const {
    return hess[static_cast<std::size_t>(i * kMaxDim + j)];
  }
  constexpr double& dd(int i, int j) {
    return hess[static_cast<std::size_t>(i * kMaxDim + j)];
  }

  Jet& operator+=(const Jet& o) {
    const int n = std::max(dim, o.dim);
    value += o.value;
    for (int i = 0; i < n; ++i) grad[i] += o.grad[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dd(i, j) += o.dd(i, j);
    }
    dim = n;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    const int n = std::max(dim, o.dim);
    value -= o.value;
    for (int i = 0; i < n; ++i) grad[i] -= o.grad[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dd(i, j) -= o.dd(i, j);
    }
    dim = n;
    return *this;
  }
  Jet& operator*=(double s) {
    value *= s;
    for (int i = 0; i < dim; ++i) grad[i] *= s;
    if constexpr (Order == 2) {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) dd(i, j) *= s;
    }
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator-(Jet a) {
    a *= -1.0;
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) {
    a.value += b;
    return a;
  }
  friend Jet operator+(double a, Jet b) {
    b.value += a;
    return b;
  }
  friend Jet operator-(Jet a, double b) {
    a.value -= b;
    return a;
  }
  friend Jet operator-(double a, const Jet& b) { return -b + a; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    const int n = std::max(a.dim, b.dim);
    r.dim = n;
    r.value = a.value * b.value;
    for (int i = 0; i < n; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          r.dd(i, j) = a.dd(i, j) * b.value + a.value * b.dd(i, j) +
                       a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double a, const Jet& b) { return reciprocal(b) * a; }

  /// f(u) given f(u0), f'(u0), f''(u0).
  friend Jet chain(const Jet& u, double f0, double f1, double f2) {
    Jet r;
    r.dim = u.dim;
    r.value = f0;
    for (int i = 0; i < u.dim; ++i) r.grad[i] = f1 * u.grad[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < u.dim; ++i)
        for (int j = 0; j < u.dim; ++j)
          r.dd(i, j) = f1 * u.dd(i, j) + f2 * u.grad[i] * u.grad[j];
    }
    return r;
  }

  friend Jet reciprocal(const Jet& u) {
    const double iv = 1.0 / u.value;
    return chain(u, iv, -iv * iv, 2.0 * iv * iv * iv);
  }
  friend Jet sqrt(const Jet& u) {
    const double s = std::sqrt(u.value);
    return chain(u, s, 0.5 / s, -0.25 / (s * u.value));
  }
  friend Jet exp(const Jet& u) {
    const double e = std::exp(u.value);
    return chain(u, e, e, e);
  }
  friend Jet log(const Jet& u) {
    return chain(u, std::log(u.value), 1.0 / u.value, -1.0 / (u.value * u.value));
  }
  friend Jet pow(const Jet& u, double p) {
    const double f = std::pow(u.value, p);
    const double f1 = p * std::pow(u.value, p - 1.0);
    const double f2 = p * (p - 1.0) * std::pow(u.value, p - 2.0);
    return chain(u, f, f1, f2);
  }
  friend Jet sin(const Jet& u) {
    const double s = std::sin(u.value), c = std::cos(u.value);
    return chain(u, s, c, -s);
  }
  friend Jet cos(const Jet& u) {
    const double s = std::sin(u.value), c = std::cos(u.value);
    return chain(u, c, -s, -c);
  }
  friend Jet sinh(const Jet& u) {
    const double s = std::sinh(u.value), c = std::cosh(u.value);
    return chain(u, s, c, s);
  }
  friend Jet cosh(const Jet& u) {
    const double s = std::sinh(u.value), c = std::cosh(u.value);
    return chain(u, c, s, c);
  }
  friend Jet atanh(const Jet& u) {
    const double q = 1.0 / (1.0 - u.value * u.value);
    return chain(u, std::atanh(u.value), q, 2.0 * u.value * q * q);
  }
  friend Jet atan(const Jet& u) {
    const double q = 1.0 / (1.0 + u.value * u.value);
    return chain(u, std::atan(u.value), q, -2.0 * u.value * q * q);
  }

  friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
    os << "Jet{" << j.value << "; [";
    for (int i = 0; i < j.dim; ++i) os << (i ? ", " : "") << j.grad[i];
    return os << "]}";
  }
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

/// Drops the Hessian.
inline Jet1 truncate(const Jet2& j) {
  Jet1 r(j.value);
  r.dim = j.dim;
  r.grad = j.grad;
  return r;
}

/// The first-order jet of the partial derivative d/dx_i of `j`.
inline Jet1 partial(const Jet2& j, int i) {
  Jet1 r(j.d(i));
  r.dim = j.dim;
  for (int k = 0; k < j.dim; ++k) r.grad[k] = j.dd(i, k);
  return r;
}

inline Jet2 square(const Jet2& a) { return a * a; }
inline Jet1 square(const Jet1& a) { return a * a; }
inline double square(double a) { return a * a; }

}  // namespace volcrit
