#pragma once

// Univariate truncated Taylor series about a fixed point r0:
//   f(r0 + s) = sum_k c[k] s^k + O(s^{K+1}).
// Used for radial profile functions whose radial derivatives enter other
// profiles (the TT construction differentiates a(r) and b(r)).

#include <array>
#include <cmath>
#include <cstddef>

#include "volcrit/jet.hpp"

namespace volcrit {

template <int K>
struct Taylor {
  std::array<double, K + 1> c{};

  constexpr Taylor() = default;
  constexpr Taylor(double v) { c[0] = v; }  // NOLINT(google-explicit-constructor)

  static Taylor variable(double r0) {
    Taylor t(r0);
    if constexpr (K >= 1) t.c[1] = 1.0;
    return t;
  }

  double value() const { return c[0]; }
  /// k-th derivative at r0.
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[static_cast<std::size_t>(k)] * f;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) {
    for (int k = 0; k <= K; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend Taylor operator-(Taylor a, const Taylor& b) {
    for (int k = 0; k <= K; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend Taylor operator-(Taylor a) {
    for (auto& x : a.c) x = -x;
    return a;
  }
  friend Taylor operator+(Taylor a, double b) {
    a.c[0] += b;
    return a;
  }
  friend Taylor operator+(double b, Taylor a) { return a + b; }
  friend Taylor operator-(Taylor a, double b) {
    a.c[0] -= b;
    return a;
  }
  friend Taylor operator-(double b, const Taylor& a) { return -a + b; }
  friend Taylor operator*(Taylor a, double s) {
    for (auto& x : a.c) x *= s;
    return a;
  }
  friend Taylor operator*(double s, Taylor a) { return a * s; }
  friend Taylor operator/(Taylor a, double s) { return a * (1.0 / s); }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= K; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
      r.c[k] = s;
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= K; ++k) {
      double s = a.c[k];
      for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
      r.c[k] = s / b.c[0];
    }
    return r;
  }
  friend Taylor operator/(double a, const Taylor& b) { return Taylor(a) / b; }

  friend Taylor exp(const Taylor& a) {
    // r' = a' r
    Taylor r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= K; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += i * a.c[i] * r.c[k - i];
      r.c[k] = s / k;
    }
    return r;
  }
  friend Taylor sqrt(const Taylor& a) {
    // r^2 = a
    Taylor r;
    r.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k <= K; ++k) {
      double s = a.c[k];
      for (int i = 1; i < k; ++i) s -= r.c[i] * r.c[k - i];
      r.c[k] = s / (2.0 * r.c[0]);
    }
    return r;
  }

  /// d/dr; the top coefficient becomes unknown and is set to zero.
  friend Taylor differentiate(const Taylor& a) {
    Taylor r;
    for (int k = 0; k < K; ++k) r.c[k] = (k + 1) * a.c[k + 1];
    return r;
  }
};

/// Composes the series (expanded about r.value) with a second-order jet r(x).
template <int K>
Jet2 compose(const Taylor<K>& f, const Jet2& r) {
  static_assert(K >= 2);
  return chain(r, f.c[0], f.c[1], 2.0 * f.c[2]);
}

}  // namespace volcrit
