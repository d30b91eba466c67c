#pragma once

// Forward-mode dual numbers. Used as the adjoint type of the reverse tape to
// get Hessian-vector products (forward-over-reverse).

#include <cmath>

namespace landscape::ad {

struct Dual {
  double v = 0.0;  // primal
  double d = 0.0;  // tangent

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double value, double tangent) : v(value), d(tangent) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  const double q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}

inline Dual tanh(Dual a) {
  const double t = std::tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}

/// Integer power, exact repeated multiplication for small exponents.
inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

inline Dual ipow(Dual a, int n) {
  if (n == 0) return {1.0, 0.0};
  const double lower = ipow(a.v, n - 1);
  return {lower * a.v, n * lower * a.d};
}

inline double primal(double x) { return x; }
inline double primal(const Dual& x) { return x.v; }

}  // namespace landscape::ad
