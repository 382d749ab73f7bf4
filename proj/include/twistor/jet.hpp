// Order-3 truncated Taylor jets in 4 variables.  Arithmetic propagates exact
// partial derivatives up to third order; no symbolic algebra involved.
#pragma once

#include "twistor/core.hpp"

namespace twistor {

struct Jet3 {
  double v = 0;                      // value
  double g[4] = {};                  // gradient
  double h[4][4] = {};               // Hessian, symmetric
  double t[4][4][4] = {};            // third derivatives, fully symmetric

  static Jet3 constant(double c) {
    Jet3 j;
    j.v = c;
    return j;
  }
  // jet of the coordinate function x_i at value x
  static Jet3 variable(double x, int i) {
    Jet3 j;
    j.v = x;
    j.g[i] = 1.0;
    return j;
  }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
  Jet3 r;
  r.v = a.v + b.v;
  for (int i = 0; i < 4; ++i) {
    r.g[i] = a.g[i] + b.g[i];
    for (int j = 0; j < 4; ++j) {
      r.h[i][j] = a.h[i][j] + b.h[i][j];
      for (int k = 0; k < 4; ++k) r.t[i][j][k] = a.t[i][j][k] + b.t[i][j][k];
    }
  }
  return r;
}

inline Jet3 operator-(const Jet3& a, const Jet3& b) {
  Jet3 r;
  r.v = a.v - b.v;
  for (int i = 0; i < 4; ++i) {
    r.g[i] = a.g[i] - b.g[i];
    for (int j = 0; j < 4; ++j) {
      r.h[i][j] = a.h[i][j] - b.h[i][j];
      for (int k = 0; k < 4; ++k) r.t[i][j][k] = a.t[i][j][k] - b.t[i][j][k];
    }
  }
  return r;
}

inline Jet3 operator-(const Jet3& a) {
  return Jet3::constant(0.0) - a;
}

inline Jet3 operator*(double c, const Jet3& a) {
  Jet3 r;
  r.v = c * a.v;
  for (int i = 0; i < 4; ++i) {
    r.g[i] = c * a.g[i];
    for (int j = 0; j < 4; ++j) {
      r.h[i][j] = c * a.h[i][j];
      for (int k = 0; k < 4; ++k) r.t[i][j][k] = c * a.t[i][j][k];
    }
  }
  return r;
}

inline Jet3 operator*(const Jet3& a, double c) { return c * a; }
inline Jet3 operator+(const Jet3& a, double c) { return a + Jet3::constant(c); }
inline Jet3 operator+(double c, const Jet3& a) { return a + Jet3::constant(c); }
inline Jet3 operator-(const Jet3& a, double c) { return a - Jet3::constant(c); }
inline Jet3 operator-(double c, const Jet3& a) { return Jet3::constant(c) - a; }

// Leibniz rule through third order.
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
  Jet3 r;
  r.v = a.v * b.v;
  for (int i = 0; i < 4; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r.h[i][j] =
          a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.h[i][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        r.t[i][j][k] = a.t[i][j][k] * b.v + a.h[i][j] * b.g[k] +
                       a.h[i][k] * b.g[j] + a.h[j][k] * b.g[i] +
                       a.g[i] * b.h[j][k] + a.g[j] * b.h[i][k] +
                       a.g[k] * b.h[i][j] + a.v * b.t[i][j][k];
  return r;
}

// Chain rule (Faa di Bruno to order 3) for a scalar function with derivative
// values f0=f(u), f1=f'(u), f2=f''(u), f3=f'''(u).
inline Jet3 compose(const Jet3& u, double f0, double f1, double f2, double f3) {
  Jet3 r;
  r.v = f0;
  for (int i = 0; i < 4; ++i) r.g[i] = f1 * u.g[i];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r.h[i][j] = f2 * u.g[i] * u.g[j] + f1 * u.h[i][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        r.t[i][j][k] = f3 * u.g[i] * u.g[j] * u.g[k] +
                       f2 * (u.h[i][j] * u.g[k] + u.h[i][k] * u.g[j] +
                             u.h[j][k] * u.g[i]) +
                       f1 * u.t[i][j][k];
  return r;
}

inline Jet3 reciprocal(const Jet3& u) {
  if (std::fabs(u.v) < 1e-300) throw numeric_error("jet reciprocal of zero");
  double iu = 1.0 / u.v;
  return compose(u, iu, -iu * iu, 2.0 * iu * iu * iu, -6.0 * iu * iu * iu * iu);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
inline Jet3 operator/(double c, const Jet3& b) { return c * reciprocal(b); }
inline Jet3 operator/(const Jet3& a, double c) { return (1.0 / c) * a; }

inline Jet3 exp(const Jet3& u) {
  double e = std::exp(u.v);
  return compose(u, e, e, e, e);
}

inline Jet3 sqrt(const Jet3& u) {
  if (u.v <= 0) throw numeric_error("jet sqrt of non-positive value");
  double s = std::sqrt(u.v);
  return compose(u, s, 0.5 / s, -0.25 / (s * u.v), 0.375 / (s * u.v * u.v));
}

// integer powers via repeated multiplication
inline Jet3 ipow(const Jet3& u, int n) {
  if (n < 0) return reciprocal(ipow(u, -n));
  Jet3 r = Jet3::constant(1.0);
  for (int k = 0; k < n; ++k) r = r * u;
  return r;
}

}  // namespace twistor
