// Small fixed-size linear algebra and sampling helpers shared by the engine.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace twistor {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using Vec6 = std::array<double, 6>;
using Mat6 = std::array<std::array<double, 6>, 6>;

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};
// Signals an upstream sign/factor convention bug, not bad user input.
struct convention_error : numeric_error {
  explicit convention_error(const std::string& m) : numeric_error(m) {}
};
struct frame_mismatch : std::runtime_error {
  explicit frame_mismatch(const std::string& m) : std::runtime_error(m) {}
};
struct invalid_parameter : std::runtime_error {
  explicit invalid_parameter(const std::string& m) : std::runtime_error(m) {}
};
struct not_self_dual : std::runtime_error {
  explicit not_self_dual(const std::string& m) : std::runtime_error(m) {}
};
// Numeric defects and the proved geometric classification disagree; this
// indicates an implementation bug, never bad input.
struct theorem_violation : std::runtime_error {
  explicit theorem_violation(const std::string& m) : std::runtime_error(m) {}
};
struct stencil_error : std::runtime_error {
  explicit stencil_error(const std::string& m) : std::runtime_error(m) {}
};

inline double dot4(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <std::size_t N>
double norm2(const std::array<double, N>& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

template <std::size_t N>
std::array<double, N> axpy(double c, const std::array<double, N>& x,
                           const std::array<double, N>& y) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = c * x[i] + y[i];
  return r;
}

template <std::size_t N>
std::array<double, N> scale(double c, const std::array<double, N>& x) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = c * x[i];
  return r;
}

inline double det4(const Mat4& m) {
  // expansion along the first row via 3x3 cofactors
  auto m3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
    return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
           m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
           m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
  };
  return m[0][0] * m3(1, 2, 3, 1, 2, 3) - m[0][1] * m3(1, 2, 3, 0, 2, 3) +
         m[0][2] * m3(1, 2, 3, 0, 1, 3) - m[0][3] * m3(1, 2, 3, 0, 1, 2);
}

// Gaussian elimination with partial pivoting; throws if near-singular.
template <std::size_t N>
std::array<double, N> solve(std::array<std::array<double, N>, N> a,
                            std::array<double, N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-14)
      throw numeric_error("solve: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, N> x{};
  for (std::size_t ri = N; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < N; ++c) s -= a[ri][c] * x[c];
    x[ri] = s / a[ri][ri];
  }
  return x;
}

template <std::size_t N>
std::array<std::array<double, N>, N> inverse(
    const std::array<std::array<double, N>, N>& a) {
  std::array<std::array<double, N>, N> inv{};
  for (std::size_t c = 0; c < N; ++c) {
    std::array<double, N> e{};
    e[c] = 1.0;
    auto col = solve(a, e);
    for (std::size_t r = 0; r < N; ++r) inv[r][c] = col[r];
  }
  return inv;
}

// Cyclic Jacobi eigensolver for symmetric matrices.  Deterministic sweep
// order; eigenvalues returned ascending with matching column eigenvectors.
template <std::size_t N>
struct EigenSym {
  std::array<double, N> values;
  std::array<std::array<double, N>, N> vectors;  // vectors[i] = i-th eigenvector
};

template <std::size_t N>
EigenSym<N> eigen_sym(std::array<std::array<double, N>, N> a) {
  std::array<std::array<double, N>, N> v{};
  for (std::size_t i = 0; i < N; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          double vkp = v[p][k], vkq = v[q][k];
          v[p][k] = c * vkp - s * vkq;
          v[q][k] = s * vkp + c * vkq;
        }
      }
  }
  EigenSym<N> out{};
  std::array<std::size_t, N> idx{};
  for (std::size_t i = 0; i < N; ++i) idx[i] = i;
  // ascending eigenvalue; ties broken by index of dominant component
  auto dom = [&](std::size_t i) {
    std::size_t d = 0;
    for (std::size_t k = 1; k < N; ++k)
      if (std::fabs(v[i][k]) > std::fabs(v[i][d])) d = k;
    return d;
  };
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      bool swap_ij = a[idx[j]][idx[j]] < a[idx[i]][idx[i]] ||
                     (a[idx[j]][idx[j]] == a[idx[i]][idx[i]] &&
                      dom(idx[j]) < dom(idx[i]));
      if (swap_ij) std::swap(idx[i], idx[j]);
    }
  for (std::size_t i = 0; i < N; ++i) {
    out.values[i] = a[idx[i]][idx[i]];
    out.vectors[i] = v[idx[i]];
  }
  return out;
}

// splitmix64: deterministic stream for seeded sampling
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }  // [0,1)
  double sym() { return 2.0 * uniform() - 1.0; }           // (-1,1)
};

// Halton low-discrepancy sequence, one value per (index, base).
inline double halton(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline Vec4 halton4(std::uint64_t i) {
  return {halton(i + 1, 2), halton(i + 1, 3), halton(i + 1, 5),
          halton(i + 1, 7)};
}

}  // namespace twistor
