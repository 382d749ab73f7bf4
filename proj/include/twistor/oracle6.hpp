// Brute-force numeric Riemannian geometry of the 6-dimensional twistor space
// (Z, h_t) in explicit coordinates: base chart times a stereographic fibre
// chart on the unit sphere of Lambda^2_-.
//
// Everything here is computed by 4th-order central finite differences from
// pointwise metric values only; the jet pipeline and the closed-form twistor
// formulas it feeds are never consulted.  This keeps the oracle an
// independent referee for the Levi-Civita, curvature and harmonicity
// identities of the analytic path.
#pragma once

#include <functional>

#include "twistor/twistor_space.hpp"

namespace twistor {

using Vec6d = std::array<double, 6>;
using Ten3z = std::array<Mat6, 6>;             // [k][i][j]
using Ten4z = std::array<std::array<Mat6, 6>, 6>;  // [i][j][k][l]

struct ZChart {
  MetricSpec base;
  double t = 1.0;
  double step = 1e-2;  // finite-difference step, chart units
  // optional rotation of the fibre frame used by the stereographic chart;
  // re-seeding it must not change any verified identity
  std::array<Vec3, 3> fiber_rot{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

  Vec3 rot(const Vec3& c) const {
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i] += fiber_rot[i][j] * c[j];
    return r;
  }

  // ---- base-chart helpers, all pointwise from g values ----

  Mat4 g_at(const Point4& x) const { return base.values(x); }

  // smooth orthonormal frame field: Gram-Schmidt over the coordinate basis
  Mat4 frame_at(const Point4& x) const {
    Mat4 g = g_at(x);
    Mat4 E{};
    for (int a = 0; a < 4; ++a) {
      Vec4 v{};
      v[a] = 1.0;
      for (int b = 0; b < a; ++b) {
        double c = 0;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) c += v[i] * g[i][j] * E[b][j];
        for (int i = 0; i < 4; ++i) v[i] -= c * E[b][i];
      }
      double n2 = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) n2 += v[i] * g[i][j] * v[j];
      double inv = 1.0 / std::sqrt(n2);
      for (int i = 0; i < 4; ++i) E[a][i] = v[i] * inv;
    }
    Mat4 cols{};
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 4; ++i) cols[i][a] = E[a][i];
    bool flip = det4(cols) < 0;
    if (base.orientation < 0) flip = !flip;
    if (flip)
      for (int i = 0; i < 4; ++i) E[3][i] = -E[3][i];
    return E;
  }

  // s_i^-(x) in coordinate wedge components
  std::array<Vec6d, 3> sminus_at(const Point4& x) const {
    Mat4 E = frame_at(x);
    auto wedge_c = [&](int a, int b) {
      Vec6d r{};
      for (int q = 0; q < 6; ++q) {
        int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
        r[q] = E[a][i] * E[b][j] - E[a][j] * E[b][i];
      }
      return r;
    };
    auto sub = [](Vec6d u, const Vec6d& v) {
      for (int q = 0; q < 6; ++q) u[q] -= v[q];
      return u;
    };
    return {sub(wedge_c(0, 1), wedge_c(2, 3)), sub(wedge_c(0, 2), wedge_c(3, 1)),
            sub(wedge_c(0, 3), wedge_c(1, 2))};
  }

  // Lambda^2 Gram matrix of coordinate wedge bivectors at x
  double biv_inner(const Mat4& g, const Vec6d& a, const Vec6d& b) const {
    double v = 0;
    for (int p = 0; p < 6; ++p) {
      int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
      for (int q = 0; q < 6; ++q) {
        int k = kWedgeIdx[q][0], l = kWedgeIdx[q][1];
        v += 0.5 * a[p] * b[q] *
             (g[i][k] * g[j][l] - g[i][l] * g[j][k]);
      }
    }
    return v;
  }

  // fibre point from stereographic coordinates (u,v), pole at the rotated
  // -s1^-(x)
  Vec3 fiber_coeffs(double u, double v) const {
    double d = 1.0 + u * u + v * v;
    return rot({(1.0 - u * u - v * v) / d, 2.0 * u / d, 2.0 * v / d});
  }
  std::array<Vec3, 2> fiber_tangents(double u, double v) const {
    double d = 1.0 + u * u + v * v, d2 = d * d;
    std::array<Vec3, 2> r{};
    r[0] = rot({-4.0 * u / d2, 2.0 * (1.0 - u * u + v * v) / d2,
                -4.0 * u * v / d2});
    r[1] = rot({-4.0 * v / d2, -4.0 * u * v / d2,
                2.0 * (1.0 + u * u - v * v) / d2});
    return r;
  }

  // covariant x-derivatives of the fibre section sigma(x; u,v), coordinate
  // wedge components, by finite differences of s^-(x) plus the Gamma action
  std::array<Vec6d, 4> nabla_sigma(const Vec6d& z) const {
    Point4 x{z[0], z[1], z[2], z[3]};
    Vec3 c = fiber_coeffs(z[4], z[5]);
    std::array<Vec6d, 4> out{};
    Ten3 G = christoffel_fd(x);
    auto sigma_of = [&](const Point4& y) {
      auto sm = sminus_at(y);
      Vec6d s{};
      for (int q = 0; q < 6; ++q)
        s[q] = c[0] * sm[0][q] + c[1] * sm[1][q] + c[2] * sm[2][q];
      return s;
    };
    Vec6d s0 = sigma_of(x);
    auto anti = [&](const Vec6d& b, int i, int j) -> double {
      if (i == j) return 0;
      for (int q = 0; q < 6; ++q)
        if (kWedgeIdx[q][0] == std::min(i, j) &&
            kWedgeIdx[q][1] == std::max(i, j))
          return i < j ? b[q] : -b[q];
      return 0;
    };
    for (int m = 0; m < 4; ++m) {
      Vec6d d{};
      for (int s4i = 0; s4i < 6; ++s4i) d[s4i] = 0;
      const double h = step;
      Point4 xp = x, xm = x, xp2 = x, xm2 = x;
      xp[m] += h;
      xm[m] -= h;
      xp2[m] += 2 * h;
      xm2[m] -= 2 * h;
      Vec6d fp = sigma_of(xp), fm = sigma_of(xm), fp2 = sigma_of(xp2),
            fm2 = sigma_of(xm2);
      for (int q = 0; q < 6; ++q)
        d[q] = (-fp2[q] + 8 * fp[q] - 8 * fm[q] + fm2[q]) / (12 * h);
      for (int q = 0; q < 6; ++q) {
        int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
        for (int k = 0; k < 4; ++k)
          d[q] += G[i][m][k] * anti(s0, k, j) + G[j][m][k] * anti(s0, i, k);
      }
      out[m] = d;
    }
    return out;
  }

  // base Christoffels by finite differences of g
  Ten3 christoffel_fd(const Point4& x) const {
    Ten3 dg{};
    const double h = step;
    for (int m = 0; m < 4; ++m) {
      Point4 xp = x, xm = x, xp2 = x, xm2 = x;
      xp[m] += h;
      xm[m] -= h;
      xp2[m] += 2 * h;
      xm2[m] -= 2 * h;
      Mat4 gp = g_at(xp), gm = g_at(xm), gp2 = g_at(xp2), gm2 = g_at(xm2);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          dg[m][i][j] =
              (-gp2[i][j] + 8 * gp[i][j] - 8 * gm[i][j] + gm2[i][j]) / (12 * h);
    }
    Mat4 gi = inverse(g_at(x));
    Ten3 G{};
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double v = 0;
          for (int l = 0; l < 4; ++l)
            v += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
          G[k][i][j] = 0.5 * v;
        }
    return G;
  }

  // ---- the 6-metric ----

  bool in_domain(const Vec6d& z, double margin = 0.0) const {
    Point4 x{z[0], z[1], z[2], z[3]};
    for (int m = 0; m < 4; ++m) {
      Point4 q = x;
      q[m] += margin;
      if (!base.domain_fn(q)) return false;
      q[m] -= 2 * margin;
      if (!base.domain_fn(q)) return false;
    }
    return z[4] * z[4] + z[5] * z[5] < 64.0;
  }

  Mat6 metric_at(const Vec6d& z) const {
    if (!in_domain(z)) throw domain_error("ZChart: point outside chart");
    Point4 x{z[0], z[1], z[2], z[3]};
    Mat4 g = g_at(x);
    auto ns = nabla_sigma(z);
    auto vt = fiber_tangents(z[4], z[5]);
    auto sm = sminus_at(x);
    auto vfield = [&](const Vec3& c) {
      Vec6d s{};
      for (int q = 0; q < 6; ++q)
        s[q] = c[0] * sm[0][q] + c[1] * sm[1][q] + c[2] * sm[2][q];
      return s;
    };
    Vec6d vu = vfield(vt[0]), vv = vfield(vt[1]);
    // vertical parts of the six coordinate vectors
    std::array<Vec6d, 6> vert{};
    for (int m = 0; m < 4; ++m) vert[m] = ns[m];
    vert[4] = vu;
    vert[5] = vv;
    Mat6 h{};
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        double v = t * biv_inner(g, vert[a], vert[b]);
        if (a < 4 && b < 4) v += g[a][b];
        h[a][b] = v;
      }
    return h;
  }

  // ---- 6-dimensional finite-difference geometry ----

  std::array<Mat6, 6> dmetric_at(const Vec6d& z) const {
    std::array<Mat6, 6> dh{};
    const double h = step;
    for (int m = 0; m < 6; ++m) {
      Vec6d zp = z, zm = z, zp2 = z, zm2 = z;
      zp[m] += h;
      zm[m] -= h;
      zp2[m] += 2 * h;
      zm2[m] -= 2 * h;
      Mat6 hp = metric_at(zp), hm = metric_at(zm), hp2 = metric_at(zp2),
           hm2 = metric_at(zm2);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          dh[m][a][b] =
              (-hp2[a][b] + 8 * hp[a][b] - 8 * hm[a][b] + hm2[a][b]) / (12 * h);
    }
    return dh;
  }

  Ten3z christoffel_z(const Vec6d& z) const {
    auto dh = dmetric_at(z);
    Mat6 hi = inverse(metric_at(z));
    Ten3z G{};
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          double v = 0;
          for (int l = 0; l < 6; ++l)
            v += hi[k][l] * (dh[i][j][l] + dh[j][i][l] - dh[l][i][j]);
          G[k][i][j] = 0.5 * v;
        }
    return G;
  }

  // full lowered curvature tensor at z, engine sign convention
  Ten4z riemann_z(const Vec6d& z) const {
    if (!in_domain(z, 4 * step))
      throw stencil_error("ZChart: stencil leaves the chart domain");
    auto G0 = christoffel_z(z);
    std::array<Ten3z, 6> dG{};
    const double h = step;
    for (int m = 0; m < 6; ++m) {
      Vec6d zp = z, zm = z, zp2 = z, zm2 = z;
      zp[m] += h;
      zm[m] -= h;
      zp2[m] += 2 * h;
      zm2[m] -= 2 * h;
      auto gp = christoffel_z(zp), gm = christoffel_z(zm);
      auto gp2 = christoffel_z(zp2), gm2 = christoffel_z(zm2);
      for (int k = 0; k < 6; ++k)
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            dG[m][k][i][j] = (-gp2[k][i][j] + 8 * gp[k][i][j] -
                              8 * gm[k][i][j] + gm2[k][i][j]) /
                             (12 * h);
    }
    Mat6 hmat = metric_at(z);
    Ten4z R{};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) {
          Vec6d up{};
          for (int l = 0; l < 6; ++l) {
            double v = dG[i][l][j][k] - dG[j][l][i][k];
            for (int m = 0; m < 6; ++m)
              v += G0[l][i][m] * G0[m][j][k] - G0[l][j][m] * G0[m][i][k];
            up[l] = -v;  // R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]
          }
          for (int l = 0; l < 6; ++l) {
            double v = 0;
            for (int m = 0; m < 6; ++m) v += hmat[l][m] * up[m];
            R[i][j][k][l] = v;
          }
        }
    return R;
  }
};

inline ZChart build_chart(const MetricSpec& spec, double t, double step = 1e-2) {
  if (t <= 0) throw invalid_parameter("build_chart: t must be positive");
  ZChart c;
  c.base = spec;
  c.t = t;
  c.step = step;
  return c;
}

// ---- mapping between chart tangents and the analytic twistor tangents ----

// The analytic side is expressed in the sigma-adapted frame of a TwistorPoint
// built over the same Gram-Schmidt frame field the chart uses, so coordinate
// components translate directly.
struct ChartFrame {
  ZChart const* chart = nullptr;
  Vec6d z{};
  TwistorPoint pt;              // adapted analytic twistor point
  std::array<Vec6d, 4> ns{};    // nabla_i sigma, coordinate wedge components
  Vec6d vu{}, vv{};             // fibre tangents as coordinate wedge bivectors
  double guu = 0, guv = 0, gvv = 0;
  Mat4 g{};
  std::array<Vec6d, 3> sm{};    // s_i^-(x)
  std::array<Vec6d, 4> hlift{}; // chart components of adapted E_a^h
  std::array<Vec6d, 2> vlift{}; // chart components of adapted s_2^-, s_3^-

  // (du,dv) components of a vertical bivector given in coordinate wedge form
  std::array<double, 2> vertical_chart(const Vec6d& w) const {
    double bu = chart->biv_inner(g, w, vu), bv = chart->biv_inner(g, w, vv);
    double det = guu * gvv - guv * guv;
    return {(gvv * bu - guv * bv) / det, (guu * bv - guv * bu) / det};
  }

  // horizontal lift of a coordinate vector
  Vec6d lift_coord(const Vec4& X) const {
    Vec6d w{};
    for (int i = 0; i < 4; ++i)
      for (int q = 0; q < 6; ++q) w[q] -= X[i] * ns[i][q];
    auto uv = vertical_chart(w);
    return {X[0], X[1], X[2], X[3], uv[0], uv[1]};
  }

  // chart vector with prescribed pushforward and vertical bivector
  Vec6d assemble(const Vec4& X, const Vec6d& w) const {
    Vec6d wc = w;
    for (int i = 0; i < 4; ++i)
      for (int q = 0; q < 6; ++q) wc[q] -= X[i] * ns[i][q];
    auto uv = vertical_chart(wc);
    return {X[0], X[1], X[2], X[3], uv[0], uv[1]};
  }

  // adapted-frame s^- coordinates -> coordinate wedge components
  Vec6d adapted_biv_coord(const Vec3& v) const {
    Vec6d coord{};
    Vec6d wc = tz::sminus_to_wedge(v);
    for (int p = 0; p < 6; ++p) {
      if (wc[p] == 0) continue;
      int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
      for (int q = 0; q < 6; ++q) {
        int k = kWedgeIdx[q][0], m = kWedgeIdx[q][1];
        coord[q] += wc[p] * (pt.Ecoord[i][k] * pt.Ecoord[j][m] -
                             pt.Ecoord[i][m] * pt.Ecoord[j][k]);
      }
    }
    return coord;
  }
};

inline ChartFrame chart_frame(const ZChart& chart, const Vec6d& z) {
  ChartFrame cf;
  cf.chart = &chart;
  cf.z = z;
  Point4 x{z[0], z[1], z[2], z[3]};
  Vec3 sigma = chart.fiber_coeffs(z[4], z[5]);
  cf.pt = make_twistor_point(chart.base, x, sigma);
  cf.ns = chart.nabla_sigma(z);
  cf.g = chart.g_at(x);
  cf.sm = chart.sminus_at(x);
  auto vt = chart.fiber_tangents(z[4], z[5]);
  for (int q = 0; q < 6; ++q) {
    cf.vu[q] = vt[0][0] * cf.sm[0][q] + vt[0][1] * cf.sm[1][q] + vt[0][2] * cf.sm[2][q];
    cf.vv[q] = vt[1][0] * cf.sm[0][q] + vt[1][1] * cf.sm[1][q] + vt[1][2] * cf.sm[2][q];
  }
  cf.guu = chart.biv_inner(cf.g, cf.vu, cf.vu);
  cf.guv = chart.biv_inner(cf.g, cf.vu, cf.vv);
  cf.gvv = chart.biv_inner(cf.g, cf.vv, cf.vv);
  for (int a = 0; a < 4; ++a) {
    Vec4 X{};
    for (int i = 0; i < 4; ++i) X[i] = cf.pt.Ecoord[a][i];
    cf.hlift[a] = cf.lift_coord(X);
  }
  for (int l = 0; l < 2; ++l) {
    Vec3 sv{};
    sv[l + 1] = 1.0;
    Vec6d coord = cf.adapted_biv_coord(sv);
    auto uv = cf.vertical_chart(coord);
    cf.vlift[l] = {0, 0, 0, 0, uv[0], uv[1]};
  }
  return cf;
}

inline Vec6d chart_tangent(const ChartFrame& cf, const TwistorTangent& A) {
  Vec6d r{};
  for (int a = 0; a < 4; ++a)
    for (int q = 0; q < 6; ++q) r[q] += A.hor[a] * cf.hlift[a][q];
  for (int l = 0; l < 2; ++l)
    for (int q = 0; q < 6; ++q) r[q] += A.ver[l + 1] * cf.vlift[l][q];
  return r;
}

inline double ht_chart(const ZChart& chart, const Vec6d& z, const Vec6d& a,
                       const Vec6d& b) {
  Mat6 h = chart.metric_at(z);
  double v = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) v += a[i] * h[i][j] * b[j];
  return v;
}

using RZTensor = Ten4z;

// numeric h_t(R_Z(A,B)C,D) with the arguments given analytically; the
// curvature tensor is computed once per sample and reused
inline double rz_numeric(const ChartFrame& cf, const RZTensor& R,
                         const TwistorTangent& A, const TwistorTangent& B,
                         const TwistorTangent& C, const TwistorTangent& D) {
  Vec6d a = chart_tangent(cf, A), b = chart_tangent(cf, B),
        c = chart_tangent(cf, C), d = chart_tangent(cf, D);
  double v = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        for (int l = 0; l < 6; ++l)
          v += a[i] * b[j] * c[k] * d[l] * R[i][j][k][l];
  return v;
}

// ---- field-level numerics: commutators and covariant derivatives ----

namespace odetail {

// component field z -> vec6; derivative by 4th-order central differences
template <typename F>
Vec6d dfield(const F& f, const Vec6d& z, int m, double h) {
  Vec6d zp = z, zm = z, zp2 = z, zm2 = z;
  zp[m] += h;
  zm[m] -= h;
  zp2[m] += 2 * h;
  zm2[m] -= 2 * h;
  Vec6d fp = f(zp), fm = f(zm), fp2 = f(zp2), fm2 = f(zm2);
  Vec6d r{};
  for (int q = 0; q < 6; ++q)
    r[q] = (-fp2[q] + 8 * fp[q] - 8 * fm[q] + fm2[q]) / (12 * h);
  return r;
}

}  // namespace odetail

// numeric Lie bracket of two chart vector fields at z
template <typename FA, typename FB>
Vec6d lie_bracket_numeric(const ZChart& chart, const FA& fa, const FB& fb,
                          const Vec6d& z) {
  Vec6d a = fa(z);
  Vec6d b = fb(z);
  Vec6d r{};
  for (int m = 0; m < 6; ++m) {
    Vec6d db = odetail::dfield(fb, z, m, chart.step);
    Vec6d da = odetail::dfield(fa, z, m, chart.step);
    for (int q = 0; q < 6; ++q) r[q] += a[m] * db[q] - b[m] * da[q];
  }
  return r;
}

// numeric covariant derivative (D_A B)(z) for chart fields
template <typename FB>
Vec6d cov_deriv_numeric(const ZChart& chart, const Vec6d& a, const FB& fb,
                        const Vec6d& z, const Ten3z& Gz) {
  Vec6d r{};
  for (int m = 0; m < 6; ++m) {
    Vec6d db = odetail::dfield(fb, z, m, chart.step);
    for (int q = 0; q < 6; ++q) r[q] += a[m] * db[q];
  }
  Vec6d b = fb(z);
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r[k] += Gz[k][i][j] * a[i] * b[j];
  return r;
}

// ---- residual report over the closed-form identities ----

struct OracleReport {
  double submersion = 0;   // pi_* isometry on horizontal lifts
  double fiber_metric = 0; // vertical Gram = t * identity
  double lie2 = 0;         // Eq for [X^h, Y^h]
  double rw = 0;           // bracket curvature pairing
  double lc_hh = 0;        // D_{X^h} Y^h
  double lc_vh = 0;        // D_V X^h
  double rz_res[5] = {0, 0, 0, 0, 0};  // hhhh, hhhv, hvhv, hhvv, hvvv
  double sec = 0;
  double max_all() const {
    double m = std::max({submersion, fiber_metric, lie2, rw, lc_hh, lc_vh, sec});
    for (double v : rz_res) m = std::max(m, v);
    return m;
  }
};

inline OracleReport verify_closed_forms(const ZChart& chart,
                                        const Vec4& base_box, int samples,
                                        std::uint64_t seed) {
  if (samples < 1) throw invalid_parameter("verify_closed_forms: no samples");
  OracleReport rep;
  Rng rng(seed);
  for (int si = 0; si < samples; ++si) {
    Vec6d z{};
    for (int i = 0; i < 4; ++i) z[i] = base_box[i] * rng.sym();
    z[4] = 0.8 * rng.sym();
    z[5] = 0.8 * rng.sym();
    ChartFrame cf = chart_frame(chart, z);
    const TwistorPoint& pt = cf.pt;
    double t = chart.t;
    // submersion and fibre metric
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        rep.submersion = std::max(
            rep.submersion,
            std::fabs(ht_chart(chart, z, cf.hlift[a], cf.hlift[b]) -
                      (a == b ? 1.0 : 0.0)));
    for (int l = 0; l < 2; ++l) {
      for (int m = 0; m < 2; ++m)
        rep.fiber_metric = std::max(
            rep.fiber_metric,
            std::fabs(ht_chart(chart, z, cf.vlift[l], cf.vlift[m]) -
                      (l == m ? t : 0.0)));
      for (int a = 0; a < 4; ++a)
        rep.fiber_metric = std::max(
            rep.fiber_metric,
            std::fabs(ht_chart(chart, z, cf.vlift[l], cf.hlift[a])));
    }
    // constant-component coordinate extensions of the adapted frame vectors
    auto hfield = [&](int a) {
      Vec4 X{};
      for (int i = 0; i < 4; ++i) X[i] = pt.Ecoord[a][i];
      return [X, &chart](const Vec6d& zz) {
        ZChart const& ch = chart;
        ChartFrame tmp;  // cheap local lift without building a TwistorPoint
        tmp.chart = &ch;
        tmp.z = zz;
        Point4 x{zz[0], zz[1], zz[2], zz[3]};
        tmp.ns = ch.nabla_sigma(zz);
        tmp.g = ch.g_at(x);
        tmp.sm = ch.sminus_at(x);
        auto vt = ch.fiber_tangents(zz[4], zz[5]);
        for (int q = 0; q < 6; ++q) {
          tmp.vu[q] = vt[0][0] * tmp.sm[0][q] + vt[0][1] * tmp.sm[1][q] +
                      vt[0][2] * tmp.sm[2][q];
          tmp.vv[q] = vt[1][0] * tmp.sm[0][q] + vt[1][1] * tmp.sm[1][q] +
                      vt[1][2] * tmp.sm[2][q];
        }
        tmp.guu = ch.biv_inner(tmp.g, tmp.vu, tmp.vu);
        tmp.guv = ch.biv_inner(tmp.g, tmp.vu, tmp.vv);
        tmp.gvv = ch.biv_inner(tmp.g, tmp.vv, tmp.vv);
        return tmp.lift_coord(X);
      };
    };
    auto e = [](int i) {
      Vec4 v{};
      v[i] = 1.0;
      return v;
    };
    // Lie-2 and the bracket pairing: [X^h, Y^h] = [X,Y]^h + R(X,Y)sigma,
    // with [X,Y] = 0 for constant-component fields
    {
      auto fX = hfield(0), fY = hfield(2);
      Vec6d br = lie_bracket_numeric(chart, fX, fY, z);
      Vec3 vc = vertical_curvature(pt, e(0), e(2));
      Vec6d closed = cf.assemble({0, 0, 0, 0}, cf.adapted_biv_coord(vc));
      double diff = 0, scale = 1.0;
      for (int q = 0; q < 6; ++q) {
        diff = std::max(diff, std::fabs(br[q] - closed[q]));
        scale = std::max(scale, 1.0 + std::fabs(br[q]));
      }
      rep.lie2 = std::max(rep.lie2, diff / scale);
      for (int l = 0; l < 2; ++l) {
        Vec3 V{};
        V[l + 1] = 1.0;
        double lhs = ht_chart(chart, z, br, cf.vlift[l]);
        Vec4 rx = apply_endo(r_endo(pt, tz::sigma_cross(V)), e(0));
        double rhs = -t * dot4(rx, e(2));
        rep.rw = std::max(rep.rw, std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)));
      }
    }
    // connection terms of h_t
    {
      Ten3z Gz = chart.christoffel_z(z);
      auto fX = hfield(0), fY = hfield(1);
      Vec6d dnum = cov_deriv_numeric(chart, cf.hlift[0], fY, z, Gz);
      // closed form: (nabla_X Y)^h + 1/2 R(X,Y) sigma for the
      // constant-component extensions
      Vec4 Xc{}, Yc{};
      for (int i = 0; i < 4; ++i) {
        Xc[i] = pt.Ecoord[0][i];
        Yc[i] = pt.Ecoord[1][i];
      }
      Vec4 nxy{};
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            nxy[k] += pt.geo.chris.gamma[k][i][j] * Xc[i] * Yc[j];
      Vec3 vc = d_hh_vertical(pt, e(0), e(1));
      Vec6d closed = cf.assemble(nxy, cf.adapted_biv_coord(vc));
      double r = 0, rs = 1.0;
      for (int q = 0; q < 6; ++q) {
        r = std::max(r, std::fabs(dnum[q] - closed[q]));
        rs = std::max(rs, 1.0 + std::fabs(dnum[q]));
      }
      rep.lc_hh = std::max(rep.lc_hh, r / rs);
      // D_V X^h
      for (int l = 0; l < 2; ++l) {
        Vec6d dv = cov_deriv_numeric(chart, cf.vlift[l], fX, z, Gz);
        Vec3 V{};
        V[l + 1] = 1.0;
        Vec4 hor = d_vh_horizontal(pt, V, e(0), t);
        // horizontal lift of the adapted-frame vector `hor`
        Vec4 hc{};
        for (int a = 0; a < 4; ++a)
          for (int i = 0; i < 4; ++i) hc[i] += hor[a] * pt.Ecoord[a][i];
        Vec6d closed2 = cf.lift_coord(hc);
        double r2 = 0, r2s = 1.0;
        for (int q = 0; q < 6; ++q) {
          r2 = std::max(r2, std::fabs(dv[q] - closed2[q]));
          r2s = std::max(r2s, 1.0 + std::fabs(dv[q]));
        }
        rep.lc_vh = std::max(rep.lc_vh, r2 / r2s);
      }
    }
    // curvature components and the sectional-curvature formula
    {
      RZTensor R = chart.riemann_z(z);
      auto rnd_h = [&]() {
        TwistorTangent a;
        for (int i = 0; i < 4; ++i) a.hor[i] = rng.sym();
        return a;
      };
      auto rnd_v = [&]() { return TwistorTangent::vertical(rng.sym(), rng.sym()); };
      auto rel = [](double num, double ana) {
        return std::fabs(num - ana) / (1.0 + std::fabs(num));
      };
      for (int trial = 0; trial < 4; ++trial) {
        TwistorTangent X = rnd_h(), Y = rnd_h(), Z2 = rnd_h(), T2 = rnd_h();
        TwistorTangent U = rnd_v(), V = rnd_v(), W = rnd_v();
        rep.rz_res[0] = std::max(rep.rz_res[0], rel(rz_numeric(cf, R, X, Y, Z2, T2),
                                                    rz(pt, X, Y, Z2, T2, t)));
        rep.rz_res[1] = std::max(rep.rz_res[1], rel(rz_numeric(cf, R, X, Y, Z2, U),
                                                    rz(pt, X, Y, Z2, U, t)));
        rep.rz_res[2] = std::max(rep.rz_res[2], rel(rz_numeric(cf, R, X, U, Y, V),
                                                    rz(pt, X, U, Y, V, t)));
        rep.rz_res[3] = std::max(rep.rz_res[3], rel(rz_numeric(cf, R, X, Y, U, V),
                                                    rz(pt, X, Y, U, V, t)));
        rep.rz_res[4] = std::max(rep.rz_res[4], rel(rz_numeric(cf, R, X, U, V, W), 0.0));
        TwistorTangent E2 = X + U, F2 = Y + V;
        rep.sec = std::max(rep.sec, rel(rz_numeric(cf, R, E2, F2, E2, F2),
                                        sec_curvature(pt, E2, F2, t)));
      }
    }
  }
  return rep;
}

// ---- Wood criterion on the 6-manifold ----

// J_k as an explicit 6x6 endomorphism field of the chart
inline Mat6 j_matrix(const ZChart& chart, int k, const Vec6d& z) {
  if (k != 1 && k != 2) throw invalid_parameter("j_matrix: k must be 1 or 2");
  Point4 x{z[0], z[1], z[2], z[3]};
  Mat4 g = chart.g_at(x);
  Mat4 gi = inverse(g);
  auto sm = chart.sminus_at(x);
  Vec3 c = chart.fiber_coeffs(z[4], z[5]);
  Vec6d sigw{};
  for (int q = 0; q < 6; ++q)
    sigw[q] = c[0] * sm[0][q] + c[1] * sm[1][q] + c[2] * sm[2][q];
  // K_sigma in coordinates: (K)^a_b = sigma_{bc} g^{ca}, sigma lowered
  Mat4 K{};
  {
    Mat4 low{};
    auto anti = [&](int i, int j) -> double {
      if (i == j) return 0;
      for (int q = 0; q < 6; ++q)
        if (kWedgeIdx[q][0] == std::min(i, j) && kWedgeIdx[q][1] == std::max(i, j))
          return i < j ? sigw[q] : -sigw[q];
      return 0;
    };
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = 0;
        for (int kk = 0; kk < 4; ++kk)
          for (int l = 0; l < 4; ++l) v += g[a][kk] * g[b][l] * anti(kk, l);
        low[a][b] = v;
      }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = 0;
        for (int cc = 0; cc < 4; ++cc) v += low[b][cc] * gi[cc][a];
        K[a][b] = v;
      }
  }
  auto ns = chart.nabla_sigma(z);
  auto vt = chart.fiber_tangents(z[4], z[5]);
  Vec6d vu{}, vv{};
  for (int q = 0; q < 6; ++q) {
    vu[q] = vt[0][0] * sm[0][q] + vt[0][1] * sm[1][q] + vt[0][2] * sm[2][q];
    vv[q] = vt[1][0] * sm[0][q] + vt[1][1] * sm[1][q] + vt[1][2] * sm[2][q];
  }
  double guu = chart.biv_inner(g, vu, vu), guv = chart.biv_inner(g, vu, vv),
         gvv = chart.biv_inner(g, vv, vv);
  double det = guu * gvv - guv * guv;
  auto vertical_chart = [&](const Vec6d& w) {
    double bu = chart.biv_inner(g, w, vu), bv = chart.biv_inner(g, w, vv);
    return std::array<double, 2>{(gvv * bu - guv * bv) / det,
                                 (guu * bv - guv * bu) / det};
  };
  // cross product sigma x w inside Lambda^2_-(x)
  auto sigma_cross_w = [&](const Vec6d& w) {
    Vec3 ws{chart.biv_inner(g, w, sm[0]), chart.biv_inner(g, w, sm[1]),
            chart.biv_inner(g, w, sm[2])};
    Vec3 cx = cross3(c, ws);
    Vec6d r{};
    for (int q = 0; q < 6; ++q)
      r[q] = cx[0] * sm[0][q] + cx[1] * sm[1][q] + cx[2] * sm[2][q];
    return r;
  };
  double sgn = (k == 1) ? -1.0 : 1.0;
  Mat6 J{};
  for (int m = 0; m < 6; ++m) {
    Vec4 base{};
    Vec6d w{};
    if (m < 4) {
      base[m] = 1.0;
      w = ns[m];
    } else {
      w = (m == 4) ? vu : vv;
    }
    Vec4 kb = apply_endo(K, base);
    Vec6d jw = sigma_cross_w(w);
    for (int q = 0; q < 6; ++q) jw[q] *= sgn;
    // assemble the image: pushforward kb, vertical part jw
    Vec6d rest = jw;
    for (int i = 0; i < 4; ++i)
      for (int q = 0; q < 6; ++q) rest[q] -= kb[i] * ns[i][q];
    auto uv = vertical_chart(rest);
    J[0][m] = kb[0];
    J[1][m] = kb[1];
    J[2][m] = kb[2];
    J[3][m] = kb[3];
    J[4][m] = uv[0];
    J[5][m] = uv[1];
  }
  return J;
}

// || [J_k, rough Laplacian of J_k] || in the h_t operator norm, computed by
// finite-difference second covariant derivatives
inline double wood_defect(const ZChart& chart, int k, const Vec6d& z) {
  if (!chart.in_domain(z, 8 * chart.step))
    throw stencil_error("wood_defect: stencil leaves the chart domain");
  const double h = chart.step;
  // first covariant derivative field T(z)[m][a][b] = (nabla_m J)^a_b
  auto Tfield = [&](const Vec6d& zz) {
    Ten3z T{};
    Mat6 J0 = j_matrix(chart, k, zz);
    Ten3z G = chart.christoffel_z(zz);
    for (int m = 0; m < 6; ++m) {
      Vec6d zp = zz, zm = zz, zp2 = zz, zm2 = zz;
      zp[m] += h;
      zm[m] -= h;
      zp2[m] += 2 * h;
      zm2[m] -= 2 * h;
      Mat6 jp = j_matrix(chart, k, zp), jm = j_matrix(chart, k, zm);
      Mat6 jp2 = j_matrix(chart, k, zp2), jm2 = j_matrix(chart, k, zm2);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          double v = (-jp2[a][b] + 8 * jp[a][b] - 8 * jm[a][b] + jm2[a][b]) /
                     (12 * h);
          for (int cdx = 0; cdx < 6; ++cdx)
            v += G[a][m][cdx] * J0[cdx][b] - G[cdx][m][b] * J0[a][cdx];
          T[m][a][b] = v;
        }
    }
    return T;
  };
  Ten3z T0 = Tfield(z);
  Ten3z G0 = chart.christoffel_z(z);
  Mat6 hmat = chart.metric_at(z);
  Mat6 hinv = inverse(hmat);
  // nabla^2_{m n} J, traced against h^{mn}
  Mat6 lap{};
  for (int m = 0; m < 6; ++m) {
    Vec6d zp = z, zm = z, zp2 = z, zm2 = z;
    zp[m] += h;
    zm[m] -= h;
    zp2[m] += 2 * h;
    zm2[m] -= 2 * h;
    Ten3z tp = Tfield(zp), tm = Tfield(zm), tp2 = Tfield(zp2), tm2 = Tfield(zm2);
    for (int n = 0; n < 6; ++n) {
      if (hinv[m][n] == 0 && m != n) continue;
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          double v = (-tp2[n][a][b] + 8 * tp[n][a][b] - 8 * tm[n][a][b] +
                      tm2[n][a][b]) /
                     (12 * h);
          for (int cdx = 0; cdx < 6; ++cdx)
            v += G0[a][m][cdx] * T0[n][cdx][b] - G0[cdx][m][b] * T0[n][a][cdx] -
                 G0[cdx][m][n] * T0[cdx][a][b];
          lap[a][b] += hinv[m][n] * v;
        }
    }
  }
  // rough Laplacian = -trace; the commutator norm is sign-independent
  Mat6 J0 = j_matrix(chart, k, z);
  Mat6 C{};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double v = 0;
      for (int cdx = 0; cdx < 6; ++cdx)
        v += J0[a][cdx] * lap[cdx][b] - lap[a][cdx] * J0[cdx][b];
      C[a][b] = v;
    }
  // h_t operator norm via 64 deterministic power iterations on C* C
  Mat6 M{};  // hinv C^T hmat C
  {
    Mat6 t1{};
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        double v = 0;
        for (int cdx = 0; cdx < 6; ++cdx)
          for (int d = 0; d < 6; ++d)
            v += C[cdx][a] * hmat[cdx][d] * C[d][b];
        t1[a][b] = v;
      }
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        double v = 0;
        for (int cdx = 0; cdx < 6; ++cdx) v += hinv[a][cdx] * t1[cdx][b];
        M[a][b] = v;
      }
  }
  Vec6d v{1, 0.9, 0.8, 0.7, 0.6, 0.5};
  double lam = 0;
  for (int it = 0; it < 64; ++it) {
    Vec6d w{};
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) w[a] += M[a][b] * v[b];
    double n = norm2(w);
    if (n < 1e-300) return 0.0;
    lam = n;
    for (int a = 0; a < 6; ++a) v[a] = w[a] / n;
  }
  return std::sqrt(lam);
}

}  // namespace twistor
