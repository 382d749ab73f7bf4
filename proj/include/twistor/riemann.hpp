// Curvature of an analytic 4-metric at a point: Christoffel symbols with two
// derivative orders, Riemann tensor and its covariant derivative, oriented
// orthonormal frames, Ricci data.
//
// Curvature sign convention throughout: R(X,Y) = nabla_[X,Y] - [nabla_X,
// nabla_Y], pinned numerically by g(R(X,Y)X,Y) > 0 on the round 4-sphere.
#pragma once

#include "twistor/metric.hpp"

namespace twistor {

using Ten3 = std::array<Mat4, 4>;
using Ten4 = std::array<Ten3, 4>;
using Ten5 = std::array<Ten4, 4>;

struct ChristoffelField {
  Ten3 gamma;    // gamma[k][i][j] = Gamma^k_ij, symmetric in (i,j)
  Ten4 dgamma;   // dgamma[m][k][i][j] = d_m Gamma^k_ij
  Ten5 d2gamma;  // d2gamma[m][n][k][i][j] = d_m d_n Gamma^k_ij
};

struct RiemannAtPoint {
  Ten4 R;    // R[i][j][k][l] = g(R(d_i,d_j)d_k, d_l), coordinate components
  Ten5 nR;   // nR[m][i][j][k][l] = (nabla_m R)(d_i,d_j,d_k,d_l)
};

struct OrthoFrame4 {
  std::array<std::array<Jet3, 4>, 4> Ejet;  // frame field, coordinate comps
  Mat4 E;        // E[a][i]: values of frame vector a
  Mat4 coframe;  // coframe[a][i]: dual basis as covectors
  Ten3 omega;    // omega[c][a][b] = g(nabla_{E_c} E_a, E_b)
  double det = 0;

  Vec4 to_frame(const Vec4& v_coord) const {
    Vec4 r{};
    for (int a = 0; a < 4; ++a) r[a] = dot4(coframe[a], v_coord);
    return r;
  }
  Vec4 to_coord(const Vec4& v_frame) const {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 4; ++a) r[i] += v_frame[a] * E[a][i];
    return r;
  }
};

struct RicciData {
  Mat4 rho;          // frame components of the Ricci operator
  Vec4 eigenvalues;  // ascending
  Mat4 eigenvectors; // eigenvectors[i] = frame comps of i-th eigenvector
  double s = 0;      // scalar curvature
  Vec4 ds;           // frame components of ds
  Ten3 nrho;         // nrho[c][a][b] = (nabla_{E_c} Ricci)(E_a, E_b)
};

namespace detail {

struct MetricDerivs {
  Mat4 g, ginv;
  Ten3 dg;      // dg[m][i][j]
  Ten4 d2g;     // d2g[m][n][i][j]
  Ten5 d3g;     // d3g[m][n][p][i][j]
  Ten3 dginv;   // dginv[m][i][j]
  Ten4 d2ginv;  // d2ginv[m][n][i][j]
};

inline MetricDerivs metric_derivs(const MetricJet& gj) {
  MetricDerivs md{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      md.g[i][j] = gj[i][j].v;
      for (int m = 0; m < 4; ++m) {
        md.dg[m][i][j] = gj[i][j].g[m];
        for (int n = 0; n < 4; ++n) {
          md.d2g[m][n][i][j] = gj[i][j].h[m][n];
          for (int p = 0; p < 4; ++p)
            md.d3g[m][n][p][i][j] = gj[i][j].t[m][n][p];
        }
      }
    }
  md.ginv = inverse(md.g);
  auto sandwich = [&](const Mat4& a) {
    // ginv * a * ginv
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            r[i][j] += md.ginv[i][k] * a[k][l] * md.ginv[l][j];
    return r;
  };
  for (int m = 0; m < 4; ++m) {
    Mat4 s = sandwich(md.dg[m]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) md.dginv[m][i][j] = -s[i][j];
  }
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      // d_m d_n ginv = -ginv d2g ginv - dginv_m dg_n ginv - ginv dg_n dginv_m
      Mat4 t1 = sandwich(md.d2g[m][n]);
      Mat4 r{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double acc = -t1[i][j];
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              acc -= md.dginv[m][i][k] * md.dg[n][k][l] * md.ginv[l][j];
              acc -= md.ginv[i][k] * md.dg[n][k][l] * md.dginv[m][l][j];
            }
          r[i][j] = acc;
        }
      md.d2ginv[m][n] = r;
    }
  return md;
}

}  // namespace detail

inline ChristoffelField christoffel_from_jet(const MetricJet& gj) {
  auto md = detail::metric_derivs(gj);
  ChristoffelField cf{};
  // A[l][i][j] = d_i g_jl + d_j g_il - d_l g_ij and its two derivative orders
  Ten3 A{};
  Ten4 dA{};
  Ten5 d2A{};
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        A[l][i][j] = md.dg[i][j][l] + md.dg[j][i][l] - md.dg[l][i][j];
        for (int m = 0; m < 4; ++m) {
          dA[m][l][i][j] = md.d2g[m][i][j][l] + md.d2g[m][j][i][l] -
                           md.d2g[m][l][i][j];
          for (int n = 0; n < 4; ++n)
            d2A[m][n][l][i][j] = md.d3g[m][n][i][j][l] +
                                 md.d3g[m][n][j][i][l] - md.d3g[m][n][l][i][j];
        }
      }
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = 0;
        for (int l = 0; l < 4; ++l) v += md.ginv[k][l] * A[l][i][j];
        cf.gamma[k][i][j] = 0.5 * v;
        for (int m = 0; m < 4; ++m) {
          double dv = 0;
          for (int l = 0; l < 4; ++l)
            dv += md.dginv[m][k][l] * A[l][i][j] +
                  md.ginv[k][l] * dA[m][l][i][j];
          cf.dgamma[m][k][i][j] = 0.5 * dv;
          for (int n = 0; n < 4; ++n) {
            double d2v = 0;
            for (int l = 0; l < 4; ++l)
              d2v += md.d2ginv[m][n][k][l] * A[l][i][j] +
                     md.dginv[m][k][l] * dA[n][l][i][j] +
                     md.dginv[n][k][l] * dA[m][l][i][j] +
                     md.ginv[k][l] * d2A[m][n][l][i][j];
            cf.d2gamma[m][n][k][i][j] = 0.5 * d2v;
          }
        }
      }
  return cf;
}

inline ChristoffelField christoffel(const MetricSpec& spec, const Point4& p) {
  return christoffel_from_jet(eval_metric_jet(spec, p));
}

inline RiemannAtPoint riemann_from_jet(const MetricJet& gj,
                                       const ChristoffelField& cf) {
  auto md = detail::metric_derivs(gj);
  RiemannAtPoint out{};
  // Rup[l][i][j][k]: R(d_i,d_j)d_k = Rup^l d_l with the engine sign
  Ten4 Rup{};
  Ten5 dRup{};
  const auto& G = cf.gamma;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          double std_sign = cf.dgamma[i][l][j][k] - cf.dgamma[j][l][i][k];
          for (int m = 0; m < 4; ++m)
            std_sign += G[l][i][m] * G[m][j][k] - G[l][j][m] * G[m][i][k];
          Rup[l][i][j][k] = -std_sign;
          for (int q = 0; q < 4; ++q) {
            double d = cf.d2gamma[q][i][l][j][k] - cf.d2gamma[q][j][l][i][k];
            for (int m = 0; m < 4; ++m)
              d += cf.dgamma[q][l][i][m] * G[m][j][k] +
                   G[l][i][m] * cf.dgamma[q][m][j][k] -
                   cf.dgamma[q][l][j][m] * G[m][i][k] -
                   G[l][j][m] * cf.dgamma[q][m][i][k];
            dRup[q][l][i][j][k] = -d;
          }
        }
  Ten5 dR{};  // coordinate partials of the lowered tensor
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int m = 0; m < 4; ++m) v += md.g[l][m] * Rup[m][i][j][k];
          out.R[i][j][k][l] = v;
          for (int q = 0; q < 4; ++q) {
            double d = 0;
            for (int m = 0; m < 4; ++m)
              d += md.dg[q][l][m] * Rup[m][i][j][k] +
                   md.g[l][m] * dRup[q][m][i][j][k];
            dR[q][i][j][k][l] = d;
          }
        }
  for (int q = 0; q < 4; ++q)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = dR[q][i][j][k][l];
            for (int a = 0; a < 4; ++a)
              v -= G[a][q][i] * out.R[a][j][k][l] +
                   G[a][q][j] * out.R[i][a][k][l] +
                   G[a][q][k] * out.R[i][j][a][l] +
                   G[a][q][l] * out.R[i][j][k][a];
            out.nR[q][i][j][k][l] = v;
          }
  return out;
}

namespace detail {

inline double riemann_scale(const Ten4& R) {
  double m = 1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) m = std::max(m, std::fabs(R[i][j][k][l]));
  return m;
}

inline void check_riemann_symmetries(const RiemannAtPoint& rp, double tol) {
  double scale = riemann_scale(rp.R);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double r = rp.R[i][j][k][l];
          if (std::fabs(r + rp.R[j][i][k][l]) > tol * scale ||
              std::fabs(r + rp.R[i][j][l][k]) > tol * scale ||
              std::fabs(r - rp.R[k][l][i][j]) > tol * scale ||
              std::fabs(r + rp.R[j][k][i][l] + rp.R[k][i][j][l]) > tol * scale)
            throw numeric_error("riemann: algebraic symmetry violated");
        }
}

}  // namespace detail

inline RiemannAtPoint riemann(const MetricSpec& spec, const Point4& p) {
  MetricJet gj = eval_metric_jet(spec, p);
  auto rp = riemann_from_jet(gj, christoffel_from_jet(gj));
  detail::check_riemann_symmetries(rp, 1e-9);
  return rp;
}

// the nabla R block alone, with the second Bianchi identity enforced
inline Ten5 nabla_riemann(const MetricSpec& spec, const Point4& p) {
  auto rp = riemann(spec, p);
  double scale = detail::riemann_scale(rp.R);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            if (std::fabs(rp.nR[m][i][j][k][l] + rp.nR[i][j][m][k][l] +
                          rp.nR[j][m][i][k][l]) > 1e-8 * scale)
              throw numeric_error("nabla_riemann: second Bianchi identity violated");
  return rp.nR;
}

// Gram-Schmidt over the coordinate basis, run in jet arithmetic so the frame
// is a differentiable field.  Processes vectors in index order; orientation
// fixed by flipping E4, with a further E4 flip when the metric is registered
// with the opposite orientation.
inline OrthoFrame4 orthonormal_frame_from_jet(const MetricJet& gj,
                                              const ChristoffelField& cf,
                                              int orientation = +1) {
  OrthoFrame4 fr{};
  auto inner = [&](const std::array<Jet3, 4>& u, const std::array<Jet3, 4>& w) {
    Jet3 s = Jet3::constant(0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s = s + u[i] * gj[i][j] * w[j];
    return s;
  };
  for (int a = 0; a < 4; ++a) {
    std::array<Jet3, 4> v{};
    v[a] = Jet3::constant(1.0);
    for (int b = 0; b < a; ++b) {
      Jet3 c = inner(v, fr.Ejet[b]);
      for (int i = 0; i < 4; ++i) v[i] = v[i] - c * fr.Ejet[b][i];
    }
    Jet3 n2 = inner(v, v);
    if (n2.v < 1e-20) throw numeric_error("frame: degenerate coordinate basis");
    Jet3 inv_n = reciprocal(sqrt(n2));
    for (int i = 0; i < 4; ++i) fr.Ejet[a][i] = v[i] * inv_n;
  }
  Mat4 ev{};
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) ev[a][i] = fr.Ejet[a][i].v;
  Mat4 cols{};
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) cols[i][a] = ev[a][i];
  double d = det4(cols);
  bool flip = d < 0;
  if (orientation < 0) flip = !flip;
  if (flip)
    for (int i = 0; i < 4; ++i) fr.Ejet[3][i] = -1.0 * fr.Ejet[3][i];
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) fr.E[a][i] = fr.Ejet[a][i].v;
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) cols[i][a] = fr.E[a][i];
  fr.det = det4(cols);
  Mat4 inv = inverse(cols);
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) fr.coframe[a][i] = inv[a][i];
  // omega[c][a][b] = g(nabla_{E_c} E_a, E_b)
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double acc = 0;
        for (int i = 0; i < 4; ++i) {
          double cov_i = 0;  // i-th comp of nabla_{E_c} E_a
          for (int m = 0; m < 4; ++m) {
            cov_i += fr.E[c][m] * fr.Ejet[a][i].g[m];
            for (int j = 0; j < 4; ++j)
              cov_i += fr.E[c][m] * cf.gamma[i][m][j] * fr.E[a][j];
          }
          for (int j = 0; j < 4; ++j)
            acc += cov_i * gj[i][j].v * fr.E[b][j];
        }
        fr.omega[c][a][b] = acc;
      }
  return fr;
}

inline OrthoFrame4 orthonormal_frame(const MetricSpec& spec, const Point4& p) {
  MetricJet gj = eval_metric_jet(spec, p);
  return orthonormal_frame_from_jet(gj, christoffel_from_jet(gj),
                                    spec.orientation);
}

// Everything the downstream modules need at one point, with curvature data in
// both coordinate and frame components.
struct GeomPoint {
  Point4 p{};
  MetricJet gj;
  Mat4 g{}, ginv{};
  ChristoffelField chris;
  RiemannAtPoint riem;     // coordinate components
  OrthoFrame4 frame;
  Ten4 Rf{};               // frame components of R
  Ten5 nRf{};              // frame components of nabla R
  RicciData ric;
};

namespace detail {

inline void frame_components(GeomPoint& gp) {
  const Mat4& E = gp.frame.E;
  // staged contraction, one index at a time
  Ten4 t1{}, t2{}, t3{};
  for (int a = 0; a < 4; ++a)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int i = 0; i < 4; ++i) v += E[a][i] * gp.riem.R[i][j][k][l];
          t1[a][j][k][l] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int j = 0; j < 4; ++j) v += E[b][j] * t1[a][j][k][l];
          t2[a][b][k][l] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int k = 0; k < 4; ++k) v += E[c][k] * t2[a][b][k][l];
          t3[a][b][c][l] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double v = 0;
          for (int l = 0; l < 4; ++l) v += E[d][l] * t3[a][b][c][l];
          gp.Rf[a][b][c][d] = v;
        }
  for (int m = 0; m < 4; ++m) {
    Ten4 s0{}, s1{}, s2{}, s3{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int q = 0; q < 4; ++q) v += E[m][q] * gp.riem.nR[q][i][j][k][l];
            s0[i][j][k][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int i = 0; i < 4; ++i) v += E[a][i] * s0[i][j][k][l];
            s1[a][j][k][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int j = 0; j < 4; ++j) v += E[b][j] * s1[a][j][k][l];
            s2[a][b][k][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int k = 0; k < 4; ++k) v += E[c][k] * s2[a][b][k][l];
            s3[a][b][c][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            double v = 0;
            for (int l = 0; l < 4; ++l) v += E[d][l] * s3[a][b][c][l];
            gp.nRf[m][a][b][c][d] = v;
          }
  }
}

}  // namespace detail

inline RicciData ricci_from_frame(const Ten4& Rf, const Ten5& nRf) {
  RicciData rd{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = 0;
      for (int c = 0; c < 4; ++c) v += Rf[a][c][b][c];
      rd.rho[a][b] = v;
    }
  rd.s = rd.rho[0][0] + rd.rho[1][1] + rd.rho[2][2] + rd.rho[3][3];
  auto es = eigen_sym<4>(rd.rho);
  rd.eigenvalues = es.values;
  rd.eigenvectors = es.vectors;
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = 0;
        for (int d = 0; d < 4; ++d) v += nRf[c][a][d][b][d];
        rd.nrho[c][a][b] = v;
      }
  for (int m = 0; m < 4; ++m) {
    double v = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) v += nRf[m][a][b][a][b];
    rd.ds[m] = v;
  }
  return rd;
}

inline GeomPoint geom_at(const MetricSpec& spec, const Point4& p) {
  GeomPoint gp{};
  gp.p = p;
  gp.gj = eval_metric_jet(spec, p);
  gp.g = jet_values(gp.gj);
  gp.ginv = inverse(gp.g);
  gp.chris = christoffel_from_jet(gp.gj);
  gp.riem = riemann_from_jet(gp.gj, gp.chris);
  detail::check_riemann_symmetries(gp.riem, 1e-9);
  gp.frame = orthonormal_frame_from_jet(gp.gj, gp.chris, spec.orientation);
  detail::frame_components(gp);
  gp.ric = ricci_from_frame(gp.Rf, gp.nRf);
  return gp;
}

inline RicciData ricci(const MetricSpec& spec, const Point4& p) {
  return geom_at(spec, p).ric;
}

// dr(X,Y,Z) = (nabla_Y Ricci)(Z,X) - (nabla_Z Ricci)(Y,X), frame components.
inline double dr(const GeomPoint& gp, const Vec4& X, const Vec4& Y,
                 const Vec4& Z) {
  double v = 0;
  for (int y = 0; y < 4; ++y)
    for (int z = 0; z < 4; ++z)
      for (int x = 0; x < 4; ++x)
        v += X[x] * Y[y] * Z[z] *
             (gp.ric.nrho[y][z][x] - gp.ric.nrho[z][y][x]);
  return v;
}

}  // namespace twistor
