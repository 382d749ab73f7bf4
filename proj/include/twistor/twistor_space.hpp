// Pointwise geometry of the negative twistor space (Z, h_t): adapted frames,
// the metrics h_t, the almost complex structures J_1 (Atiyah-Hitchin-Singer)
// and J_2 (Eells-Salamon), the Levi-Civita connection terms of h_t, the
// curvature components of (Z, h_t) and the fundamental-form derivatives.
//
// All tangent data lives in the sigma-adapted orthonormal frame of the base
// point: E2 = K_sigma E1, E4 = -K_sigma E3, so sigma = s1^- and the vertical
// space is span{s2^-, s3^-}.  Vertical vectors are stored in s^- coordinates
// with vanishing first component.
//
// The composite endomorphism R(a) appearing in the connection and curvature
// formulas is the one with g(R(a)X, Y) = g(curv_op(a), X ^ Y); equivalently
// R(a) = 1/2 K_{curv_op(a)}.  This normalisation makes the identity
// h_t(R(X,Y)sigma, V) = (4t/n) g(R((K_sigma K_V)^wedge) X, Y) hold and is
// cross-checked against the 6-dimensional numeric oracle.
#pragma once

#include <vector>

#include "twistor/lambda2.hpp"

namespace twistor {

struct TwistorTangent {
  Vec4 hor{};  // adapted-frame components of the horizontal part
  Vec3 ver{};  // s^- coordinates of the vertical part; ver[0] == 0

  static TwistorTangent horizontal(const Vec4& x) { return {x, {0, 0, 0}}; }
  static TwistorTangent vertical(double a, double b) { return {{}, {0, a, b}}; }
};

inline TwistorTangent operator+(const TwistorTangent& a, const TwistorTangent& b) {
  TwistorTangent r;
  for (int i = 0; i < 4; ++i) r.hor[i] = a.hor[i] + b.hor[i];
  for (int i = 0; i < 3; ++i) r.ver[i] = a.ver[i] + b.ver[i];
  return r;
}

inline TwistorTangent operator*(double c, const TwistorTangent& a) {
  TwistorTangent r;
  for (int i = 0; i < 4; ++i) r.hor[i] = c * a.hor[i];
  for (int i = 0; i < 3; ++i) r.ver[i] = c * a.ver[i];
  return r;
}

// sparse list of decomposable terms, never expanded in the 15-dim Lambda^2
struct TwistorBivector {
  struct Term {
    double coeff;
    TwistorTangent a, b;
  };
  std::vector<Term> terms;
};

struct TwistorPoint {
  GeomPoint geo;        // base geometry, Gram-Schmidt frame
  Vec3 sigma_gs{};      // sigma in the s^- basis of the Gram-Schmidt frame
  Mat4 Q{};             // adapted frame in Gram-Schmidt frame components
  Mat4 Ecoord{};        // adapted frame in coordinate components
  // curvature data in the adapted frame
  Ten4 Rf{};
  Ten5 nRf{};
  RicciData ric;
  CurvOp op;
  CurvDecomp dec;
};

namespace tz {

// g(s_a, X ^ Y) for the six s-basis elements, a in 0..5 = (s1+,s2+,s3+,s1-,s2-,s3-)
inline double pair_sbasis(int a, const Vec4& X, const Vec4& Y) {
  auto w = [&](int i, int j) { return X[i] * Y[j] - X[j] * Y[i]; };
  switch (a) {
    case 0: return 0.5 * (w(0, 1) + w(2, 3));
    case 1: return 0.5 * (w(0, 2) - w(1, 3));
    case 2: return 0.5 * (w(0, 3) + w(1, 2));
    case 3: return 0.5 * (w(0, 1) - w(2, 3));
    case 4: return 0.5 * (w(0, 2) + w(1, 3));
    case 5: return 0.5 * (w(0, 3) - w(1, 2));
  }
  throw invalid_parameter("pair_sbasis: bad index");
}

// g(v, X ^ Y) for v in s^- coordinates
inline double pair_v(const Vec3& v, const Vec4& X, const Vec4& Y) {
  return v[0] * pair_sbasis(3, X, Y) + v[1] * pair_sbasis(4, X, Y) +
         v[2] * pair_sbasis(5, X, Y);
}

inline Vec6 sminus_to_wedge(const Vec3& v) {
  return {v[0], v[1], v[2], -v[2], v[1], -v[0]};
}

// K_sigma at sigma = s1^-
inline Vec4 k_sigma(const Vec4& x) { return {-x[1], x[0], x[3], -x[2]}; }

// sigma x v for sigma = s1^- and vertical v
inline Vec3 sigma_cross(const Vec3& v) { return {0.0, -v[2], v[1]}; }

}  // namespace tz

// curvature operator applied to an ASD element, as six s-coordinates
inline Vec6 curv_on_sminus(const TwistorPoint& pt, const Vec3& v) {
  Vec6 r{};
  for (int a = 0; a < 6; ++a)
    for (int i = 0; i < 3; ++i) r[a] += pt.op.mat[a][3 + i] * v[i];
  return r;
}

inline double pair6(const TwistorPoint&, const Vec6& w, const Vec4& X,
                    const Vec4& Y) {
  double s = 0;
  for (int a = 0; a < 6; ++a) s += w[a] * tz::pair_sbasis(a, X, Y);
  return s;
}

// the endomorphism R(a) for a in Lambda^2_-, g(R(a)X,Y) = g(curv_op(a), X^Y)
inline Mat4 r_endo(const TwistorPoint& pt, const Vec3& a) {
  Vec6 c = tz::sminus_to_wedge(a);
  Mat4 m{};
  for (int q = 0; q < 6; ++q) {
    if (c[q] == 0) continue;
    int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) m[y][x] += c[q] * pt.Rf[i][j][x][y];
  }
  return m;
}

// R(X,Y)sigma as s^- coordinates (the Lambda^2_- bundle is nabla-parallel)
inline Vec3 vertical_curvature(const TwistorPoint& pt, const Vec4& X,
                               const Vec4& Y) {
  // A[m][a] = g(R(X,Y)E_a, E_m)
  Mat4 A{};
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) {
      double v = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v += X[i] * Y[j] * pt.Rf[i][j][a][m];
      A[m][a] = v;
    }
  // derivation action on the wedge components of sigma = s1^-
  Vec6 sig = tz::sminus_to_wedge({1, 0, 0});
  Vec6 out{};
  auto comp = [&](const Vec6& c, int i, int j) -> double {
    if (i == j) return 0;
    for (int p = 0; p < 6; ++p) {
      if (kWedgeIdx[p][0] == std::min(i, j) && kWedgeIdx[p][1] == std::max(i, j))
        return i < j ? c[p] : -c[p];
    }
    return 0;
  };
  for (int p = 0; p < 6; ++p) {
    int k = kWedgeIdx[p][0], l = kWedgeIdx[p][1];
    double v = 0;
    for (int m = 0; m < 4; ++m)
      v += A[k][m] * comp(sig, m, l) + comp(sig, k, m) * A[l][m];
    out[p] = v;
  }
  Bivector b;
  b.c = out;
  Vec3 r = to_sminus(b);
  // the self-dual residual must vanish; a failure indicates a curvature bug
  Vec3 rp = to_splus(b);
  double scale = std::sqrt(dot3(r, r)) + 1.0;
  if (std::sqrt(dot3(rp, rp)) > 1e-8 * scale)
    throw numeric_error("vertical_curvature: result not anti-self-dual");
  return r;
}

// g((nabla_Z R)(X ^ Y), w) with w given by ASD coordinates
inline double nabla_pair(const TwistorPoint& pt, const Vec4& Z, const Vec4& X,
                         const Vec4& Y, const Vec3& w) {
  Vec6 c = tz::sminus_to_wedge(w);
  double v = 0;
  for (int q = 0; q < 6; ++q) {
    if (c[q] == 0) continue;
    int k = kWedgeIdx[q][0], l = kWedgeIdx[q][1];
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          v += c[q] * Z[m] * X[i] * Y[j] * pt.nRf[m][i][j][k][l];
  }
  return v;
}

inline double riem4(const TwistorPoint& pt, const Vec4& X, const Vec4& Y,
                    const Vec4& Z, const Vec4& T) {
  double v = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          v += X[i] * Y[j] * Z[k] * T[l] * pt.Rf[i][j][k][l];
  return v;
}

// Builds the adapted twistor point: sigma given in the s^- basis of the
// Gram-Schmidt frame, E1 seeded by `seed` (Gram-Schmidt frame components).
inline TwistorPoint make_twistor_point(const MetricSpec& spec, const Point4& p,
                                       Vec3 sigma,
                                       const Vec4& seed = {1, 0, 0, 0}) {
  TwistorPoint pt;
  pt.geo = geom_at(spec, p);
  double n = std::sqrt(dot3(sigma, sigma));
  if (n < 1e-12) throw invalid_parameter("make_twistor_point: zero sigma");
  for (double& v : sigma) v /= n;
  pt.sigma_gs = sigma;
  Bivector sig = from_sminus(sigma);
  Mat4 K = k_endo(sig);
  Vec4 e1 = seed;
  double sn = norm2(e1);
  if (sn < 1e-12) throw invalid_parameter("make_twistor_point: zero seed");
  for (double& v : e1) v /= sn;
  Vec4 e2 = apply_endo(K, e1);
  // complete with the first coordinate-frame vector not aligned with the
  // K_sigma-invariant plane of e1
  Vec4 e3{};
  bool found = false;
  for (int cand = 0; cand < 4 && !found; ++cand) {
    Vec4 v{};
    v[cand] = 1.0;
    double c1 = dot4(v, e1), c2 = dot4(v, e2);
    for (int i = 0; i < 4; ++i) v[i] -= c1 * e1[i] + c2 * e2[i];
    double vn = norm2(v);
    if (vn > 0.1) {
      for (int i = 0; i < 4; ++i) e3[i] = v[i] / vn;
      found = true;
    }
  }
  if (!found) throw numeric_error("make_twistor_point: no adapted completion");
  Vec4 e4 = apply_endo(K, e3);
  for (double& v : e4) v = -v;
  pt.Q = {e1, e2, e3, e4};
  Mat4 cols{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) cols[b][a] = pt.Q[a][b];
  if (det4(cols) < 0.5)
    throw numeric_error("make_twistor_point: adapted frame not oriented");
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) {
      double v = 0;
      for (int b = 0; b < 4; ++b) v += pt.Q[a][b] * pt.geo.frame.E[b][i];
      pt.Ecoord[a][i] = v;
    }
  // rotate curvature into the adapted frame, one index at a time
  auto rot4 = [&](const Ten4& in) {
    Ten4 t1{}, t2{}, t3{}, out{};
    for (int a = 0; a < 4; ++a)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int i = 0; i < 4; ++i) v += pt.Q[a][i] * in[i][j][k][l];
            t1[a][j][k][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int j = 0; j < 4; ++j) v += pt.Q[b][j] * t1[a][j][k][l];
            t2[a][b][k][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int k = 0; k < 4; ++k) v += pt.Q[c][k] * t2[a][b][k][l];
            t3[a][b][c][l] = v;
          }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            double v = 0;
            for (int l = 0; l < 4; ++l) v += pt.Q[d][l] * t3[a][b][c][l];
            out[a][b][c][d] = v;
          }
    return out;
  };
  pt.Rf = rot4(pt.geo.Rf);
  for (int m = 0; m < 4; ++m) {
    Ten4 slice{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double v = 0;
            for (int q = 0; q < 4; ++q) v += pt.Q[m][q] * pt.geo.nRf[q][i][j][k][l];
            slice[i][j][k][l] = v;
          }
    pt.nRf[m] = rot4(slice);
  }
  pt.ric = ricci_from_frame(pt.Rf, pt.nRf);
  pt.op = curv_op(pt.Rf);
  pt.dec = decompose(pt.op, pt.ric);
  return pt;
}

inline double ht_inner(const TwistorTangent& A, const TwistorTangent& B,
                       double t) {
  if (t <= 0) throw invalid_parameter("ht_inner: t must be positive");
  return dot4(A.hor, B.hor) + t * dot3(A.ver, B.ver);
}

// J_1 (k=1) and J_2 (k=2): K_sigma on horizontal lifts, (-1)^k sigma x . on
// the vertical space of the negative twistor space
inline TwistorTangent j_apply(int k, const TwistorTangent& A) {
  if (k != 1 && k != 2) throw invalid_parameter("j_apply: k must be 1 or 2");
  TwistorTangent r;
  r.hor = tz::k_sigma(A.hor);
  Vec3 c = tz::sigma_cross(A.ver);
  double sgn = (k == 1) ? -1.0 : 1.0;
  for (int i = 0; i < 3; ++i) r.ver[i] = sgn * c[i];
  return r;
}

// vertical part of D_{X^h} Y^h
inline Vec3 d_hh_vertical(const TwistorPoint& pt, const Vec4& X, const Vec4& Y) {
  Vec3 r = vertical_curvature(pt, X, Y);
  for (double& v : r) v *= 0.5;
  return r;
}

// D_V X^h = (t/2) (R(sigma x V) X)^h
inline Vec4 d_vh_horizontal(const TwistorPoint& pt, const Vec3& V, const Vec4& X,
                            double t) {
  Mat4 m = r_endo(pt, tz::sigma_cross(V));
  Vec4 r = apply_endo(m, X);
  for (double& v : r) v *= 0.5 * t;
  return r;
}

// --- curvature components of (Z, h_t), by argument type ---

inline double rz_hhhh(const TwistorPoint& pt, const Vec4& X, const Vec4& Y,
                      const Vec4& Z, const Vec4& T, double t) {
  Vec3 rxy = vertical_curvature(pt, X, Y);
  Vec3 rzt = vertical_curvature(pt, Z, T);
  Vec3 rxt = vertical_curvature(pt, X, T);
  Vec3 ryz = vertical_curvature(pt, Y, Z);
  Vec3 rxz = vertical_curvature(pt, X, Z);
  Vec3 ryt = vertical_curvature(pt, Y, T);
  return riem4(pt, X, Y, Z, T) -
         (3.0 * t / 12.0) * (2.0 * dot3(rxy, rzt) - dot3(rxt, ryz) +
                             dot3(rxz, ryt));
}

inline double rz_hhhv(const TwistorPoint& pt, const Vec4& X, const Vec4& Y,
                      const Vec4& Z, const Vec3& U, double t) {
  return -0.5 * t * nabla_pair(pt, Z, X, Y, tz::sigma_cross(U));
}

inline double rz_hvhv(const TwistorPoint& pt, const Vec4& X, const Vec3& U,
                      const Vec4& Y, const Vec3& V, double t) {
  Vec4 rvx = apply_endo(r_endo(pt, tz::sigma_cross(V)), X);
  Vec4 ruy = apply_endo(r_endo(pt, tz::sigma_cross(U)), Y);
  double rsig = pair6(pt, curv_on_sminus(pt, {1, 0, 0}), X, Y);
  return 0.25 * t * t * dot4(rvx, ruy) +
         0.5 * t * rsig * dot3(tz::sigma_cross(V), U);
}

inline double rz_hhvv(const TwistorPoint& pt, const Vec4& X, const Vec4& Y,
                      const Vec3& U, const Vec3& V, double t) {
  Vec4 rvx = apply_endo(r_endo(pt, tz::sigma_cross(V)), X);
  Vec4 ruy = apply_endo(r_endo(pt, tz::sigma_cross(U)), Y);
  Vec4 rux = apply_endo(r_endo(pt, tz::sigma_cross(U)), X);
  Vec4 rvy = apply_endo(r_endo(pt, tz::sigma_cross(V)), Y);
  double rsig = pair6(pt, curv_on_sminus(pt, {1, 0, 0}), X, Y);
  return 0.25 * t * t * (dot4(rvx, ruy) - dot4(rux, rvy)) +
         t * rsig * dot3(tz::sigma_cross(V), U);
}

inline double rz_vvvv(const Vec3& U, const Vec3& V, const Vec3& W, const Vec3& T,
                      double t) {
  return t * (dot3(U, W) * dot3(V, T) - dot3(U, T) * dot3(V, W));
}

// h_t(R_Z(A,B)C,D) for arbitrary tangents, by multilinear expansion into the
// pure-type components; mixed types are mapped with the pair and slot
// symmetries of a curvature tensor
inline double rz(const TwistorPoint& pt, const TwistorTangent& A,
                 const TwistorTangent& B, const TwistorTangent& C,
                 const TwistorTangent& D, double t) {
  if (t <= 0) throw invalid_parameter("rz: t must be positive");
  double total = 0;
  for (int mask = 0; mask < 16; ++mask) {
    const TwistorTangent* args[4] = {&A, &B, &C, &D};
    bool vert[4];
    for (int s = 0; s < 4; ++s) vert[s] = mask & (1 << s);
    const Vec4* h[4];
    const Vec3* v[4];
    for (int s = 0; s < 4; ++s) {
      h[s] = &args[s]->hor;
      v[s] = &args[s]->ver;
    }
    int nv = vert[0] + vert[1] + vert[2] + vert[3];
    double term = 0;
    if (nv == 0) {
      term = rz_hhhh(pt, *h[0], *h[1], *h[2], *h[3], t);
    } else if (nv == 1) {
      if (vert[3]) term = rz_hhhv(pt, *h[0], *h[1], *h[2], *v[3], t);
      else if (vert[2]) term = -rz_hhhv(pt, *h[0], *h[1], *h[3], *v[2], t);
      else if (vert[1]) term = rz_hhhv(pt, *h[2], *h[3], *h[0], *v[1], t);
      else term = -rz_hhhv(pt, *h[2], *h[3], *h[1], *v[0], t);
    } else if (nv == 2) {
      if (vert[2] && vert[3]) term = rz_hhvv(pt, *h[0], *h[1], *v[2], *v[3], t);
      else if (vert[0] && vert[1]) term = rz_hhvv(pt, *h[2], *h[3], *v[0], *v[1], t);
      else if (vert[1] && vert[3]) term = rz_hvhv(pt, *h[0], *v[1], *h[2], *v[3], t);
      else if (vert[1] && vert[2]) term = -rz_hvhv(pt, *h[0], *v[1], *h[3], *v[2], t);
      else if (vert[0] && vert[3]) term = -rz_hvhv(pt, *h[1], *v[0], *h[2], *v[3], t);
      else term = rz_hvhv(pt, *h[1], *v[0], *h[3], *v[2], t);
    } else if (nv == 3) {
      term = 0;  // h_t(R_Z(X^h, U)V, W) = 0 and its rearrangements
    } else {
      term = rz_vvvv(*v[0], *v[1], *v[2], *v[3], t);
    }
    total += term;
  }
  return total;
}

enum class RzKind { hhhh, hhhv, hvhv, hhvv, hvvv };

// direct access to the five displayed families
inline double rz_component(const TwistorPoint& pt, RzKind kind,
                           const TwistorTangent& A, const TwistorTangent& B,
                           const TwistorTangent& C, const TwistorTangent& D,
                           double t) {
  switch (kind) {
    case RzKind::hhhh: return rz_hhhh(pt, A.hor, B.hor, C.hor, D.hor, t);
    case RzKind::hhhv: return rz_hhhv(pt, A.hor, B.hor, C.hor, D.ver, t);
    case RzKind::hvhv: return rz_hvhv(pt, A.hor, B.ver, C.hor, D.ver, t);
    case RzKind::hhvv: return rz_hhvv(pt, A.hor, B.hor, C.ver, D.ver, t);
    case RzKind::hvvv: return 0.0;
  }
  throw invalid_parameter("rz_component: bad kind");
}

// Sectional-curvature numerator of (Z, h_t), the displayed closed form
inline double sec_curvature(const TwistorPoint& pt, const TwistorTangent& E,
                            const TwistorTangent& F, double t) {
  if (t <= 0) throw invalid_parameter("sec_curvature: t must be positive");
  const Vec4 &X = E.hor, &Y = F.hor;
  const Vec3 &V = E.ver, &W = F.ver;
  Vec3 sxV = tz::sigma_cross(V), sxW = tz::sigma_cross(W);
  Vec4 rvx = apply_endo(r_endo(pt, sxV), X);
  Vec4 rwy = apply_endo(r_endo(pt, sxW), Y);
  Vec4 rwx = apply_endo(r_endo(pt, sxW), X);
  Vec4 rvy = apply_endo(r_endo(pt, sxV), Y);
  Vec3 rxys = vertical_curvature(pt, X, Y);
  double rsig = pair6(pt, curv_on_sminus(pt, {1, 0, 0}), X, Y);
  Vec4 sum = axpy(1.0, rwx, rvy);
  return riem4(pt, X, Y, X, Y) -
         t * nabla_pair(pt, X, X, Y, sxW) + t * nabla_pair(pt, Y, X, Y, sxV) -
         3.0 * t * rsig * dot3(sxV, W) -
         t * t * dot4(rvx, rwy) + 0.25 * t * t * dot4(sum, sum) -
         0.75 * t * dot3(rxys, rxys) +
         t * (dot3(V, V) * dot3(W, W) - dot3(V, W) * dot3(V, W));
}

// (D_A Omega_{k,t})(B, C) for the fundamental 2-form of (h_t, J_k); only the
// (horizontal; horizontal, vertical) and (vertical; horizontal, horizontal)
// slots survive
inline double d_omega(const TwistorPoint& pt, int k, double t,
                      const TwistorTangent& A, const TwistorTangent& B,
                      const TwistorTangent& C) {
  if (k != 1 && k != 2) throw invalid_parameter("d_omega: k must be 1 or 2");
  if (t <= 0) throw invalid_parameter("d_omega: t must be positive");
  double sgn_k = (k == 1) ? -1.0 : 1.0;
  auto horizontal_slot = [&](const Vec4& X, const Vec4& Y, const Vec3& V) {
    // (D_{X^h} Omega)(Y^h, V)
    double t1 = pair6(pt, curv_on_sminus(pt, V), X, Y);
    double t2 = pair6(pt, curv_on_sminus(pt, tz::sigma_cross(V)), X,
                      tz::k_sigma(Y));
    return 0.5 * t * (sgn_k * t1 - t2);
  };
  auto vertical_slot = [&](const Vec3& V, const Vec4& X, const Vec4& Y) {
    // (D_V Omega)(X^h, Y^h)
    Vec4 ky = tz::k_sigma(Y), kx = tz::k_sigma(X);
    Vec6 rxv = curv_on_sminus(pt, tz::sigma_cross(V));
    double t1 = pair6(pt, rxv, X, ky) + pair6(pt, rxv, kx, Y);
    return 0.5 * t * t1 + 2.0 * tz::pair_v(V, X, Y);
  };
  return horizontal_slot(A.hor, B.hor, C.ver) -
         horizontal_slot(A.hor, C.hor, B.ver) +
         vertical_slot(A.ver, B.hor, C.hor);
}

// largest |(D_A Omega_{k,t})(B, C)| over the h_t-orthonormal frame triples;
// vanishes identically at t = 12/s on a self-dual Einstein base (k = 1)
inline double d_omega_max(const TwistorPoint& pt, int k, double t) {
  double ist = 1.0 / std::sqrt(t);
  std::array<TwistorTangent, 6> basis{};
  for (int i = 0; i < 4; ++i) basis[i].hor[i] = 1.0;
  basis[4].ver = {0, ist, 0};
  basis[5].ver = {0, 0, ist};
  double m = 0;
  for (const auto& A : basis)
    for (const auto& B : basis)
      for (const auto& C : basis)
        m = std::max(m, std::fabs(d_omega(pt, k, t, A, B, C)));
  return m;
}

// h_t-inner product on decomposable 2-vectors of T(Z), same 1/2 convention
inline double ht_inner2(const TwistorTangent& A1, const TwistorTangent& A2,
                        const TwistorTangent& B1, const TwistorTangent& B2,
                        double t) {
  return 0.5 * (ht_inner(A1, B1, t) * ht_inner(A2, B2, t) -
                ht_inner(A1, B2, t) * ht_inner(A2, B1, t));
}

// (J_k o D_A J_k)^wedge as a sparse 2-vector; horizontal input yields
// (horizontal ^ vertical) terms, vertical input (horizontal ^ horizontal)
inline TwistorBivector jdj_wedge(const TwistorPoint& pt, int k,
                                 const TwistorTangent& A, double t) {
  if (k != 1 && k != 2) throw invalid_parameter("jdj_wedge: k must be 1 or 2");
  if (t <= 0) throw invalid_parameter("jdj_wedge: t must be positive");
  double sgn_k = (k == 1) ? -1.0 : 1.0;
  TwistorBivector out;
  double ist = 1.0 / std::sqrt(t);
  const Vec3 vbasis[2] = {{0, ist, 0}, {0, 0, ist}};  // h_t-orthonormal
  // Horizontal part.  The coefficient carries a factor t on top of the
  // displayed one: it is forced by the wedge-duality with D Omega (checked in
  // tests) and amounts to reading the displayed V_l as g-unit vectors while
  // the wedge factors stay h_t-unit.
  const Vec4& X = A.hor;
  if (dot4(X, X) > 0) {
    for (int i = 0; i < 4; ++i) {
      Vec4 Ei{};
      Ei[i] = 1.0;
      for (int l = 0; l < 2; ++l) {
        double c1 = pair6(pt, curv_on_sminus(pt, tz::sigma_cross(vbasis[l])), X, Ei);
        double c2 = pair6(pt, curv_on_sminus(pt, vbasis[l]), X, tz::k_sigma(Ei));
        double coeff = -0.5 * t * (c1 + sgn_k * c2);
        if (coeff != 0)
          out.terms.push_back({coeff, TwistorTangent::horizontal(Ei),
                               {{}, vbasis[l]}});
      }
    }
  }
  // vertical part
  const Vec3& U = A.ver;
  if (dot3(U, U) > 0) {
    Vec6 rxu = curv_on_sminus(pt, tz::sigma_cross(U));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        Vec4 Ei{}, Ej{};
        Ei[i] = 1.0;
        Ej[j] = 1.0;
        double c1 = pair6(pt, rxu, Ei, Ej) -
                    pair6(pt, rxu, tz::k_sigma(Ei), tz::k_sigma(Ej));
        double c2 = tz::pair_v(U, Ei, tz::k_sigma(Ej));
        double coeff = 0.5 * t * c1 - 2.0 * c2;
        if (coeff != 0)
          out.terms.push_back({coeff, TwistorTangent::horizontal(Ei),
                               TwistorTangent::horizontal(Ej)});
      }
  }
  return out;
}

}  // namespace twistor
