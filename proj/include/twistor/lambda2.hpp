// Algebra of 2-vectors over an oriented orthonormal frame: the factor-1/2
// metric, Hodge star, s-bases of the (anti-)self-dual halves, the K_a
// endomorphisms, the Lambda^2_- cross product, the curvature operator and its
// decomposition R = s/6 Id + B + W+ + W-.
//
// Components are stored in the frame wedge basis {E_i ^ E_j : i < j}, ordered
// (01,02,03,12,13,23), with the explicit 1/2 Gram factor in inner products.
// Pitfall: expanding the curvature operator in this basis requires
// c_kl = 2 R_ijkl, forced by the factor-1/2 metric.
#pragma once

#include "twistor/riemann.hpp"

namespace twistor {

inline constexpr int kWedgeIdx[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                        {1, 2}, {1, 3}, {2, 3}};

struct Bivector {
  Vec6 c{};  // components on {E_i ^ E_j : i < j}
  const OrthoFrame4* frame = nullptr;
};

namespace detail {
inline void check_same_frame(const Bivector& a, const Bivector& b) {
  if (a.frame && b.frame && a.frame != b.frame)
    throw frame_mismatch("bivectors attached to different frames");
}
}  // namespace detail

inline Bivector wedge(const Vec4& X, const Vec4& Y,
                      const OrthoFrame4* frame = nullptr) {
  Bivector r;
  r.frame = frame;
  for (int p = 0; p < 6; ++p) {
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    r.c[p] = X[i] * Y[j] - X[j] * Y[i];
  }
  return r;
}

inline double lambda2_inner(const Bivector& a, const Bivector& b) {
  detail::check_same_frame(a, b);
  return 0.5 * (a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2] +
                a.c[3] * b.c[3] + a.c[4] * b.c[4] + a.c[5] * b.c[5]);
}

inline Bivector operator+(const Bivector& a, const Bivector& b) {
  detail::check_same_frame(a, b);
  Bivector r;
  r.frame = a.frame ? a.frame : b.frame;
  for (int p = 0; p < 6; ++p) r.c[p] = a.c[p] + b.c[p];
  return r;
}

inline Bivector operator-(const Bivector& a, const Bivector& b) {
  detail::check_same_frame(a, b);
  Bivector r;
  r.frame = a.frame ? a.frame : b.frame;
  for (int p = 0; p < 6; ++p) r.c[p] = a.c[p] - b.c[p];
  return r;
}

inline Bivector operator*(double t, const Bivector& a) {
  Bivector r = a;
  for (int p = 0; p < 6; ++p) r.c[p] = t * a.c[p];
  return r;
}

inline Bivector hodge_star(const Bivector& a) {
  Bivector r;
  r.frame = a.frame;
  r.c = {a.c[5], -a.c[4], a.c[3], a.c[2], -a.c[1], a.c[0]};
  return r;
}

// s_1^pm = e1^e2 pm e3^e4, s_2^pm = e1^e3 pm e4^e2, s_3^pm = e1^e4 pm e2^e3
struct SBasis {
  std::array<Bivector, 3> plus;
  std::array<Bivector, 3> minus;
};

inline SBasis s_bases(const OrthoFrame4* frame = nullptr) {
  SBasis s;
  auto mk = [&](Vec6 c) {
    Bivector b;
    b.c = c;
    b.frame = frame;
    return b;
  };
  s.plus[0] = mk({1, 0, 0, 0, 0, 1});
  s.plus[1] = mk({0, 1, 0, 0, -1, 0});
  s.plus[2] = mk({0, 0, 1, 1, 0, 0});
  s.minus[0] = mk({1, 0, 0, 0, 0, -1});
  s.minus[1] = mk({0, 1, 0, 0, 1, 0});
  s.minus[2] = mk({0, 0, 1, -1, 0, 0});
  return s;
}

// anti-self-dual coordinates: a = sum_i v[i] s_i^-
inline Vec3 to_sminus(const Bivector& a) {
  SBasis s = s_bases(a.frame);
  return {lambda2_inner(a, s.minus[0]), lambda2_inner(a, s.minus[1]),
          lambda2_inner(a, s.minus[2])};
}

inline Vec3 to_splus(const Bivector& a) {
  SBasis s = s_bases(a.frame);
  return {lambda2_inner(a, s.plus[0]), lambda2_inner(a, s.plus[1]),
          lambda2_inner(a, s.plus[2])};
}

inline Bivector from_sminus(const Vec3& v, const OrthoFrame4* frame = nullptr) {
  SBasis s = s_bases(frame);
  Bivector r = v[0] * s.minus[0] + v[1] * s.minus[1] + v[2] * s.minus[2];
  r.frame = frame;
  return r;
}

// K_a: the skew endomorphism with g(K_a X, Y) = 2 g(a, X ^ Y); returned as a
// frame matrix K[j][i] so that (K_a X)^j = sum_i K[j][i] X^i.
inline Mat4 k_endo(const Bivector& a) {
  Mat4 k{};
  for (int p = 0; p < 6; ++p) {
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    k[j][i] = a.c[p];
    k[i][j] = -a.c[p];
  }
  return k;
}

inline Vec4 apply_endo(const Mat4& m, const Vec4& x) {
  Vec4 r{};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) r[j] += m[j][i] * x[i];
  return r;
}

inline Bivector wedge_from_endo(const Mat4& m,
                                const OrthoFrame4* frame = nullptr) {
  Bivector r;
  r.frame = frame;
  for (int p = 0; p < 6; ++p) {
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    r.c[p] = m[j][i];
  }
  return r;
}

// cross product on Lambda^2_- with its canonical orientation,
// s_1^- x s_2^- = s_3^- and cyclic
inline Bivector cross_minus(const Bivector& a, const Bivector& b) {
  detail::check_same_frame(a, b);
  Bivector sa = hodge_star(a), sb = hodge_star(b);
  double na = std::sqrt(lambda2_inner(a, a)), nb = std::sqrt(lambda2_inner(b, b));
  for (int p = 0; p < 6; ++p) {
    if (std::fabs(sa.c[p] + a.c[p]) > 1e-8 * (na + 1.0) ||
        std::fabs(sb.c[p] + b.c[p]) > 1e-8 * (nb + 1.0))
      throw numeric_error("cross_minus: argument not anti-self-dual");
  }
  Vec3 va = to_sminus(a), vb = to_sminus(b);
  return from_sminus(cross3(va, vb), a.frame ? a.frame : b.frame);
}

// g(R(a), b) for bivectors over the frame of Rf
inline double pair_curv(const Ten4& Rf, const Bivector& a, const Bivector& b) {
  double v = 0;
  for (int p = 0; p < 6; ++p) {
    if (a.c[p] == 0) continue;
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    for (int q = 0; q < 6; ++q) {
      int k = kWedgeIdx[q][0], l = kWedgeIdx[q][1];
      v += a.c[p] * b.c[q] * Rf[i][j][k][l];
    }
  }
  return v;
}

// R(a) as a bivector; component expansion uses c_kl = 2 R_ijkl
inline Bivector curv_apply(const Ten4& Rf, const Bivector& a) {
  Bivector r;
  r.frame = a.frame;
  for (int q = 0; q < 6; ++q) {
    int k = kWedgeIdx[q][0], l = kWedgeIdx[q][1];
    double v = 0;
    for (int p = 0; p < 6; ++p) {
      int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
      v += a.c[p] * Rf[i][j][k][l];
    }
    r.c[q] = 2.0 * v;
  }
  return r;
}

// self-adjoint 6x6 matrix in the ordered basis (s1+, s2+, s3+, s1-, s2-, s3-)
struct CurvOp {
  Mat6 mat{};
};

struct CurvDecomp {
  double s = 0;
  Mat6 Bop{};     // traceless-Ricci block, exchanges the two halves
  std::array<std::array<double, 3>, 3> Wplus{}, Wminus{};
  double norm_B = 0, norm_Wplus = 0, norm_Wminus = 0;
  bool einstein = false, self_dual = false;
};

inline CurvOp curv_op(const Ten4& Rf, const OrthoFrame4* frame = nullptr) {
  SBasis s = s_bases(frame);
  const Bivector* basis[6] = {&s.plus[0], &s.plus[1],  &s.plus[2],
                              &s.minus[0], &s.minus[1], &s.minus[2]};
  CurvOp op;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) op.mat[a][b] = pair_curv(Rf, *basis[a], *basis[b]);
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      if (std::fabs(op.mat[a][b] - op.mat[b][a]) > 1e-9 * (1.0 + std::fabs(op.mat[a][b])))
        throw numeric_error("curv_op: operator not self-adjoint");
  return op;
}

// B(X^Y) = rho(X)^Y + X^rho(Y) - s/2 X^Y extended over wedge components
inline Bivector b_apply(const RicciData& ric, const Bivector& a) {
  Bivector r;
  r.frame = a.frame;
  for (int p = 0; p < 6; ++p) {
    if (a.c[p] == 0) continue;
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    for (int m = 0; m < 4; ++m) {
      Vec4 em{};
      em[m] = 1.0;
      Vec4 ei{}, ej{};
      ei[i] = 1.0;
      ej[j] = 1.0;
      Bivector t1 = wedge(em, ej, a.frame);
      Bivector t2 = wedge(ei, em, a.frame);
      for (int q = 0; q < 6; ++q)
        r.c[q] += a.c[p] * (ric.rho[i][m] * t1.c[q] + ric.rho[j][m] * t2.c[q]);
    }
    r.c[p] -= a.c[p] * 0.5 * ric.s;
  }
  return r;
}

template <std::size_t N>
double frob(const std::array<std::array<double, N>, N>& m) {
  double v = 0;
  for (auto& row : m)
    for (double x : row) v += x * x;
  return std::sqrt(v);
}

inline CurvDecomp decompose(const CurvOp& op, const RicciData& ric,
                            const OrthoFrame4* frame = nullptr,
                            double tol = 1e-7) {
  CurvDecomp d;
  d.s = ric.s;
  SBasis s = s_bases(frame);
  const Bivector* basis[6] = {&s.plus[0], &s.plus[1],  &s.plus[2],
                              &s.minus[0], &s.minus[1], &s.minus[2]};
  for (int col = 0; col < 6; ++col) {
    Bivector img = b_apply(ric, *basis[col]);
    for (int row = 0; row < 6; ++row)
      d.Bop[row][col] = lambda2_inner(img, *basis[row]);
  }
  Mat6 W{};
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      W[r][c] = op.mat[r][c] - d.Bop[r][c];
      if (r == c) W[r][c] -= d.s / 6.0;
    }
  // the residual must commute with the star (block-diagonal) and be
  // traceless on each half; failure means an upstream convention bug
  double off = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 3; c < 6; ++c) off += W[r][c] * W[r][c] + W[c][r] * W[c][r];
  off = std::sqrt(off);
  double trp = W[0][0] + W[1][1] + W[2][2];
  double trm = W[3][3] + W[4][4] + W[5][5];
  if (off > tol || std::fabs(trp) > tol || std::fabs(trm) > tol)
    throw convention_error("decompose: Weyl residual fails star-commutation or trace check");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      d.Wplus[r][c] = W[r][c];
      d.Wminus[r][c] = W[3 + r][3 + c];
    }
  d.norm_B = frob(d.Bop);
  d.norm_Wplus = frob(d.Wplus);
  d.norm_Wminus = frob(d.Wminus);
  d.einstein = d.norm_B < tol;
  d.self_dual = d.norm_Wminus < tol;
  return d;
}

// delta B(X) = delta rho ^ X - sum_m [E_m ^ (nabla_{E_m} rho)(X)
//                                     - 1/2 E_m(s) E_m ^ X]
inline Bivector delta_B(const RicciData& ric, const Vec4& X,
                        const OrthoFrame4* frame = nullptr) {
  Vec4 drho{};  // delta rho = -sum_m (nabla_{E_m} rho)(E_m)
  for (int a = 0; a < 4; ++a) {
    double v = 0;
    for (int m = 0; m < 4; ++m) v += ric.nrho[m][m][a];
    drho[a] = -v;
  }
  Bivector r = wedge(drho, X, frame);
  for (int m = 0; m < 4; ++m) {
    Vec4 em{};
    em[m] = 1.0;
    Vec4 nrx{};  // (nabla_{E_m} rho)(X)
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) nrx[b] += ric.nrho[m][a][b] * X[a];
    Bivector t = wedge(em, nrx, frame);
    Bivector u = wedge(em, X, frame);
    for (int q = 0; q < 6; ++q)
      r.c[q] -= t.c[q] - 0.5 * ric.ds[m] * u.c[q];
  }
  return r;
}

// (nabla_X B)(a) from nabla rho and ds
inline Bivector nabla_B(const RicciData& ric, const Vec4& X, const Bivector& a) {
  Bivector r;
  r.frame = a.frame;
  double Xs = dot4(X, ric.ds);
  Mat4 nrho_X{};  // (nabla_X rho)[i][j]
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int c = 0; c < 4; ++c) nrho_X[i][j] += X[c] * ric.nrho[c][i][j];
  for (int p = 0; p < 6; ++p) {
    if (a.c[p] == 0) continue;
    int i = kWedgeIdx[p][0], j = kWedgeIdx[p][1];
    for (int m = 0; m < 4; ++m) {
      Vec4 em{}, ei{}, ej{};
      em[m] = 1.0;
      ei[i] = 1.0;
      ej[j] = 1.0;
      Bivector t1 = wedge(em, ej, a.frame);
      Bivector t2 = wedge(ei, em, a.frame);
      for (int q = 0; q < 6; ++q)
        r.c[q] += a.c[p] * (nrho_X[i][m] * t1.c[q] + nrho_X[j][m] * t2.c[q]);
    }
    r.c[p] -= a.c[p] * 0.5 * Xs;
  }
  return r;
}

}  // namespace twistor
