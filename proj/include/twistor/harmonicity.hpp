// Harmonicity defects of the almost complex structures J_1 and J_2: the
// general horizontal-defect trace Tr_k, its closed forms on self-dual bases,
// the section-level second fundamental form, and the classifier that checks
// the numeric defects against the proved geometric characterisation.
#pragma once

#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "twistor/catalog.hpp"
#include "twistor/twistor_space.hpp"

namespace twistor {

// Tr_k(F): trace over an h_t-orthonormal basis A of
// h_t(R_Z((J_k o D_A J_k)^wedge) A, F)
inline double tr_k(const TwistorPoint& pt, int k, const TwistorTangent& F,
                   double t) {
  if (k != 1 && k != 2) throw invalid_parameter("tr_k: k must be 1 or 2");
  if (t <= 0) throw invalid_parameter("tr_k: t must be positive");
  double ist = 1.0 / std::sqrt(t);
  std::array<TwistorTangent, 6> basis{};
  for (int i = 0; i < 4; ++i) basis[i].hor[i] = 1.0;
  basis[4].ver = {0, ist, 0};
  basis[5].ver = {0, 0, ist};
  double total = 0;
  for (const auto& A : basis) {
    TwistorBivector theta = jdj_wedge(pt, k, A, t);
    for (const auto& term : theta.terms)
      total += term.coeff * rz(pt, term.a, term.b, A, F, t);
  }
  return total;
}

// Closed form for vertical F on a self-dual base:
//   Tr_k(U) = -t/4 g(B(U), B(sigma)),  k = 1, 2.
// The sign is fixed by the engine's conventions and checked exactly against
// the general trace on synthetic curvature operators with generic B and W+.
inline double tr_k_vertical_closed(const TwistorPoint& pt, int k, const Vec3& U,
                                   double t) {
  if (k != 1 && k != 2) throw invalid_parameter("tr_k_vertical_closed: bad k");
  if (!pt.dec.self_dual)
    throw not_self_dual("tr_k_vertical_closed: base is not self-dual");
  double v = 0;
  for (int r = 0; r < 3; ++r) {
    double bu = 0;
    for (int j = 0; j < 3; ++j) bu += pt.dec.Bop[r][3 + j] * U[j];
    double bs = pt.dec.Bop[r][3];  // B(sigma), sigma = s1^-
    v += bu * bs;
  }
  return -0.25 * t * v;
}

// Closed form for horizontal F on a self-dual base:
//   Tr_k(X^h) = 1/12 (ts/6 - 2) X(s) + t/4 (Q1 + (-1)^k Q2)
// with the two curvature contractions, in the sigma-adapted frame,
//   Q1 = sum_{i,j} sum_{m=2,3} g(R(s_m), E_j ^ E_i)
//                              g((nabla_{E_i} R)(E_j ^ X), s_m)
//   Q2 = sum_{i,j} [ g(R(s_2), E_j ^ K_sigma E_i)
//                    g((nabla_{E_i} R)(E_j ^ X), s_3)
//                  - g(R(s_3), E_j ^ K_sigma E_i)
//                    g((nabla_{E_i} R)(E_j ^ X), s_2) ].
// Q1 reduces to s X(s)/36 + 1/2 sum_m g((nabla_X B)(s_m), B(s_m)) by the
// algebraic Bianchi identity; Q2 has no such reduction in general.
inline double tr_k_horizontal_closed(const TwistorPoint& pt, int k,
                                     const Vec4& X, double t) {
  if (k != 1 && k != 2) throw invalid_parameter("tr_k_horizontal_closed: bad k");
  if (!pt.dec.self_dual)
    throw not_self_dual("tr_k_horizontal_closed: base is not self-dual");
  double sgn_k = (k == 1) ? -1.0 : 1.0;
  double Xs = dot4(X, pt.ric.ds);
  Vec6 r2 = curv_on_sminus(pt, {0, 1, 0});
  Vec6 r3 = curv_on_sminus(pt, {0, 0, 1});
  double q1 = 0, q2 = 0;
  for (int i = 0; i < 4; ++i) {
    Vec4 Ei{}, Di{};
    Ei[i] = 1.0;
    Di[i] = 1.0;
    Vec4 kei = tz::k_sigma(Ei);
    for (int j = 0; j < 4; ++j) {
      Vec4 Ej{};
      Ej[j] = 1.0;
      double n2 = nabla_pair(pt, Di, Ej, X, {0, 1, 0});
      double n3 = nabla_pair(pt, Di, Ej, X, {0, 0, 1});
      q1 += pair6(pt, r2, Ej, Ei) * n2 + pair6(pt, r3, Ej, Ei) * n3;
      q2 += pair6(pt, r2, Ej, kei) * n3 - pair6(pt, r3, Ej, kei) * n2;
    }
  }
  return (t * pt.ric.s / 6.0 - 2.0) / 12.0 * Xs +
         0.25 * t * (q1 + sgn_k * q2);
}

// Residual frame sum of the horizontal-trace computation.  Vanishes for
// every adapted frame on the self-dual catalog geometries; B with distinct
// singular values can make it nonzero on other self-dual bases.
inline double sigma_sum(const TwistorPoint& pt, const Vec4& X, double t) {
  double ist = 1.0 / std::sqrt(t);
  TwistorTangent Vl[2];
  Vl[0].ver = {0, ist, 0};
  Vl[1].ver = {0, 0, ist};
  TwistorTangent Xh = TwistorTangent::horizontal(X);
  auto C = [&](int i, int l, int j) {
    TwistorTangent Ei{}, Ej{};
    Ei.hor[i - 1] = 1.0;
    Ej.hor[j - 1] = 1.0;
    return rz(pt, Ei, Vl[l - 1], Ej, Xh, t);
  };
  SBasis sb = s_bases();
  double total = 0;
  for (int l = 1; l <= 2; ++l) {
    Bivector bv = b_apply(pt.ric, {tz::sminus_to_wedge(Vl[l - 1].ver), nullptr});
    double b1 = lambda2_inner(bv, sb.plus[0]);
    double b2 = lambda2_inner(bv, sb.plus[1]);
    double b3 = lambda2_inner(bv, sb.plus[2]);
    total += b1 * (C(1, l, 1) + C(2, l, 2) - C(3, l, 3) - C(4, l, 4));
    total += b2 * (C(1, l, 4) + C(2, l, 3) + C(3, l, 2) + C(4, l, 1));
    total += b3 * (-C(1, l, 3) + C(2, l, 4) - C(3, l, 1) + C(4, l, 2));
  }
  return total;
}

// --- Ricci eigenvalue structure ---

struct EigenStructure {
  EigenPattern pattern = EigenPattern::other;
  double simple = 0;  // the simple eigenvalue, for triple_simple
  double triple = 0;  // the triple eigenvalue
  bool simple_zero = false;
};

inline EigenStructure eigen_structure(const RicciData& ric, double tol) {
  EigenStructure es;
  const Vec4& l = ric.eigenvalues;  // ascending
  if (l[3] - l[0] < tol) {
    es.pattern = EigenPattern::einstein;
    return es;
  }
  if (l[3] - l[1] < tol && l[1] - l[0] >= tol) {
    es.pattern = EigenPattern::triple_simple;
    es.simple = l[0];
    es.triple = (l[1] + l[2] + l[3]) / 3.0;
  } else if (l[2] - l[0] < tol && l[3] - l[2] >= tol) {
    es.pattern = EigenPattern::triple_simple;
    es.simple = l[3];
    es.triple = (l[0] + l[1] + l[2]) / 3.0;
  } else {
    es.pattern = EigenPattern::other;
    return es;
  }
  es.simple_zero = std::fabs(es.simple) < tol;
  return es;
}

// --- sections of the negative twistor space ---

// A section is given by its coefficients in the s^-(x) basis of the
// Gram-Schmidt frame field, with order-2 jets; it must be unit.
using SectionFn = std::function<std::array<Jet3, 3>(const Point4&)>;

struct SectionDefect {
  Bivector vertical;   // V Trace nabla^2 J, Gram-Schmidt frame components
  Vec4 horizontal{};   // frame components of the horizontal trace term
};

inline SectionDefect section_defect(const MetricSpec& spec, const SectionFn& J,
                                    const Point4& p, double t) {
  if (t <= 0) throw invalid_parameter("section_defect: t must be positive");
  GeomPoint gp = geom_at(spec, p);
  std::array<Jet3, 3> c = J(p);
  {
    Jet3 n2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    if (std::fabs(n2.v - 1.0) > 1e-8)
      throw invalid_parameter("section_defect: section is not unit length");
  }
  // s_i^-(x) as jets of coordinate wedge components
  auto wedge_jet = [&](const std::array<Jet3, 4>& u,
                       const std::array<Jet3, 4>& w) {
    std::array<Jet3, 6> r{};
    for (int q = 0; q < 6; ++q) {
      int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
      r[q] = u[i] * w[j] - u[j] * w[i];
    }
    return r;
  };
  const auto& E = gp.frame.Ejet;
  std::array<std::array<Jet3, 6>, 3> smj;
  auto sub = [](std::array<Jet3, 6> a, const std::array<Jet3, 6>& b) {
    for (int q = 0; q < 6; ++q) a[q] = a[q] - b[q];
    return a;
  };
  smj[0] = sub(wedge_jet(E[0], E[1]), wedge_jet(E[2], E[3]));
  smj[1] = sub(wedge_jet(E[0], E[2]), wedge_jet(E[3], E[1]));
  smj[2] = sub(wedge_jet(E[0], E[3]), wedge_jet(E[1], E[2]));
  std::array<Jet3, 6> jj{};
  for (int q = 0; q < 6; ++q)
    jj[q] = c[0] * smj[0][q] + c[1] * smj[1][q] + c[2] * smj[2][q];
  // first covariant derivative, coordinate components, with one more
  // derivative order retained for the second pass
  const auto& G = gp.chris.gamma;
  const auto& dG = gp.chris.dgamma;
  auto anti = [&](const std::array<double, 6>& b, int i, int j) -> double {
    if (i == j) return 0;
    int lo = std::min(i, j), hi = std::max(i, j);
    for (int q = 0; q < 6; ++q)
      if (kWedgeIdx[q][0] == lo && kWedgeIdx[q][1] == hi)
        return i < j ? b[q] : -b[q];
    return 0;
  };
  std::array<double, 6> jval{};
  std::array<std::array<double, 6>, 4> jgrad{};
  std::array<std::array<std::array<double, 6>, 4>, 4> jhess{};
  for (int q = 0; q < 6; ++q) {
    jval[q] = jj[q].v;
    for (int m = 0; m < 4; ++m) {
      jgrad[m][q] = jj[q].g[m];
      for (int n = 0; n < 4; ++n) jhess[m][n][q] = jj[q].h[m][n];
    }
  }
  auto gamma_act = [&](int m, const std::array<double, 6>& b) {
    std::array<double, 6> r{};
    for (int q = 0; q < 6; ++q) {
      int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
      for (int kk = 0; kk < 4; ++kk)
        r[q] += G[i][m][kk] * anti(b, kk, j) + G[j][m][kk] * anti(b, i, kk);
    }
    return r;
  };
  std::array<std::array<double, 6>, 4> cov1{};
  for (int m = 0; m < 4; ++m) {
    auto ga = gamma_act(m, jval);
    for (int q = 0; q < 6; ++q) cov1[m][q] = jgrad[m][q] + ga[q];
  }
  // d_n (cov1[m]) needs d_n Gamma and the Hessian of J
  auto dcov1 = [&](int n, int m) {
    std::array<double, 6> r{};
    auto ga = gamma_act(m, jgrad[n]);
    for (int q = 0; q < 6; ++q) {
      int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
      double v = jhess[n][m][q] + ga[q];
      for (int kk = 0; kk < 4; ++kk)
        v += dG[n][i][m][kk] * anti(jval, kk, j) +
             dG[n][j][m][kk] * anti(jval, i, kk);
      r[q] = v;
    }
    return r;
  };
  // Trace_g nabla^2 J = g^{mn} [ d_m(cov1[n]) + Gamma_m-action(cov1[n])
  //                              - Gamma^q_{mn} cov1[q] ]
  std::array<double, 6> trace{};
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      if (gp.ginv[m][n] == 0) continue;
      auto d1 = dcov1(m, n);
      auto ga = gamma_act(m, cov1[n]);
      for (int q = 0; q < 6; ++q) {
        double v = d1[q] + ga[q];
        for (int r2 = 0; r2 < 4; ++r2) v -= G[r2][m][n] * cov1[r2][q];
        trace[q] += gp.ginv[m][n] * v;
      }
    }
  // convert coordinate wedge components to frame components
  auto to_frame = [&](const std::array<double, 6>& b) {
    Bivector r;
    r.frame = nullptr;
    for (int q = 0; q < 6; ++q) {
      int a = kWedgeIdx[q][0], bq = kWedgeIdx[q][1];
      double v = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          v += gp.frame.coframe[a][i] * gp.frame.coframe[bq][j] * anti(b, i, j);
      r.c[q] = v;
    }
    return r;
  };
  SectionDefect out;
  Bivector tr_f = to_frame(trace);
  // vertical part: ASD component orthogonal to J
  Vec3 tr_s = to_sminus(tr_f);
  Vec3 jv{c[0].v, c[1].v, c[2].v};
  double along = dot3(tr_s, jv);
  for (int i = 0; i < 3; ++i) tr_s[i] -= along * jv[i];
  out.vertical = from_sminus(tr_s);
  // horizontal part: t * sum_a R(J x nabla_{E_a} J) E_a
  for (int a = 0; a < 4; ++a) {
    std::array<double, 6> covA{};
    for (int m = 0; m < 4; ++m)
      for (int q = 0; q < 6; ++q) covA[q] += gp.frame.E[a][m] * cov1[m][q];
    Vec3 nja = to_sminus(to_frame(covA));
    Vec3 cx = cross3(jv, nja);
    // R(c) endomorphism over the Gram-Schmidt frame
    Vec6 cw = tz::sminus_to_wedge(cx);
    for (int q = 0; q < 6; ++q) {
      if (cw[q] == 0) continue;
      int i = kWedgeIdx[q][0], j = kWedgeIdx[q][1];
      for (int m = 0; m < 4; ++m) out.horizontal[m] += t * cw[q] * gp.Rf[i][j][a][m];
    }
  }
  return out;
}

// --- classifier ---

enum class Verdict { harmonic_map, harmonic_section_only, neither, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::harmonic_map: return "harmonic_map";
    case Verdict::harmonic_section_only: return "harmonic_section_only";
    case Verdict::neither: return "neither";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct PointReport {
  Point4 point{};
  double s = 0, norm_B = 0, norm_Wminus = 0, norm_Wplus = 0, ds_norm = 0;
  Vec4 eigenvalues{};
  EigenStructure eigen;
  double nrho_norm = 0;
  double tr_max[2] = {0, 0};             // index 0 -> k=1
  double closedform_residual[2] = {-1, -1};  // -1 when skipped (not self-dual)
  double wood_defect[2] = {-1, -1};      // optional, filled from the oracle
};

struct SamplePlan {
  int base_points = 8;
  int fiber_points = 4;
  std::uint64_t seed = 1;
};

struct Tolerances {
  double zero_tol = 1e-6;
  double nonzero_floor = 1e-3;
};

struct ClassifyResult {
  std::vector<PointReport> points;
  Verdict verdict[2] = {Verdict::inconclusive, Verdict::inconclusive};
  bool theorem_consistency = true;
  std::string note;
};

// Two-sided verdict logic: values below zero_tol count as zero, values above
// nonzero_floor as nonzero, anything in the gap is inconclusive.
inline std::array<Verdict, 2> verdicts_from(double norm_Wminus, double ds_norm,
                                            double tr1, double tr2,
                                            const Tolerances& tol) {
  auto zero_claim = [&](double v) -> std::optional<bool> {
    if (v < tol.zero_tol) return true;
    if (v > tol.nonzero_floor) return false;
    return std::nullopt;
  };
  std::array<Verdict, 2> out{};
  double trs[2] = {tr1, tr2};
  for (int k = 1; k <= 2; ++k) {
    std::optional<bool> section_ok = zero_claim(norm_Wminus);
    if (k == 2 && section_ok.has_value() && *section_ok) {
      auto cs = zero_claim(ds_norm);
      if (!cs.has_value()) section_ok = std::nullopt;
      else if (!*cs) section_ok = false;
    }
    std::optional<bool> map_ok = zero_claim(trs[k - 1]);
    Verdict v;
    if (!section_ok.has_value() || (*section_ok && !map_ok.has_value()))
      v = Verdict::inconclusive;
    else if (!*section_ok)
      v = Verdict::neither;
    else if (*map_ok)
      v = Verdict::harmonic_map;
    else
      v = Verdict::harmonic_section_only;
    out[k - 1] = v;
  }
  return out;
}

namespace detail {

inline std::array<Vec3, 4> fiber_directions(Rng& rng) {
  // regular tetrahedron vertices, randomly rotated
  const double q = 1.0 / std::sqrt(3.0);
  std::array<Vec3, 4> verts = {Vec3{q, q, q}, Vec3{q, -q, -q}, Vec3{-q, q, -q},
                               Vec3{-q, -q, q}};
  // random rotation from two unit vectors
  Vec3 a{rng.sym(), rng.sym(), rng.sym()};
  double na = std::sqrt(dot3(a, a));
  if (na < 1e-6) a = {1, 0, 0};
  else for (double& v : a) v /= na;
  Vec3 b{rng.sym(), rng.sym(), rng.sym()};
  double ab = dot3(a, b);
  for (int i = 0; i < 3; ++i) b[i] -= ab * a[i];
  double nb = std::sqrt(dot3(b, b));
  if (nb < 1e-6) b = {0, 1, 0};
  else for (double& v : b) v /= nb;
  Vec3 cvec = cross3(a, b);
  std::array<Vec3, 4> out{};
  for (int v = 0; v < 4; ++v)
    for (int i = 0; i < 3; ++i)
      out[v][i] = verts[v][0] * a[i] + verts[v][1] * b[i] + verts[v][2] * cvec[i];
  return out;
}

}  // namespace detail

inline ClassifyResult classify(const CatalogEntry& entry,
                               const std::vector<double>& ts,
                               const SamplePlan& plan, const Tolerances& tol) {
  if (plan.base_points < 1 || plan.fiber_points < 1)
    throw invalid_parameter("classify: sample plan must be nonempty");
  for (double t : ts)
    if (t <= 0) throw invalid_parameter("classify: t must be positive");
  ClassifyResult res;
  Rng rng(plan.seed);
  double worst_W = 0, worst_B = 0, worst_ds = 0, worst_tr[2] = {0, 0};
  double worst_lambda = 0, worst_nrho = 0;
  bool all_triple_or_einstein = true, any_other = false;
  // sample plan drawn up front so the parallel map is deterministic
  std::vector<Point4> points(plan.base_points);
  std::vector<std::array<Vec3, 4>> sigma_sets(plan.base_points);
  for (int ip = 0; ip < plan.base_points; ++ip) {
    Vec4 h = halton4(static_cast<std::uint64_t>(ip) + plan.seed);
    for (int i = 0; i < 4; ++i)
      points[ip][i] = entry.sample_box[i] * (2.0 * h[i] - 1.0);
    sigma_sets[ip] = detail::fiber_directions(rng);
  }
  auto eval_point = [&](int ip) {
    const Point4& p = points[ip];
    PointReport pr;
    pr.point = p;
    GeomPoint gp = geom_at(entry.spec, p);
    auto dec = decompose(curv_op(gp.Rf, &gp.frame), gp.ric, &gp.frame);
    pr.s = dec.s;
    pr.norm_B = dec.norm_B;
    pr.norm_Wminus = dec.norm_Wminus;
    pr.norm_Wplus = dec.norm_Wplus;
    pr.ds_norm = norm2(gp.ric.ds);
    pr.eigenvalues = gp.ric.eigenvalues;
    pr.eigen = eigen_structure(gp.ric, tol.zero_tol * 10 + 1e-9);
    double nr = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c2 = 0; c2 < 4; ++c2)
          nr += gp.ric.nrho[a][b][c2] * gp.ric.nrho[a][b][c2];
    pr.nrho_norm = std::sqrt(nr);
    for (int fs = 0; fs < plan.fiber_points; ++fs) {
      Vec3 sigma = sigma_sets[ip][fs % 4];
      TwistorPoint pt = make_twistor_point(entry.spec, p, sigma);
      for (double t : ts) {
        std::array<TwistorTangent, 6> dirs{};
        for (int i = 0; i < 4; ++i) dirs[i].hor[i] = 1.0;
        dirs[4].ver = {0, 1, 0};
        dirs[5].ver = {0, 0, 1};
        for (int k = 1; k <= 2; ++k) {
          for (const auto& F : dirs) {
            double v = std::fabs(tr_k(pt, k, F, t));
            pr.tr_max[k - 1] = std::max(pr.tr_max[k - 1], v);
          }
          if (pt.dec.self_dual) {
            double rv = std::fabs(tr_k(pt, k, dirs[4], t) -
                                  tr_k_vertical_closed(pt, k, dirs[4].ver, t));
            double rh = std::fabs(tr_k(pt, k, dirs[0], t) -
                                  tr_k_horizontal_closed(pt, k, dirs[0].hor, t));
            pr.closedform_residual[k - 1] =
                std::max({pr.closedform_residual[k - 1], rv, rh});
          }
        }
      }
    }
    return pr;
  };
  std::vector<std::future<PointReport>> jobs;
  jobs.reserve(plan.base_points);
  for (int ip = 0; ip < plan.base_points; ++ip)
    jobs.push_back(std::async(std::launch::async, eval_point, ip));
  for (int ip = 0; ip < plan.base_points; ++ip) {
    PointReport pr = jobs[ip].get();
    worst_W = std::max(worst_W, pr.norm_Wminus);
    worst_B = std::max(worst_B, pr.norm_B);
    worst_ds = std::max(worst_ds, pr.ds_norm);
    worst_nrho = std::max(worst_nrho, pr.nrho_norm);
    for (int k = 0; k < 2; ++k)
      worst_tr[k] = std::max(worst_tr[k], pr.tr_max[k]);
    if (pr.eigen.pattern == EigenPattern::other) any_other = true;
    if (pr.eigen.pattern == EigenPattern::triple_simple)
      worst_lambda = std::max(worst_lambda, std::fabs(pr.eigen.simple));
    if (pr.eigen.pattern != EigenPattern::einstein &&
        pr.eigen.pattern != EigenPattern::triple_simple)
      all_triple_or_einstein = false;
    res.points.push_back(pr);
  }
  auto vs = verdicts_from(worst_W, worst_ds, worst_tr[0], worst_tr[1], tol);
  res.verdict[0] = vs[0];
  res.verdict[1] = vs[1];
  auto zero_claim = [&](double v) -> std::optional<bool> {
    if (v < tol.zero_tol) return true;
    if (v > tol.nonzero_floor) return false;
    return std::nullopt;  // gap
  };
  // geometric side of the classification: self-dual and Einstein, or
  // self-dual with parallel Ricci of spectrum (0, mu, mu, mu)
  std::optional<bool> sd = zero_claim(worst_W);
  std::optional<bool> ein = zero_claim(worst_B);
  std::optional<bool> rp = zero_claim(worst_nrho);
  if (sd.has_value() && ein.has_value() && rp.has_value() && !any_other) {
    bool product_branch = !*ein && *rp && all_triple_or_einstein &&
                          worst_lambda < tol.zero_tol * 10 + 1e-9;
    bool geo = *sd && (*ein || product_branch);
    for (int k = 0; k < 2; ++k) {
      if (res.verdict[k] == Verdict::inconclusive) continue;
      bool map_verdict = res.verdict[k] == Verdict::harmonic_map;
      if (map_verdict != geo) {
        res.theorem_consistency = false;
        res.note = "numeric defects disagree with the geometric classification";
        throw theorem_violation("classify(" + entry.spec.name + "): " + res.note);
      }
    }
  }
  return res;
}

}  // namespace twistor
