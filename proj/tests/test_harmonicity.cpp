#include "doctest.h"
#include "twistor/harmonicity.hpp"

using namespace twistor;

namespace {

Vec3 random_sigma(Rng& rng) {
  Vec3 s{rng.sym(), rng.sym(), rng.sym()};
  double n = std::sqrt(dot3(s, s));
  if (n < 1e-3) return {1, 0, 0};
  for (double& v : s) v /= n;
  return s;
}

TwistorTangent random_tangent(Rng& rng) {
  TwistorTangent a;
  for (int i = 0; i < 4; ++i) a.hor[i] = rng.sym();
  a.ver = {0.0, rng.sym(), rng.sym()};
  return a;
}

}  // namespace

TEST_SUITE("harmonicity") {

TEST_CASE("general trace vanishes on flat space and harmonic-map geometries") {
  Rng rng(3);
  for (const char* name : {"flat", "s4", "cp2", "r_x_s3"}) {
    CAPTURE(name);
    auto e = get_metric(name);
    double worst = 0;
    for (int trial = 0; trial < 4; ++trial) {
      Point4 p{};
      for (int i = 0; i < 4; ++i) p[i] = 0.6 * e.sample_box[i] * rng.sym();
      auto pt = make_twistor_point(e.spec, p, random_sigma(rng));
      for (int k = 1; k <= 2; ++k)
        for (double t : {0.5, 1.0, 2.0})
          worst = std::max(worst, std::fabs(tr_k(pt, k, random_tangent(rng), t)));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("general trace is nonzero on the non-self-dual product") {
  Rng rng(5);
  auto e = get_metric("s2_x_s2");
  double worst = 0;
  for (int trial = 0; trial < 6; ++trial) {
    Point4 p{};
    for (int i = 0; i < 4; ++i) p[i] = 0.6 * e.sample_box[i] * rng.sym();
    auto pt = make_twistor_point(e.spec, p, random_sigma(rng));
    for (int k = 1; k <= 2; ++k)
      worst = std::max(worst, std::fabs(tr_k(pt, k, random_tangent(rng), 1.0)));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("linearity of the trace in its argument") {
  Rng rng(7);
  auto pt = make_twistor_point(get_metric("s2_x_s2").spec, {0.2, 0.1, -0.3, 0.15},
                               random_sigma(rng));
  for (int k = 1; k <= 2; ++k)
    for (int trial = 0; trial < 10; ++trial) {
      TwistorTangent F = random_tangent(rng), G = random_tangent(rng);
      double a = rng.sym(), b = rng.sym();
      double lhs = tr_k(pt, k, a * F + b * G, 1.3);
      double rhs = a * tr_k(pt, k, F, 1.3) + b * tr_k(pt, k, G, 1.3);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("closed-form cross-validation on every self-dual catalog metric") {
  Rng rng(11);
  for (const char* name : {"flat", "s4", "h4", "cp2", "r_x_s3", "conformal_flat_exp"}) {
    CAPTURE(name);
    auto e = get_metric(name);
    double worst_v = 0, worst_h = 0;
    for (int trial = 0; trial < 32; ++trial) {
      Point4 p{};
      for (int i = 0; i < 4; ++i) p[i] = 0.7 * e.sample_box[i] * rng.sym();
      auto pt = make_twistor_point(e.spec, p, random_sigma(rng));
      double t = 0.5 + 2.0 * rng.uniform();
      int k = 1 + static_cast<int>(rng.next() % 2);
      Vec3 U{0, rng.sym(), rng.sym()};
      TwistorTangent Ut;
      Ut.ver = U;
      worst_v = std::max(worst_v, std::fabs(tr_k(pt, k, Ut, t) -
                                            tr_k_vertical_closed(pt, k, U, t)));
      Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
      worst_h = std::max(
          worst_h, std::fabs(tr_k(pt, k, TwistorTangent::horizontal(X), t) -
                             tr_k_horizontal_closed(pt, k, X, t)));
    }
    CHECK(worst_v < 1e-6);
    CHECK(worst_h < 1e-5);
  }
  // the closed forms refuse non-self-dual bases
  auto pt = make_twistor_point(get_metric("s2_x_s2").spec, {0.1, 0.2, 0.1, -0.2},
                               {1, 0, 0});
  CHECK_THROWS_AS(tr_k_vertical_closed(pt, 1, {0, 1, 0}, 1.0), not_self_dual);
  CHECK_THROWS_AS(tr_k_horizontal_closed(pt, 2, {1, 0, 0, 0}, 1.0), not_self_dual);
}

TEST_CASE("residual frame sum vanishes on self-dual catalog metrics") {
  Rng rng(13);
  for (const char* name : {"s4", "h4", "cp2", "r_x_s3", "conformal_flat_exp"}) {
    CAPTURE(name);
    auto e = get_metric(name);
    for (int trial = 0; trial < 6; ++trial) {
      Point4 p{};
      for (int i = 0; i < 4; ++i) p[i] = 0.7 * e.sample_box[i] * rng.sym();
      Vec4 seed{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
      auto pt = make_twistor_point(e.spec, p, random_sigma(rng), seed);
      Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
      CHECK(std::fabs(sigma_sum(pt, X, 0.5 + 2.0 * rng.uniform())) < 1e-7);
    }
  }
}

TEST_CASE("eigenvalue structure classification") {
  auto rs = ricci(get_metric("s4").spec, {0.2, 0.1, -0.2, 0.3});
  CHECK(eigen_structure(rs, 1e-6).pattern == EigenPattern::einstein);
  auto rp = ricci(get_metric("r_x_s3").spec, {0.5, 0.2, -0.1, 0.3});
  auto es = eigen_structure(rp, 1e-6);
  CHECK(es.pattern == EigenPattern::triple_simple);
  CHECK(es.simple == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(es.triple == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(es.simple_zero);
  RicciData synth{};
  synth.eigenvalues = {1.0, 1.0, 2.0, 3.0};
  CHECK(eigen_structure(synth, 1e-6).pattern == EigenPattern::other);
}

TEST_CASE("section defects: parallel sections are harmonic, wobbles are not") {
  // constant section on flat space
  SectionFn constant = [](const Point4&) {
    return std::array<Jet3, 3>{Jet3::constant(1.0), Jet3::constant(0.0),
                               Jet3::constant(0.0)};
  };
  auto d0 = section_defect(get_metric("flat").spec, constant, {0.3, 0.1, 0.2, 0.4}, 1.0);
  CHECK(std::sqrt(lambda2_inner(d0.vertical, d0.vertical)) < 1e-12);
  CHECK(norm2(d0.horizontal) < 1e-12);
  // s1^- of the product frame on s2_x_s2 is the parallel Kaehler section of
  // the reversed orientation
  auto dp = section_defect(get_metric("s2_x_s2").spec, constant, {0.2, -0.1, 0.3, 0.1}, 0.7);
  CHECK(std::sqrt(lambda2_inner(dp.vertical, dp.vertical)) < 1e-10);
  CHECK(norm2(dp.horizontal) < 1e-10);
  // wobbling section on flat space: J = (s1 + eps x1 s2)/norm
  const double eps = 0.3;
  SectionFn wobble = [eps](const Point4& p) {
    Jet3 u = eps * Jet3::variable(p[0], 0);
    Jet3 inv = reciprocal(sqrt(u * u + 1.0));
    return std::array<Jet3, 3>{inv, u * inv, Jet3::constant(0.0)};
  };
  Point4 p{0.5, 0.2, -0.3, 0.1};
  auto dw = section_defect(get_metric("flat").spec, wobble, p, 1.0);
  // independent oracle: plain second differences of the coefficient field,
  // projected orthogonal to J (flat space, constant frame field)
  auto cval = [&](double x1) {
    double u = eps * x1;
    double inv = 1.0 / std::sqrt(1.0 + u * u);
    return Vec3{inv, u * inv, 0.0};
  };
  const double h = 1e-4;
  Vec3 cp = cval(p[0] + h), cm = cval(p[0] - h), c0 = cval(p[0]);
  Vec3 lap{};
  for (int i = 0; i < 3; ++i) lap[i] = (cp[i] - 2 * c0[i] + cm[i]) / (h * h);
  double along = dot3(lap, c0);
  for (int i = 0; i < 3; ++i) lap[i] -= along * c0[i];
  Vec3 got = to_sminus(dw.vertical);
  for (int i = 0; i < 3; ++i)
    CHECK(got[i] == doctest::Approx(lap[i]).epsilon(1e-6).scale(1.0));
  CHECK(std::sqrt(dot3(got, got)) > 1e-4);
  CHECK(norm2(dw.horizontal) < 1e-12);
  // non-unit sections are rejected
  SectionFn bad = [](const Point4&) {
    return std::array<Jet3, 3>{Jet3::constant(2.0), Jet3::constant(0.0),
                               Jet3::constant(0.0)};
  };
  CHECK_THROWS_AS(section_defect(get_metric("flat").spec, bad, {0, 0, 0, 0}, 1.0),
                  invalid_parameter);
}

TEST_CASE("horizontal section defect against a finite-difference route") {
  // on the round sphere Rop = 2 Id, so R(c) = K_c exactly and the horizontal
  // trace term can be rebuilt from scratch with finite differences
  auto e = get_metric("s4");
  const double eps = 0.2, t = 0.8;
  SectionFn wobble = [eps](const Point4& q) {
    Jet3 u = eps * Jet3::variable(q[0], 0);
    Jet3 inv = reciprocal(sqrt(u * u + 1.0));
    return std::array<Jet3, 3>{inv, u * inv, Jet3::constant(0.0)};
  };
  Point4 p{0.4, 0.1, -0.2, 0.3};
  auto got = section_defect(e.spec, wobble, p, t);
  auto coeffs = [&](const Point4& q) {
    double u = eps * q[0];
    double inv = 1.0 / std::sqrt(1.0 + u * u);
    return Vec3{inv, u * inv, 0.0};
  };
  // coordinate wedge components of J at a point
  auto jcoord = [&](const Point4& q) {
    auto fr = orthonormal_frame(e.spec, q);
    auto wc = [&](int a, int b) {
      Vec6 r{};
      for (int w = 0; w < 6; ++w) {
        int i = kWedgeIdx[w][0], j = kWedgeIdx[w][1];
        r[w] = fr.E[a][i] * fr.E[b][j] - fr.E[a][j] * fr.E[b][i];
      }
      return r;
    };
    Vec6 sm[3];
    auto sub = [](Vec6 x, const Vec6& y) {
      for (int w = 0; w < 6; ++w) x[w] -= y[w];
      return x;
    };
    sm[0] = sub(wc(0, 1), wc(2, 3));
    sm[1] = sub(wc(0, 2), wc(3, 1));
    sm[2] = sub(wc(0, 3), wc(1, 2));
    Vec3 c = coeffs(q);
    Vec6 r{};
    for (int w = 0; w < 6; ++w)
      r[w] = c[0] * sm[0][w] + c[1] * sm[1][w] + c[2] * sm[2][w];
    return r;
  };
  auto gp = geom_at(e.spec, p);
  auto anti = [&](const Vec6& b, int i, int j) -> double {
    if (i == j) return 0;
    for (int w = 0; w < 6; ++w)
      if (kWedgeIdx[w][0] == std::min(i, j) && kWedgeIdx[w][1] == std::max(i, j))
        return i < j ? b[w] : -b[w];
    return 0;
  };
  const double h = 1e-3;
  Vec6 cov[4];
  Vec6 j0 = jcoord(p);
  for (int m = 0; m < 4; ++m) {
    Point4 qp = p, qm = p, qp2 = p, qm2 = p;
    qp[m] += h;
    qm[m] -= h;
    qp2[m] += 2 * h;
    qm2[m] -= 2 * h;
    Vec6 fp = jcoord(qp), fm = jcoord(qm), fp2 = jcoord(qp2), fm2 = jcoord(qm2);
    for (int w = 0; w < 6; ++w)
      cov[m][w] = (-fp2[w] + 8 * fp[w] - 8 * fm[w] + fm2[w]) / (12 * h);
    for (int w = 0; w < 6; ++w) {
      int i = kWedgeIdx[w][0], j = kWedgeIdx[w][1];
      for (int k = 0; k < 4; ++k)
        cov[m][w] += gp.chris.gamma[i][m][k] * anti(j0, k, j) +
                     gp.chris.gamma[j][m][k] * anti(j0, i, k);
    }
  }
  Vec3 jv = coeffs(p);
  Vec4 expected_sum{};
  for (int a = 0; a < 4; ++a) {
    Vec6 covA{};
    for (int m = 0; m < 4; ++m)
      for (int w = 0; w < 6; ++w) covA[w] += gp.frame.E[a][m] * cov[m][w];
    // frame components, then s^- coordinates
    Bivector bf;
    for (int w = 0; w < 6; ++w) {
      int x = kWedgeIdx[w][0], y = kWedgeIdx[w][1];
      double v = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          v += gp.frame.coframe[x][i] * gp.frame.coframe[y][j] * anti(covA, i, j);
      bf.c[w] = v;
    }
    Vec3 nja = to_sminus(bf);
    Vec3 cx = cross3(jv, nja);
    Vec4 ea{};
    ea[a] = 1.0;
    Vec4 img = apply_endo(k_endo(from_sminus(cx)), ea);
    for (int i = 0; i < 4; ++i) expected_sum[i] += t * img[i];
  }
  for (int i = 0; i < 4; ++i)
    CHECK(got.horizontal[i] == doctest::Approx(expected_sum[i]).epsilon(1e-8).scale(1.0));
  CHECK(norm2(got.horizontal) > 1e-3);
}

TEST_CASE("classifier verdicts match the geometric classification") {
  const std::vector<double> ts{0.5, 1.0, 2.0};
  SamplePlan plan;
  plan.base_points = 4;
  plan.fiber_points = 2;
  plan.seed = 9;
  Tolerances tol;
  struct Want {
    const char* name;
    Verdict v1, v2;
  };
  const Want wants[] = {
      {"flat", Verdict::harmonic_map, Verdict::harmonic_map},
      {"s4", Verdict::harmonic_map, Verdict::harmonic_map},
      {"h4", Verdict::harmonic_map, Verdict::harmonic_map},
      {"cp2", Verdict::harmonic_map, Verdict::harmonic_map},
      {"r_x_s3", Verdict::harmonic_map, Verdict::harmonic_map},
      {"s2_x_s2", Verdict::neither, Verdict::neither},
      {"conformal_flat_exp", Verdict::harmonic_section_only, Verdict::neither},
  };
  for (const auto& w : wants) {
    CAPTURE(w.name);
    auto res = classify(get_metric(w.name), ts, plan, tol);
    CHECK(res.verdict[0] == w.v1);
    CHECK(res.verdict[1] == w.v2);
    CHECK(res.theorem_consistency);
    // verdicts must not depend on t
    for (double t : ts) {
      auto res_t = classify(get_metric(w.name), {t}, plan, tol);
      CHECK(res_t.verdict[0] == w.v1);
      CHECK(res_t.verdict[1] == w.v2);
    }
  }
  CHECK_THROWS_AS(classify(get_metric("flat"), {-1.0}, plan, tol), invalid_parameter);
}

}  // TEST_SUITE
