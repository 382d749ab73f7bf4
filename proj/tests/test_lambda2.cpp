#include "doctest.h"
#include "twistor/catalog.hpp"
#include "twistor/lambda2.hpp"

using namespace twistor;

namespace {

Vec4 unit(int i) {
  Vec4 v{};
  v[i] = 1.0;
  return v;
}

Bivector random_asd(Rng& rng) {
  return from_sminus({rng.sym(), rng.sym(), rng.sym()});
}

Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

}  // namespace

TEST_SUITE("lambda2") {

TEST_CASE("factor-1/2 metric and s-basis normalisation") {
  Bivector e12 = wedge(unit(0), unit(1));
  CHECK(lambda2_inner(e12, e12) == doctest::Approx(0.5));
  SBasis s = s_bases();
  for (int i = 0; i < 3; ++i) {
    CHECK(lambda2_inner(s.plus[i], s.plus[i]) == doctest::Approx(1.0));
    CHECK(lambda2_inner(s.minus[i], s.minus[i]) == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) {
      CHECK(lambda2_inner(s.plus[i], s.minus[j]) == doctest::Approx(0.0));
      if (i != j) CHECK(lambda2_inner(s.plus[i], s.plus[j]) == doctest::Approx(0.0));
    }
  }
  // s1^- = E1^E2 - E3^E4
  Bivector expect = wedge(unit(0), unit(1)) - wedge(unit(2), unit(3));
  for (int p = 0; p < 6; ++p) CHECK(s.minus[0].c[p] == doctest::Approx(expect.c[p]));
}

TEST_CASE("hodge star: involution and eigenbasis") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Bivector a;
    for (int p = 0; p < 6; ++p) a.c[p] = rng.sym();
    Bivector ss = hodge_star(hodge_star(a));
    for (int p = 0; p < 6; ++p) CHECK(ss.c[p] == doctest::Approx(a.c[p]));
    // projections P_pm = (1 pm star)/2 are orthogonal idempotents
    Bivector st = hodge_star(a);
    Bivector plus, minus;
    for (int p = 0; p < 6; ++p) {
      plus.c[p] = 0.5 * (a.c[p] + st.c[p]);
      minus.c[p] = 0.5 * (a.c[p] - st.c[p]);
    }
    CHECK(lambda2_inner(plus, minus) == doctest::Approx(0.0));
    Bivector sp = hodge_star(plus);
    for (int p = 0; p < 6; ++p) CHECK(sp.c[p] == doctest::Approx(plus.c[p]));
  }
  SBasis s = s_bases();
  Bivector h = hodge_star(s.plus[1]);
  for (int p = 0; p < 6; ++p) CHECK(h.c[p] == doctest::Approx(s.plus[1].c[p]));
}

TEST_CASE("cyclically relabelled frame permutes the s-basis cyclically") {
  // frame (E1, E3, E4, E2): its s-basis in old components
  Vec4 f[4] = {unit(0), unit(2), unit(3), unit(1)};
  Bivector s1 = wedge(f[0], f[1]) - wedge(f[2], f[3]);
  Bivector s2 = wedge(f[0], f[2]) - wedge(f[3], f[1]);
  Bivector s3 = wedge(f[0], f[3]) - wedge(f[1], f[2]);
  SBasis s = s_bases();
  for (int p = 0; p < 6; ++p) {
    CHECK(s1.c[p] == doctest::Approx(s.minus[1].c[p]));
    CHECK(s2.c[p] == doctest::Approx(s.minus[2].c[p]));
    CHECK(s3.c[p] == doctest::Approx(s.minus[0].c[p]));
  }
}

TEST_CASE("K endomorphism action table and round trip") {
  SBasis s = s_bases();
  Mat4 k1 = k_endo(s.minus[0]);
  CHECK(apply_endo(k1, unit(0)) == Vec4{0, 1, 0, 0});
  CHECK(apply_endo(k1, unit(1)) == Vec4{-1, 0, 0, 0});
  CHECK(apply_endo(k1, unit(2)) == Vec4{0, 0, 0, -1});
  CHECK(apply_endo(k1, unit(3)) == Vec4{0, 0, 1, 0});
  Mat4 sq = mat_mul(k1, k1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(sq[i][j] == doctest::Approx(i == j ? -1.0 : 0.0));
  Bivector zero;
  Mat4 kz = k_endo(zero);
  for (auto& row : kz)
    for (double v : row) CHECK(v == 0.0);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    Bivector a;
    for (int p = 0; p < 6; ++p) a.c[p] = rng.sym();
    Bivector back = wedge_from_endo(k_endo(a));
    for (int p = 0; p < 6; ++p) CHECK(back.c[p] == doctest::Approx(a.c[p]));
  }
}

TEST_CASE("cross product on the anti-self-dual half") {
  SBasis s = s_bases();
  Bivector c = cross_minus(s.minus[0], s.minus[1]);
  for (int p = 0; p < 6; ++p) CHECK(c.c[p] == doctest::Approx(s.minus[2].c[p]));
  Bivector c2 = cross_minus(s.minus[1], s.minus[2]);
  for (int p = 0; p < 6; ++p) CHECK(c2.c[p] == doctest::Approx(s.minus[0].c[p]));
  Rng rng(23);
  Bivector a = random_asd(rng);
  Bivector aa = cross_minus(a, a);
  for (int p = 0; p < 6; ++p) CHECK(aa.c[p] == doctest::Approx(0.0));
  // K_{s1}K_{s2} = -K_{s3}
  Mat4 prod = mat_mul(k_endo(s.minus[0]), k_endo(s.minus[1]));
  Mat4 k3 = k_endo(s.minus[2]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(prod[i][j] == doctest::Approx(-k3[i][j]));
  CHECK_THROWS_AS(cross_minus(s.plus[0], s.minus[1]), numeric_error);
}

TEST_CASE("K_a K_b = -g(a,b) Id - K_{a x b} for 200 random ASD pairs") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    Bivector a = random_asd(rng), b = random_asd(rng);
    Mat4 lhs = mat_mul(k_endo(a), k_endo(b));
    double ip = lambda2_inner(a, b);
    Mat4 kx = k_endo(cross_minus(a, b));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double rhs = -kx[i][j] - (i == j ? ip : 0.0);
        CHECK(lhs[i][j] == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      }
  }
}

TEST_CASE("wedge-endomorphism correspondence is an isometry") {
  Rng rng(37);
  for (int t = 0; t < 50; ++t) {
    Bivector a, b;
    for (int p = 0; p < 6; ++p) {
      a.c[p] = rng.sym();
      b.c[p] = rng.sym();
    }
    Mat4 prod = mat_mul(k_endo(a), k_endo(b));
    double tr = prod[0][0] + prod[1][1] + prod[2][2] + prod[3][3];
    CHECK(-0.25 * tr == doctest::Approx(lambda2_inner(a, b)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("curvature operator: flat zero, s4 = 2 Id, s2_x_s2 has a 4-dim kernel") {
  auto gf = geom_at(get_metric("flat").spec, {0.1, 0.2, 0.3, 0.4});
  auto opf = curv_op(gf.Rf, &gf.frame);
  for (auto& row : opf.mat)
    for (double v : row) CHECK(v == doctest::Approx(0.0));
  auto gs = geom_at(get_metric("s4").spec, {0.2, -0.3, 0.1, 0.2});
  auto ops = curv_op(gs.Rf, &gs.frame);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(ops.mat[i][j] == doctest::Approx(i == j ? 2.0 : 0.0).epsilon(1e-9).scale(1.0));
  auto gp = geom_at(get_metric("s2_x_s2").spec, {0.3, 0.1, -0.2, 0.4});
  auto opp = curv_op(gp.Rf, &gp.frame);
  auto es = eigen_sym<6>(opp.mat);
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(es.values[i]) < 1e-9);
  CHECK(es.values[4] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(es.values[5] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("decomposition ground truth across the catalog") {
  struct Row {
    const char* name;
    double s;
    bool einstein, self_dual;
  };
  const Row rows[] = {
      {"flat", 0.0, true, true},          {"s4", 12.0, true, true},
      {"h4", -12.0, true, true},          {"r_x_s3", 6.0, false, true},
      {"s2_x_s2", 4.0, true, false},      {"conformal_flat_exp", 0.0, false, true},
      {"cp2", 0.0, true, true},
  };
  Rng rng(41);
  for (const Row& row : rows) {
    CAPTURE(row.name);
    auto e = get_metric(row.name);
    Point4 p{};
    for (int i = 0; i < 4; ++i) p[i] = e.sample_box[i] * rng.sym();
    auto gp = geom_at(e.spec, p);
    auto d = decompose(curv_op(gp.Rf, &gp.frame), gp.ric, &gp.frame);
    if (row.s != 0.0 || row.name == std::string("flat"))
      CHECK(d.s == doctest::Approx(row.s).epsilon(1e-8).scale(1.0));
    CHECK(d.einstein == row.einstein);
    CHECK(d.self_dual == row.self_dual);
    CHECK(e.truth.einstein == d.einstein);
    CHECK(e.truth.self_dual == d.self_dual);
  }
}

TEST_CASE("cp2: Einstein and self-dual with the doubled Weyl normalisation") {
  auto gp = geom_at(get_metric("cp2").spec, {0.3, 0.1, -0.2, 0.4});
  auto op = curv_op(gp.Rf, &gp.frame);
  auto d = decompose(op, gp.ric, &gp.frame);
  CHECK(d.s == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(d.norm_B < 1e-9);
  CHECK(d.norm_Wminus < 1e-9);
  // factor-1/2 metric doubles the operator against the textbook one:
  // W+ spectrum (s/6, -s/12, -s/12) becomes (4, -2, -2)
  CHECK(d.norm_Wplus == doctest::Approx(2.0 * std::sqrt(6.0)).epsilon(1e-9));
  // reconstruction R = s/6 Id + B + W+ + W-
  double worst = 0;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      double w = (r < 3 && c < 3) ? d.Wplus[r][c]
                                  : ((r >= 3 && c >= 3) ? d.Wminus[r - 3][c - 3] : 0.0);
      double recon = (r == c ? d.s / 6.0 : 0.0) + d.Bop[r][c] + w;
      worst = std::max(worst, std::fabs(recon - op.mat[r][c]));
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("r_x_s3: B maps s_i^- to -s_i^+ in the frame with E1 = d_t") {
  auto gp = geom_at(get_metric("r_x_s3").spec, {0.3, 0.2, -0.1, 0.25});
  auto d = decompose(curv_op(gp.Rf, &gp.frame), gp.ric, &gp.frame);
  CHECK(d.s == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(d.norm_Wminus < 1e-8);
  CHECK(d.norm_Wplus < 1e-8);
  // Bop columns 3..5 (images of s_i^-) against rows 0..2 (s_i^+ components)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(d.Bop[i][3 + j] == doctest::Approx(i == j ? -1.0 : 0.0).epsilon(1e-9).scale(1.0));
}

TEST_CASE("s2_x_s2: Einstein, not self-dual, equal Weyl halves") {
  auto gp = geom_at(get_metric("s2_x_s2").spec, {0.2, -0.3, 0.4, 0.1});
  auto d = decompose(curv_op(gp.Rf, &gp.frame), gp.ric, &gp.frame);
  CHECK(d.norm_B < 1e-9);
  CHECK(d.norm_Wminus > 1e-3);
  CHECK(d.norm_Wminus == doctest::Approx(d.norm_Wplus).epsilon(1e-9));
}

TEST_CASE("delta B: zero for Einstein metrics, ASD-orthogonal when self-dual") {
  Rng rng(51);
  auto gs = geom_at(get_metric("s4").spec, {0.1, 0.4, -0.2, 0.3});
  for (int t = 0; t < 8; ++t) {
    Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
    Bivector db = delta_B(gs.ric, X, &gs.frame);
    for (int p = 0; p < 6; ++p) CHECK(db.c[p] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
  // On a self-dual metric the ASD pairing of delta B reduces to a pure
  // scalar-curvature gradient term: g(delta B(X), sigma) = -1/12 g(K_sigma
  // grad s, X).  It vanishes only when s is constant.
  auto gc = geom_at(get_metric("conformal_flat_exp").spec, {0.4, -0.2, 0.3, 0.1});
  double seen = 0;
  for (int t = 0; t < 8; ++t) {
    Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
    Bivector db = delta_B(gc.ric, X, &gc.frame);
    Bivector sigma = random_asd(rng);
    sigma.frame = &gc.frame;
    Vec4 ks = apply_endo(k_endo(sigma), gc.ric.ds);
    CHECK(lambda2_inner(db, sigma) ==
          doctest::Approx(-dot4(ks, X) / 12.0).scale(1.0).epsilon(1e-9));
    seen = std::max(seen, std::fabs(lambda2_inner(db, sigma)));
  }
  CHECK(seen > 1e-5);
  auto grr = geom_at(get_metric("r_x_s3").spec, {0.3, 0.2, -0.1, 0.25});
  for (int t = 0; t < 4; ++t) {
    Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
    Bivector db = delta_B(grr.ric, X, &grr.frame);
    for (int p = 0; p < 6; ++p)
      CHECK(db.c[p] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("nabla B: parallel for products, nonzero for the exponential factor") {
  Rng rng(61);
  auto gr = geom_at(get_metric("r_x_s3").spec, {0.2, 0.1, 0.3, -0.2});
  for (int t = 0; t < 6; ++t) {
    Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
    Bivector a = random_asd(rng);
    a.frame = &gr.frame;
    Bivector nb = nabla_B(gr.ric, X, a);
    for (int p = 0; p < 6; ++p) CHECK(nb.c[p] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  }
  auto gc = geom_at(get_metric("conformal_flat_exp").spec, {0.5, 0.2, -0.1, 0.3});
  double m = 0;
  for (int t = 0; t < 6; ++t) {
    Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
    Bivector a = random_asd(rng);
    a.frame = &gc.frame;
    Bivector nb = nabla_B(gc.ric, X, a);
    // (nabla_X B)(a) stays in the self-dual half when a is ASD
    Bivector st = hodge_star(nb);
    for (int p = 0; p < 6; ++p) CHECK(st.c[p] == doctest::Approx(nb.c[p]).scale(1.0).epsilon(1e-8));
    for (int p = 0; p < 6; ++p) m = std::max(m, std::fabs(nb.c[p]));
  }
  CHECK(m > 1e-6);
}

TEST_CASE("frame mismatch is rejected") {
  auto g1 = geom_at(get_metric("flat").spec, {0, 0, 0, 0});
  auto g2 = geom_at(get_metric("s4").spec, {0, 0, 0, 0});
  Bivector a = from_sminus({1, 0, 0}, &g1.frame);
  Bivector b = from_sminus({0, 1, 0}, &g2.frame);
  CHECK_THROWS_AS(lambda2_inner(a, b), frame_mismatch);
}

}  // TEST_SUITE
