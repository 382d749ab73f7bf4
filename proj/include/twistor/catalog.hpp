// Metric zoo: exact analytic component functions with known classification
// ground truth.  Chart domains are star-shaped and shrunk by a 0.05 margin so
// finite-difference stencils stay inside.
#pragma once

#include <vector>

#include "twistor/metric.hpp"

namespace twistor {

enum class EigenPattern { einstein, triple_simple, other };

struct CatalogTruth {
  bool einstein = false;
  bool self_dual = false;
  bool constant_s = false;
  EigenPattern pattern = EigenPattern::other;
  bool simple_eigenvalue_zero = false;  // meaningful for triple_simple only
  // classification: harmonic map for both structures?
  bool harmonic_map = false;
};

struct CatalogEntry {
  MetricSpec spec;
  CatalogTruth truth;
  // box half-widths for sampling, centred at the origin of the chart
  Vec4 sample_box{};
  std::string notes;
};

namespace detail {

inline Jet3 radius2(const Point4& p, int from, int to) {
  Jet3 r = Jet3::constant(0.0);
  for (int i = from; i < to; ++i) {
    Jet3 xi = Jet3::variable(p[i], i);
    r = r + xi * xi;
  }
  return r;
}

inline MetricJet conformal_diag(const Jet3& phi) {
  MetricJet g{};
  for (int i = 0; i < 4; ++i) g[i][i] = phi;
  return g;
}

}  // namespace detail

inline std::vector<std::string> list_metrics() {
  return {"flat", "s4", "h4", "cp2", "r_x_s3", "s2_x_s2", "conformal_flat_exp"};
}

inline CatalogEntry get_metric(const std::string& name) {
  using detail::conformal_diag;
  using detail::radius2;
  CatalogEntry e;
  e.spec.name = name;
  e.spec.orientation = +1;
  if (name == "flat") {
    e.spec.component_fn = [](const Point4&) {
      MetricJet g{};
      for (int i = 0; i < 4; ++i) g[i][i] = Jet3::constant(1.0);
      return g;
    };
    e.spec.domain_fn = [](const Point4&) { return true; };
        e.spec.value_fn = [](const Point4&) {
      Mat4 g{};
      for (int i = 0; i < 4; ++i) g[i][i] = 1.0;
      return g;
    };
    e.truth = {true, true, true, EigenPattern::einstein, false, true};
    e.sample_box = {1.0, 1.0, 1.0, 1.0};
  } else if (name == "s4") {
    // round unit sphere, stereographic chart: g = 4/(1+|x|^2)^2 delta
    e.spec.component_fn = [](const Point4& p) {
      Jet3 w = radius2(p, 0, 4) + 1.0;
      return conformal_diag(4.0 * reciprocal(w * w));
    };
    e.spec.domain_fn = [](const Point4& p) { return norm2(p) < 8.0; };
        e.spec.value_fn = [](const Point4& p) {
      double w = 1.0 + dot4(p, p);
      Mat4 g{};
      for (int i = 0; i < 4; ++i) g[i][i] = 4.0 / (w * w);
      return g;
    };
    e.truth = {true, true, true, EigenPattern::einstein, false, true};
    e.sample_box = {0.8, 0.8, 0.8, 0.8};
  } else if (name == "h4") {
    // hyperbolic space, Poincare ball: g = 4/(1-|x|^2)^2 delta on |x|<0.9,
    // kept at |x|<=0.85 for the stencil margin
    e.spec.component_fn = [](const Point4& p) {
      Jet3 w = 1.0 - radius2(p, 0, 4);
      return conformal_diag(4.0 * reciprocal(w * w));
    };
    e.spec.domain_fn = [](const Point4& p) { return norm2(p) <= 0.85; };
        e.spec.value_fn = [](const Point4& p) {
      double w = 1.0 - dot4(p, p);
      Mat4 g{};
      for (int i = 0; i < 4; ++i) g[i][i] = 4.0 / (w * w);
      return g;
    };
    e.truth = {true, true, true, EigenPattern::einstein, false, true};
    e.sample_box = {0.4, 0.4, 0.4, 0.4};
  } else if (name == "cp2") {
    // Fubini-Study in the affine chart (z1,z2), z_k = x_{2k-1} + i x_{2k};
    // the coordinate order is the complex orientation, for which the metric
    // is self-dual (W_- = 0).
    e.spec.component_fn = [](const Point4& p) {
      Jet3 x[4] = {Jet3::variable(p[0], 0), Jet3::variable(p[1], 1),
                   Jet3::variable(p[2], 2), Jet3::variable(p[3], 3)};
      Jet3 xi[4] = {-x[1], x[0], -x[3], x[2]};  // image under the complex J
      Jet3 w = radius2(p, 0, 4) + 1.0;
      Jet3 iw2 = reciprocal(w * w);
      MetricJet g{};
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
          Jet3 num = -2.0 * (x[i] * x[j] + xi[i] * xi[j]);
          if (i == j) num = num + 2.0 * w;
          g[i][j] = num * iw2;
          g[j][i] = g[i][j];
        }
      return g;
    };
    e.spec.domain_fn = [](const Point4& p) { return norm2(p) < 8.0; };
        e.spec.value_fn = [](const Point4& p) {
      double w = 1.0 + dot4(p, p), iw2 = 1.0 / (w * w);
      Vec4 xi{-p[1], p[0], -p[3], p[2]};
      Mat4 g{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double num = -2.0 * (p[i] * p[j] + xi[i] * xi[j]);
          if (i == j) num += 2.0 * w;
          g[i][j] = num * iw2;
        }
      return g;
    };
    e.truth = {true, true, true, EigenPattern::einstein, false, true};
    e.sample_box = {0.7, 0.7, 0.7, 0.7};
  } else if (name == "r_x_s3") {
    // dt^2 + round unit S^3 (stereographic); x1 is the line factor
    e.spec.component_fn = [](const Point4& p) {
      Jet3 w = radius2(p, 1, 4) + 1.0;
      Jet3 psi = 4.0 * reciprocal(w * w);
      MetricJet g{};
      g[0][0] = Jet3::constant(1.0);
      for (int i = 1; i < 4; ++i) g[i][i] = psi;
      return g;
    };
    e.spec.domain_fn = [](const Point4& p) {
      return std::fabs(p[0]) < 8.0 &&
             std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]) < 8.0;
    };
        e.spec.value_fn = [](const Point4& p) {
      double w = 1.0 + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
      double psi = 4.0 / (w * w);
      Mat4 g{};
      g[0][0] = 1.0;
      for (int i = 1; i < 4; ++i) g[i][i] = psi;
      return g;
    };
    e.truth = {false, true, true, EigenPattern::triple_simple, true, true};
    e.sample_box = {1.0, 0.7, 0.7, 0.7};
  } else if (name == "s2_x_s2") {
    // product of two round unit 2-spheres, stereographic chart on each
    e.spec.component_fn = [](const Point4& p) {
      Jet3 wa = radius2(p, 0, 2) + 1.0;
      Jet3 wb = radius2(p, 2, 4) + 1.0;
      Jet3 pa = 4.0 * reciprocal(wa * wa);
      Jet3 pb = 4.0 * reciprocal(wb * wb);
      MetricJet g{};
      g[0][0] = g[1][1] = pa;
      g[2][2] = g[3][3] = pb;
      return g;
    };
    e.spec.domain_fn = [](const Point4& p) { return norm2(p) < 8.0; };
        e.spec.value_fn = [](const Point4& p) {
      double wa = 1.0 + p[0] * p[0] + p[1] * p[1];
      double wb = 1.0 + p[2] * p[2] + p[3] * p[3];
      Mat4 g{};
      g[0][0] = g[1][1] = 4.0 / (wa * wa);
      g[2][2] = g[3][3] = 4.0 / (wb * wb);
      return g;
    };
    e.truth = {true, false, true, EigenPattern::einstein, false, false};
    e.sample_box = {0.7, 0.7, 0.7, 0.7};
  } else if (name == "conformal_flat_exp") {
    // g = e^{0.2 x1} delta: conformally flat (hence self-dual) with
    // non-constant scalar curvature
    e.spec.component_fn = [](const Point4& p) {
      Jet3 f = 0.2 * Jet3::variable(p[0], 0);
      return conformal_diag(exp(f));
    };
    e.spec.domain_fn = [](const Point4& p) { return norm2(p) < 8.0; };
        e.spec.value_fn = [](const Point4& p) {
      double e2 = std::exp(0.2 * p[0]);
      Mat4 g{};
      for (int i = 0; i < 4; ++i) g[i][i] = e2;
      return g;
    };
    e.truth = {false, true, false, EigenPattern::triple_simple, true, false};
    e.sample_box = {1.0, 1.0, 1.0, 1.0};
  } else {
    throw domain_error("unknown metric: " + name);
  }
  return e;
}

}  // namespace twistor
