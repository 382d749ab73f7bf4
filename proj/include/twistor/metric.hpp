// Analytic 4-metrics evaluated with order-3 coordinate jets.
#pragma once

#include <functional>
#include <string>

#include "twistor/jet.hpp"

namespace twistor {

using Point4 = Vec4;

using MetricJet = std::array<std::array<Jet3, 4>, 4>;  // symmetric

struct MetricSpec {
  std::string name;
  std::function<MetricJet(const Point4&)> component_fn;
  std::function<bool(const Point4&)> domain_fn;
  // +1 keeps the coordinate orientation, -1 flips the last frame vector.
  int orientation = +1;
  // optional value-only evaluator for derivative-free callers
  std::function<Mat4(const Point4&)> value_fn;

  Mat4 values(const Point4& p) const;
};

// Cheap symmetric positive-definiteness test via Cholesky.
inline bool spd4(const Mat4& g) {
  Mat4 l{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return true;
}

inline Mat4 jet_values(const MetricJet& gj) {
  Mat4 g{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = gj[i][j].v;
  return g;
}

inline Mat4 MetricSpec::values(const Point4& p) const {
  return value_fn ? value_fn(p) : jet_values(component_fn(p));
}

inline MetricJet eval_metric_jet(const MetricSpec& spec, const Point4& p) {
  for (double c : p)
    if (!std::isfinite(c)) throw domain_error(spec.name + ": non-finite point");
  if (!spec.domain_fn(p))
    throw domain_error(spec.name + ": point outside chart domain");
  MetricJet gj = spec.component_fn(p);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::fabs(gj[i][j].v - gj[j][i].v) > 1e-12)
        throw numeric_error(spec.name + ": metric components not symmetric");
  if (!spd4(jet_values(gj)))
    throw numeric_error(spec.name + ": metric not positive definite");
  return gj;
}

}  // namespace twistor
