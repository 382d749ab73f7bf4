// Command-line front end: classification of catalog metrics, closed-form
// trace cross-validation, and brute-force oracle verification, with
// machine-readable reports.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "twistor/harmonicity.hpp"
#include "twistor/oracle6.hpp"

using namespace twistor;
using nlohmann::json;

namespace {

struct Config {
  std::vector<std::string> metrics;
  std::vector<double> ts;
  int points = 8;
  int fiber_points = 4;
  double zero_tol = 1e-6;
  double nonzero_floor = 1e-3;
  double fd_step = 1e-3;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string out;
  bool wood = false;
};

const char* pattern_name(EigenPattern p) {
  switch (p) {
    case EigenPattern::einstein: return "einstein";
    case EigenPattern::triple_simple: return "triple_simple";
    case EigenPattern::other: return "other";
  }
  return "?";
}

json config_json(const Config& c) {
  return json{{"metrics", c.metrics},
              {"t", c.ts},
              {"points", c.points},
              {"fiber_points", c.fiber_points},
              {"zero_tol", c.zero_tol},
              {"nonzero_floor", c.nonzero_floor},
              {"fd_step", c.fd_step},
              {"seed", c.seed}};
}

void write_output(const Config& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(c.out);
  if (!f) {
    std::cerr << "cannot open output file: " << c.out << "\n";
    std::exit(2);
  }
  f << text << "\n";
}

struct AnalyzeOutcome {
  json report;
  std::vector<std::string> csv_rows;
  bool violation = false;
};

AnalyzeOutcome run_analyze(const Config& cfg) {
  AnalyzeOutcome out;
  out.report = json::array();
  SamplePlan plan{cfg.points, cfg.fiber_points, cfg.seed};
  Tolerances tol{cfg.zero_tol, cfg.nonzero_floor};
  for (const auto& name : cfg.metrics) {
    CatalogEntry entry = get_metric(name);
    json rj;
    rj["metric"] = name;
    rj["t"] = cfg.ts;
    rj["points"] = json::array();
    bool consistent = true;
    ClassifyResult res;
    try {
      res = classify(entry, cfg.ts, plan, tol);
    } catch (const theorem_violation& e) {
      consistent = false;
      rj["error"] = e.what();
      out.violation = true;
    }
    if (cfg.wood && !res.points.empty()) {
      auto chart = build_chart(entry.spec, cfg.ts.front(), cfg.fd_step);
      for (auto& pr : res.points) {
        Vec6d z{pr.point[0], pr.point[1], pr.point[2], pr.point[3], 0.3, 0.1};
        for (int k = 1; k <= 2; ++k) {
          try {
            pr.wood_defect[k - 1] = wood_defect(chart, k, z);
          } catch (const std::runtime_error&) {
            // stencil would leave the chart; leave the field absent
          }
        }
      }
    }
    for (const auto& pr : res.points) {
      auto vs = verdicts_from(pr.norm_Wminus, pr.ds_norm, pr.tr_max[0],
                              pr.tr_max[1], tol);
      json pj;
      pj["coords"] = pr.point;
      pj["s"] = pr.s;
      pj["norm_B"] = pr.norm_B;
      pj["norm_Wminus"] = pr.norm_Wminus;
      pj["ds_norm"] = pr.ds_norm;
      pj["eigen_pattern"] = pattern_name(pr.eigen.pattern);
      pj["ricci_eigenvalues"] = pr.eigenvalues;
      pj["tr1_max"] = pr.tr_max[0];
      pj["tr2_max"] = pr.tr_max[1];
      pj["closedform_residuals"] =
          json{{"j1", pr.closedform_residual[0] < 0
                          ? json(nullptr)
                          : json(pr.closedform_residual[0])},
               {"j2", pr.closedform_residual[1] < 0
                          ? json(nullptr)
                          : json(pr.closedform_residual[1])}};
      pj["wood_defect"] =
          json{{"j1", pr.wood_defect[0] < 0 ? json(nullptr)
                                            : json(pr.wood_defect[0])},
               {"j2", pr.wood_defect[1] < 0 ? json(nullptr)
                                            : json(pr.wood_defect[1])}};
      pj["verdicts"] = json{{"j1", verdict_name(vs[0])},
                            {"j2", verdict_name(vs[1])}};
      rj["points"].push_back(pj);
      std::ostringstream row;
      row.precision(12);
      row << name;
      for (double x : pr.point) row << "," << x;
      row << "," << pr.s << "," << pr.norm_B << "," << pr.norm_Wminus << ","
          << pr.ds_norm << "," << pattern_name(pr.eigen.pattern) << ","
          << pr.tr_max[0] << "," << pr.tr_max[1] << "," << verdict_name(vs[0])
          << "," << verdict_name(vs[1]);
      out.csv_rows.push_back(row.str());
    }
    rj["global_verdict"] = json{{"j1", verdict_name(res.verdict[0])},
                                {"j2", verdict_name(res.verdict[1])}};
    rj["theorem_consistency"] = consistent && res.theorem_consistency;
    out.report.push_back(rj);
  }
  return out;
}

std::string analyze_table(const json& reports) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %10s %10s %10s %10s %30s %10s %10s  %s\n",
                "metric", "s", "|B|", "|W-|", "|ds|", "ricci spectrum", "tr1_max",
                "tr2_max", "verdicts (J1, J2)");
  os << buf;
  for (const auto& rj : reports) {
    double s = 0, nb = 0, nw = 0, nd = 0, t1 = 0, t2 = 0;
    std::string eig = "-";
    if (rj.contains("points") && !rj["points"].empty()) {
      s = rj["points"][0]["s"].get<double>();
      eig = rj["points"][0]["eigen_pattern"].get<std::string>();
      {
        auto ev = rj["points"][0]["ricci_eigenvalues"];
        char eb[64];
        std::snprintf(eb, sizeof eb, " (%.3g,%.3g,%.3g,%.3g)",
                      ev[0].get<double>(), ev[1].get<double>(),
                      ev[2].get<double>(), ev[3].get<double>());
        eig += eb;
      }
      for (const auto& pj : rj["points"]) {
        nb = std::max(nb, pj["norm_B"].get<double>());
        nw = std::max(nw, pj["norm_Wminus"].get<double>());
        nd = std::max(nd, pj["ds_norm"].get<double>());
        t1 = std::max(t1, pj["tr1_max"].get<double>());
        t2 = std::max(t2, pj["tr2_max"].get<double>());
      }
    }
    std::snprintf(buf, sizeof buf,
                  "%-20s %10.3f %10.2e %10.2e %10.2e %30s %10.2e %10.2e  %s, %s%s\n",
                  rj["metric"].get<std::string>().c_str(), s, nb, nw, nd,
                  eig.c_str(), t1, t2,
                  rj["global_verdict"]["j1"].get<std::string>().c_str(),
                  rj["global_verdict"]["j2"].get<std::string>().c_str(),
                  rj["theorem_consistency"].get<bool>() ? "" : "  [THEOREM VIOLATION]");
    os << buf;
  }
  return os.str();
}

struct VerifyRow {
  std::string identity;
  double residual = 0;
  double threshold = 0;
  std::string status;  // pass | fail | skipped
};

std::vector<VerifyRow> run_verify_metric(const CatalogEntry& entry, double t,
                                         const Config& cfg) {
  std::vector<VerifyRow> rows;
  Vec4 box{};
  for (int i = 0; i < 4; ++i) box[i] = 0.7 * entry.sample_box[i];
  auto chart = build_chart(entry.spec, t, cfg.fd_step);
  auto rep = verify_closed_forms(chart, box, cfg.points, cfg.seed);
  auto add = [&](const std::string& id, double r, double thr) {
    rows.push_back({id, r, thr, r <= thr ? "pass" : "fail"});
  };
  add("submersion", rep.submersion, 1e-8);
  add("fiber_metric", rep.fiber_metric, 1e-8);
  add("lie2", rep.lie2, 1e-5);
  add("rw", rep.rw, 1e-5);
  add("lc_hh", rep.lc_hh, 1e-5);
  add("lc_vh", rep.lc_vh, 1e-5);
  const char* kind_names[5] = {"rz_hhhh", "rz_hhhv", "rz_hvhv", "rz_hhvv",
                               "rz_hvvv"};
  for (int i = 0; i < 5; ++i) add(kind_names[i], rep.rz_res[i], 1e-5);
  add("sec", rep.sec, 1e-4);
  // analytic cross-validations
  Rng rng(cfg.seed + 17);
  double dual = 0, lem1 = -1, lem2 = -1, sig = 0;
  for (int trial = 0; trial < 32; ++trial) {
    Point4 p{};
    for (int i = 0; i < 4; ++i) p[i] = 0.7 * entry.sample_box[i] * rng.sym();
    Vec3 sgm{rng.sym(), rng.sym(), rng.sym()};
    double n = std::sqrt(dot3(sgm, sgm));
    if (n < 1e-3) sgm = {1, 0, 0};
    else
      for (double& v : sgm) v /= n;
    auto pt = make_twistor_point(entry.spec, p, sgm);
    int k = 1 + static_cast<int>(rng.next() % 2);
    TwistorTangent A, B, C;
    for (int i = 0; i < 4; ++i) {
      A.hor[i] = rng.sym();
      B.hor[i] = rng.sym();
      C.hor[i] = rng.sym();
    }
    A.ver = {0, rng.sym(), rng.sym()};
    B.ver = {0, rng.sym(), rng.sym()};
    C.ver = {0, rng.sym(), rng.sym()};
    auto theta = jdj_wedge(pt, k, A, t);
    double lhs = 0;
    for (const auto& term : theta.terms)
      lhs += 2.0 * term.coeff * ht_inner2(term.a, term.b, B, C, t);
    dual = std::max(dual, std::fabs(lhs + d_omega(pt, k, t, A, B, j_apply(k, C))));
    if (pt.dec.self_dual) {
      Vec3 U{0, rng.sym(), rng.sym()};
      TwistorTangent Ut;
      Ut.ver = U;
      lem1 = std::max(lem1, std::fabs(tr_k(pt, k, Ut, t) -
                                      tr_k_vertical_closed(pt, k, U, t)));
      Vec4 X{rng.sym(), rng.sym(), rng.sym(), rng.sym()};
      lem2 = std::max(
          lem2, std::fabs(tr_k(pt, k, TwistorTangent::horizontal(X), t) -
                          tr_k_horizontal_closed(pt, k, X, t)));
      sig = std::max(sig, std::fabs(sigma_sum(pt, X, t)));
    }
  }
  add("jdj_domega_duality", dual, 1e-8);
  if (lem1 < 0) {
    rows.push_back({"closed_trace_vertical", 0, 1e-6, "skipped: not self-dual"});
    rows.push_back({"closed_trace_horizontal", 0, 1e-5, "skipped: not self-dual"});
    rows.push_back({"sigma_sum", 0, 1e-7, "skipped: not self-dual"});
  } else {
    add("closed_trace_vertical", lem1, 1e-6);
    add("closed_trace_horizontal", lem2, 1e-5);
    add("sigma_sum", sig, 1e-7);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical twistor-space harmonicity engine"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metrics, "catalog metric name (repeatable)");
    sub->add_option("--t", cfg.ts, "fibre scale t > 0 (repeatable)");
    sub->add_option("--points", cfg.points, "number of base sample points");
    sub->add_option("--fiber-points", cfg.fiber_points, "fibre points per base point");
    sub->add_option("--zero-tol", cfg.zero_tol, "threshold for zero claims");
    sub->add_option("--nonzero-floor", cfg.nonzero_floor, "floor for nonzero claims");
    sub->add_option("--fd-step", cfg.fd_step, "finite-difference step for the oracle");
    sub->add_option("--seed", cfg.seed, "sampling seed");
    sub->add_option("--format", cfg.format, "output format: json|csv|table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--out", cfg.out, "write the report to a file");
    sub->add_flag("--wood", cfg.wood,
                  "also evaluate the Wood criterion on the twistor space");
  };
  CLI::App* analyze = app.add_subcommand("analyze", "classify metrics per the defect criteria");
  CLI::App* verify = app.add_subcommand("verify", "check closed forms against the 6-dim oracle");
  CLI::App* report = app.add_subcommand("report", "human-readable classification summary");
  add_common(analyze);
  add_common(verify);
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cfg.metrics.empty()) cfg.metrics = list_metrics();
  if (cfg.ts.empty()) cfg.ts = {1.0};
  for (double t : cfg.ts)
    if (t <= 0) {
      std::cerr << "config error: t must be positive\n";
      return 2;
    }
  if (cfg.zero_tol >= cfg.nonzero_floor) {
    std::cerr << "config error: zero-tol must be below nonzero-floor\n";
    return 2;
  }
  if (cfg.points < 1 || cfg.fiber_points < 1) {
    std::cerr << "config error: sample counts must be at least 1\n";
    return 2;
  }
  if (cfg.fd_step <= 0) {
    std::cerr << "config error: fd-step must be positive\n";
    return 2;
  }
  for (const auto& m : cfg.metrics) {
    try {
      get_metric(m);
    } catch (const domain_error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  }

  try {
    if (*analyze || *report) {
      AnalyzeOutcome out = run_analyze(cfg);
      json doc{{"schema_version", 1},
               {"config", config_json(cfg)},
               {"reports", out.report}};
      if (*report || cfg.format == "table") {
        write_output(cfg, analyze_table(out.report));
      } else if (cfg.format == "csv") {
        std::string csv =
            "metric,x1,x2,x3,x4,s,norm_B,norm_Wminus,ds_norm,eigen_pattern,"
            "tr1_max,tr2_max,verdict_j1,verdict_j2";
        for (const auto& row : out.csv_rows) csv += "\n" + row;
        write_output(cfg, csv);
      } else {
        write_output(cfg, doc.dump(2));
      }
      return out.violation ? 1 : 0;
    }
    // verify
    bool breach = false;
    json vdoc{{"schema_version", 1}, {"config", config_json(cfg)}};
    vdoc["verify"] = json::array();
    std::ostringstream table;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %6s %-20s %12s %12s  %s\n", "metric",
                  "t", "identity", "residual", "threshold", "status");
    table << buf;
    for (const auto& name : cfg.metrics) {
      CatalogEntry entry = get_metric(name);
      for (double t : cfg.ts) {
        auto rows = run_verify_metric(entry, t, cfg);
        json mj{{"metric", name}, {"t", t}};
        mj["rows"] = json::array();
        for (const auto& r : rows) {
          if (r.status == "fail") breach = true;
          mj["rows"].push_back(json{{"identity", r.identity},
                                    {"residual", r.residual},
                                    {"threshold", r.threshold},
                                    {"status", r.status}});
          std::snprintf(buf, sizeof buf, "%-20s %6.2f %-20s %12.3e %12.3e  %s\n",
                        name.c_str(), t, r.identity.c_str(), r.residual,
                        r.threshold, r.status.c_str());
          table << buf;
        }
        vdoc["verify"].push_back(mj);
      }
    }
    if (cfg.format == "json")
      write_output(cfg, vdoc.dump(2));
    else
      write_output(cfg, table.str());
    return breach ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
