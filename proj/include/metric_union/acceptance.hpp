#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "metric_union/cover.hpp"
#include "metric_union/glue.hpp"
#include "metric_union/io.hpp"
#include "metric_union/kirszbraun.hpp"
#include "metric_union/lower_bound.hpp"
#include "metric_union/mds.hpp"
#include "metric_union/random.hpp"
#include "metric_union/testgen.hpp"
#include "metric_union/union_embed.hpp"

// End-to-end acceptance checks, one per criterion. Thresholds are fixed here;
// nothing in this file reads them from the environment.

namespace metric_union::acceptance {

using io::json;

inline constexpr double kNonContractionFloor = 1.0 - 1e-9;
inline constexpr double kBoundSlack = 1e-6;
inline constexpr double kLowerBoundSlack = 1e-9;
inline constexpr double kGridMatchTol = 1e-3;
inline constexpr double kCriterion1Seconds = 60.0;

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = true;
  std::string summary;
  json details = json::object();
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  double tol = 1e-7;
  std::size_t threads = 1;
  bool verbose_timing = false;  ///< print per-criterion wall time to stderr
};

struct SuiteReport {
  std::vector<Criterion> criteria;

  bool passed() const {
    return std::ranges::all_of(criteria, [](const Criterion& c) { return c.passed; });
  }

  json to_json() const {
    json list = json::array();
    for (const auto& c : criteria)
      list.push_back(json{{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"summary", c.summary},
                          {"details", c.details}});
    return json{{"passed", passed()}, {"criteria", std::move(list)}};
  }
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline bool audit_group_passed(const Audit& a, const std::string& needle) {
  for (const auto& e : a)
    if (e.name.find(needle) != std::string::npos && !e.passed) return false;
  return true;
}

inline double min_slack(const Audit& a, const std::string& needle) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& e : a)
    if (e.name.find(needle) != std::string::npos) s = std::min(s, e.slack / std::max(1.0, std::abs(e.bound)));
  return s;
}

/// Runs of the union construction shared by criteria 1 to 5.
struct UnionRuns {
  std::vector<UnionEmbedding> general;    // α = 1/2, isometric inputs
  std::vector<UnionEmbedding> isometric;  // α = 0.3114, isometric inputs
  std::vector<UnionEmbedding> distorted;  // α = 1/2, stretched inputs
  std::vector<std::pair<double, double>> distorted_d;
  double general_seconds = 0.0;
};

inline EmbedOptions options(const SuiteConfig& cfg, double alpha) {
  EmbedOptions o;
  o.alpha = alpha;
  o.tol = cfg.tol;
  o.strict = false;
  o.threads = cfg.threads;
  return o;
}

inline UnionRuns run_union_instances(const SuiteConfig& cfg) {
  UnionRuns runs;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < 50; ++i) {
    const TestInstance inst = generate_instance(cfg.seed, i);
    runs.general.push_back(embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b,
                                       options(cfg, kGeneralAlpha)));
  }
  runs.general_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::uint64_t i = 0; i < 50; ++i) {
    const TestInstance inst = generate_instance(cfg.seed, i);
    runs.isometric.push_back(embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b,
                                         options(cfg, kIsometricAlpha)));
  }
  const double levels[] = {1.5, 2.0, 3.0};
  for (std::uint64_t i = 0; i < 20; ++i) {
    const TestInstance inst = generate_instance(cfg.seed, 1000 + i);
    const double da = levels[i % 3], db = levels[(i / 3) % 3];
    runs.distorted_d.emplace_back(da, db);
    runs.distorted.push_back(embed_union(inst.space, inst.partition, stretch_first_axis(inst.phi_a, da),
                                         stretch_first_axis(inst.phi_b, db), options(cfg, kGeneralAlpha)));
  }
  return runs;
}

inline Criterion criterion1(const UnionRuns& runs) {
  Criterion c{1, "main-theorem bound", true, "", json::object()};
  double worst_nc = std::numeric_limits<double>::infinity(), worst_d = 0.0;
  for (const auto& e : runs.general) {
    const double nc = 1.0 / e.report.contraction;
    worst_nc = std::min(worst_nc, nc);
    worst_d = std::max(worst_d, e.report.distortion);
    if (nc < kNonContractionFloor || e.report.distortion > 11.0 + kBoundSlack) c.passed = false;
  }
  const bool fast = runs.general_seconds <= kCriterion1Seconds;
  c.passed = c.passed && fast;
  c.summary = fmt2("50 instances, min ratio %.12f, max distortion %.6f <= 11", worst_nc, worst_d) +
              (fast ? "" : ", over the 60 s budget");
  c.details = json{{"instances", runs.general.size()}, {"min_ratio", worst_nc}, {"max_distortion", worst_d},
                   {"bound", 11.0}, {"within_time_budget", fast}};
  return c;
}

inline Criterion criterion2(const UnionRuns& runs) {
  Criterion c{2, "isometric sharp bound", true, "", json::object()};
  double worst = 0.0;
  for (const auto& e : runs.isometric) {
    worst = std::max(worst, e.report.distortion);
    if (!(e.report.distortion < kIsometricDistortionBound)) c.passed = false;
  }
  c.summary = fmt("50 instances at alpha 0.3114, max distortion %.6f < 8.93", worst);
  c.details = json{{"instances", runs.isometric.size()}, {"max_distortion", worst}, {"bound", 8.93}};
  return c;
}

inline Criterion criterion3(const UnionRuns& runs) {
  Criterion c{3, "distorted inputs", true, "", json::object()};
  double worst_ratio = 0.0;
  json per = json::array();
  for (std::size_t i = 0; i < runs.distorted.size(); ++i) {
    const auto& e = runs.distorted[i];
    const auto [da, db] = runs.distorted_d[i];
    const double bound = union_distortion_bound(da, db);
    worst_ratio = std::max(worst_ratio, e.report.distortion / bound);
    if (e.report.distortion > bound + kBoundSlack || !detail::audit_group_passed(e.audit, "Psi.distortion"))
      c.passed = false;
    per.push_back(json{{"d_a", da}, {"d_b", db}, {"distortion", e.report.distortion}, {"bound", bound}});
  }
  c.summary = fmt("20 instances, D in {1.5, 2, 3}, worst distortion/bound %.6f", worst_ratio);
  c.details = json{{"instances", std::move(per)}};
  return c;
}

inline Criterion criterion4(const UnionRuns& runs) {
  Criterion c{4, "one-sided map audit", true, "", json::object()};
  std::size_t checked = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (const auto* group : {&runs.general, &runs.isometric, &runs.distorted}) {
    for (const auto& e : *group) {
      ++checked;
      if (!detail::audit_group_passed(e.audit, ".item")) c.passed = false;
      slack = std::min(slack, detail::min_slack(e.audit, ".item"));
    }
  }
  c.summary = fmt("items (i)-(iii) on 120 runs, min relative slack %.6g", slack);
  c.details = json{{"runs", checked}, {"min_relative_slack", slack}};
  return c;
}

inline Criterion criterion5(const UnionRuns& runs) {
  Criterion c{5, "alpha-cover", true, "", json::object()};
  std::size_t covers = 0;
  double worst = 0.0;
  for (const auto* group : {&runs.general, &runs.isometric, &runs.distorted}) {
    for (const auto& e : *group) {
      covers += 2;
      if (!detail::audit_group_passed(e.audit, ".cover.")) c.passed = false;
      const double bound = f_lipschitz_bound(e.params.alpha);
      worst = std::max({worst, e.cover_a.lip_f / bound, e.cover_b.lip_f / bound});
    }
  }
  c.summary = fmt("%.0f covers, properties exhaustive, max lip_f/bound ", static_cast<double>(covers)) +
              fmt("%.6f", worst);
  c.details = json{{"covers", covers}, {"max_lip_ratio", worst}};
  return c;
}

/// Minimizes max_i w_i |y - t_i| over the plane by repeated grid zooming.
inline double grid_minimax(const std::vector<std::array<double, 2>>& t, const std::vector<double>& w,
                           std::array<double, 2>* arg) {
  auto f = [&](double x, double y) {
    double v = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) v = std::max(v, w[i] * std::hypot(x - t[i][0], y - t[i][1]));
    return v;
  };
  double lo_x = t[0][0], hi_x = t[0][0], lo_y = t[0][1], hi_y = t[0][1];
  for (const auto& p : t) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  double half = 0.5 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-12;
  double best = f(cx, cy);
  constexpr int kGrid = 80;
  for (int round = 0; round < 40; ++round) {
    double bx = cx, by = cy;
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j) {
        const double x = cx - half + 2.0 * half * i / kGrid;
        const double y = cy - half + 2.0 * half * j / kGrid;
        const double v = f(x, y);
        if (v < best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    cx = bx;
    cy = by;
    half *= 0.25;
  }
  *arg = {cx, cy};
  return best;
}

inline Criterion criterion6(const SuiteConfig& cfg) {
  Criterion c{6, "Kirszbraun certificate", true, "", json::object()};
  ExtensionOptions opt;
  opt.tol = cfg.tol;
  double worst_ratio = 0.0;
  std::size_t fallbacks = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Stream rng(cfg.seed, "acceptance.kirszbraun", i);
    const std::size_t a = rng.uniform_int(1, 8), b = rng.uniform_int(1, 8);
    const std::size_t ns = rng.uniform_int(2, 30);
    const std::size_t nx = rng.uniform_int(1, 40 - ns);
    PointCloud src(ns, a), tgt(ns, b), xs(nx, a);
    for (std::size_t r = 0; r < ns; ++r) {
      for (std::size_t k = 0; k < a; ++k) src(r, k) = rng.normal();
      for (std::size_t k = 0; k < b; ++k) tgt(r, k) = rng.normal();
    }
    for (std::size_t r = 0; r < nx; ++r)
      for (std::size_t k = 0; k < a; ++k) xs(r, k) = 1.5 * rng.normal();
    const PartialMap map = PartialMap::make(src, tgt);
    try {
      const SequentialExtension ext = extend_sequential(map, xs, opt);
      PointCloud all_s = src, all_t = tgt;
      for (std::size_t r = 0; r < nx; ++r) {
        all_s.push_back(xs.point(r));
        all_t.push_back(ext.images.point(r));
      }
      const double lip = pairwise_lipschitz(all_s, all_t);
      worst_ratio = std::max(worst_ratio, lip / map.lip);
      fallbacks += ext.fallback_count;
      if (lip > map.lip * (1.0 + 1e-7)) c.passed = false;
    } catch (const Error&) {
      c.passed = false;
    }
  }
  double worst_gap = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Stream rng(cfg.seed, "acceptance.planar", i);
    const std::size_t ns = rng.uniform_int(2, 8);
    PointCloud src(ns, 2), tgt(ns, 2);
    for (std::size_t r = 0; r < ns; ++r)
      for (std::size_t k = 0; k < 2; ++k) {
        src(r, k) = rng.normal();
        tgt(r, k) = rng.normal();
      }
    const std::vector<double> x = {rng.normal(), rng.normal()};
    const PartialMap map = PartialMap::make(src, tgt);
    std::vector<std::array<double, 2>> t;
    std::vector<double> w;
    for (std::size_t r = 0; r < ns; ++r) {
      t.push_back({tgt(r, 0), tgt(r, 1)});
      w.push_back(1.0 / distance(x, src.point(r)));
    }
    std::array<double, 2> arg{};
    const double oracle = grid_minimax(t, w, &arg);
    try {
      const PointExtension pe = extend_one_point(map, x, opt);
      const double gap = std::abs(pe.objective - oracle) / std::max(1.0, oracle);
      worst_gap = std::max(worst_gap, gap);
      if (gap > kGridMatchTol || pe.objective > map.lip * (1.0 + opt.tol)) c.passed = false;
    } catch (const Error&) {
      c.passed = false;
    }
  }
  c.summary = fmt2("100 maps, max lip ratio %.10f; 20 planar cases, max grid gap %.2e", worst_ratio, worst_gap);
  c.details = json{{"maps", 100},          {"max_lip_ratio", worst_ratio}, {"fallbacks", fallbacks},
                   {"planar_cases", 20},   {"max_grid_gap", worst_gap}};
  return c;
}

/// Projects every point onto k random Gaussian directions.
inline PointCloud random_projection(const PointCloud& pc, std::size_t k, Stream& rng) {
  Matrix g(pc.dim(), k);
  for (std::size_t r = 0; r < pc.dim(); ++r)
    for (std::size_t c = 0; c < k; ++c) g(r, c) = rng.normal();
  PointCloud out(pc.size(), k);
  for (std::size_t i = 0; i < pc.size(); ++i)
    for (std::size_t r = 0; r < pc.dim(); ++r) {
      const double v = pc(i, r);
      for (std::size_t c = 0; c < k; ++c) out(i, c) += v * g(r, c);
    }
  return out;
}

struct LowerBoundRun {
  std::size_t n = 0;
  bool delta_below_one = false;
  BipartiteSplit split;
  FiniteMetricSpace space;
};

inline Criterion criterion7(const SuiteConfig& cfg, std::vector<LowerBoundRun>* kept) {
  Criterion c{7, "lower bound", true, "", json::object()};
  json per = json::array();
  std::string summary;
  for (std::size_t n : {16, 64, 256}) {
    LowerBoundRun run;
    run.n = n;
    try {
      run.split = sample_split(n, cfg.seed);
      run.delta_below_one = true;
    } catch (const RetryBudgetExceeded&) {
      // Keep checking the certified bound with an unrestricted sample.
      run.split = sample_split(n, cfg.seed, std::numeric_limits<double>::infinity());
    }
    if (!run.delta_below_one) c.passed = false;
    auto [x, p] = build_123_metric(run.split);
    const double lb = certified_lower_bound(run.split);

    std::vector<std::pair<std::string, PointCloud>> probes;
    const UnionEmbedding emb = embed_union_isometric(x, p, options(cfg, kGeneralAlpha));
    probes.emplace_back("embed_union", emb.full);
    probes.emplace_back("mds_best_effort", mds_best_effort(x));
    Stream rng(cfg.seed, "acceptance.projection", n);
    for (std::size_t k = 0; k < 10; ++k) {
      const std::size_t dim = std::max<std::size_t>(2, emb.full.dim() / (k + 2));
      probes.emplace_back("projection_" + std::to_string(k), random_projection(emb.full, dim, rng));
    }
    double min_d = std::numeric_limits<double>::infinity();
    bool ratios_ok = true, bound_ok = true;
    for (const auto& [name, images] : probes) {
      double d;
      try {
        d = distortion_of(x, images, std::nullopt, cfg.threads).distortion;
      } catch (const CollapsedPairError&) {
        d = std::numeric_limits<double>::infinity();
      }
      min_d = std::min(min_d, d);
      if (d < lb - kLowerBoundSlack) bound_ok = false;
      try {
        ratio_check(run.split, images);
      } catch (const Error&) {
        ratios_ok = false;
      }
    }
    if (!bound_ok || !ratios_ok) c.passed = false;
    per.push_back(json{{"n", n},
                       {"delta_star", run.split.delta_star},
                       {"delta_below_one", run.delta_below_one},
                       {"attempts", run.split.attempts + 1},
                       {"certified_bound", lb},
                       {"min_measured_distortion", min_d},
                       {"embeddings", probes.size()},
                       {"bound_respected", bound_ok},
                       {"ratio_check", ratios_ok}});
    summary += (summary.empty() ? "" : "; ") + ("n=" + std::to_string(n)) +
               fmt2(" delta*=%.4f bound=%.4f", run.split.delta_star, lb) +
               (run.delta_below_one ? "" : " (delta* < 1 not reached in 64 samples)");
    run.space = std::move(x);
    kept->push_back(std::move(run));
  }
  c.summary = summary;
  c.details = json{{"sizes", std::move(per)}};
  return c;
}

inline std::vector<GlueInstance> glue_instances(const SuiteConfig& cfg) {
  std::vector<GlueInstance> out;
  {
    GlueInstance g;  // order-reversing map on {0, 1, 2}
    g.u_points = PointCloud::from_rows({{0.0}, {1.0}, {2.0}});
    g.v_points = PointCloud::from_rows({{0.0}, {1.0}, {2.0}});
    g.a_idx = {0, 1, 2};
    g.b_idx = {0, 1, 2};
    g.pairing = {0, 2, 1};
    out.push_back(std::move(g));
  }
  {
    GlueInstance g;  // singleton A
    g.u_points = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}});
    g.v_points = PointCloud::from_rows({{5.0}, {7.0}});
    g.a_idx = {0};
    g.b_idx = {1};
    out.push_back(std::move(g));
  }
  for (std::uint64_t i = 2; i < 20; ++i) {
    Stream rng(cfg.seed, "acceptance.glue", i);
    const std::size_t a = rng.uniform_int(1, 4);
    const std::size_t b = a + rng.uniform_int(0, 2);
    const std::size_t nu = rng.uniform_int(3, 24);
    const std::size_t na = rng.uniform_int(1, nu);
    const std::size_t extra_v = rng.uniform_int(0, 16);
    GlueInstance g;
    g.u_points = PointCloud(nu, a);
    for (std::size_t r = 0; r < nu; ++r)
      for (std::size_t k = 0; k < a; ++k) g.u_points(r, k) = rng.normal();
    // f = linear map with bounded condition number plus a small perturbation;
    // every third instance uses a distance-preserving embedding.
    const bool isometry = i % 3 == 0;
    Matrix m(b, a);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t k = 0; k < a; ++k) m(r, k) = (r == k ? 1.0 : 0.0) + (isometry ? 0.0 : 0.3 * rng.normal());
    g.v_points = PointCloud(na + extra_v, b);
    for (std::size_t k = 0; k < na; ++k) {
      g.a_idx.push_back(k);
      g.b_idx.push_back(extra_v + k);
      for (std::size_t r = 0; r < b; ++r) {
        double v = 0.0;
        for (std::size_t q = 0; q < a; ++q) v += m(r, q) * g.u_points(k, q);
        g.v_points(extra_v + k, r) = v + (isometry ? 0.0 : 0.05 * rng.normal());
      }
    }
    for (std::size_t e = 0; e < extra_v; ++e)
      for (std::size_t r = 0; r < b; ++r) g.v_points(e, r) = 2.0 * rng.normal();
    out.push_back(std::move(g));
  }
  return out;
}

inline Criterion criterion9(const SuiteConfig& cfg, std::vector<FiniteMetricSpace>* glued_spaces) {
  Criterion c{9, "external extension", true, "", json::object()};
  json per = json::array();
  double worst = 0.0;
  for (const auto& g : glue_instances(cfg)) {
    EmbedOptions o = options(cfg, kGeneralAlpha);
    o.alpha.reset();
    const ExternalExtension ext = external_extend(g, o);
    bool compatible = true;
    for (std::size_t k = 0; k < g.a_idx.size(); ++k) {
      const auto p1 = ext.f1.point(g.a_idx[k]);
      const auto p2 = ext.f2.point(g.image_of(k));
      if (!std::ranges::equal(p1, p2)) compatible = false;
    }
    const double d = std::max(ext.distortion_f1, ext.distortion_f2);
    worst = std::max(worst, d / ext.bound);
    if (!compatible || d > ext.bound + kBoundSlack) c.passed = false;
    per.push_back(json{{"identified", g.a_idx.size()},
                       {"d_f", ext.d_f},
                       {"distortion_f1", ext.distortion_f1},
                       {"distortion_f2", ext.distortion_f2},
                       {"bound", ext.bound},
                       {"compatible", compatible}});
    glued_spaces->push_back(ext.glued.space);
  }
  c.summary = fmt("20 glue instances, worst max(distortion)/(9 d_f + 2) %.6f", worst);
  c.details = json{{"instances", std::move(per)}};
  return c;
}

inline Criterion criterion8(const std::vector<LowerBoundRun>& lb, const std::vector<FiniteMetricSpace>& glued) {
  Criterion c{8, "metric validity", true, "", json::object()};
  std::size_t checked = 0, largest = 0;
  auto recheck = [&](const FiniteMetricSpace& x) {
    if (x.size() > 128) return;
    ++checked;
    largest = std::max(largest, x.size());
    try {
      validate_metric(x.matrix());
    } catch (const Error&) {
      c.passed = false;
    }
  };
  for (const auto& r : lb) recheck(r.space);
  for (const auto& x : glued) recheck(x);
  c.summary = "full triangle check on " + std::to_string(checked) + " spaces (largest " + std::to_string(largest) +
              " points)";
  c.details = json{{"spaces", checked}, {"largest", largest}};
  return c;
}

template <class Fn>
Criterion timed(const SuiteConfig& cfg, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c = fn();
  if (cfg.verbose_timing)
    std::fprintf(stderr, "criterion %d: %.2f s\n", c.id,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return c;
}

}  // namespace detail

/// Criteria 1 to 9.
inline SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  const detail::UnionRuns runs = detail::run_union_instances(cfg);
  if (cfg.verbose_timing)
    std::fprintf(stderr, "union runs: %.2f s (criterion 1 part %.2f s)\n",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), runs.general_seconds);
  rep.criteria.push_back(detail::criterion1(runs));
  rep.criteria.push_back(detail::criterion2(runs));
  rep.criteria.push_back(detail::criterion3(runs));
  rep.criteria.push_back(detail::criterion4(runs));
  rep.criteria.push_back(detail::criterion5(runs));
  rep.criteria.push_back(detail::timed(cfg, [&] { return detail::criterion6(cfg); }));
  std::vector<detail::LowerBoundRun> lb;
  rep.criteria.push_back(detail::timed(cfg, [&] { return detail::criterion7(cfg, &lb); }));
  std::vector<FiniteMetricSpace> glued;
  Criterion c9 = detail::timed(cfg, [&] { return detail::criterion9(cfg, &glued); });
  rep.criteria.push_back(detail::timed(cfg, [&] { return detail::criterion8(lb, glued); }));
  rep.criteria.push_back(std::move(c9));
  return rep;
}

/// Criterion 10: two runs with the same configuration serialize identically.
inline Criterion determinism(const SuiteConfig& cfg, const std::string& first_dump) {
  Criterion c{10, "determinism", true, "", json::object()};
  const std::string second = io::dump(run_suite(cfg).to_json());
  c.passed = second == first_dump;
  c.summary = c.passed ? "second run produced a byte-identical report (" + std::to_string(second.size()) + " bytes)"
                       : "second run differs from the first";
  c.details = json{{"bytes", second.size()}, {"identical", c.passed}};
  return c;
}

/// Full suite including the determinism re-run.
inline SuiteReport run_all(const SuiteConfig& cfg) {
  SuiteReport rep = run_suite(cfg);
  rep.criteria.push_back(determinism(cfg, io::dump(rep.to_json())));
  return rep;
}

inline std::string table(const SuiteReport& rep) {
  std::string out;
  for (const auto& c : rep.criteria) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d %-24s ", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str());
    out += head;
    out += c.summary;
    out += '\n';
  }
  out += rep.passed() ? "all criteria passed\n" : "some criteria FAILED\n";
  return out;
}

}  // namespace metric_union::acceptance
