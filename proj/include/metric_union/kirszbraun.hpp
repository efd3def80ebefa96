#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "metric_union/error.hpp"
#include "metric_union/linalg.hpp"

namespace metric_union {

// Finite Kirszbraun extension. Given a Lipschitz map between finite subsets
// of Euclidean spaces, place the image of a new point x so that
//
//     max_i |y - target_i| / |x - source_i|  <=  lip,
//
// which Kirszbraun's theorem guarantees is feasible. The placement solves the
// convex min-max problem min_y max_i w_i |y - target_i| with w_i = 1/d_i.

/// Lipschitz map given on finitely many points; `lip` is the pairwise max.
struct PartialMap {
  PointCloud sources;
  PointCloud targets;
  double lip = 0.0;

  /// Validates shapes, rejects duplicate sources with different targets and
  /// computes the certified Lipschitz constant.
  static PartialMap make(PointCloud sources, PointCloud targets) {
    if (sources.size() != targets.size())
      throw LengthMismatchError("partial map has " + std::to_string(sources.size()) + " sources and " +
                                std::to_string(targets.size()) + " targets");
    PartialMap m{std::move(sources), std::move(targets), 0.0};
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
      for (std::size_t j = i + 1; j < m.sources.size(); ++j) {
        const double ds = m.sources.distance(i, j);
        const double dt = m.targets.distance(i, j);
        if (ds == 0.0) {
          if (dt != 0.0) throw InconsistentDuplicate("duplicate sources carry different targets", {i, j}, dt);
          continue;
        }
        m.lip = std::max(m.lip, dt / ds);
      }
    }
    return m;
  }

  std::size_t size() const noexcept { return sources.size(); }
};

enum class ExtensionSolver { InteriorPoint, BisectionProjection };

inline const char* to_string(ExtensionSolver s) {
  return s == ExtensionSolver::InteriorPoint ? "interior_point" : "bisection_projection";
}

struct ExtensionOptions {
  double tol = 1e-7;  ///< relative slack on the Lipschitz level
  ExtensionSolver solver = ExtensionSolver::InteriorPoint;
  /// Relative distance under which a source counts as a duplicate of x.
  double duplicate_rel_tol = 1e-12;
};

/// Placement of one new point.
struct PointExtension {
  std::vector<double> y;
  double objective = 0.0;    ///< max_i |y - target_i| / d_i
  double level = 0.0;        ///< the Lipschitz level being certified against
  double certificate = 0.0;  ///< |convex combination of active unit directions|; 0 if objective is 0
  bool duplicate = false;    ///< x coincided with a source
  ExtensionSolver solver = ExtensionSolver::InteriorPoint;
};

/// First-order optimality threshold on the certificate norm.
inline constexpr double kCertificateTol = 1e-6;

namespace detail {

struct MinimaxProblem {
  std::vector<std::span<const double>> targets;
  std::vector<double> w;  // 1 / d_i
  std::size_t dim = 0;

  double value(std::span<const double> y) const {
    double f = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) f = std::max(f, w[i] * distance(y, targets[i]));
    return f;
  }
};

// Smallest-norm point of the convex hull of unit vectors, by projected
// gradient on the simplex. Only used to certify the fallback solver.
inline double min_norm_in_hull(const std::vector<std::vector<double>>& dirs) {
  const std::size_t k = dirs.size();
  if (k == 0) return std::numeric_limits<double>::infinity();
  const std::size_t dim = dirs.front().size();
  std::vector<double> c(k, 1.0 / static_cast<double>(k)), v(dim), grad(k), trial(k);
  auto combine = [&](const std::vector<double>& coef) {
    std::ranges::fill(v, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t d = 0; d < dim; ++d) v[d] += coef[i] * dirs[i][d];
  };
  auto project_simplex = [](std::vector<double>& p) {
    std::vector<double> s = p;
    std::ranges::sort(s, std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      cum += s[i];
      const double t = (cum - 1.0) / static_cast<double>(i + 1);
      if (s[i] - t > 0) theta = t;
    }
    for (double& x : p) x = std::max(0.0, x - theta);
  };
  const double step = 1.0 / static_cast<double>(k);  // Lipschitz constant of the gradient is <= k
  for (int it = 0; it < 20000; ++it) {
    combine(c);
    for (std::size_t i = 0; i < k; ++i) grad[i] = dot(dirs[i], v);
    for (std::size_t i = 0; i < k; ++i) trial[i] = c[i] - step * grad[i];
    project_simplex(trial);
    double change = 0.0;
    for (std::size_t i = 0; i < k; ++i) change = std::max(change, std::abs(trial[i] - c[i]));
    c = trial;
    if (change < 1e-15) break;
  }
  combine(c);
  return norm(v);
}

inline std::vector<std::vector<double>> active_directions(const MinimaxProblem& p, std::span<const double> y,
                                                          double f, double rel) {
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    const double r = distance(y, p.targets[i]);
    if (r == 0.0 || p.w[i] * r < f * (1.0 - rel)) continue;
    std::vector<double> e(p.dim);
    for (std::size_t d = 0; d < p.dim; ++d) e[d] = (y[d] - p.targets[i][d]) / r;
    dirs.push_back(std::move(e));
  }
  return dirs;
}

struct SolveResult {
  std::vector<double> y;
  double objective = 0.0;
  double certificate = 0.0;
  bool numerical_failure = false;
};

// Log-barrier path following on   min s  s.t.  w_i |u - t_i| <= s,
// in coordinates centered at the weighted centroid and scaled so the
// starting objective is 1. Stops once the duality-gap bound 2m/tau is within
// 1e-2 * tol of the objective and the multiplier certificate is below
// kCertificateTol. Throws SolverStall when progress stops first.
inline SolveResult solve_interior_point(const MinimaxProblem& prob, std::span<const double> center, double tol) {
  const std::size_t m = prob.targets.size();
  const std::size_t dim = prob.dim;
  SolveResult out;

  double sigma = prob.value(center);
  if (sigma == 0.0) {
    out.y.assign(center.begin(), center.end());
    return out;
  }
  double spread = 0.0;
  for (const auto& t : prob.targets) spread = std::max(spread, distance(center, t));
  // u = (y - center) / spread; weights rescaled so w'|u - t'| = w|y - t| / sigma.
  std::vector<std::vector<double>> t(m, std::vector<double>(dim));
  std::vector<double> rho(m);  // squared rescaled weights
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t d = 0; d < dim; ++d) t[i][d] = (prob.targets[i][d] - center[d]) / spread;
    const double wi = prob.w[i] * spread / sigma;
    rho[i] = wi * wi;
  }

  const std::size_t nv = dim + 1;  // variables (u, s)
  std::vector<double> z(nv, 0.0), r(dim), q(m), grad(nv), step(nv), trial(nv);
  z[dim] = 1.5;

  auto slack_ok = [&](const std::vector<double>& v, std::vector<double>* qs) {
    const double s = v[dim];
    if (!(s > 0.0)) return false;
    for (std::size_t i = 0; i < m; ++i) {
      double rr = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double dd = v[d] - t[i][d];
        rr += dd * dd;
      }
      const double wr = std::sqrt(rho[i] * rr);
      const double qi = (s - wr) * (s + wr);
      if (!(qi > 0.0)) return false;
      if (qs) (*qs)[i] = qi;
    }
    return true;
  };
  // Barrier change from `from` (slacks q_from) to `to`, evaluated as
  // tau * ds - sum log1p(dq / q) so small decreases survive rounding.
  std::vector<double> q_to(m);
  auto barrier_change = [&](const std::vector<double>& from, const std::vector<double>& q_from,
                            const std::vector<double>& to, double tau) {
    if (!slack_ok(to, &q_to)) return std::numeric_limits<double>::infinity();
    double f = tau * (to[dim] - from[dim]);
    for (std::size_t i = 0; i < m; ++i) f -= std::log1p((q_to[i] - q_from[i]) / q_from[i]);
    return f;
  };

  double tau = 2.0 * static_cast<double>(m);
  const double gap_target_rel = 1e-2 * tol;
  double last_s = std::numeric_limits<double>::infinity();
  int stalled_rounds = 0;

  for (int outer = 0; outer < 400; ++outer) {
    // Centering by damped Newton.
    for (int inner = 0; inner < 200; ++inner) {
      if (!slack_ok(z, &q)) {
        out.numerical_failure = true;
        return out;
      }
      const double s = z[dim];
      Matrix h(nv, nv);
      std::ranges::fill(grad, 0.0);
      grad[dim] = tau;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t d = 0; d < dim; ++d) r[d] = z[d] - t[i][d];
        const double qi = q[i];
        const double inv_q = 1.0 / qi;
        const double inv_q2 = inv_q * inv_q;
        grad[dim] -= 2.0 * s * inv_q;
        h(dim, dim) += -2.0 * inv_q + 4.0 * s * s * inv_q2;
        for (std::size_t a = 0; a < dim; ++a) {
          grad[a] += 2.0 * rho[i] * r[a] * inv_q;
          const double hsa = -4.0 * s * rho[i] * r[a] * inv_q2;
          h(a, dim) += hsa;
          h(dim, a) += hsa;
          h(a, a) += 2.0 * rho[i] * inv_q;
          const double ka = 4.0 * rho[i] * rho[i] * r[a] * inv_q2;
          for (std::size_t b = 0; b < dim; ++b) h(a, b) += ka * r[b];
        }
      }
      std::vector<double> neg(nv);
      for (std::size_t k = 0; k < nv; ++k) neg[k] = -grad[k];
      auto sol = cholesky_solve(h, neg);
      if (!sol) {
        out.numerical_failure = true;
        return out;
      }
      step = *sol;
      const double decrement2 = -dot(grad, step);
      if (!(decrement2 >= 0.0) || !std::isfinite(decrement2)) {
        out.numerical_failure = true;
        return out;
      }
      if (decrement2 < 1e-14) break;
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-20) {
        for (std::size_t k = 0; k < nv; ++k) trial[k] = z[k] + alpha * step[k];
        if (barrier_change(z, q, trial, tau) <= -0.25 * alpha * decrement2) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      z = trial;
    }

    std::vector<double> u(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(dim));
    double s_true = 0.0;
    for (std::size_t i = 0; i < m; ++i) s_true = std::max(s_true, std::sqrt(rho[i] * squared_distance(u, t[i])));

    const double gap = 2.0 * static_cast<double>(m) / tau;
    if (gap <= gap_target_rel * s_true) {
      // Multiplier certificate from the centering conditions:
      //   sum_i (2 rho_i |r_i| / q_i) e_i = 0,   e_i = r_i / |r_i|.
      slack_ok(z, &q);
      std::vector<double> v(dim, 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double rn = std::sqrt(squared_distance(u, t[i]));
        if (rn == 0.0 || std::sqrt(rho[i]) * rn < s_true * (1.0 - 1e-3)) continue;
        const double kappa = 2.0 * rho[i] * rn / q[i];
        total += kappa;
        for (std::size_t d = 0; d < dim; ++d) v[d] += kappa * (u[d] - t[i][d]) / rn;
      }
      const double kkt = total > 0.0 ? norm(v) / total : std::numeric_limits<double>::infinity();
      std::vector<double> y(dim);
      for (std::size_t d = 0; d < dim; ++d) y[d] = center[d] + spread * u[d];
      const double fy = prob.value(y);
      // The multiplier estimate loses accuracy as tau grows (q_i ~ 1/tau);
      // the primal hull certificate does not depend on the multipliers.
      const double cert =
          kkt <= kCertificateTol ? kkt : std::min(kkt, min_norm_in_hull(active_directions(prob, y, fy, 1e-6)));
      if (cert <= kCertificateTol) {
        out.y = std::move(y);
        out.objective = fy;
        out.certificate = cert;
        return out;
      }
    }

    if (z[dim] >= last_s * (1.0 - 1e-14)) {
      if (++stalled_rounds >= 3)
        throw SolverStall("interior-point iterations stopped improving before reaching the tolerance certificate",
                          {}, sigma * s_true);
    } else {
      stalled_rounds = 0;
    }
    last_s = z[dim];
    tau *= 10.0;
  }
  throw SolverStall("interior-point iteration budget exhausted", {}, sigma * z[dim]);
}

// Bisection on the level L with cyclic projections onto the balls
// B(t_i, L d_i). The best feasible point found is kept.
inline SolveResult solve_bisection(const MinimaxProblem& prob, std::span<const double> center, double level,
                                   double tol) {
  const std::size_t m = prob.targets.size();
  const std::size_t dim = prob.dim;
  SolveResult out;
  std::vector<double> best(center.begin(), center.end());
  double hi = prob.value(best);
  double lo = 0.0;
  std::vector<double> y(dim);
  for (int it = 0; it < 200 && hi > 0.0; ++it) {
    if (hi - lo <= 1e-2 * tol * hi && hi <= level * (1.0 + tol)) break;
    const double mid = 0.5 * (lo + hi);
    y = best;
    bool feasible = false;
    for (int sweep = 0; sweep < 5000; ++sweep) {
      double worst = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double radius = mid / prob.w[i];
        const double dd = distance(y, prob.targets[i]);
        if (dd > radius) {
          worst = std::max(worst, (dd - radius) / radius);
          const double shrink = radius / dd;
          for (std::size_t d = 0; d < dim; ++d) y[d] = prob.targets[i][d] + shrink * (y[d] - prob.targets[i][d]);
        }
      }
      if (worst <= 1e-13) {
        feasible = true;
        break;
      }
    }
    const double fy = prob.value(y);
    if (feasible || fy < hi) {
      if (fy < hi) {
        hi = fy;
        best = y;
      }
    }
    if (!feasible) lo = mid;
  }
  out.y = best;
  out.objective = hi;
  if (hi > 0.0) out.certificate = min_norm_in_hull(active_directions(prob, best, hi, 1e-6));
  return out;
}

inline std::vector<double> weighted_centroid(const MinimaxProblem& p) {
  std::vector<double> c(p.dim, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    const double wt = p.w[i] * p.w[i];
    total += wt;
    for (std::size_t d = 0; d < p.dim; ++d) c[d] += wt * p.targets[i][d];
  }
  for (double& v : c) v /= total;
  return c;
}

// Core placement against an explicit constraint list (sources/targets may
// hold more rows than the original map during sequential extension).
inline PointExtension place_point(const PointCloud& sources, const PointCloud& targets, std::size_t count,
                                  std::span<const double> x, double level, const ExtensionOptions& opt) {
  if (count == 0) throw InputError("EmptyPartialMap", "cannot extend an empty partial map");
  if (x.size() != sources.dim())
    throw LengthMismatchError("point has dimension " + std::to_string(x.size()) + ", sources have " +
                              std::to_string(sources.dim()));
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("NonFiniteCoordinate", "extension point is not finite");

  PointExtension res;
  res.level = level;
  res.solver = opt.solver;
  std::vector<double> d(count);
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    d[i] = distance(x, sources.point(i));
    scale = std::max(scale, d[i]);
  }
  // Duplicates short-circuit: the image is forced.
  const double snap = opt.duplicate_rel_tol * scale;
  std::size_t dup = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (d[i] <= snap) {
      if (dup == count) {
        dup = i;
      } else if (squared_distance(targets.point(i), targets.point(dup)) != 0.0) {
        throw InconsistentDuplicate("point duplicates sources with different targets", {dup, i});
      }
    }
  }
  MinimaxProblem prob;
  prob.dim = targets.dim();
  for (std::size_t i = 0; i < count; ++i) {
    if (d[i] <= snap) continue;
    prob.targets.push_back(targets.point(i));
    prob.w.push_back(1.0 / d[i]);
  }
  if (dup != count) {
    res.duplicate = true;
    res.y.assign(targets.point(dup).begin(), targets.point(dup).end());
    res.objective = prob.targets.empty() ? 0.0 : prob.value(res.y);
    return res;
  }

  // All targets coincide: that point has objective 0.
  bool same = true;
  for (std::size_t i = 1; i < prob.targets.size() && same; ++i)
    same = squared_distance(prob.targets[i], prob.targets[0]) == 0.0;
  if (same) {
    res.y.assign(prob.targets[0].begin(), prob.targets[0].end());
    res.objective = 0.0;
    return res;
  }

  const auto center = weighted_centroid(prob);
  SolveResult sol;
  if (opt.solver == ExtensionSolver::InteriorPoint) {
    bool stalled = false;
    try {
      sol = solve_interior_point(prob, center, opt.tol);
    } catch (const SolverStall&) {
      // With tol = 0 no finite run can certify, so the stall is the answer.
      if (opt.tol == 0.0) throw;
      stalled = true;
    }
    if (stalled || sol.numerical_failure) {
      sol = solve_bisection(prob, center, level, opt.tol);
      res.solver = ExtensionSolver::BisectionProjection;
    }
  } else {
    sol = solve_bisection(prob, center, level, opt.tol);
  }
  res.y = std::move(sol.y);
  res.objective = sol.objective;
  res.certificate = res.objective == 0.0 ? 0.0 : sol.certificate;
  if (res.objective > level * (1.0 + opt.tol))
    throw SolverStall("placement objective " + std::to_string(res.objective) + " exceeds the Lipschitz level " +
                          std::to_string(level) + " by more than the tolerance",
                      {}, res.objective);
  return res;
}

}  // namespace detail

/// Places the image of x so every ratio |y - target_i| / |x - source_i| is at
/// most lip * (1 + tol). A source equal to x forces y to its target.
inline PointExtension extend_one_point(const PartialMap& map, std::span<const double> x,
                                       const ExtensionOptions& opt = {}) {
  return detail::place_point(map.sources, map.targets, map.size(), x, map.lip, opt);
}

inline PointExtension extend_one_point(const PartialMap& map, std::span<const double> x, double tol) {
  ExtensionOptions opt;
  opt.tol = tol;
  return extend_one_point(map, x, opt);
}

/// Pairwise Lipschitz constant of the map source_i -> target_i.
inline double pairwise_lipschitz(const PointCloud& sources, const PointCloud& targets,
                                 std::pair<std::size_t, std::size_t>* witness = nullptr) {
  double lip = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      const double ds = sources.distance(i, j);
      if (ds == 0.0) continue;
      const double ratio = targets.distance(i, j) / ds;
      if (ratio > lip) {
        lip = ratio;
        if (witness) *witness = {i, j};
      }
    }
  }
  return lip;
}

struct SequentialExtension {
  PointCloud images;  ///< one image per input point, same order
  double lip = 0.0;   ///< level of the original map
  double final_lip = 0.0;  ///< measured constant of the extended map on sources ∪ xs
  double max_certificate = 0.0;
  std::size_t fallback_count = 0;
};

/// Extends the map to each point of xs in turn; every placed point joins the
/// constraint set of the next. The final map on sources ∪ xs is checked
/// pairwise against lip * (1 + tol) and CertificateViolation is thrown if it
/// fails.
inline SequentialExtension extend_sequential(const PartialMap& map, const PointCloud& xs,
                                             const ExtensionOptions& opt = {}) {
  SequentialExtension out;
  out.lip = map.lip;
  out.images = PointCloud(xs.size(), map.targets.dim());
  if (xs.empty()) {
    out.final_lip = map.lip;
    return out;
  }
  PointCloud src = map.sources;
  PointCloud tgt = map.targets;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto placed = detail::place_point(src, tgt, src.size(), xs.point(k), map.lip, opt);
    if (placed.solver != opt.solver) ++out.fallback_count;
    out.max_certificate = std::max(out.max_certificate, placed.certificate);
    std::ranges::copy(placed.y, out.images.point(k).begin());
    src.push_back(xs.point(k));
    tgt.push_back(placed.y);
  }
  std::pair<std::size_t, std::size_t> w{0, 0};
  out.final_lip = pairwise_lipschitz(src, tgt, &w);
  if (out.final_lip > map.lip * (1.0 + opt.tol) && out.final_lip > 0.0)
    throw CertificateViolation("extended map has Lipschitz constant " + std::to_string(out.final_lip) +
                                   " above the level " + std::to_string(map.lip),
                               {w.first, w.second}, out.final_lip);
  return out;
}

}  // namespace metric_union
