#pragma once

// Small derivative-free minimizers used for Gaussian benchmarks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace sqe {

struct ScalarMinimum {
  double x;
  double value;
};

/// Golden-section search on [lo, hi] for a unimodal function.
template <typename F>
ScalarMinimum golden_section(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2;
  return {x, f(x)};
}

struct GridMinimum {
  double x;
  double value;
  bool at_boundary;
};

/// Evaluate on the supplied grid, then refine the best cell by golden section.
template <typename F>
GridMinimum grid_then_golden(F&& f, const std::vector<double>& grid, double tol = 1e-12) {
  std::size_t best = 0;
  double best_val = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(grid.size() - 1, best + 1);
  ScalarMinimum refined = golden_section(f, grid[lo], grid[hi], tol);
  if (refined.value > best_val) refined = {grid[best], best_val};
  return {refined.x, refined.value, best == 0 || best == grid.size() - 1};
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

struct BoxMinimum {
  Eigen::VectorXd x;
  double value;
  bool converged;
};

/// Nelder-Mead restricted to a box by clamping trial points.
template <typename F>
BoxMinimum nelder_mead_box(F&& f, Eigen::VectorXd start, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                           double step, double ftol = 1e-13, int max_iter = 4000) {
  const Eigen::Index n = start.size();
  auto clamp = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::clamp(v(i), lo(i), hi(i));
    return v;
  };
  std::vector<Eigen::VectorXd> simplex(n + 1, clamp(start));
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = simplex[0];
    v(i) += (v(i) + step <= hi(i)) ? step : -step;
    simplex[i + 1] = clamp(v);
  }
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = f(simplex[i]);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Eigen::Index> order(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> v2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      v2.push_back(vals[i]);
    }
    simplex = std::move(s2);
    vals = std::move(v2);
    if (std::abs(vals[n] - vals[0]) <= ftol * (1.0 + std::abs(vals[0]))) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd xr = clamp(centroid + (centroid - simplex[n]));
    const double fr = f(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = clamp(centroid + 2.0 * (centroid - simplex[n]));
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        vals[n] = fe;
      } else {
        simplex[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      simplex[n] = xr;
      vals[n] = fr;
    } else {
      const Eigen::VectorXd xc = clamp(centroid + 0.5 * (simplex[n] - centroid));
      const double fcv = f(xc);
      if (fcv < vals[n]) {
        simplex[n] = xc;
        vals[n] = fcv;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          simplex[i] = clamp(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
          vals[i] = f(simplex[i]);
        }
      }
    }
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (vals[i] < vals[best]) best = i;
  }
  return {simplex[best], vals[best], converged};
}

}  // namespace sqe
