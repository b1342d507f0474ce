#include "mdlambo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace mdlambo {

std::vector<double> f_accuracy(const std::vector<double>& f_values, double f_best) {
  if (f_values.empty()) throw std::invalid_argument("f_accuracy: empty trace");
  const double f0 = f_values.front();
  std::vector<double> acc(f_values.size());
  if (f0 == f_best) {
    std::fill(acc.begin(), acc.end(), 1.0);
    return acc;
  }
  double best = f0;
  for (size_t i = 0; i < f_values.size(); ++i) {
    best = std::min(best, f_values[i]);
    acc[i] = std::clamp((best - f0) / (f_best - f0), 0.0, 1.0);
  }
  return acc;
}

std::optional<int> solve_iterations(const std::vector<double>& f_values, double f_best,
                                    double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("solve_iterations: tau in (0,1)");
  const auto acc = f_accuracy(f_values, f_best);
  for (size_t i = 0; i < acc.size(); ++i)
    if (acc[i] >= 1.0 - tau) return static_cast<int>(i);
  return std::nullopt;
}

ProfileResult profile(const RunTable& table, double tau, const ProfileOptions& opt) {
  std::set<std::string> algorithms, problems;
  for (const auto& [key, _] : table.entries) {
    algorithms.insert(key.algorithm);
    problems.insert(key.problem);
  }

  // Relative solve counts r_{a,p}; problems nobody solves leave the pool.
  std::map<std::string, std::map<std::string, double>> ratios;  // problem -> algo -> r
  int dropped = 0;
  int pool = 0;
  for (const auto& prob : problems) {
    std::map<std::string, int> solves;
    int n_min = std::numeric_limits<int>::max();
    for (const auto& algo : algorithms) {
      const auto it = table.entries.find({algo, prob});
      if (it == table.entries.end()) continue;
      const auto n = solve_iterations(it->second.f_values, it->second.f_best, tau);
      if (n) {
        solves[algo] = *n;
        n_min = std::min(n_min, *n);
      }
    }
    if (solves.empty()) {
      ++dropped;
      continue;
    }
    ++pool;
    for (const auto& algo : algorithms) {
      const auto it = solves.find(algo);
      if (it == solves.end())
        ratios[prob][algo] = std::numeric_limits<double>::infinity();
      else
        ratios[prob][algo] = n_min == 0 ? 1.0 : static_cast<double>(it->second) / n_min;
    }
  }

  ProfileResult out;
  out.dropped_problems = dropped;
  if (pool == 0) return out;

  std::vector<double> grid(opt.grid_points);
  for (int i = 0; i < opt.grid_points; ++i)
    grid[i] = std::exp(std::log(opt.alpha_max) * i / (opt.grid_points - 1));

  for (const auto& algo : algorithms) {
    ProfileCurve curve;
    curve.algorithm = algo;
    curve.tau = tau;
    curve.alpha = grid;
    curve.rho.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      int solved = 0;
      for (const auto& [prob, by_algo] : ratios) {
        const auto it = by_algo.find(algo);
        if (it != by_algo.end() && it->second <= grid[i]) ++solved;
      }
      curve.rho[i] = static_cast<double>(solved) / pool;
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

std::vector<std::string> fast_algorithms(const RunTable& table, const std::string& problem,
                                         double tau) {
  std::map<std::string, int> solves;
  int n_min = std::numeric_limits<int>::max();
  for (const auto& [key, trace] : table.entries) {
    if (key.problem != problem) continue;
    const auto n = solve_iterations(trace.f_values, trace.f_best, tau);
    if (n) {
      solves[key.algorithm] = *n;
      n_min = std::min(n_min, *n);
    }
  }
  std::vector<std::string> out;
  for (const auto& [algo, n] : solves)
    if (n == n_min) out.push_back(algo);
  return out;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("percentile: empty sample");
  if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile: p outside [0, 100]");
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = p / 100.0 * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - lo;
  return (1.0 - w) * v[lo] + w * v[hi];
}

std::vector<TnSummary> tn_error_report(const std::map<int, std::vector<double>>& samples) {
  // Subspaces with identical enclosing spans pool their samples.
  auto canonical = [](int idx) {
    if (idx == 11) return 12;
    if (idx == 15) return 16;
    if (idx == 9) return 13;
    return idx;
  };

  std::map<int, TnSummary> merged;
  for (const auto& [idx, values] : samples) {
    if (values.empty()) throw std::invalid_argument("tn_error_report: empty sample");
    const int c = canonical(idx);
    auto& summary = merged[c];
    summary.subspace = c;
    if (idx != c) summary.merged_from.push_back(idx);
    for (double v : values) {
      summary.max_value = summary.count == 0 ? v : std::max(summary.max_value, v);
      ++summary.count;
    }
  }

  std::vector<TnSummary> out;
  for (auto& [c, summary] : merged) {
    std::vector<double> pooled;
    for (const auto& [idx, values] : samples)
      if (canonical(idx) == c) pooled.insert(pooled.end(), values.begin(), values.end());
    std::sort(pooled.begin(), pooled.end());
    summary.q1 = percentile(pooled, 25.0);
    summary.median = percentile(pooled, 50.0);
    summary.q3 = percentile(pooled, 75.0);
    summary.p40 = percentile(pooled, 40.0);
    summary.p60 = percentile(pooled, 60.0);
    out.push_back(summary);
  }
  return out;
}

}  // namespace mdlambo
