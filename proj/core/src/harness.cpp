#include "mdlambo/harness.hpp"

#include "mdlambo/dfo.hpp"

#include <atomic>
#include <cstdio>
#include <thread>

namespace mdlambo {

std::string mdlambo_algorithm_id(int subspace_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mdlambo-%02d", subspace_index);
  return buf;
}

std::vector<ProblemSpec> harness_problems(const HarnessConfig& cfg) {
  std::vector<ProblemSpec> base = select_problems(cfg.problem_glob);
  std::vector<ProblemSpec> out;
  for (const auto& p : base) {
    out.push_back(p);
    const auto variants = default_variants(cfg.variants, cfg.seed ^ 0x9e3779b97f4a7c15ULL, p.n);
    for (const auto& v : variants) {
      ProblemSpec vp = apply_variant(p, v);
      vp.name = p.name + "+" + vp.variant;
      out.push_back(std::move(vp));
    }
  }
  return out;
}

namespace {

CellResult run_cell(const std::string& algorithm_id, const ProblemSpec& problem,
                    const HarnessConfig& cfg, std::uint64_t cell_seed) {
  CellResult cell;
  cell.algorithm_id = algorithm_id;
  cell.problem = problem;
  const Objective f = make_objective(problem);

  if (algorithm_id == "sgd") {
    std::mt19937_64 rng(cell_seed);
    GradientSampler sampler;
    if (!problem.residuals.empty()) {
      const auto blocks = problem.residuals;  // shared by value
      sampler = [blocks](const Vector& x, std::mt19937_64& r) {
        std::uniform_int_distribution<size_t> pick(0, blocks.size() - 1);
        return Vector(static_cast<double>(blocks.size()) *
                      blocks[pick(r)].gradient(x));
      };
    }
    cell.run = run_sgd(f, problem.x0, cfg.sgd, rng, sampler);
  } else if (algorithm_id == "lbfgs") {
    cell.run = run_lbfgs(f, problem.x0, cfg.lbfgs);
  } else {
    DriverConfig dc = cfg.driver;
    dc.subspace_index = std::stoi(algorithm_id.substr(algorithm_id.find('-') + 1));
    cell.run = run(f, problem.x0, dc);
  }
  cell.final_grad_norm = f.gradient(cell.run.best_x).norm();
  cell.termination = to_string(cell.run.termination);
  return cell;
}

}  // namespace

GridResult run_grid(const HarnessConfig& cfg) {
  GridResult grid;
  grid.problems = harness_problems(cfg);

  std::vector<std::string> algorithms;
  for (int idx : cfg.subspaces) algorithms.push_back(mdlambo_algorithm_id(idx));
  if (cfg.with_baselines) {
    algorithms.push_back("sgd");
    algorithms.push_back("lbfgs");
  }

  struct Task {
    std::string algorithm;
    const ProblemSpec* problem;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& p : grid.problems) {
    std::uint64_t pseed = cfg.seed;
    for (char c : p.name) pseed = pseed * 1099511628211ULL + static_cast<unsigned char>(c);
    for (const auto& a : algorithms) {
      std::uint64_t s = pseed;
      for (char c : a) s = s * 1099511628211ULL + static_cast<unsigned char>(c);
      tasks.push_back({a, &p, s});
    }
  }

  grid.cells.resize(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      grid.cells[i] = run_cell(tasks[i].algorithm, *tasks[i].problem, cfg, tasks[i].seed);
    }
  };
  const int nthreads = std::max(1, cfg.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return grid;
}

RunTable grid_to_table(const GridResult& grid) {
  RunTable table;
  for (const auto& cell : grid.cells) {
    RunTrace trace;
    trace.f_values = cell.run.f_series;
    trace.f_best = cell.problem.f_best;
    trace.status = cell.termination;
    table.entries[{cell.algorithm_id, cell.problem.name}] = std::move(trace);
  }
  return table;
}

std::vector<int> distinct_subspace_indices() {
  return {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 13, 14, 16};
}

TnErrorResult run_tn_error_experiment(const HarnessConfig& cfg, int max_problem_dim,
                                      std::vector<int> subspaces) {
  TnErrorResult result;
  for (auto& p : harness_problems(cfg))
    if (p.n <= max_problem_dim) result.problems.push_back(std::move(p));

  if (subspaces.empty()) subspaces = distinct_subspace_indices();

  struct Task {
    int subspace;
    const ProblemSpec* problem;
  };
  std::vector<Task> tasks;
  for (const auto& p : result.problems)
    for (int s : subspaces) tasks.push_back({s, &p});

  std::vector<std::vector<double>> outputs(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& task = tasks[i];
      const Objective f = make_objective(*task.problem);
      DriverConfig dc = cfg.driver;
      dc.subspace_index = task.subspace;

      std::vector<double>& errors = outputs[i];
      auto observer = [&](const IterationView& view) {
        // Interpolation model on the projected subspace versus the
        // projected Taylor model, compared through their Newton steps.
        const auto set = make_interpolation_set(view.P.q(), view.delta);
        CubicModel interp;
        try {
          interp = build_interpolation_model(view.objective, view.P, view.x, set);
        } catch (const std::invalid_argument&) {
          return;  // non-poised set (pathological scale); skip the sample
        }
        errors.push_back(tn_step_error(interp, view.projected_quadratic,
                                       Vector::Zero(view.P.q()), view.delta));
      };
      run(f, task.problem->x0, dc, observer);
    }
  };
  const int nthreads = std::max(1, cfg.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < tasks.size(); ++i)
    result.samples[{tasks[i].subspace, tasks[i].problem->name}] = std::move(outputs[i]);
  return result;
}

}  // namespace mdlambo
