// Command line front end: grid runs, performance profiles, the
// interpolation-versus-Taylor Newton-step experiment, and single solves.
//
// Exit codes: 0 ok, 2 bad arguments, 3 runtime/IO failure, 4 unknown problem.

#include "mdlambo/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mdlambo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitNoProblem = 4;

constexpr const char* kBanner =
    "suite-local: results use the bundled desk-scale problem set, not the "
    "published corpus";

struct CliError {
  int code;
  std::string message;
};

std::vector<int> parse_subspace_selection(const std::string& arg) {
  if (arg == "all") {
    std::vector<int> all(16);
    for (int i = 0; i < 16; ++i) all[i] = i + 1;
    return all;
  }
  int idx = 0;
  try {
    size_t pos = 0;
    idx = std::stoi(arg, &pos);
    if (pos != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw CliError{kExitBadArgs, "--subspace expects an index 1..16 or 'all', got '" + arg + "'"};
  }
  try {
    subspace_catalogue(idx);
  } catch (const std::exception& e) {
    throw CliError{kExitBadArgs, e.what()};
  }
  return {idx};
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw CliError{kExitRuntime, "cannot create output directory '" + out + "'"};
  // Probe writability up front so failures map to one exit code.
  const fs::path probe = dir / ".write_probe";
  std::ofstream f(probe);
  if (!f) throw CliError{kExitRuntime, "output directory '" + out + "' is not writable"};
  f.close();
  fs::remove(probe, ec);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw CliError{kExitRuntime, "cannot write " + p.string()};
  return f;
}

void load_config(const std::string& path, HarnessConfig& cfg) {
  if (path.empty()) return;
  try {
    apply_config_file(path, cfg);
  } catch (const std::exception& e) {
    throw CliError{kExitBadArgs, e.what()};
  }
}

std::string trace_filename(const std::string& algo, const std::string& prob) {
  std::string s = algo + "__" + prob;
  for (char& c : s)
    if (c == '/' || c == '*' || c == '+') c = '_';
  return s + ".jsonl";
}

int cmd_run(const HarnessConfig& cfg, const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  std::cout << kBanner << "\n";
  GridResult grid = run_grid(cfg);

  std::vector<RunCsvRow> rows;
  for (const auto& cell : grid.cells) {
    auto cell_rows =
        run_to_rows(cell.algorithm_id, cell.problem.name, cell.run, cell.final_grad_norm);
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  }
  {
    auto f = open_out(dir / "runs.csv");
    write_run_csv(f, rows);
  }
  {
    auto f = open_out(dir / "manifest.csv");
    write_manifest_csv(f, grid.problems);
  }
  const fs::path tdir = dir / "traces";
  std::error_code ec;
  fs::create_directories(tdir, ec);
  for (const auto& cell : grid.cells) {
    auto f = open_out(tdir / trace_filename(cell.algorithm_id, cell.problem.name));
    write_trace_jsonl(f, cell.algorithm_id, cell.problem.name, cell.run);
  }
  std::cout << "wrote " << grid.cells.size() << " cells to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_profile(const std::string& runs_path, const std::string& manifest_path,
                const std::vector<double>& taus, const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  std::cout << kBanner << "\n";

  std::ifstream runs_in(runs_path);
  if (!runs_in) throw CliError{kExitRuntime, "cannot read runs CSV '" + runs_path + "'"};
  std::ifstream man_in(manifest_path);
  if (!man_in) throw CliError{kExitRuntime, "cannot read manifest '" + manifest_path + "'"};

  const auto rows = read_run_csv(runs_in);
  const auto f_best = read_manifest_f_best(man_in);
  const RunTable table = rows_to_table(rows, f_best);

  for (double tau : taus) {
    const ProfileResult prof = profile(table, tau);
    if (prof.dropped_problems > 0)
      std::cerr << "warning: " << prof.dropped_problems
                << " problem(s) solved by no algorithm at tau=" << tau
                << " were dropped from the pool\n";
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "%g", tau);
    {
      auto f = open_out(dir / ("profile_tau" + std::string(suffix) + ".csv"));
      write_profile_csv(f, prof.curves);
    }
    {
      auto f = open_out(dir / ("profile_tau" + std::string(suffix) + ".svg"));
      write_profile_svg(f, prof.curves);
    }
  }
  std::cout << "wrote profiles for " << taus.size() << " tolerance(s) to " << dir.string()
            << "\n";
  return kExitOk;
}

int cmd_tnerror(HarnessConfig cfg, const std::string& out, int max_dim) {
  const fs::path dir = prepare_out_dir(out);
  std::cout << kBanner << "\n";
  // Always runs every distinct subspace regardless of --subspace.
  const TnErrorResult res = run_tn_error_experiment(cfg, max_dim);

  std::map<int, std::vector<double>> by_subspace;
  for (const auto& [key, values] : res.samples)
    by_subspace[key.first].insert(by_subspace[key.first].end(), values.begin(), values.end());

  {
    auto f = open_out(dir / "tnerror_samples.csv");
    write_tn_samples_csv(f, res.samples);
  }
  {
    auto f = open_out(dir / "tnerror_summary.csv");
    write_tn_summary_csv(f, tn_error_report(by_subspace));
  }
  {
    auto f = open_out(dir / "manifest.csv");
    write_manifest_csv(f, res.problems);
  }
  std::cout << "wrote TN-error tables for " << res.problems.size() << " problem(s) to "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_solve(const HarnessConfig& cfg, const std::string& out) {
  const fs::path dir = prepare_out_dir(out);
  HarnessConfig one = cfg;
  one.with_baselines = false;
  GridResult grid = run_grid(one);

  for (const auto& cell : grid.cells) {
    std::cout << "algorithm " << cell.algorithm_id << " on " << cell.problem.name << " ("
              << cell.termination << ", best f = " << format_double(cell.run.best_f)
              << ", final |grad| = " << format_double(cell.final_grad_norm) << ")\n";
    std::printf("%6s %16s %12s %10s %10s %10s %4s\n", "k", "f", "grad_norm", "delta",
                "rho", "status", "acc");
    for (const auto& rec : cell.run.iterations)
      std::printf("%6d %16.8e %12.4e %10.3e %10.3e %10.10s %4d\n", rec.k, rec.f,
                  rec.grad_norm, rec.delta, rec.rho, to_string(rec.status),
                  rec.accepted ? 1 : 0);
    auto f = open_out(dir / trace_filename(cell.algorithm_id, cell.problem.name));
    write_trace_jsonl(f, cell.algorithm_id, cell.problem.name, cell.run);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subspace trust-region optimization benchmark harness"};
  app.require_subcommand(1);

  std::string subspace_arg = "6";
  std::string problems_glob = "*";
  std::string out_dir = "out";
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  int variants = 0;
  bool with_baselines = false;
  std::vector<double> taus;
  std::string runs_path, manifest_path;
  int tn_max_dim = 10;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed for the whole run");
    cmd->add_option("--threads", threads, "worker threads for grid cells");
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--problems", problems_glob, "problem name glob");
  };

  CLI::App* c_run = app.add_subcommand("run", "run the algorithm x problem grid");
  c_run->add_option("--subspace", subspace_arg, "catalogue index 1..16 or 'all'");
  c_run->add_flag("--with-baselines", with_baselines, "include sgd and lbfgs columns");
  c_run->add_option("--variants", variants, "transformed copies per problem");
  add_common(c_run);

  CLI::App* c_profile = app.add_subcommand("profile", "performance profiles from a runs CSV");
  c_profile->add_option("--tau", taus, "accuracy tolerances");
  c_profile->add_option("--runs", runs_path, "runs CSV (default <out>/runs.csv)");
  c_profile->add_option("--manifest", manifest_path, "manifest CSV (default <out>/manifest.csv)");
  add_common(c_profile);

  CLI::App* c_tnerror = app.add_subcommand(
      "tnerror", "interpolation-vs-Taylor truncated-Newton step errors");
  c_tnerror->add_option("--max-dim", tn_max_dim, "skip problems above this dimension");
  add_common(c_tnerror);

  CLI::App* c_solve = app.add_subcommand("solve", "single algorithm on selected problems");
  c_solve->add_option("--subspace", subspace_arg, "catalogue index 1..16");
  add_common(c_solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    HarnessConfig cfg;
    load_config(config_path, cfg);
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.problem_glob = problems_glob;
    cfg.variants = variants;
    cfg.with_baselines = with_baselines;

    if (app.got_subcommand(c_profile)) {
      if (taus.empty()) taus = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
      for (double t : taus)
        if (!(t > 0.0 && t < 1.0))
          throw CliError{kExitBadArgs, "--tau values must lie in (0, 1)"};
      if (runs_path.empty()) runs_path = (fs::path(out_dir) / "runs.csv").string();
      if (manifest_path.empty())
        manifest_path = (fs::path(out_dir) / "manifest.csv").string();
      return cmd_profile(runs_path, manifest_path, taus, out_dir);
    }

    cfg.subspaces = parse_subspace_selection(subspace_arg);
    if (harness_problems(cfg).empty())
      throw CliError{kExitNoProblem, "no problem matches '" + problems_glob + "'"};

    if (app.got_subcommand(c_run)) return cmd_run(cfg, out_dir);
    if (app.got_subcommand(c_tnerror)) return cmd_tnerror(cfg, out_dir, tn_max_dim);
    return cmd_solve(cfg, out_dir);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
