#include "mdlambo/io.hpp"
#include "mdlambo/harness.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mdlambo {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("parse_double: trailing characters in '" + s + "'");
  return v;
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

std::vector<RunCsvRow> run_to_rows(const std::string& algorithm_id,
                                   const std::string& problem_id, const RunResult& run,
                                   double final_grad_norm) {
  std::vector<RunCsvRow> rows;
  rows.reserve(run.iterations.size() + 1);
  for (const auto& rec : run.iterations) {
    RunCsvRow row;
    row.algorithm_id = algorithm_id;
    row.problem_id = problem_id;
    row.iter = rec.k;
    row.f = rec.f;
    row.grad_norm = rec.grad_norm;
    row.delta = rec.delta;
    row.sigma = rec.sigma;
    row.rho = rec.rho;
    row.accepted = rec.accepted;
    rows.push_back(std::move(row));
  }
  // Terminal row: the state reached after the last iteration.
  RunCsvRow last;
  last.algorithm_id = algorithm_id;
  last.problem_id = problem_id;
  last.iter = static_cast<int>(run.iterations.size());
  last.f = run.f_series.empty() ? 0.0 : run.f_series.back();
  last.grad_norm = final_grad_norm;
  last.delta = run.iterations.empty() ? 0.0 : run.iterations.back().delta;
  last.sigma = run.iterations.empty() ? 0.0 : run.iterations.back().sigma;
  last.rho = 0.0;
  last.accepted = true;
  rows.push_back(std::move(last));
  return rows;
}

void write_run_csv(std::ostream& os, const std::vector<RunCsvRow>& rows) {
  os << "algorithm_id,problem_id,iter,f,grad_norm,delta,sigma,rho,accepted\n";
  for (const auto& r : rows) {
    os << r.algorithm_id << ',' << r.problem_id << ',' << r.iter << ','
       << format_double(r.f) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.delta) << ',' << format_double(r.sigma) << ','
       << format_double(r.rho) << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

std::vector<RunCsvRow> read_run_csv(std::istream& is) {
  std::vector<RunCsvRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("run CSV: expected 9 fields, got line '" + line + "'");
    RunCsvRow r;
    r.algorithm_id = f[0];
    r.problem_id = f[1];
    r.iter = std::stoi(f[2]);
    r.f = parse_double(f[3]);
    r.grad_norm = parse_double(f[4]);
    r.delta = parse_double(f[5]);
    r.sigma = parse_double(f[6]);
    r.rho = parse_double(f[7]);
    r.accepted = f[8] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

RunTable rows_to_table(const std::vector<RunCsvRow>& rows,
                       const std::map<std::string, double>& f_best_by_problem) {
  RunTable table;
  for (const auto& r : rows) {
    const RunKey key{r.algorithm_id, r.problem_id};
    auto& trace = table.entries[key];
    trace.f_values.push_back(r.f);
    const auto it = f_best_by_problem.find(r.problem_id);
    if (it == f_best_by_problem.end())
      throw std::runtime_error("rows_to_table: unknown problem '" + r.problem_id + "'");
    trace.f_best = it->second;
  }
  return table;
}

void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  os << "algorithm_id,tau,alpha,rho_a\n";
  for (const auto& c : curves)
    for (size_t i = 0; i < c.alpha.size(); ++i)
      os << c.algorithm << ',' << format_double(c.tau) << ','
         << format_double(c.alpha[i]) << ',' << format_double(c.rho[i]) << '\n';
}

std::vector<ProfileCurve> read_profile_csv(std::istream& is) {
  std::vector<ProfileCurve> curves;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw std::runtime_error("profile CSV: expected 4 fields");
    const std::string& algo = f[0];
    const double tau = parse_double(f[1]);
    if (curves.empty() || curves.back().algorithm != algo || curves.back().tau != tau) {
      ProfileCurve c;
      c.algorithm = algo;
      c.tau = tau;
      curves.push_back(std::move(c));
    }
    curves.back().alpha.push_back(parse_double(f[2]));
    curves.back().rho.push_back(parse_double(f[3]));
  }
  return curves;
}

void write_profile_svg(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  const int width = 720, height = 480;
  const int ml = 60, mr = 160, mt = 30, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double alpha_max = curves.empty() || curves.front().alpha.empty()
                               ? 64.0
                               : curves.front().alpha.back();
  const double lmax = std::log(alpha_max);

  auto sx = [&](double alpha) { return ml + pw * std::log(std::max(alpha, 1.0)) / lmax; };
  auto sy = [&](double rho) { return mt + ph * (1.0 - rho); };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                  "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
                                  "#c49c94", "#f7b6d2", "#dbdb8d"};

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  // Axes.
  os << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
     << "' stroke='black'/>\n<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << mt + ph << "' stroke='black'/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0})
    os << "<text x='" << ml - 8 << "' y='" << sy(tick) + 4
       << "' font-size='11' text-anchor='end'>" << tick << "</text>\n";
  for (double a = 1.0; a <= alpha_max * 1.0001; a *= 2.0)
    os << "<text x='" << sx(a) << "' y='" << mt + ph + 16
       << "' font-size='11' text-anchor='middle'>" << a << "</text>\n";
  os << "<text x='" << ml + pw / 2 << "' y='" << height - 12
     << "' font-size='12' text-anchor='middle'>alpha (relative iterations, log scale)</text>\n";
  if (!curves.empty())
    os << "<text x='" << ml + pw / 2 << "' y='" << 18
       << "' font-size='12' text-anchor='middle'>performance profile, tau = "
       << curves.front().tau << " (suite-local)</text>\n";

  int ci = 0;
  for (const auto& c : curves) {
    const char* color = palette[ci % 18];
    std::ostringstream pts;
    double prev_y = sy(c.rho.empty() ? 0.0 : c.rho.front());
    pts << sx(1.0) << ',' << prev_y << ' ';
    for (size_t i = 0; i < c.alpha.size(); ++i) {
      pts << sx(c.alpha[i]) << ',' << prev_y << ' ';  // step function
      prev_y = sy(c.rho[i]);
      pts << sx(c.alpha[i]) << ',' << prev_y << ' ';
    }
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='"
       << pts.str() << "'/>\n";
    os << "<text x='" << ml + pw + 10 << "' y='" << mt + 14 + 14 * ci << "' font-size='11' fill='"
       << color << "'>" << c.algorithm << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

void write_trace_jsonl(std::ostream& os, const std::string& algorithm_id,
                       const std::string& problem_id, const RunResult& run) {
  nlohmann::json header{{"schema", "mdlambo-trace-v1"},
                        {"algorithm", algorithm_id},
                        {"problem", problem_id},
                        {"termination", to_string(run.termination)},
                        {"best_f", run.best_f}};
  os << header.dump() << '\n';
  for (const auto& rec : run.iterations) {
    nlohmann::json j{{"k", rec.k},
                     {"f", rec.f},
                     {"grad_norm", rec.grad_norm},
                     {"delta", rec.delta},
                     {"sigma", rec.sigma},
                     {"rho", std::isfinite(rec.rho) ? rec.rho : -1e308},
                     {"q", rec.q},
                     {"accepted", rec.accepted},
                     {"status", to_string(rec.status)},
                     {"fallback", rec.fallback}};
    j["x"] = std::vector<double>(rec.x.data(), rec.x.data() + rec.x.size());
    os << j.dump() << '\n';
  }
}

void write_manifest_csv(std::ostream& os, const std::vector<ProblemSpec>& problems) {
  os << "# suite-local problem set; not the corpus behind the published profiles\n";
  os << "name,n,variant,f_best,convex,provenance\n";
  for (const auto& p : problems)
    os << p.name << ',' << p.n << ',' << p.variant << ',' << format_double(p.f_best) << ','
       << (p.convex ? 1 : 0) << ",\"" << p.provenance << "\"\n";
}

std::map<std::string, double> read_manifest_f_best(std::istream& is) {
  std::map<std::string, double> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() < 4) throw std::runtime_error("manifest: malformed line '" + line + "'");
    out[f[0]] = parse_double(f[3]);
  }
  return out;
}

void write_tn_samples_csv(
    std::ostream& os,
    const std::map<std::pair<int, std::string>, std::vector<double>>& samples) {
  os << "subspace,problem_id,sample_index,tn_error\n";
  for (const auto& [key, values] : samples) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
      os << key.first << ',' << key.second << ',' << i << ',' << format_double(sorted[i])
         << '\n';
  }
}

void write_tn_summary_csv(std::ostream& os, const std::vector<TnSummary>& summaries) {
  os << "subspace,merged_from,count,q1,p40,median,p60,q3,max\n";
  for (const auto& s : summaries) {
    os << s.subspace << ',';
    for (size_t i = 0; i < s.merged_from.size(); ++i)
      os << (i ? ";" : "") << s.merged_from[i];
    os << ',' << s.count << ',' << format_double(s.q1) << ',' << format_double(s.p40) << ','
       << format_double(s.median) << ',' << format_double(s.p60) << ','
       << format_double(s.q3) << ',' << format_double(s.max_value) << '\n';
  }
}

void apply_config_file(const std::filesystem::path& path, HarnessConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) + " is not key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto d = [&] { return parse_double(value); };
    auto i = [&] { return std::stoi(value); };

    if (key == "eta1") cfg.driver.eta1 = d();
    else if (key == "eta2") cfg.driver.eta2 = d();
    else if (key == "gamma_inc") cfg.driver.gamma_inc = d();
    else if (key == "gamma_dec") cfg.driver.gamma_dec = d();
    else if (key == "sigma_sub") cfg.driver.sigma_sub = d();
    else if (key == "sigma0") cfg.driver.sigma0 = d();
    else if (key == "delta0") cfg.driver.delta0 = d();
    else if (key == "grad_tol") cfg.driver.grad_tol = d();
    else if (key == "max_iter") cfg.driver.max_iter = i();
    else if (key == "subspace_index") cfg.driver.subspace_index = i();
    else if (key == "sgd.lr0") cfg.sgd.lr0 = d();
    else if (key == "sgd.decay_factor") cfg.sgd.decay_factor = d();
    else if (key == "sgd.decay_every") cfg.sgd.decay_every = i();
    else if (key == "sgd.momentum") cfg.sgd.momentum = d();
    else if (key == "sgd.weight_decay") cfg.sgd.weight_decay = d();
    else if (key == "sgd.max_iter") cfg.sgd.max_iter = i();
    else if (key == "sgd.grad_tol") cfg.sgd.grad_tol = d();
    else if (key == "lbfgs.memory") cfg.lbfgs.memory = i();
    else if (key == "lbfgs.max_iter") cfg.lbfgs.max_iter = i();
    else if (key == "lbfgs.grad_tol") cfg.lbfgs.grad_tol = d();
    else if (key == "lbfgs.armijo_c") cfg.lbfgs.armijo_c = d();
    else if (key == "lbfgs.backtrack") cfg.lbfgs.backtrack = d();
    else if (key == "lbfgs.max_backtracks") cfg.lbfgs.max_backtracks = i();
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

}  // namespace mdlambo
