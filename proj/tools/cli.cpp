#include "cli.hpp"

#include "drsplit/drsplit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace drs::cli {
namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw IoError("cannot write '" + path + "'");
  }
  return os;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) {
    throw IoError("write to '" + path + "' failed");
  }
}

struct Manifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    nlohmann::json j = {{"command", command},
                        {"parameters", parameters},
                        {"seed", seed},
                        {"outputs", outputs},
                        {"timestamp", iso_timestamp()}};
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    finish(os, path);
  }
};

std::string default_manifest(const std::string& out) { return out + ".manifest.json"; }

// ---------------------------------------------------------------------------
// rates

struct RatesArgs {
  std::vector<std::string> cases;
  std::string beta;
  std::string mu;
  double gamma = 1.0;
  std::string out;
  std::string format = "csv";
  std::string manifest;
};

struct RateRow {
  std::string rate_case;
  double beta;
  double mu;
  double gamma;
  double rate;
};

std::vector<double> fig_values() { return {0.2, 0.5, 1.0, 2.0, 5.0}; }

std::vector<double> fig_sweep() {
  std::vector<double> v;
  for (int k = 1; k <= 100; ++k) {
    v.push_back(0.05 * k);
  }
  return v;
}

std::vector<std::pair<double, double>> rate_grid(const RatesArgs& a) {
  std::vector<std::pair<double, double>> pts;
  auto cross = [&](const std::vector<double>& betas, const std::vector<double>& mus) {
    for (double b : betas) {
      for (double m : mus) {
        pts.emplace_back(b, m);
      }
    }
  };
  if (a.beta.empty() && a.mu.empty()) {
    cross(fig_values(), fig_sweep());
    for (double m : fig_values()) {
      for (double b : fig_sweep()) {
        pts.emplace_back(b, m);
      }
    }
  } else {
    cross(a.beta.empty() ? fig_sweep() : parse_grid(a.beta),
          a.mu.empty() ? fig_sweep() : parse_grid(a.mu));
  }
  return pts;
}

std::optional<RateReport> eval_case(const std::string& c, double beta, double mu, double gamma) {
  // The classical cases need mu <= beta; points outside are skipped.
  const bool ordered = mu <= beta;
  if (c == "a") {
    return ordered ? std::optional(rate_case_a(mu, beta, gamma)) : std::nullopt;
  }
  if (c == "b") {
    return ordered ? std::optional(rate_case_b(mu, beta, gamma)) : std::nullopt;
  }
  if (c == "c") {
    return ordered ? std::optional(rate_case_c(mu, beta, gamma)) : std::nullopt;
  }
  if (c == "lip") {
    return rate_lip_strong(beta, mu, gamma);
  }
  return rate_skew_strong(beta, mu, gamma);
}

int cmd_rates(const RatesArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (!(a.gamma > 0.0) || !std::isfinite(a.gamma)) {
    throw UsageError("--gamma must be positive");
  }
  const auto pts = rate_grid(a);
  for (const auto& [b, m] : pts) {
    if (!(b > 0.0) || !(m > 0.0) || !std::isfinite(b) || !std::isfinite(m)) {
      throw UsageError("beta and mu must be positive and finite");
    }
  }
  const std::vector<std::string> cases =
      a.cases.empty() ? std::vector<std::string>{"a", "b", "c", "lip", "skew"} : a.cases;

  std::vector<RateRow> rows;
  std::size_t skipped = 0;
  for (const auto& c : cases) {
    for (const auto& [b, m] : pts) {
      if (auto r = eval_case(c, b, m, a.gamma)) {
        rows.push_back({c, b, m, a.gamma, r->value});
      } else {
        ++skipped;
      }
    }
  }
  if (rows.empty()) {
    throw UsageError("no admissible (beta, mu) points for the requested cases");
  }
  if (skipped > 0) {
    err << "skipped " << skipped << " points with mu > beta for cases a/b/c\n";
  }

  std::ostringstream body;
  if (a.format == "csv") {
    body << "case,beta,mu,gamma,rate\n";
    for (const auto& r : rows) {
      body << r.rate_case << ',' << io::format_double(r.beta) << ',' << io::format_double(r.mu)
           << ',' << io::format_double(r.gamma) << ',' << io::format_double(r.rate) << '\n';
    }
  } else {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"case", r.rate_case},
                   {"beta", r.beta},
                   {"mu", r.mu},
                   {"gamma", r.gamma},
                   {"rate", r.rate}});
    }
    body << j.dump(2) << '\n';
  }

  if (a.out.empty()) {
    out << body.str();
    return kOk;
  }
  auto os = open_out(a.out);
  os << body.str();
  finish(os, a.out);
  Manifest man{"rates",
               {{"cases", cases},
                {"beta", a.beta},
                {"mu", a.mu},
                {"gamma", a.gamma},
                {"format", a.format}},
               seed,
               {a.out}};
  const std::string mpath = a.manifest.empty() ? default_manifest(a.out) : a.manifest;
  man.outputs.push_back(mpath);
  man.write(mpath);
  return kOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string problem;
  std::string order = "ba";
  double gamma = 1.0;
  double tol = 1e-10;
  int max_iter = 100000;
  std::string out;
  std::string trace;
  std::string manifest;
};

std::string default_trace(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".trace.csv");
  return p.string();
}

int cmd_solve(const SolveArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.problem);
  if (!in) {
    throw IoError("cannot read '" + a.problem + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw io::ParseError(std::string("malformed problem JSON: ") + e.what());
  }
  const CompositeProblem prob = io::problem_from_json(j);

  DRConfig cfg;
  cfg.order = a.order == "ab" ? Order::A_after_B : Order::B_after_A;
  cfg.gamma = a.gamma;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.keep_history = false;
  const PDSolution sol = solve(prob, cfg);

  double r_emp = std::numeric_limits<double>::quiet_NaN();
  try {
    r_emp = estimate_rate(sol.trace, 0.5, sol.fixed_point.norm()).r_emp;
  } catch (const DomainError&) {
    // Too few usable steps for a fit.
  }

  const std::string trace_path = a.trace.empty() ? default_trace(a.out) : a.trace;
  {
    auto os = open_out(a.out);
    os << io::solution_to_json(sol).dump(2) << '\n';
    finish(os, a.out);
  }
  {
    auto os = open_out(trace_path);
    io::write_trace_csv(os, sol.trace);
    finish(os, trace_path);
  }
  Manifest man{"solve",
               {{"problem", a.problem},
                {"order", a.order},
                {"gamma", a.gamma},
                {"tol", a.tol},
                {"max_iter", a.max_iter}},
               seed,
               {a.out, trace_path}};
  const std::string mpath = a.manifest.empty() ? default_manifest(a.out) : a.manifest;
  man.outputs.push_back(mpath);
  man.write(mpath);

  out << "rate_bound " << io::format_double(sol.rate_bound) << '\n';
  out << "r_emp " << io::format_double(r_emp) << '\n';
  out << "iters " << sol.trace.iterations_used << '\n';
  out << "kkt " << io::format_double(sol.kkt_residual) << '\n';
  if (!sol.trace.converged) {
    err << "not converged after " << sol.trace.iterations_used << " iterations\n";
    return kNotConverged;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep-gamma

struct SweepArgs {
  double beta = 1.0;
  double mu = 1.0;
  double tol = 1e-8;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  if (!(a.beta > 0.0) || !(a.mu > 0.0) || !(a.tol > 0.0)) {
    throw UsageError("--beta, --mu and --tol must be positive");
  }
  const GammaSweepResult r = optimal_gamma(a.beta, a.mu, a.tol);
  out << "gamma_star " << io::format_double(r.gamma_star) << '\n';
  out << "rate_at_gamma_star " << io::format_double(r.rate_at_star) << '\n';
  out << "rate_at_gamma_1 " << io::format_double(rate_skew_strong(a.beta, a.mu).value) << '\n';
  if (a.beta == 1.0 && a.mu == 1.0) {
    const double g = r.gamma_star;
    const double q = 4 * std::pow(g, 5) + 5 * std::pow(g, 4) + 12 * std::pow(g, 3) + 2 * g * g - 3;
    out << "quintic_residual " << io::format_double(q) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string out;
  int pairs = 10000;
};

int cmd_verify(const VerifyArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  verify::VerifyOptions opts;
  opts.seed = seed;
  opts.pairs = a.pairs;
  const auto results = verify::run_verify_suite(opts);
  char line[256];
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%-4s  %-58s %12.4e  (%d)\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.worst, r.cases);
    out << line;
    if (!r.detail.empty()) {
      out << "      " << r.detail << '\n';
    }
  }
  if (!a.out.empty()) {
    auto os = open_out(a.out);
    os << "check,passed,worst,cases\n";
    for (const auto& r : results) {
      os << r.name << ',' << (r.passed ? 1 : 0) << ',' << io::format_double(r.worst) << ','
         << r.cases << '\n';
    }
    finish(os, a.out);
  }
  bool ok = true;
  for (const auto& r : results) {
    if (!r.passed) {
      err << "verification failed: " << r.name << '\n';
      ok = false;
    }
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in grid '" + text + "'");
    }
    if (used != s.size()) {
      throw UsageError("bad number '" + s + "' in grid '" + text + "'");
    }
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      parts.push_back(item);
    }
    return parts;
  };

  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    const bool log_scale = !parts.empty() && parts[0] == "log";
    if (log_scale) {
      parts.erase(parts.begin());
    }
    if (parts.size() != 3) {
      throw UsageError("grid '" + text + "' must be lo:hi:n or log:lo:hi:n");
    }
    const double lo = num(parts[0]);
    const double hi = num(parts[1]);
    const double nd = num(parts[2]);
    const int n = static_cast<int>(nd);
    if (n < 1 || nd != n) {
      throw UsageError("grid '" + text + "' needs a positive integer count");
    }
    if (log_scale && !(lo > 0.0 && hi > 0.0)) {
      throw UsageError("log grid '" + text + "' needs positive endpoints");
    }
    std::vector<double> v;
    for (int k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      v.push_back(log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                            : lo + t * (hi - lo));
    }
    return v;
  }
  std::vector<double> v;
  for (const auto& p : split(text, ',')) {
    v.push_back(num(p));
  }
  if (v.empty()) {
    throw UsageError("empty grid");
  }
  return v;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Douglas-Rachford splitting: rates, solves and identity checks", "drsplit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();

  RatesArgs ra;
  auto* rates = app.add_subcommand("rates", "Tabulate contraction factors over (beta, mu) grids");
  rates->add_option("--case", ra.cases, "Cases: a, b, c, lip, skew (repeatable)")
      ->check(CLI::IsMember({"a", "b", "c", "lip", "skew"}));
  rates->add_option("--beta", ra.beta, "Lipschitz/cocoercivity grid");
  rates->add_option("--mu", ra.mu, "Strong monotonicity grid");
  rates->add_option("--gamma", ra.gamma, "Step length")->capture_default_str();
  rates->add_option("--out", ra.out, "Output file (default stdout)");
  rates->add_option("--format", ra.format)->check(CLI::IsMember({"csv", "json"}));
  rates->add_option("--manifest", ra.manifest, "Manifest path (default <out>.manifest.json)");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Primal-dual DR solve of a quadratic problem");
  solve_cmd->add_option("--problem", sa.problem, "Problem JSON")->required();
  solve_cmd->add_option("--order", sa.order, "ba: T = (Id + R_B R_A)/2, ab: swapped")
      ->check(CLI::IsMember({"ab", "ba"}))
      ->capture_default_str();
  solve_cmd->add_option("--gamma", sa.gamma)->capture_default_str();
  solve_cmd->add_option("--tol", sa.tol)->capture_default_str();
  solve_cmd->add_option("--max-iter", sa.max_iter)->capture_default_str();
  solve_cmd->add_option("--out", sa.out, "Solution JSON")->required();
  solve_cmd->add_option("--trace", sa.trace, "Trace CSV (default <out stem>.trace.csv)");
  solve_cmd->add_option("--manifest", sa.manifest);

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep-gamma", "Optimal step length for the skew rate");
  sweep->add_option("--beta", wa.beta)->capture_default_str();
  sweep->add_option("--mu", wa.mu)->capture_default_str();
  sweep->add_option("--tol", wa.tol)->capture_default_str();

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run the identity and inequality suite");
  verify_cmd->add_option("--out", va.out, "Optional CSV of check results");
  verify_cmd->add_option("--pairs", va.pairs)->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) {
    rev.pop_back();
  }
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*rates) {
      return cmd_rates(ra, seed, out, err);
    }
    if (*solve_cmd) {
      return cmd_solve(sa, seed, out, err);
    }
    if (*sweep) {
      return cmd_sweep(wa, out);
    }
    return cmd_verify(va, seed, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace drs::cli
