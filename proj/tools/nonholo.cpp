// nonholo: verify, simulate, list.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nonholo/dynamics.hpp"
#include "report.hpp"

using namespace nonholo;
using namespace nonholo::tools;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

ParameterMap parse_params(const std::vector<std::string>& kv) {
  ParameterMap out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got " + s);
    try {
      std::size_t used = 0;
      const std::string v = s.substr(eq + 1);
      out[s.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw UsageError("--param value is not a number: " + s);
    }
  }
  return out;
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& mode, std::vector<std::string>& params) {
  cmd->add_option("--samples", cfg.samples, "sample points per suite")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "RNG seed (default 42, or NONHOLO_SEED)");
  cmd->add_option("--tol", cfg.tol, "pass tolerance")->capture_default_str();
  cmd->add_option("--derivative-mode", mode, "dual or fd")->capture_default_str();
  cmd->add_option("--fd-step", cfg.fd_step, "finite-difference step")->capture_default_str();
  cmd->add_option("--out", cfg.output, "output file (default stdout)");
  cmd->add_option("--param", params, "bundle parameter override name=value (repeatable)");
}

int cmd_list() {
  for (const auto& n : example_names()) {
    const ExampleBundle b = make_example(n);
    std::cout << n << ':';
    for (const auto& s : list_suites(b)) std::cout << ' ' << s;
    std::cout << '\n';
  }
  return 0;
}

int cmd_verify(RunConfig cfg) {
  const nlohmann::ordered_json report = verify_report(cfg);
  emit(cfg.output, report.dump(2) + "\n");
  return report["pass"].get<bool>() ? 0 : kExitFail;
}

int cmd_simulate(const RunConfig& cfg, const std::string& example, const std::vector<double>& x0, double t_end,
                 double dt, const std::string& method) {
  RunConfig check = cfg;
  check.examples = {example};
  validate(check);
  Method m;
  try {
    m = parse_method(method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ScopedDerivativeSettings scoped(DerivativeSettings{cfg.derivative_mode, cfg.fd_step});
  ExampleBundle b;
  try {
    b = make_example(example, cfg.params);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  SimulationSetup s = simulation_setup(b);
  if (!x0.empty()) {
    if (static_cast<Eigen::Index>(x0.size()) != s.x0.size())
      throw UsageError("--x0 has " + std::to_string(x0.size()) + " entries, " + example + " needs " +
                       std::to_string(s.x0.size()));
    s.x0 = Eigen::Map<const Vec<double>>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  }
  Trajectory t;
  try {
    t = integrate(s.field, s.x0, t_end, dt, m, s.monitors);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  write_csv(csv, t);
  emit(cfg.output, csv.str());
  if (t.error) {
    std::cerr << "nonholo: " << *t.error << '\n';
    return kExitFail;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonholonomic bracket verification and simulation"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string mode = "dual";
  std::vector<std::string> params;
  std::string suites;

  CLI::App* list = app.add_subcommand("list", "print examples and their suites");

  CLI::App* verify = app.add_subcommand("verify", "run verification suites and print a JSON report");
  verify->add_option("examples", cfg.examples, "examples to verify (default all)");
  verify->add_option("--suites", suites, "comma-separated suite names (default all applicable)");
  verify->add_option("--jobs", cfg.jobs, "worker threads (default hardware concurrency)");
  add_common(verify, cfg, mode, params);

  CLI::App* simulate = app.add_subcommand("simulate", "integrate X_nh and print a CSV trajectory");
  std::string sim_example;
  std::vector<double> x0;
  double t_end = 10.0, dt = 1e-3;
  std::string method = "rk4";
  simulate->add_option("example", sim_example, "example name")->required();
  simulate->add_option("--x0", x0, "initial state in the simulation chart")->delimiter(',');
  simulate->add_option("--t-end", t_end, "final time")->capture_default_str();
  simulate->add_option("--dt", dt, "step size")->capture_default_str();
  simulate->add_option("--method", method, "rk4 or euler")->capture_default_str();
  add_common(simulate, cfg, mode, params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*list) return cmd_list();
    CLI::App* cmd = *verify ? verify : simulate;
    if (cmd->count("--seed") == 0) cfg.seed = default_seed();
    cfg.derivative_mode = parse_derivative_mode(mode);
    cfg.params = parse_params(params);
    if (!suites.empty()) {
      std::stringstream ss(suites);
      for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) cfg.suites.push_back(s);
    }
    if (*verify) return cmd_verify(cfg);
    return cmd_simulate(cfg, sim_example, x0, t_end, dt, method);
  } catch (const UsageError& e) {
    std::cerr << "nonholo: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "nonholo: " << e.what() << '\n';
    return kExitFail;
  }
}
