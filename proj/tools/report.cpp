#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace nonholo::tools {

using nlohmann::ordered_json;

std::uint64_t default_seed() {
  const char* env = std::getenv("NONHOLO_SEED");
  if (!env || !*env) return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw UsageError(std::string("NONHOLO_SEED is not an unsigned integer: ") + env);
  return v;
}

DerivativeMode parse_derivative_mode(const std::string& s) {
  if (s == "dual") return DerivativeMode::Dual;
  if (s == "fd") return DerivativeMode::FiniteDifference;
  throw UsageError("unknown derivative mode " + s + " (expected dual or fd)");
}

const char* to_string(DerivativeMode m) { return m == DerivativeMode::Dual ? "dual" : "fd"; }

void validate(const RunConfig& cfg) {
  const auto names = example_names();
  for (const auto& e : cfg.examples)
    if (std::find(names.begin(), names.end(), e) == names.end()) throw UsageError("unknown example " + e);
  const auto& suites = all_suite_names();
  for (const auto& s : cfg.suites)
    if (std::find(suites.begin(), suites.end(), s) == suites.end()) throw UsageError("unknown suite " + s);
  if (cfg.samples < 1) throw UsageError("--samples must be at least 1");
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
  if (!(cfg.fd_step > 0.0)) throw UsageError("--fd-step must be positive");
}

void run_pool(std::vector<std::function<void()>> tasks, int jobs) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(tasks.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

ordered_json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json point_json(const Vec<double>& x) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(number_json(x[i]));
  return a;
}

namespace {

ordered_json suite_json(const SuiteResult& r) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"residual", number_json(c.residual)}, {"worst_point", point_json(c.worst_point)}});
  return {{"name", r.name},
          {"max_residual", number_json(r.max_residual)},
          {"tolerance", number_json(r.tolerance)},
          {"pass", r.pass},
          {"samples", r.samples},
          {"seed", r.seed},
          {"worst_point", point_json(r.worst_point)},
          {"checks", checks}};
}

// Parameters apply to every example that declares them.
ParameterMap params_for(const std::string& example, const ParameterMap& given) {
  const ExampleBundle defaults = make_example(example);
  ParameterMap out;
  for (const auto& [k, v] : given)
    for (const auto& p : defaults.parameters)
      if (p.name == k) out[k] = v;
  return out;
}

}  // namespace

ordered_json verify_report(const RunConfig& cfg, std::vector<std::unique_ptr<ExampleAnalysis>>* keep) {
  validate(cfg);
  const std::vector<std::string> examples = cfg.examples.empty() ? example_names() : cfg.examples;
  for (const auto& [k, v] : cfg.params) {
    bool known = false;
    for (const auto& e : examples)
      for (const auto& p : make_example(e).parameters) known = known || p.name == k;
    if (!known) throw UsageError("no selected example has a parameter named " + k);
  }

  ScopedDerivativeSettings scoped(DerivativeSettings{cfg.derivative_mode, cfg.fd_step});
  std::vector<std::unique_ptr<ExampleAnalysis>> analyses(examples.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    ExampleBundle b;
    try {
      b = make_example(examples[i], params_for(examples[i], cfg.params));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    tasks.push_back([&analyses, i, b]() mutable { analyses[i] = std::make_unique<ExampleAnalysis>(analyze(std::move(b))); });
  }
  run_pool(std::move(tasks), cfg.jobs);

  struct Job {
    std::size_t example;
    std::string suite;
    SuiteResult result;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto applicable = list_suites(analyses[i]->bundle);
    if (cfg.suites.empty()) {
      for (const auto& s : applicable) jobs.push_back({i, s, {}});
    } else {
      for (const auto& s : cfg.suites)
        if (std::find(applicable.begin(), applicable.end(), s) != applicable.end()) jobs.push_back({i, s, {}});
    }
  }
  const SuiteConfig sc{cfg.samples, cfg.seed, cfg.tol};
  tasks.clear();
  for (auto& j : jobs) tasks.push_back([&analyses, &j, sc] { j.result = run_suite(*analyses[j.example], j.suite, sc); });
  run_pool(std::move(tasks), cfg.jobs);

  ordered_json report;
  report["schema"] = kSchema;
  report["config"] = {{"samples", cfg.samples},
                      {"seed", cfg.seed},
                      {"tol", number_json(cfg.tol)},
                      {"derivative_mode", to_string(cfg.derivative_mode)},
                      {"fd_step", number_json(cfg.fd_step)}};
  bool all_pass = true;
  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const ExampleBundle& b = analyses[i]->bundle;
    ordered_json params = ordered_json::object();
    for (const auto& p : b.parameters) params[p.name] = number_json(p.value);
    ordered_json suites = ordered_json::array();
    bool pass = true;
    for (const auto& j : jobs)
      if (j.example == i) {
        suites.push_back(suite_json(j.result));
        pass = pass && j.result.pass;
      }
    // A requested suite that does not apply is reported, never silently dropped.
    ordered_json skipped = ordered_json::array();
    const auto applicable = list_suites(b);
    for (const auto& s : cfg.suites)
      if (std::find(applicable.begin(), applicable.end(), s) == applicable.end()) skipped.push_back(s);
    all_pass = all_pass && pass;
    list.push_back({{"name", b.name}, {"parameters", params}, {"pass", pass}, {"suites", suites}, {"not_applicable", skipped}});
  }
  report["examples"] = list;
  report["pass"] = all_pass;
  if (keep) *keep = std::move(analyses);
  return report;
}

}  // namespace nonholo::tools
