#pragma once

// Run configuration and JSON reports shared by the CLI and the acceptance
// binary.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonholo/examples.hpp"
#include "nonholo/field.hpp"
#include "nonholo/verify.hpp"

namespace nonholo::tools {

inline constexpr const char* kSchema = "nonholo-report/1";
inline constexpr std::uint64_t kDefaultSeed = 42;

// Bad user input; the CLI maps it to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::string> examples;  // empty: all
  std::vector<std::string> suites;    // empty: every applicable suite
  int samples = 200;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-7;
  DerivativeMode derivative_mode = DerivativeMode::Dual;
  double fd_step = 1e-6;
  std::string output;  // empty: stdout
  ParameterMap params;
  int jobs = 0;  // 0: hardware concurrency
};

// NONHOLO_SEED when set, else the default.
std::uint64_t default_seed();

DerivativeMode parse_derivative_mode(const std::string& s);
const char* to_string(DerivativeMode m);

// Throws UsageError for unknown examples or suites, or an invalid config.
void validate(const RunConfig& cfg);

// Runs tasks on up to `jobs` threads; the first exception is rethrown.
void run_pool(std::vector<std::function<void()>> tasks, int jobs);

// Report with one entry per example; `pass` is true iff every suite passed.
// `keep` receives the analyses in report order.
nlohmann::ordered_json verify_report(const RunConfig& cfg,
                                     std::vector<std::unique_ptr<ExampleAnalysis>>* keep = nullptr);

// Doubles print with 17 significant digits; non-finite values become strings.
nlohmann::ordered_json number_json(double v);
nlohmann::ordered_json point_json(const Vec<double>& x);

}  // namespace nonholo::tools
