#pragma once

// Verification suites over an example bundle: computed objects, closed-form
// comparisons and named residual checks.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nonholo/examples.hpp"

namespace nonholo {

struct AnalysisCache;

// Everything the suites compare, built once per bundle. Safe to share across
// threads running different suites.
struct ExampleAnalysis {
  ExampleBundle bundle;
  SymmetryStructure sym;
  BiVector pi_nh;
  VectorField X_nh;
  TwoForm jk;
  BiVector pi_nh_red;
  ReducedBundle reduced;
  std::shared_ptr<AnalysisCache> cache;  // reports shared by several suites
};

ExampleAnalysis analyze(ExampleBundle b, int samples = 16, std::uint64_t seed = 11);

struct FieldComparison {
  double relative = 0.0;  // max |a − b| / max(1, |b|) over components
  double zero_abs = 0.0;  // max |a| over components where the closed form vanishes
  Vec<double> worst_point;
};

// Casimir and Conserved targets report |Λ♯df| and |df(X_nh)| as `relative`.
FieldComparison compare_expected(const ExampleAnalysis& a, const ExpectedField& f, int samples, std::uint64_t seed);

// Chart on which an expected field is sampled.
ChartPtr comparison_chart(const ExampleAnalysis& a, Target t);

// Lower bound on the residual that certifies a negative result.
inline constexpr double kWitnessMargin = 1e-3;

struct SuiteConfig {
  int samples = 200;
  std::uint64_t seed = 42;
  double tol = 1e-7;
};

struct Check {
  std::string name;
  double residual = 0.0;
  Vec<double> worst_point;
};

struct SuiteResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int samples = 0;
  std::uint64_t seed = 0;
  Vec<double> worst_point;
  std::vector<Check> checks;
};

// Throws std::invalid_argument for a suite not in list_suites(a.bundle).
SuiteResult run_suite(const ExampleAnalysis& a, const std::string& suite, const SuiteConfig& cfg);

// ½[π,π] on coordinate triples via cycl[π♯d{x^i,x^j} + [π♯dx^i, π♯dx^j]](x^k).
Alt<double> jacobiator_cyclic(const BiVector& pi, const Vec<double>& x);

}  // namespace nonholo
