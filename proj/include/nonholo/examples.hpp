#pragma once

// The worked systems as ready-to-verify bundles: mechanical data, symmetry
// algebra, quotient charts and closed-form fields to compare against.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nonholo/mechanics.hpp"
#include "nonholo/reduction.hpp"
#include "nonholo/symmetry.hpp"

namespace nonholo {

enum class Origin { Literature, Derived };
const char* to_string(Origin o);

// What an expected field is compared against.
enum class Target {
  PiNh,            // π_nh on M
  JK,              // ⟨𝒥,𝒦_W⟩ on M, compared on C
  Momentum,        // ⟨𝒥, η⟩ on M
  PiNhRed,         // π^nh_red on M/G
  Lambda,          // Λ on M/G
  Lambda0,         // Λ₀ on W°/G
  OmegaW0,         // Ω_W° on W°
  Psi,             // Ψ : M → W°
  CasimirLambda,   // scalar on M/G annihilated by Λ♯d
  CasimirLambda0,  // scalar on W°/G annihilated by Λ₀♯d
  NhMomentum,      // ⟨𝒥^nh, P_gS η⟩ on M
  Conserved,       // scalar on M with df(X_nh) = 0
  ReducedNh,       // Tρ X_nh on M/G
  ReducedGauge,    // ℬ = σ*(B + ⟨𝒥,𝒦_W⟩) on M/G
};
const char* to_string(Target t);

struct ExpectedField {
  std::string name;
  Origin origin = Origin::Literature;
  Target target = Target::PiNh;
  // Computed chart → chart of the closed form. Need not be invertible:
  // bivectors and vectors are pushed forward pointwise, forms pulled back.
  SmoothMap display;
  SmoothMap display_target;  // Psi: W° → closed-form chart of W°
  BiVector bivector;
  KForm form;
  VectorField vector;
  ScalarField scalar;
  SmoothMap map;
  Vec<double> eta;  // Momentum, NhMomentum
};

// Diffeomorphism between M and another chart of the same manifold.
struct ChartChange {
  SmoothMap to;    // M → chart
  SmoothMap from;  // chart → M
};

struct Parameter {
  std::string name;
  double value = 0.0;
  Interval safe;
};

using ParameterMap = std::map<std::string, double>;

struct ExampleBundle {
  std::string name;
  std::vector<Parameter> parameters;
  MechanicalSystem system;
  ConstrainedPhase phase;
  ConstrainedPhase phase0;  // W°
  LieAlgebraData lie;
  QuotientChart quotient;   // M/G
  QuotientChart quotient0;  // W°/G
  TwoForm gauge;            // B on M; zero unless a dynamical gauge is prescribed
  bool basic_gauge = false;  // B + ⟨𝒥,𝒦_W⟩ is basic
  std::vector<ExpectedField> expected;
  std::vector<std::pair<std::string, ScalarField>> monitors;  // on M, H_M first
  Vec<double> x0;                                             // on M
  std::optional<Vec<double>> witness_point;                   // on M
  std::optional<ChartChange> simulation_chart;                // trajectories use M when empty

  double parameter(const std::string& name) const;
  const ExpectedField& field(const std::string& name) const;
};

std::vector<std::string> example_names();

// Throws std::invalid_argument for an unknown name or parameter and
// std::domain_error for parameters outside their safe box.
ExampleBundle make_example(const std::string& name, const ParameterMap& params = {});

// Deterministic suite names applicable to the bundle.
std::vector<std::string> list_suites(const ExampleBundle& b);
const std::vector<std::string>& all_suite_names();

// Suite that checks an expected field.
std::string suite_of(Target t);

// p̃_j = μ(X'_j) for the unnormalized D-frame X'; works on M and on W°.
SmoothMap frame_momentum_display(const ConstrainedPhase& ph, const std::vector<std::string>& momentum_names);

// Quotient by the coordinates not listed in `kept`, with base coordinates
// (q_kept, p̃). The section sets the dropped coordinates to zero.
QuotientChart frame_quotient(const ConstrainedPhase& ph, const std::vector<int>& kept,
                             const std::vector<std::string>& momentum_names, Interval momentum_box);

}  // namespace nonholo
