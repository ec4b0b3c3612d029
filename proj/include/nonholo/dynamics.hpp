#pragma once

// Fixed-step integration of vector fields with monitored scalars.

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nonholo/examples.hpp"
#include "nonholo/field.hpp"
#include "nonholo/reduction.hpp"

namespace nonholo {

enum class Method { RK4, Euler };
const char* to_string(Method m);
// Throws std::invalid_argument for anything but "rk4" or "euler".
Method parse_method(const std::string& s);

using Monitor = std::pair<std::string, ScalarField>;

struct Trajectory {
  std::vector<std::string> coord_names;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vec<double>> states;
  std::vector<std::pair<std::string, std::vector<double>>> monitors;
  // Set when a non-finite state truncated the run.
  std::optional<std::string> error;
};

// Steps of size dt from t = 0 until the step count reaches round(t_end / dt).
// Throws std::invalid_argument for dt ≤ 0, t_end < 0 or a dimension mismatch,
// and std::domain_error when x0 leaves the non-periodic sample box.
Trajectory integrate(const VectorField& x, const Vec<double>& x0, double t_end, double dt, Method method = Method::RK4,
                     const std::vector<Monitor>& monitors = {});

// max |series − series[0]|; throws std::invalid_argument for an unknown monitor.
double monitor_drift(const Trajectory& traj, const std::string& name);
const std::vector<double>& monitor_series(const Trajectory& traj, const std::string& name);

// Header `t,<coords...>,<monitors...>`, RFC 4180 quoting, 17 significant digits.
void write_csv(std::ostream& out, const Trajectory& traj);

// Tρ X ∘ σ on the base of an invariant field.
VectorField reduce_vector_field(const VectorField& x, const QuotientChart& q);

// X_nh, the bundle monitors and x0, moved to the bundle's simulation chart.
struct SimulationSetup {
  VectorField field;
  std::vector<Monitor> monitors;
  Vec<double> x0;
};
SimulationSetup simulation_setup(const ExampleBundle& b);

}  // namespace nonholo
