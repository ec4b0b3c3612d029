#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nonholo/calculus.hpp"
#include "nonholo/dynamics.hpp"
#include "nonholo/mechanics.hpp"
#include "support.hpp"

using namespace nonholo;
using namespace nonholo::testing;

namespace {

ChartPtr line() { return make_chart("line", {"x"}, {{-2, 2}}); }

Trajectory simulate(const std::string& name, double t_end, double dt) {
  const SimulationSetup s = simulation_setup(make_example(name));
  return integrate(s.field, s.x0, t_end, dt, Method::RK4, s.monitors);
}

}  // namespace

TEST_CASE("constant field moves at unit speed") {
  const ChartPtr c = line();
  for (Method m : {Method::RK4, Method::Euler}) {
    const Trajectory t = integrate(coordinate_vector(c, 0), vec({0.0}), 1.0, 0.1, m);
    REQUIRE(t.states.size() == 11);
    CHECK(t.times.back() == 1.0);
    CHECK(std::abs(t.states.back()[0] - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
    CHECK(!t.error);
  }
}

TEST_CASE("zero field keeps every state identical") {
  const ChartPtr c = line();
  const Trajectory t = integrate(zero_multivector(c, 1), vec({0.5}), 1.0, 0.01);
  for (const auto& s : t.states) CHECK(s[0] == 0.5);
}

TEST_CASE("integrate rejects bad input") {
  const ChartPtr c = line();
  const VectorField x = coordinate_vector(c, 0);
  CHECK_THROWS_AS(integrate(x, vec({0.0}), 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(x, vec({0.0}), -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(integrate(x, vec({0.0, 1.0}), 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(integrate(x, vec({3.0}), 1.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(parse_method("leapfrog"), std::invalid_argument);
  CHECK(parse_method("euler") == Method::Euler);
}

TEST_CASE("non-finite states truncate the trajectory") {
  // ẋ = x² blows up at t = 1 from x = 1.
  const ChartPtr c = line();
  const VectorField x = make_vector(c, [](const auto& q) { return Vec<scalar_t<decltype(q)>>(q.cwiseProduct(q)); });
  const Trajectory t = integrate(x, vec({1.0}), 3.0, 0.01);
  REQUIRE(t.error.has_value());
  CHECK(t.times.back() < 3.0);
  for (const auto& s : t.states) CHECK(std::isfinite(s[0]));
}

TEST_CASE("monitor drift") {
  const ChartPtr c = line();
  const ScalarField one = make_scalar(c, [](const auto&) { return 1.0; });
  const ScalarField id = make_scalar(c, [](const auto& q) { return q[0]; });
  const Trajectory t = integrate(coordinate_vector(c, 0), vec({0.0}), 1.0, 0.25, Method::RK4, {{"one", one}, {"x", id}});
  CHECK(monitor_drift(t, "one") == 0.0);
  CHECK(std::abs(monitor_drift(t, "x") - 1.0) <= 1e-15);
  CHECK_THROWS_AS(monitor_drift(t, "nosuch"), std::invalid_argument);
}

TEST_CASE("CSV export") {
  const ChartPtr c = make_chart("plane", {"x", "we\"ird,name"}, {{-1, 1}, {-1, 1}});
  const ScalarField f = make_scalar(c, [](const auto& q) { return q[0] / 3.0; });
  const Trajectory t = integrate(coordinate_vector(c, 0), vec({0.0, 0.0}), 0.2, 0.1, Method::RK4, {{"f", f}});
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  std::string header, row0, row1, row2;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "t,x,\"we\"\"ird,name\",f\r");
  CHECK(row0 == "0,0,0,0\r");
  CHECK(row1 == "0.10000000000000001,0.10000000000000001,0,0.033333333333333333\r");
  CHECK(row2.rfind("0.20000000000000001,", 0) == 0);
  CHECK(in.peek() == std::char_traits<char>::eof());
}

TEST_CASE("particle simulates in canonical coordinates") {
  const ExampleBundle b = make_example("particle");
  const SimulationSetup s = simulation_setup(b);
  CHECK(s.x0 == vec({0.0, 1.0, 0.0, 2.0, 1.0}));
  CHECK(s.field.chart()->coord_names[3] == "px");
  // Oracle: ẏ = p_y, ṗ_x = −y p_x p_y/(1+y²), ṗ_y = 0 on the constraint ż = y ẋ.
  for (const auto& c : samples(*s.field.chart(), 50)) {
    const double y = c[1], px = c[3], py = c[4], w = 1.0 + y * y;
    CHECK(rel_diff(s.field.vec(c), vec({px, py, y * px, -y * px * py / w, 0.0})) <= 1e-12);
  }
}

TEST_CASE("energy and momenta are conserved along X_nh") {
  for (const auto& n : example_names()) {
    const Trajectory t = simulate(n, 10.0, 1e-3);
    INFO(n);
    REQUIRE(!t.error);
    CHECK(t.states.size() == 10001);
    CHECK(monitor_drift(t, "H_M") <= 1e-8);
  }
  CHECK(monitor_drift(simulate("disk", 10.0, 1e-3), "p_phi") <= 1e-8);
  CHECK(monitor_drift(simulate("disk", 10.0, 1e-3), "pt_phi") <= 1e-8);
  CHECK(monitor_drift(simulate("snakeboard", 10.0, 1e-3), "pt_psi") <= 1e-7);
  CHECK(monitor_drift(simulate("ball_rank2", 10.0, 1e-3), "K_dot_gamma") <= 1e-7);
}

TEST_CASE("the particle Casimir of Λ is not conserved by X_nh") {
  const Trajectory t = simulate("particle", 10.0, 1e-3);
  // Oracle: p_y and ż/ẋ = y fix y = 1 + t and (1+y²)p_x² = const along the flow.
  const auto& f = monitor_series(t, "f_casimir");
  const double y = 11.0, px = 2.0 * std::sqrt(2.0 / (1.0 + y * y));
  CHECK(std::abs(f.back() - (1.0 + y * y) * px) <= 1e-8);
  CHECK(monitor_drift(t, "f_casimir") > 1e-3);
}

TEST_CASE("RK4 energy error drops at fourth order on the particle") {
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    const double d = monitor_drift(simulate("particle", 10.0, dt), "H_M");
    if (prev > 0.0) CHECK(prev / d >= 8.0);
    prev = d;
  }
  // Euler is first order: its error shrinks far more slowly.
  const SimulationSetup s = simulation_setup(make_example("particle"));
  const double e1 = monitor_drift(integrate(s.field, s.x0, 10.0, 0.01, Method::Euler, s.monitors), "H_M");
  const double e2 = monitor_drift(integrate(s.field, s.x0, 10.0, 0.005, Method::Euler, s.monitors), "H_M");
  CHECK(e1 / e2 >= 1.5);
  CHECK(e1 / e2 <= 3.0);
}

TEST_CASE("ball rank 2 reduced flow stays on the Casimir level sets") {
  const ExampleBundle b = make_example("ball_rank2");
  const ExpectedField& red = b.field("reduced_nh");
  const ChartPtr amb = red.vector.chart();
  const ScalarField gamma2 = make_scalar(amb, [](const auto& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; });
  const ScalarField kg = make_scalar(amb, [](const auto& x) { return x[0] * x[3] + x[1] * x[4] + x[2] * x[5]; });
  const Vec<double> a0 = red.display(b.quotient.rho(b.x0));
  const Trajectory t = integrate(red.vector, a0, 10.0, 1e-3, Method::RK4, {{"gamma2", gamma2}, {"K_gamma", kg}});
  REQUIRE(!t.error);
  CHECK(monitor_drift(t, "gamma2") <= 1e-7);
  CHECK(monitor_drift(t, "K_gamma") <= 1e-7);
}

TEST_CASE("reduction commutes with the flow") {
  for (const char* n : {"disk", "snakeboard", "ball_rank2"}) {
    const ExampleBundle b = make_example(n);
    const VectorField x = nh_vector_field(b.phase);
    const VectorField xr = reduce_vector_field(x, b.quotient);
    const Trajectory full = integrate(x, b.x0, 1.0, 1e-2);
    const Trajectory red = integrate(xr, b.quotient.rho(b.x0), 1.0, 1e-2);
    INFO(n);
    CHECK(max_abs(Vec<double>(b.quotient.rho(full.states.back()) - red.states.back())) <= 1e-9);
  }
}
