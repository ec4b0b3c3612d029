#include "nonholo/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nonholo/calculus.hpp"
#include "nonholo/mechanics.hpp"

namespace nonholo {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(Method m) { return m == Method::RK4 ? "rk4" : "euler"; }

Method parse_method(const std::string& s) {
  if (s == "rk4") return Method::RK4;
  if (s == "euler") return Method::Euler;
  throw std::invalid_argument("unknown integration method " + s);
}

Trajectory integrate(const VectorField& x, const Vec<double>& x0, double t_end, double dt, Method method,
                     const std::vector<Monitor>& monitors) {
  const Chart& c = *x.chart();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("integrate: t_end must be non-negative");
  if (x0.size() != c.dim)
    throw std::invalid_argument("integrate: x0 has " + std::to_string(x0.size()) + " entries, chart " + c.name +
                                " has dimension " + std::to_string(c.dim));
  for (int i = 0; i < c.dim; ++i) {
    const bool periodic = i < static_cast<int>(c.periodic.size()) && c.periodic[i];
    if (!periodic && !c.sample_box.empty() && (x0[i] < c.sample_box[i].lo || x0[i] > c.sample_box[i].hi))
      throw std::domain_error("integrate: x0 coordinate " + c.coord_names[i] + " = " + number(x0[i]) +
                              " is outside the sample box of " + c.name);
  }
  for (const auto& m : monitors)
    if (m.second.chart()->dim != c.dim) throw std::invalid_argument("integrate: monitor " + m.first + " has the wrong chart");

  Trajectory t;
  t.coord_names = c.coord_names;
  t.dt = dt;
  for (const auto& m : monitors) t.monitors.push_back({m.first, {}});
  const long steps = std::lround(t_end / dt);
  t.times.reserve(steps + 1);
  t.states.reserve(steps + 1);

  auto record = [&](long k, const Vec<double>& s) {
    t.times.push_back(static_cast<double>(k) * dt);
    t.states.push_back(s);
    for (std::size_t i = 0; i < monitors.size(); ++i) t.monitors[i].second.push_back(monitors[i].second(s));
  };
  auto f = [&](const Vec<double>& s) { return x.vec(s); };

  Vec<double> s = x0;
  record(0, s);
  for (long k = 1; k <= steps; ++k) {
    Vec<double> next;
    if (method == Method::Euler) {
      next = s + dt * f(s);
    } else {
      const Vec<double> k1 = f(s);
      const Vec<double> k2 = f(Vec<double>(s + 0.5 * dt * k1));
      const Vec<double> k3 = f(Vec<double>(s + 0.5 * dt * k2));
      const Vec<double> k4 = f(Vec<double>(s + dt * k3));
      next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!next.allFinite()) {
      t.error = "non-finite state at t = " + number(static_cast<double>(k) * dt);
      break;
    }
    s = next;
    record(k, s);
  }
  return t;
}

const std::vector<double>& monitor_series(const Trajectory& traj, const std::string& name) {
  for (const auto& m : traj.monitors)
    if (m.first == name) return m.second;
  throw std::invalid_argument("no monitor named " + name);
}

double monitor_drift(const Trajectory& traj, const std::string& name) {
  const auto& s = monitor_series(traj, name);
  double d = 0.0;
  for (double v : s) d = std::max(d, std::abs(v - s.front()));
  return d;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (const auto& n : traj.coord_names) out << ',' << csv_field(n);
  for (const auto& m : traj.monitors) out << ',' << csv_field(m.first);
  out << "\r\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << number(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) out << ',' << number(traj.states[k][i]);
    for (const auto& m : traj.monitors) out << ',' << number(m.second[k]);
    out << "\r\n";
  }
}

VectorField reduce_vector_field(const VectorField& x, const QuotientChart& q) {
  return make_vector(q.base, [x, q](const auto& b) {
    using T = scalar_t<decltype(b)>;
    const Vec<T> m = q.sigma(b);
    return Vec<T>(jacobian(q.rho.fn(), *q.total, m) * x.vec(m));
  });
}

SimulationSetup simulation_setup(const ExampleBundle& b) {
  SimulationSetup s{nh_vector_field(b.phase), b.monitors, b.x0};
  if (!b.simulation_chart) return s;
  const ChartChange& c = *b.simulation_chart;
  s.field = pushforward(c.to, c.from, s.field);
  for (auto& m : s.monitors) m.second = pullback(c.from, m.second);
  s.x0 = c.to(b.x0);
  return s;
}

}  // namespace nonholo
