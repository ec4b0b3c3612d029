#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "nonholo/calculus.hpp"
#include "nonholo/verify.hpp"
#include "support.hpp"

using namespace nonholo;
using namespace nonholo::testing;

namespace {

const ExampleAnalysis& analysis(const std::string& name) {
  static std::map<std::string, std::unique_ptr<ExampleAnalysis>> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, std::make_unique<ExampleAnalysis>(analyze(make_example(name)))).first;
  return *it->second;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Generator matrix on Q, columns η^k_Q.
Mat<double> generators_at(const LieAlgebraData& lie, const Vec<double>& q) {
  Mat<double> g(q.size(), lie.dim_g);
  for (int k = 0; k < lie.dim_g; ++k) g.col(k) = lie.generators_Q[k].vec(q);
  return g;
}

}  // namespace

TEST_CASE("example catalogue and parameters") {
  const auto names = example_names();
  CHECK(names.size() == 8);
  for (const auto& n : names) {
    const ExampleBundle b = make_example(n);
    CHECK(b.name == n);
    for (const auto& p : b.parameters) {
      CHECK(p.value > 0.0);
      CHECK(p.safe.lo <= p.value);
      CHECK(p.value <= p.safe.hi);
    }
    CHECK(!b.expected.empty());
    CHECK(b.monitors.front().first == "H_M");
    CHECK(b.x0.size() == b.phase.dim());
  }
  CHECK(make_example("disk").parameter("I") == 2.0);
  CHECK(make_example("disk", {{"I", 3.0}}).parameter("I") == 3.0);
  CHECK(make_example("ball_rank1").parameter("I3") == 3.0);
}

TEST_CASE("make_example rejects unknown names and unsafe parameters") {
  CHECK_THROWS_AS(make_example("nosuch"), std::invalid_argument);
  CHECK_THROWS_AS(make_example("disk", {{"Q", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_example("particle", {{"m", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_example("disk", {{"m", 100.0}}), std::domain_error);
  CHECK_THROWS_AS(make_example("ball_rank2", {{"I1", 0.0}}), std::domain_error);
  CHECK_THROWS_AS(make_example("snakeboard", {{"J", 1.0}}), std::domain_error);
  CHECK_THROWS_AS(make_example("snakeboard", {{"m", 0.5}, {"J", 0.6}}), std::domain_error);
}

TEST_CASE("snakeboard metric is positive definite on its safe box") {
  for (double j : {0.1, 0.5, 0.9}) {
    const ExampleBundle b = make_example("snakeboard", {{"J", j}});
    double lo = 1e300;
    for (const auto& q : samples(*b.system.Q, 200)) {
      Eigen::SelfAdjointEigenSolver<Mat<double>> es(b.system.kappa(q));
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    CHECK(lo > 0.0);
  }
}

TEST_CASE("suite lists") {
  const auto particle = list_suites(make_example("particle"));
  for (const auto& s : all_suite_names()) CHECK(has(particle, s) == (s != "bates_sniatycki"));
  CHECK(has(list_suites(make_example("particle_chaplygin")), "bates_sniatycki"));
  CHECK(has(list_suites(make_example("ball_rank2")), "twisted"));
  CHECK(list_suites(make_example("disk")) == list_suites(make_example("disk")));
  CHECK(suite_of(Target::Lambda0) == "lambda");
  CHECK(suite_of(Target::ReducedGauge) == "twisted");
}

TEST_CASE("expected closed forms match the computed fields") {
  for (const auto& n : example_names()) {
    const ExampleAnalysis& a = analysis(n);
    for (const auto& f : a.bundle.expected) {
      const FieldComparison c = compare_expected(a, f, 200, 42);
      INFO(n, "/", f.name, " (", to_string(f.origin), ") worst at ", format_point(c.worst_point));
      CHECK(c.relative <= 1e-8);
      CHECK(c.zero_abs <= 1e-10);
    }
  }
}

TEST_CASE("momentum fields agree with the canonical Legendre transform") {
  for (const auto& n : example_names()) {
    const ExampleAnalysis& a = analysis(n);
    const ConstrainedPhase& ph = a.bundle.phase;
    for (const auto& f : a.bundle.expected) {
      if (f.target != Target::Momentum) continue;
      INFO(n, "/", f.name);
      double worst = 0.0;
      for (const auto& x : samples(*ph.M, 100)) {
        const Vec<double> q = x.head(ph.N);
        const Vec<double> qdot = ph.frame_X(q) * x.tail(ph.r);
        const Vec<double> covector = ph.sys.kappa(q) * qdot;
        const double oracle = covector.dot(generators_at(a.bundle.lie, q) * f.eta);
        worst = std::max(worst, std::abs(f.scalar(f.display(x)) - oracle) / std::max(1.0, std::abs(oracle)));
      }
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("Psi sends κ(v) to κ₀(v) for v in D") {
  for (const auto& n : example_names()) {
    const ExampleAnalysis& a = analysis(n);
    const ConstrainedPhase& ph = a.bundle.phase;
    const ConstrainedPhase& ph0 = a.reduced.w0.phase0;
    const MatrixField k0 = kappa0(ph);
    INFO(n);
    double worst = 0.0;
    for (const auto& x : samples(*ph.M, 100)) {
      const Vec<double> q = x.head(ph.N);
      const Vec<double> v = ph.frame_X(q) * x.tail(ph.r);
      const Vec<double> y = a.reduced.Psi(x);
      CHECK(max_abs(Vec<double>(y.head(ph.N) - q)) == 0.0);
      worst = std::max(worst, rel_diff(ph0.covector_basis(q) * y.tail(ph.r), k0(q) * v));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("Omega_W0 is minus the differential of the tautological form") {
  for (const auto& n : example_names()) {
    const ExampleAnalysis& a = analysis(n);
    const ConstrainedPhase& ph0 = a.reduced.w0.phase0;
    const TwoForm oracle = -exterior_derivative(ph0.Theta_M);
    INFO(n);
    double worst = 0.0;
    for (const auto& x : samples(*ph0.M, 100))
      worst = std::max(worst, rel_diff(a.reduced.w0.Omega_W0(x).c, oracle(x).c));
    CHECK(worst <= 1e-11);
  }
}

TEST_CASE("ball ⟨J,K⟩ equals minus 𝒥 paired with A_W of D-frame brackets") {
  for (const char* n : {"ball_rank0", "ball_rank1", "ball_rank2", "ball_rank3"}) {
    const ExampleAnalysis& a = analysis(n);
    const ConstrainedPhase& ph = a.bundle.phase;
    const MechanicalSystem& sys = a.bundle.system;
    const double m = a.bundle.parameter("m");
    INFO(n);
    double worst = 0.0;
    for (const auto& x : samples(*ph.M, 60)) {
      const Vec<double> q = x.head(ph.N);
      const Vec<double> xdot = (ph.frame_X(q) * x.tail(ph.r)).tail(3);
      const Alt<double> jk = a.jk(x);
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const Vec<double> br = lie_bracket(sys.frame_D[i], sys.frame_D[j]).vec(q);
          double oracle = 0.0;
          for (int c = 0; c < 3; ++c) oracle -= m * xdot[c] * sys.constraint_forms[c](q).c.dot(br);
          Vec<double> u = Vec<double>::Zero(ph.dim()), v = Vec<double>::Zero(ph.dim());
          u.head(ph.N) = sys.frame_D[i].vec(q);
          v.head(ph.N) = sys.frame_D[j].vec(q);
          worst = std::max(worst, std::abs(evaluate(jk, {u, v}) - oracle) / std::max(1.0, std::abs(oracle)));
        }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("ball reduced gauge pulls back to B + ⟨J,K⟩") {
  for (const char* n : {"ball_rank0", "ball_rank1", "ball_rank2", "ball_rank3"}) {
    const ExampleAnalysis& a = analysis(n);
    const ExampleBundle& b = a.bundle;
    const ExpectedField& f = b.field("reduced_gauge");
    const SmoothMap via = make_map(b.phase.M, f.display.target(), [f, q = b.quotient](const auto& x) {
      return f.display(q.rho(x));
    });
    INFO(n);
    double worst = 0.0;
    for (const auto& x : samples(*b.phase.M, 60)) {
      const Mat<double> jac = jacobian(via.fn(), *b.phase.M, x);
      const Alt<double> pulled = transform(f.form(via(x)), Mat<double>(jac.transpose()));
      worst = std::max(worst, rel_diff(pulled.c, Vec<double>(b.gauge(x).c + a.jk(x).c)));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("snakeboard Lambda is Lambda0 under the identity Psi_red") {
  const ExampleAnalysis& a = analysis("snakeboard");
  for (const auto& x : samples(*a.bundle.quotient.base, 100)) {
    CHECK(max_abs(Vec<double>(a.reduced.Psi_red(x) - x)) <= 1e-12);
    CHECK(rel_diff(a.reduced.Lambda(x).c, a.reduced.Lambda0(x).c) <= 1e-11);
  }
}

TEST_CASE("particle_chaplygin has D ∩ V = 0") {
  const ExampleAnalysis& a = analysis("particle_chaplygin");
  const ConstrainedPhase& ph = a.bundle.phase;
  CHECK(a.sym.S.cols() == 0);
  for (const auto& q : samples(*ph.Q, 100)) {
    Mat<double> span(ph.N, ph.r + a.bundle.lie.dim_g);
    span << ph.frame_X(q), generators_at(a.bundle.lie, q);
    Eigen::JacobiSVD<Mat<double>> svd(span);
    const auto s = svd.singularValues();
    const int rank = static_cast<int>((s.array() > 1e-10 * s[0]).count());
    CHECK(ph.r + a.bundle.lie.dim_g - rank == 0);
  }
  // The particle's full group leaves 𝒮 one-dimensional.
  CHECK(analysis("particle").sym.S.cols() == 1);
}

TEST_CASE("ball rank 2: d⟨J,K⟩ does not vanish along 𝒮") {
  const ExampleAnalysis& a = analysis("ball_rank2");
  REQUIRE(a.bundle.witness_point.has_value());
  const Vec<double> x = *a.bundle.witness_point;
  const ThreeForm djk = exterior_derivative(a.jk);
  const Mat<double> s = a.sym.S(x);
  REQUIRE(s.cols() == 1);
  CHECK(max_abs(interior(Vec<double>(s.col(0)), djk(x)).c) > kWitnessMargin);
}

TEST_CASE("basic_gauge flags agree with the computed basicness") {
  for (const auto& n : example_names()) {
    const ExampleAnalysis& a = analysis(n);
    const ReducedGaugeReport r = reduced_dynamics_gauge_check(a.sym, a.bundle.gauge, a.bundle.quotient, 24, 5);
    INFO(n);
    CHECK(r.basic == a.bundle.basic_gauge);
    if (!r.basic) CHECK(std::max(r.basic_contraction, r.basic_lie) > kWitnessMargin);
  }
}

TEST_CASE("free rigid body bracket is Poisson") {
  const ExampleAnalysis& a = analysis("ball_rank0");
  const TriVector jac = jacobiator(a.pi_nh);
  for (const auto& x : samples(*a.bundle.phase.M, 100)) CHECK(max_abs(jac(x).c) <= 1e-8);
}

TEST_CASE("jacobiator_cyclic matches the coordinate jacobiator") {
  for (const char* n : {"particle", "snakeboard", "ball_rank2"}) {
    const ExampleAnalysis& a = analysis(n);
    for (const BiVector& pi : {a.pi_nh, a.pi_nh_red}) {
      const TriVector jac = jacobiator(pi);
      for (const auto& x : samples(*pi.chart(), 10)) CHECK(rel_diff(jac(x).c, jacobiator_cyclic(pi, x).c) <= 1e-9);
    }
  }
}

TEST_CASE("run_suite reports every applicable suite as passing") {
  SuiteConfig cfg;
  cfg.samples = 40;
  for (const char* n : {"particle", "particle_chaplygin", "disk", "snakeboard"}) {
    const ExampleAnalysis& a = analysis(n);
    for (const auto& s : list_suites(a.bundle)) {
      const SuiteResult r = run_suite(a, s, cfg);
      INFO(n, "/", s, " max ", r.max_residual);
      CHECK(r.pass);
      CHECK(!r.checks.empty());
      CHECK(r.samples == 40);
      CHECK(r.tolerance == cfg.tol);
    }
  }
  CHECK_THROWS_AS(run_suite(analysis("particle"), "bates_sniatycki", cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_suite(analysis("particle"), "nosuch", cfg), std::invalid_argument);
}

TEST_CASE("suite results are deterministic") {
  SuiteConfig cfg;
  cfg.samples = 30;
  const ExampleAnalysis& a = analysis("disk");
  const SuiteResult r1 = run_suite(a, "lambda", cfg);
  const SuiteResult r2 = run_suite(analyze(make_example("disk")), "lambda", cfg);
  CHECK(r1.max_residual == r2.max_residual);
  CHECK(r1.worst_point == r2.worst_point);
}
