#include "nonholo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "nonholo/calculus.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

struct AnalysisCache {
  std::mutex mutex;
  std::map<std::pair<int, std::uint64_t>, ReducedGaugeReport> gauge;
};

namespace {

const ReducedGaugeReport& gauge_report(const ExampleAnalysis& a, const SuiteConfig& cfg) {
  std::lock_guard<std::mutex> lock(a.cache->mutex);
  const auto key = std::make_pair(cfg.samples, cfg.seed);
  auto it = a.cache->gauge.find(key);
  if (it == a.cache->gauge.end())
    it = a.cache->gauge
             .emplace(key, reduced_dynamics_gauge_check(a.sym, a.bundle.gauge, a.bundle.quotient, cfg.samples, cfg.seed))
             .first;
  return it->second;
}

// Entries of the closed form below this count as zero.
constexpr double kZeroEntry = 1e-14;

void accumulate(FieldComparison& c, const Vec<double>& got, const Vec<double>& want, const Vec<double>& x,
                double& worst) {
  double rel = 0.0, zero = 0.0;
  for (Eigen::Index i = 0; i < want.size(); ++i) {
    const double d = std::abs(got[i] - want[i]);
    rel = std::max(rel, d / std::max(1.0, std::abs(want[i])));
    if (std::abs(want[i]) <= kZeroEntry) zero = std::max(zero, std::abs(got[i]));
  }
  if (std::isnan(rel)) rel = std::numeric_limits<double>::infinity();
  c.relative = std::max(c.relative, rel);
  c.zero_abs = std::max(c.zero_abs, zero);
  if (rel > worst || c.worst_point.size() == 0) {
    worst = rel;
    c.worst_point = x;
  }
}

Vec<double> scalar_vec(double v) {
  Vec<double> out(1);
  out[0] = v;
  return out;
}

// Pointwise Λ♯df for f given on a display chart.
Vec<double> casimir_defect(const BiVector& pi, const SmoothMap& display, const ScalarField& f, const Vec<double>& x) {
  const Mat<double> j = jacobian(display.fn(), *display.source(), x);
  const Vec<double> df = j.transpose() * gradient(f, display(x));
  return interior(df, pi(x)).c;
}

// Kept separate so the worst point is the maximizer of the residual itself.
void track(Check& c, double v, const Vec<double>& x) {
  if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
  if (v > c.residual || c.worst_point.size() == 0) {
    c.residual = std::max(c.residual, v);
    c.worst_point = x;
  }
}

Check check_of(std::string name, double residual, Vec<double> worst) {
  return {std::move(name), std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual, std::move(worst)};
}

Check field_check(const ExampleAnalysis& a, const ExpectedField& f, const SuiteConfig& cfg) {
  const FieldComparison c = compare_expected(a, f, cfg.samples, cfg.seed);
  return check_of("expected/" + f.name, std::max(c.relative, c.zero_abs), c.worst_point);
}

}  // namespace

ExampleAnalysis analyze(ExampleBundle b, int samples, std::uint64_t seed) {
  ExampleAnalysis a;
  a.sym = build_symmetry_structure(b.phase, b.lie, samples, seed);
  a.pi_nh = nh_bivector(b.phase);
  a.X_nh = nh_vector_field(b.phase);
  a.jk = jk_two_form(a.sym);
  a.pi_nh_red = reduce_bivector(a.pi_nh, b.quotient, a.sym.lie.generators_M, samples, seed);
  a.reduced = build_reduced_bundle(a.sym, b.quotient, b.quotient0, samples, seed);
  a.bundle = std::move(b);
  a.cache = std::make_shared<AnalysisCache>();
  return a;
}

ChartPtr comparison_chart(const ExampleAnalysis& a, Target t) {
  switch (t) {
    case Target::PiNhRed:
    case Target::Lambda:
    case Target::CasimirLambda:
    case Target::ReducedNh:
    case Target::ReducedGauge: return a.bundle.quotient.base;
    case Target::Lambda0:
    case Target::CasimirLambda0: return a.bundle.quotient0.base;
    case Target::OmegaW0: return a.reduced.w0.phase0.M;
    default: return a.bundle.phase.M;
  }
}

FieldComparison compare_expected(const ExampleAnalysis& a, const ExpectedField& f, int samples, std::uint64_t seed) {
  const ExampleBundle& b = a.bundle;
  const ChartPtr chart = comparison_chart(a, f.target);
  const auto pts = sample_points(*chart, samples, seed, "expected/" + b.name + "/" + f.name);
  FieldComparison c;
  double worst = -1.0;
  TwoForm gauge_red;
  if (f.target == Target::ReducedGauge) gauge_red = basic_remainder(a.sym, b.gauge, b.quotient);
  ScalarField nh;
  if (f.target == Target::NhMomentum) nh = nh_momentum(a.sym, f.eta);

  for (const auto& x : pts) {
    const Vec<double> d = f.display(x);
    const Mat<double> jd = jacobian(f.display.fn(), *chart, x);
    switch (f.target) {
      case Target::PiNh:
        accumulate(c, transform(a.pi_nh(x), jd).c, f.bivector(d).c, x, worst);
        break;
      case Target::PiNhRed:
        accumulate(c, transform(a.pi_nh_red(x), jd).c, f.bivector(d).c, x, worst);
        break;
      case Target::Lambda:
        accumulate(c, transform(a.reduced.Lambda(x), jd).c, f.bivector(d).c, x, worst);
        break;
      case Target::Lambda0:
        accumulate(c, transform(a.reduced.Lambda0(x), jd).c, f.bivector(d).c, x, worst);
        break;
      case Target::JK: {
        // Both sides restricted to C.
        const Mat<double> cf = a.sym.phase.C_frame(x);
        const Mat<double> pushed = jd * cf;
        accumulate(c, transform(a.jk(x), Mat<double>(cf.transpose())).c,
                   transform(f.form(d), Mat<double>(pushed.transpose())).c, x, worst);
        break;
      }
      case Target::OmegaW0:
        accumulate(c, a.reduced.w0.Omega_W0(x).c, transform(f.form(d), Mat<double>(jd.transpose())).c, x, worst);
        break;
      case Target::ReducedGauge:
        accumulate(c, gauge_red(x).c, transform(f.form(d), Mat<double>(jd.transpose())).c, x, worst);
        break;
      case Target::Momentum: {
        const int N = b.phase.N;
        const Vec<double> q = x.head(N);
        Mat<double> gens(N, b.lie.dim_g);
        for (int k = 0; k < b.lie.dim_g; ++k) gens.col(k) = b.lie.generators_Q[k].vec(q);
        const double j = b.phase.Theta_M(x).c.head(N).dot(gens * f.eta);
        accumulate(c, scalar_vec(j), scalar_vec(f.scalar(d)), x, worst);
        break;
      }
      case Target::NhMomentum:
        accumulate(c, scalar_vec(nh(x)), scalar_vec(f.scalar(d)), x, worst);
        break;
      case Target::Psi:
        accumulate(c, f.display_target(a.reduced.Psi(x)), f.map(d), x, worst);
        break;
      case Target::ReducedNh: {
        const Vec<double> m = b.quotient.sigma(x);
        const Mat<double> jr = jacobian(b.quotient.rho.fn(), *b.quotient.total, m);
        accumulate(c, jd * (jr * a.X_nh.vec(m)), f.vector.vec(d), x, worst);
        break;
      }
      case Target::CasimirLambda:
      case Target::CasimirLambda0: {
        const BiVector& pi = f.target == Target::CasimirLambda ? a.reduced.Lambda : a.reduced.Lambda0;
        const Vec<double> v = casimir_defect(pi, f.display, f.scalar, x);
        accumulate(c, v, Vec<double>::Zero(v.size()), x, worst);
        break;
      }
      case Target::Conserved: {
        const Vec<double> df = jd.transpose() * gradient(f.scalar, d);
        accumulate(c, scalar_vec(df.dot(a.X_nh.vec(x))), scalar_vec(0.0), x, worst);
        break;
      }
    }
  }
  return c;
}

Alt<double> jacobiator_cyclic(const BiVector& pi, const Vec<double>& x) {
  const ChartPtr c = pi.chart();
  const int n = c->dim;
  // pair[f][g] = π♯d{x^f,x^g} + [π♯dx^f, π♯dx^g] at x, antisymmetric in (f, g).
  std::vector<std::vector<Vec<double>>> pair(n, std::vector<Vec<double>>(n));
  for (int f = 0; f < n; ++f)
    for (int g = f + 1; g < n; ++g) {
      const auto fg = make_scalar(c, [pi, f, g](const auto& q) { return pi(q)({f, g}); });
      pair[f][g] = sharp(pi, differential(fg)).vec(x) +
                   lie_bracket(sharp(pi, coordinate_differential(c, f)), sharp(pi, coordinate_differential(c, g))).vec(x);
      pair[g][f] = -pair[f][g];
    }
  Alt<double> out(n, 3);
  const IndexTable& tab = index_table(n, 3);
  for (int s = 0; s < tab.size(); ++s) {
    const int i = tab.idx[s][0], j = tab.idx[s][1], k = tab.idx[s][2];
    out.c[s] = pair[i][j][k] + pair[j][k][i] + pair[k][i][j];
  }
  return out;
}

SuiteResult run_suite(const ExampleAnalysis& a, const std::string& suite, const SuiteConfig& cfg) {
  const ExampleBundle& b = a.bundle;
  const auto applicable = list_suites(b);
  if (std::find(applicable.begin(), applicable.end(), suite) == applicable.end())
    throw std::invalid_argument("suite " + suite + " does not apply to " + b.name);
  SuiteResult res;
  res.name = suite;
  res.tolerance = cfg.tol;
  res.samples = cfg.samples;
  res.seed = cfg.seed;
  std::vector<Check>& checks = res.checks;

  for (const auto& f : b.expected)
    if (suite_of(f.target) == suite) checks.push_back(field_check(a, f, cfg));

  if (suite == "jacobiator") {
    const JacobiatorReport j = verify_jacobiator(a.sym, b.gauge, cfg.samples, cfg.seed);
    checks.push_back(check_of("curvature_formula", j.curvature_formula, j.worst_point));
    checks.push_back(check_of("momentum_formula", j.momentum_formula, j.worst_point));
    checks.push_back(check_of("pairing_formula", j.pairing_formula, j.worst_point));
  } else if (suite == "jk") {
    double gap = 0.0;
    pi_jk(a.sym, cfg.samples, cfg.seed, &gap);
    checks.push_back(check_of("pi_jk_routes", gap, {}));
  } else if (suite == "lambda") {
    const BundleReport r = check_reduced_bundle(a.reduced, cfg.samples, cfg.seed);
    checks.push_back(check_of("jacobiator_Lambda", r.lambda_jacobiator, r.worst_point));
    checks.push_back(check_of("jacobiator_Lambda0", r.lambda0_jacobiator, r.worst_point));
    checks.push_back(check_of("psi_red_poisson", r.psi_red_poisson, r.worst_point));
  } else if (suite == "psi") {
    const PsiReport p = check_psi(a.sym, a.reduced.w0, a.reduced.pi_JK, a.reduced.psi, cfg.samples, cfg.seed);
    checks.push_back(check_of("adapted_identity", p.adapted_identity, p.worst_point));
    checks.push_back(check_of("round_trip", p.round_trip, p.worst_point));
    checks.push_back(check_of("tc_vs_c0", p.tc_vs_c0, p.worst_point));
    checks.push_back(check_of("omega_pullback", p.omega_pullback, p.worst_point));
    checks.push_back(check_of("pi_pushforward", p.pi_pushforward, p.worst_point));
    checks.push_back(check_of("momentum", p.momentum, p.worst_point));
    checks.push_back(check_of("pi0_routes", a.reduced.w0.route_gap, a.reduced.w0.worst_point));
    checks.push_back(check_of("kernel", a.reduced.w0.kernel_residual, a.reduced.w0.worst_point));
  } else if (suite == "dynamics") {
    const ReducedGaugeReport& r = gauge_report(a, cfg);
    checks.push_back(check_of("dynamical_gauge", r.dynamical_residual, r.worst_point));
    Check energy{"energy_conserved", 0.0, {}};
    const ScalarField& h = b.phase.H_M;
    for (const auto& x : sample_points(*b.phase.M, cfg.samples, cfg.seed, "dynamics/energy"))
      track(energy, std::abs(gradient(h, x).dot(a.X_nh.vec(x))), x);
    checks.push_back(energy);
    if (r.applicable) {
      checks.push_back(check_of("nh_momentum_conserved", r.conserved, r.worst_point));
      checks.push_back(check_of("reduced_gauge", r.gauge_residual, r.worst_point));
    }
  } else if (suite == "twisted") {
    const ReducedGaugeReport& r = gauge_report(a, cfg);
    checks.push_back(check_of("reduced_jacobiator", r.reduced_jacobiator, r.worst_point));
    if (b.basic_gauge) {
      checks.push_back(check_of("basic_contraction", r.basic_contraction, r.worst_point));
      checks.push_back(check_of("basic_lie", r.basic_lie, r.worst_point));
      checks.push_back(check_of("twisted", r.twisted_residual, r.worst_point));
      checks.push_back(check_of("reduced_gauge", r.gauge_residual, r.worst_point));
    } else {
      // Non-basic bundles must miss basicness by at least the witness margin.
      const double witness = std::max(r.basic_contraction, r.basic_lie);
      checks.push_back(check_of("nonbasic_shortfall", std::max(0.0, kWitnessMargin - witness), r.worst_point));
    }
  } else if (suite == "bates_sniatycki") {
    const BatesSniatyckiReport r = bates_sniatycki_check(a.sym, b.quotient, cfg.samples, cfg.seed);
    checks.push_back(check_of("closed_defect", r.residual, r.worst_point));
    checks.push_back(check_of("lambda_form_closed", r.lambda_form_closed, r.worst_point));
    checks.push_back(check_of("lambda_form_inverse", r.lambda_form_gap, r.worst_point));
    checks.push_back(check_of("jk_basic", r.jk_basic, r.worst_point));
  }

  res.pass = true;
  double worst = -1.0;
  for (const auto& c : checks) {
    res.max_residual = std::max(res.max_residual, c.residual);
    if (!(c.residual <= cfg.tol)) res.pass = false;
    if (c.residual > worst) {
      worst = c.residual;
      res.worst_point = c.worst_point;
    }
  }
  return res;
}

}  // namespace nonholo
