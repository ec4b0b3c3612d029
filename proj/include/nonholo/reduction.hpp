#pragma once

// Reduction to explicit quotient charts: π_𝒥𝒦, Λ = π^𝒥𝒦_red, the
// metric-independent (W°, π₀, Λ₀), the map Ψ : M → W° and the checks that
// relate the reduced brackets.

#include <string>
#include <vector>

#include "nonholo/gauge.hpp"
#include "nonholo/mechanics.hpp"
#include "nonholo/symmetry.hpp"

namespace nonholo {

// Orbit projection ρ : total → base with a section σ (ρ∘σ = id).
struct QuotientChart {
  ChartPtr total;
  ChartPtr base;
  SmoothMap rho;
  SmoothMap sigma;
};

struct QuotientReport {
  double section_residual = 0.0;  // |ρ(σ(b)) − b|
  double orbit_residual = 0.0;    // |Tρ η_M|
  Vec<double> worst_point;
};

QuotientReport check_quotient(const QuotientChart& q, const std::vector<VectorField>& generators, int samples,
                              std::uint64_t seed);

struct ReductionReport {
  double invariance = 0.0;            // max |£_{η_M} π|
  double section_independence = 0.0;  // π_red from σ versus from exp(ξ)·σ
  Vec<double> worst_point;
};

// π_red♯(α) = Tρ π♯(ρ*α) at σ(b). Throws std::domain_error naming the
// generator and point when £_{η_M} π exceeds 1e-8, or when the value moves
// by more than 1e-8 along an orbit.
BiVector reduce_bivector(const BiVector& pi, const QuotientChart& q, const std::vector<VectorField>& generators,
                         int samples = 16, std::uint64_t seed = 11, ReductionReport* report = nullptr);

// Gauge of π_nh by −⟨𝒥,𝒦_W⟩, cross-checked against the bivector of
// (C, Ω_M + ⟨𝒥,𝒦_W⟩). Throws when the routes differ by more than 1e-9.
BiVector pi_jk(const SymmetryStructure& s, int samples = 16, std::uint64_t seed = 11, double* route_gap = nullptr);

// κ₀(X,Y) = κ(P_D X, P_D Y) + κ(P_W X, P_W Y) on Q.
MatrixField kappa0(const ConstrainedPhase& phase);

// W° = κ₀♯(D) as the constrained phase of the metric κ₀, charted by
// (q, p_i) with covector p_i X^i. Its chart is named "<system>/W0/M".
ConstrainedPhase annihilator_phase(const ConstrainedPhase& phase);

struct AnnihilatorBundle {
  ConstrainedPhase phase0;
  SymmetryStructure sym0;
  TwoForm Omega_W0;  // ι₀*Ω_Q
  BiVector pi0;
  BiVector Lambda0;
  double route_gap = 0.0;         // reduce_bivector versus presymplectic reduction
  double kernel_residual = 0.0;   // Ker Ω_W° versus 𝒲₀, both ways
  double nondegeneracy = 0.0;     // min |det Ω_W°| on the C₀-frame
  Vec<double> worst_point;
};

// Throws std::domain_error when W fails the vertical-symmetry condition or
// when either check exceeds 1e-9.
AnnihilatorBundle w_annihilator_bundle(const ConstrainedPhase& phase, const LieAlgebraData& lie,
                                       const QuotientChart& q0, int samples = 16, std::uint64_t seed = 11);

struct PsiMap {
  SmoothMap psi;      // M → W°
  SmoothMap inverse;  // W° → M
};

// Ψ = (κ₀|_D) ∘ (κ|_D)^{-1}♯ computed on canonical covectors.
PsiMap psi_map(const ConstrainedPhase& phase, const ConstrainedPhase& phase0);

struct PsiReport {
  double adapted_identity = 0.0;  // |Ψ(q, p) − (q, p)| in the adapted charts
  double round_trip = 0.0;        // |Ψ⁻¹(Ψ(m)) − m|
  double min_abs_det = 0.0;       // of the Jacobian of Ψ
  double tc_vs_c0 = 0.0;          // TΨ(C) = C₀, both inclusions
  double omega_pullback = 0.0;    // Ω_𝒥𝒦|_C − Ψ*Ω_W°|_C
  double pi_pushforward = 0.0;    // Ψ_*π_𝒥𝒦 − π₀
  double momentum = 0.0;          // 𝒥₀∘Ψ − P*_gS 𝒥^nh per basis element
  Vec<double> worst_point;
};

PsiReport check_psi(const SymmetryStructure& s, const AnnihilatorBundle& w0, const BiVector& pi_JK, const PsiMap& psi,
                    int samples, std::uint64_t seed);

struct ReducedBundle {
  BiVector pi_JK;
  BiVector Lambda;
  BiVector Lambda0;
  SmoothMap Psi;
  MatrixField kappa0;
  AnnihilatorBundle w0;
  PsiMap psi;
  SmoothMap Psi_red;  // M/G → W°/G
  SmoothMap Psi_red_inverse;
};

ReducedBundle build_reduced_bundle(const SymmetryStructure& s, const QuotientChart& q, const QuotientChart& q0,
                                   int samples = 16, std::uint64_t seed = 11);

struct BundleReport {
  double lambda_jacobiator = 0.0;
  double lambda0_jacobiator = 0.0;
  double psi_red_poisson = 0.0;  // (Ψ_red)_*Λ − Λ₀
  Vec<double> worst_point;
};

BundleReport check_reduced_bundle(const ReducedBundle& rb, int samples, std::uint64_t seed);

// max |π♯df| over samples.
Extremum casimir_residual(const BiVector& pi, const ScalarField& f, int samples, std::uint64_t seed);

// Ω = −P^{-1} for a nondegenerate bivector matrix P, so that i_X Ω = α ⇔ π♯α = −X.
TwoForm inverse_two_form(const BiVector& pi);

struct BatesSniatyckiReport {
  double residual = 0.0;            // |dΩ^nh_red + d⟨𝒥,𝒦⟩_red|
  double lambda_form_closed = 0.0;  // |d(Ω^nh_red + ⟨𝒥,𝒦⟩_red)|
  double lambda_form_gap = 0.0;     // Ω^nh_red + ⟨𝒥,𝒦⟩_red versus the inverse of Λ
  double jk_basic = 0.0;            // i_{η_M}⟨𝒥,𝒦⟩ and £_{η_M}⟨𝒥,𝒦⟩
  Vec<double> worst_point;
};

// Requires 𝒮 = {0}; throws std::domain_error otherwise.
BatesSniatyckiReport bates_sniatycki_check(const SymmetryStructure& s, const QuotientChart& q, int samples,
                                           std::uint64_t seed);

struct ReducedGaugeReport {
  double dynamical_residual = 0.0;  // |i_{X_nh} B|
  bool normalized = false;          // B replaced by P_Cᵀ B P_C
  double basic_contraction = 0.0;   // |i_{η_M}(B + ⟨𝒥,𝒦⟩)|
  double basic_lie = 0.0;           // |£_{η_M}(B + ⟨𝒥,𝒦⟩)|
  bool basic = false;
  bool applicable = false;          // hypotheses of the reduced-dynamics theorem hold
  double gauge_residual = 0.0;      // π^B_red − gauge(Λ, ℬ)
  double twisted_residual = 0.0;    // ½[π^B_red, π^B_red] − π^B_red♯(−dℬ)
  double reduced_jacobiator = 0.0;  // ½[π^B_red, π^B_red] − (π_B♯(dB + d𝒥∧𝒦))∘ρ*
  double conserved = 0.0;           // d⟨𝒥^nh, P_gS η⟩(X_nh) over the basis
  Vec<double> worst_point;
};

ReducedGaugeReport reduced_dynamics_gauge_check(const SymmetryStructure& s, const TwoForm& b, const QuotientChart& q,
                                                int samples, std::uint64_t seed);

// ℬ = σ*(B + ⟨𝒥,𝒦⟩), meaningful when B + ⟨𝒥,𝒦⟩ is basic.
TwoForm basic_remainder(const SymmetryStructure& s, const TwoForm& b, const QuotientChart& q);

}  // namespace nonholo
