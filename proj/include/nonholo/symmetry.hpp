#pragma once

// Infinitesimal symmetries of a constrained phase: vertical complement 𝒲,
// the 𝔤-valued form A_W, the 𝒲-curvature 𝒦_W, the momentum map 𝒥 and the
// Jacobiator formulas built from them.
//
// Generators follow the left-action convention [ξ_Q, η_Q] = −([ξ,η])_Q with
// [e_i, e_j] = c^k_{ij} e_k.

#include <string>
#include <vector>

#include "nonholo/gauge.hpp"
#include "nonholo/mechanics.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

struct LieAlgebraData {
  int dim_g = 0;
  // structure_constants[k](i, j) = c^k_{ij}
  std::vector<Mat<double>> structure_constants;
  std::vector<VectorField> generators_Q;
  // Filled by build_symmetry_structure: cotangent lifts restricted to M.
  std::vector<VectorField> generators_M;
  std::vector<int> g_W_basis;
};

// Abelian algebra of the given dimension.
std::vector<Mat<double>> abelian_constants(int dim_g);

struct LieReport {
  double bracket_residual = 0.0;  // |[η^i_Q, η^j_Q] + c^k_{ij} η^k_Q|
  bool g_W_ideal_closed = true;   // [𝔤, 𝔤_W] ⊆ 𝔤_W from the constants
  double w_span_residual = 0.0;   // span{η_Q : η ∈ 𝔤_W} vs W, both ways
  int min_rank_D_plus_V = 0;      // dimension assumption: equals dim Q
  Vec<double> worst_point;
};

LieReport check_lie_data(const ConstrainedPhase& phase, const LieAlgebraData& lie, int samples, std::uint64_t seed);

struct SymmetryStructure {
  ConstrainedPhase phase;
  LieAlgebraData lie;
  MatrixField eta_M;    // n × dim_g, columns (η^k)_M
  MatrixField V;        // = eta_M
  MatrixField S;        // n × (dim_g − k), (P_gS e_j)_M for j ∉ 𝔤_W
  MatrixField W_frame;  // n × k, (η^a)_M for a ∈ 𝔤_W
  MatrixField P_C;      // along 𝒲
  MatrixField P_W;
  MatrixField A_W_matrix;  // dim_g × n
  std::vector<OneForm> A_W;
  std::vector<TwoForm> K_W;
  std::vector<ScalarField> J;
  MatrixField P_gS;  // dim_g × dim_g on M, projection onto 𝔤_𝒮 along 𝔤_W
  std::vector<int> g_S_complement;  // indices j ∉ 𝔤_W

  int dim_g() const { return lie.dim_g; }
};

// Throws std::domain_error with the failing point when the Lie data, the
// vertical-symmetry condition or the dimension assumption fail.
SymmetryStructure build_symmetry_structure(const ConstrainedPhase& phase, LieAlgebraData lie, int samples = 16,
                                           std::uint64_t seed = 7);

// Generator of a point-dependent algebra element ξ(m) = Σ ξ_k e_k.
VectorField generator_of(const SymmetryStructure& s, const Vec<double>& xi);

// ⟨𝒥, 𝒦_W⟩
TwoForm jk_two_form(const SymmetryStructure& s);
// Σ_k d𝒥_k ∧ 𝒦_W^k
ThreeForm dj_wedge_k(const SymmetryStructure& s);
// ψ(α,β,γ) = cycl γ((𝒦_W(π♯α, π♯β))_M)
TriVector psi_trivector(const SymmetryStructure& s, const BiVector& pi_b);

// Bold 𝐊_W(X, Y) = −P_W[P_C X, P_C Y] at a point, via the derivative of P_C.
// Entry (a, b) of the result is 𝐊_W(u_a, u_b) for the columns u of `args`.
std::vector<std::vector<Vec<double>>> bold_k_at(const SymmetryStructure& s, const Vec<double>& x, const Mat<double>& args);

struct JacobiatorReport {
  double curvature_formula = 0.0;  // general formula with 𝐊_W and Ω_M
  double momentum_formula = 0.0;  // −π_B♯(dB + d𝒥∧𝒦_W) − ψ
  double pairing_formula = 0.0;  // −π_B♯(dB + d⟨𝒥,𝒦_W⟩) − ψ
  double jacobiator_max = 0.0;
  double b_section_residual = 0.0;  // |i_Z B| for Z ∈ 𝒲 before normalization
  bool normalized = false;
  Vec<double> worst_point;
};

// B is normalized to i_Z B = 0 (Z ∈ 𝒲) before use when needed; the report
// records the pre-normalization residual.
JacobiatorReport verify_jacobiator(const SymmetryStructure& s, const TwoForm& b, int samples, std::uint64_t seed);

// ⟨𝒥^nh, P_gS(η)⟩ = Θ_M((P_gS η)_M) for constant η.
ScalarField nh_momentum(const SymmetryStructure& s, const Vec<double>& eta);

struct SymmetryReport {
  double a_on_c = 0.0;              // |A_W| on the C-frame
  double a_on_w = 0.0;              // |A_W(η_M) − η| for η ∈ 𝔤_W
  double k_vs_bracket = 0.0;        // 𝒦_W(X,Y) + A_W([X,Y]) on C-frame pairs
  double bold_k_semibasic = 0.0;    // 𝐊_W with a ker Tτ argument
  double bold_k_vs_generator = 0.0; // 𝐊_W − (𝒦_W)_M
  double jk_semibasic = 0.0;        // i_X ⟨𝒥,𝒦_W⟩ for X ∈ ker Tτ
  double jk_invariance = 0.0;       // £_{η_M} ⟨𝒥,𝒦_W⟩
  double k_vs_dA = 0.0;             // 𝒦_W(X,Y) − dA_W(X,Y), X ∈ C
  double dk_on_c = 0.0;             // d𝒦_W on C-triples
  double djk_vs_dj_wedge_k = 0.0;
  double hamiltonian_generator = 0.0;  // i_{η_M} Ω_M − ⟨d𝒥, η⟩, η point-dependent
  double momentum_equivariance = 0.0;  // d𝒥_j(η^i_M) + c^k_{ij} 𝒥_k
  double s_in_c = 0.0;                 // 𝒮 frame inside C
  Vec<double> worst_point;
};

SymmetryReport check_symmetry(const SymmetryStructure& s, int samples, std::uint64_t seed);

}  // namespace nonholo
