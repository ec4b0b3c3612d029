#pragma once

// Constrained phase space M ⊂ T*Q of a system with linear velocity
// constraints, charted by (q, p_i) with p_i the momenta along the
// κ-orthonormalized D-frame.

#include <string>
#include <vector>

#include "nonholo/calculus.hpp"
#include "nonholo/linalg.hpp"

namespace nonholo {

struct MechanicalSystem {
  std::string name;
  ChartPtr Q;
  MatrixField kappa;  // N×N, symmetric positive definite
  ScalarField potential;
  std::vector<OneForm> constraint_forms;
  std::vector<VectorField> frame_D;
  std::vector<VectorField> frame_W;
  Interval momentum_box{-2.0, 2.0};
  // Chart names of the adapted momenta; defaults to p1..pr.
  std::vector<std::string> momentum_names;
};

struct ConstrainedPhase {
  MechanicalSystem sys;
  int N = 0;  // dim Q
  int r = 0;  // rank D
  int k = 0;  // rank W
  ChartPtr Q;
  ChartPtr M;   // (q, p_1..p_r)
  ChartPtr TQ;  // canonical (q, P)

  // Q-level frame data.
  MatrixField frame_X;         // N×r, κ-orthonormal D-frame
  MatrixField frame_Z;         // N×k
  MatrixField coframe;         // N×N, rows X^1..X^r, Z^1..Z^k dual to [X Z]
  MatrixField kappa_DW;        // r×k, κ(X_i, Z_a)
  MatrixField covector_basis;  // N×r, κX: canonical covector is covector_basis·p

  OneForm Theta_M;
  TwoForm Omega_M;
  MatrixField C_frame;  // n×2r
  MatrixField W_frame;  // n×k, lifts (Z_a, 0)
  MatrixField P_C;      // n×n projector onto C along 𝒲
  std::vector<VectorField> C;
  std::vector<VectorField> W_cal;
  ScalarField H_M;
  SmoothMap tau;
  SmoothMap iota;

  int dim() const { return M->dim; }
};

// Checks the MechanicalSystem invariants on `samples` seeded points; throws
// std::domain_error naming the failing point.
void validate_system(const MechanicalSystem& sys, int samples = 16, std::uint64_t seed = 1);

ConstrainedPhase build_constrained_phase(const MechanicalSystem& sys);

// Bivector defined by a regular frame F and a 2-form Ω nondegenerate on F:
// i_X Ω|_F = α|_F ⇔ π♯α = −X.
BiVector bivector_from_section(const MatrixField& frame, const TwoForm& omega, const char* what = "bivector_from_section");

BiVector nh_bivector(const ConstrainedPhase& phase);
VectorField nh_vector_field(const ConstrainedPhase& phase);
// X_H = −π♯(dH) for an arbitrary bivector.
VectorField hamiltonian_vector_field(const BiVector& pi, const ScalarField& h);

// Diagnostics for the phase invariants.
struct PhaseReport {
  double min_abs_det_omega_c = 0.0;  // over samples, of Ω_M restricted to the C-frame
  double max_tau_c_outside_d = 0.0;  // ε^a(Tτ C)
  double max_split_residual = 0.0;   // |P_C + P_W − I|
};
PhaseReport check_phase(const ConstrainedPhase& phase, int samples, std::uint64_t seed);

// Pointwise frame data; exposed for the symmetry and reduction modules.
template <class T>
struct FrameData {
  Mat<T> X;        // N×r orthonormal
  Mat<T> Z;        // N×k
  Mat<T> coframe;  // N×N
  Mat<T> kappa;    // N×N
};
template <class T>
FrameData<T> frame_data(const MechanicalSystem& sys, const Vec<T>& q);
extern template FrameData<S0> frame_data(const MechanicalSystem&, const Vec<S0>&);
extern template FrameData<S1> frame_data(const MechanicalSystem&, const Vec<S1>&);
extern template FrameData<S2> frame_data(const MechanicalSystem&, const Vec<S2>&);

}  // namespace nonholo
