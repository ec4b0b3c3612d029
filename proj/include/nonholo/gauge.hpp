#pragma once

// Gauge transformations π ↦ π_B with π_B♯ = π♯(Id + B♭π♯)^{-1}, B♭X = i_X B.

#include <vector>

#include "nonholo/calculus.hpp"
#include "nonholo/linalg.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

// Throws SingularError naming the point when |det(Id + B♭π♯)| < 1e-10.
BiVector gauge_transform(const BiVector& pi, const TwoForm& b);

// B ↦ P_Cᵀ B P_C, so that i_Z B = 0 for Z in the complement killed by P_C.
TwoForm normalize_gauge(const TwoForm& b, const MatrixField& projector);

struct GaugeReport {
  bool invertible_everywhere = true;
  double min_det = 0.0;
  double max_condition = 0.0;
  std::vector<Vec<double>> failing_points;
  double dynamical_residual = 0.0;  // max |i_{X_H} B|
  Vec<double> worst_point;
};

// With pi given, also certifies invertibility of Id + B♭π♯ at the samples.
GaugeReport check_dynamical_gauge(const TwoForm& b, const VectorField& x_h, int samples, std::uint64_t seed,
                                  const BiVector* pi = nullptr);

struct TwistedReport {
  double residual = 0.0;     // max |½[π,π] − π♯(φ)|
  double closedness = 0.0;   // max |dφ|, when checked
  bool closedness_checked = false;
  Vec<double> worst_point;
};

// Set check_closed = false when φ is exact by construction.
TwistedReport twisted_residual(const BiVector& pi, const ThreeForm& phi, int samples, std::uint64_t seed,
                               bool check_closed = true);

}  // namespace nonholo
