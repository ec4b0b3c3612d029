#pragma once

// Exterior and multivector calculus on a single chart.
//
// Conventions: {f,g} = π(df,dg); π♯ is fixed by β(π♯α) = π(α,β), so
// (π♯α)^i = α_j π^{ji}; ½[π,π](df,dg,dh) = {f,{g,h}} + cyclic.

#include <vector>

#include "nonholo/field.hpp"

namespace nonholo {

KForm exterior_derivative(const KForm& w);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
OneForm differential(const ScalarField& f);

template <bool Up>
AltField<Up> wedge(const AltField<Up>& a, const AltField<Up>& b);
extern template KForm wedge(const KForm&, const KForm&);
extern template KVector wedge(const KVector&, const KVector&);

// i_X ω, contraction in the first slot.
KForm interior(const VectorField& x, const KForm& w);
// i_α P for a multivector P: the first slot of P eaten by α.
KVector interior(const OneForm& a, const KVector& p);

// On 1-forms β(π♯α) = π(α,β); on k-forms π♯(φ)(α₁,…,α_k) = (−1)^k φ(π♯α₁,…,π♯α_k).
KVector sharp(const BiVector& pi, const KForm& phi);
// B♭X = i_X B.
OneForm flat(const TwoForm& b, const VectorField& x);

TriVector jacobiator(const BiVector& pi);

template <bool Up>
AltField<Up> operator+(const AltField<Up>& a, const AltField<Up>& b);
template <bool Up>
AltField<Up> operator-(const AltField<Up>& a, const AltField<Up>& b);
template <bool Up>
AltField<Up> operator-(const AltField<Up>& a);
template <bool Up>
AltField<Up> operator*(double s, const AltField<Up>& a);
template <bool Up>
AltField<Up> operator*(const ScalarField& f, const AltField<Up>& a);

ScalarField pullback(const SmoothMap& f, const ScalarField& g);
KForm pullback(const SmoothMap& f, const KForm& w);
// F_*P at the image of each source point; F must be a diffeomorphism with inverse finv.
KVector pushforward(const SmoothMap& f, const SmoothMap& finv, const KVector& p);

VectorField lie_bracket(const VectorField& x, const VectorField& y);
KForm lie_derivative(const VectorField& x, const KForm& w);
KVector lie_derivative(const VectorField& x, const KVector& p);

// Pointwise value helpers.
template <class T>
Alt<T> sharp_at(const Alt<T>& pi, const Alt<T>& form) {
  if (form.k == 1) return interior(form.c, pi);
  // Row i of the matrix of π is π♯dx^i.
  Alt<T> out = transform(form, to_matrix(pi));
  if (form.k % 2 == 1) out.c = -out.c;
  return out;
}

}  // namespace nonholo
