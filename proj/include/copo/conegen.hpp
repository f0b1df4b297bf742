#pragma once

#include <string>
#include <utility>
#include <vector>

#include "copo/poly.hpp"

namespace copo {

// One instance of the strengthened reformulation: the objective together
// with the constraints tr X + Σy = 1, XΘ = 0 (all entries), p_t y_t = 0,
// X ⪰ 0, Θ ⪰ 0, the norm sandwich, and y_t ≥ 0, p_t ≥ 0 when m > 0.
struct ProblemSpec {
  VarSpace space;
  Polynomial objective;
  int degree = 0;  // d used to build the multipliers
  int d0 = 0;      // minimal relaxation order ceil((d+1)/2)

  Polynomial trace_affine;     // h = Σ x_ii + Σ y_t − 1
  PolyMatrix matrix_variable;  // X(x)
  PolyMatrix multiplier;       // Θ
  std::vector<Polynomial> orthant_multipliers;  // p_t
  std::vector<Polynomial> complementarity;      // n² entries of XΘ, then p_t·y_t
  Polynomial norm_upper;  // 1 − (‖X‖_F² + ‖y‖²)
  Polynomial norm_lower;  // (‖X‖_F² + ‖y‖²) − 1/(n+m)

  // Flattened constraint views: equality polynomials (h first, then the
  // complementarity products), PSD polynomial matrices (X, Θ), and the
  // scalar inequalities (norm sandwich, then y_t and p_t).
  std::vector<Polynomial> equalities() const;
  std::vector<const PolyMatrix*> psd_matrices() const;
  std::vector<Polynomial> scalar_nonneg() const;

  std::string to_json() const;
};

// Symmetric n×n matrix with entry (i, j) = x_{min(i,j), max(i,j)}.
PolyMatrix build_matrix_variable(const VarSpace& space);

// (h, normsq) with h = Σ x_ii + Σ y_t − 1 and
// normsq = Σ x_ii² + 2 Σ_{i<j} x_ij² + Σ y_t².
std::pair<Polynomial, Polynomial> structural_polynomials(const VarSpace& space);

// The eliminated multipliers: Θ(i,i) = ∂f/∂x_ii − d·f,
// Θ(i,j) = ½ ∂f/∂x_ij for i < j, and p_t = ∂f/∂y_t − d·f.
std::pair<PolyMatrix, std::vector<Polynomial>> build_theta(const Polynomial& f,
                                                           int degree);

// All n² entries of X·Θ followed by the m products p_t·y_t.
std::vector<Polynomial> complementarity_products(
    const PolyMatrix& X, const PolyMatrix& theta,
    const std::vector<Polynomial>& p);

// Assembles the full ProblemSpec for a homogeneous objective of degree
// d >= 1. With allow_inhomogeneous the homogeneity check is skipped and
// d = deg(f) is used in the multiplier construction.
ProblemSpec build_problem_spec(const Polynomial& f,
                               bool allow_inhomogeneous = false);

}  // namespace copo
