#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <vector>

#include "copo/poly.hpp"

namespace copo {

// The monomial vector [x]_d: all exponent tuples of total degree <= d in
// graded lexicographic order, position 0 being the constant monomial.
struct MonomialBasis {
  int nvars = 0;
  int degree = 0;
  std::vector<Exponent> monomials;
  std::map<Exponent, int, GrlexLess> index;

  int size() const { return static_cast<int>(monomials.size()); }
  int index_of(const Exponent& e) const;
};

MonomialBasis monomial_basis(const VarSpace& space, int degree);

// A sparse linear functional z ↦ Σ coeff_i z_{index_i} over a moment
// vector.
struct LinearFunctional {
  std::vector<std::pair<int, double>> coeffs;

  void add(int index, double coeff) { coeffs.emplace_back(index, coeff); }
  // Sort by index, merge duplicates, drop zeros.
  void normalize();
  bool empty() const { return coeffs.empty(); }
  double apply(std::span<const double> z) const;
};

// Riesz functional of p over the given basis: x^α ↦ z_α.
LinearFunctional riesz_functional(const Polynomial& p,
                                  const MonomialBasis& basis);
double riesz_apply(const Polynomial& p, std::span<const double> z,
                   const MonomialBasis& basis);

// A matrix-valued linear map of a moment vector, entries stored row-major.
struct LinearMatrixMap {
  int dim = 0;
  // Block structure of origin; dim = block_rows * inner_dim for block maps.
  int block_rows = 1;
  int block_cols = 1;
  bool symmetric = false;
  std::vector<LinearFunctional> entries;

  LinearFunctional& entry(int r, int c) {
    return entries[static_cast<size_t>(r) * dim + c];
  }
  const LinearFunctional& entry(int r, int c) const {
    return entries[static_cast<size_t>(r) * dim + c];
  }
  Eigen::MatrixXd evaluate(std::span<const double> z) const;
  bool is_zero() const;
};

// kth order localizing matrix map of a scalar polynomial q, with
// truncation t = k - ceil(deg(q)/2); entries index the moment basis
// N_{2k} of q's variable space. q = 1 gives the kth moment matrix.
LinearMatrixMap localizing_map(const Polynomial& q, int k);
LinearMatrixMap moment_matrix_map(const VarSpace& space, int k);

// Block localizing matrix of a polynomial matrix T with one uniform
// truncation t = k - ceil(deg(T)/2) computed from the max entry degree.
LinearMatrixMap block_localizing_map(const PolyMatrix& T, int k);

// [u]_d as a dense moment vector over the basis.
std::vector<double> moment_vector(std::span<const double> point,
                                  const MonomialBasis& basis);

}  // namespace copo
