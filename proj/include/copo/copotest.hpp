#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copo/sdp.hpp"

namespace copo {

struct TestOptions {
  std::optional<int> k_start;  // default: minimal order d0
  std::optional<int> k_max;    // default: d0 + 4
  double tol_nonneg = 1e-5;    // bound >= -tol_nonneg certifies copositivity
  double rank_tol = 1e-6;      // relative singular value cutoff
  std::uint64_t seed = 0;
  bool allow_inhomogeneous = false;
  bool verbose = false;
  SolverOptions solver;
};

struct OrderStats {
  int k = 0;
  double bound = 0.0;
  SolveStatus status = SolveStatus::IllPosed;
  int iterations = 0;
  double time_s = 0.0;
  std::optional<SolveStatus> aux_status;
  int aux_iterations = 0;
  double aux_time_s = 0.0;
};

struct Verdict {
  enum class Kind { Copositive, NotCopositive, Inconclusive, Error };

  Kind kind = Kind::Error;
  int order = 0;
  double bound = 0.0;  // last relaxation bound (best bound for Inconclusive)
  bool flat_truncated = false;
  std::vector<double> witness_u;  // length sigma(n) when NotCopositive
  std::vector<double> witness_v;  // length m when NotCopositive
  double value = 0.0;             // f(witness)
  std::string message;            // diagnostics for Kind::Error
  std::vector<OrderStats> stats;
  double total_time_s = 0.0;

  std::string to_json() const;
};

std::string to_string(Verdict::Kind kind);

// Standard normal coefficient vector over the monomials of degree <= d,
// reproducible from the seed.
std::vector<double> sample_generic_direction(const VarSpace& space, int degree,
                                             std::uint64_t seed);

// Smallest t in [dK, k] with numerical rank M_{t-dK}[z] = rank M_t[z];
// singular values below rank_tol * sigma_max count as zero.
std::optional<int> flat_truncation(const std::vector<double>& z,
                                   const VarSpace& space, int k, int dK,
                                   double rank_tol);

// Numerical rank of the order-t moment matrix of z.
int moment_matrix_rank(const std::vector<double>& z, const VarSpace& space,
                       int t, double rank_tol);

// Degree-one moments of w in variable order; requires w_0 = 1 ± 1e-6.
std::pair<std::vector<double>, std::vector<double>> extract_witness(
    const std::vector<double>& w, const VarSpace& space);

// Runs the outer decision loop over relaxation orders. m = 0 tests
// copositivity over the semidefinite cone; m > 0 over its product with
// the nonnegative orthant.
Verdict test_copositivity(const Polynomial& f, const TestOptions& opts = {});

}  // namespace copo
