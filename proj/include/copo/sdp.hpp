#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "copo/conegen.hpp"
#include "copo/moment.hpp"

namespace copo {

// One PSD constraint map(z) + constant ⪰ 0. Assembled relaxations have
// zero constants; parsed SDPA problems may not.
struct PsdBlockConstraint {
  LinearMatrixMap map;
  Eigen::MatrixXd constant;  // 0x0 means zero
  std::string label;

  bool has_constant() const { return constant.size() > 0; }
};

// Standard-form conic program over a moment vector z: minimize a linear
// objective subject to sparse equality rows and PSD constraints on
// linear matrix maps of z.
struct ConicProblem {
  int nz = 0;
  LinearFunctional objective;
  std::vector<LinearFunctional> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<PsdBlockConstraint> psd_blocks;
};

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  IllPosed,
  IterationLimit,
};

std::string to_string(SolveStatus status);

struct SolverOptions {
  double eps_feas = 1e-8;
  double eps_gap = 1e-8;
  int max_iterations = 200;
  bool verbose = false;
  // "internal" or "sdpa:<command>"; the latter writes the problem in
  // sparse SDPA format, runs <command> <in.dat-s> <out.result>, and
  // parses the primal solution back.
  std::string backend = "internal";
};

struct SolveResult {
  SolveStatus status = SolveStatus::IllPosed;
  std::vector<double> z;
  double objective_value = 0.0;
  // Dual solution: one PSD matrix per block plus the reduced equality
  // multipliers; dual_objective is the SOS-side bound by conic duality.
  std::vector<Eigen::MatrixXd> dual_blocks;
  std::vector<double> eq_multipliers;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::string message;
};

// kth order moment relaxation of the strengthened reformulation:
// objective ⟨f, z⟩; zero localizing rows for every equality polynomial
// plus ⟨1, z⟩ = 1; PSD blocks M_k, the block localizing maps of X and Θ,
// and the scalar localizing maps of each inequality.
ConicProblem assemble_relaxation(const ProblemSpec& spec, int k);

// Auxiliary program for witness extraction: objective ⟨ξᵀ[x]_d, w⟩;
// localizing rows of the trace constraint plus normalization; PSD blocks
// M_k, L_X, L_{bound−f}, the orthant localizings L_{y_t}, and the norm
// sandwich. The multiplier constraints are absent by construction.
// bound = +infinity drops the sublevel block.
ConicProblem assemble_auxiliary(const ProblemSpec& spec,
                                const std::vector<double>& xi, double bound,
                                int k);

SolveResult solve(const ConicProblem& problem, const SolverOptions& opts = {});

// Sparse SDPA (.dat-s) text; equality rows are emitted as paired
// inequalities in a trailing diagonal block.
std::string export_sdpa(const ConicProblem& problem);
ConicProblem parse_sdpa(std::string_view text);

// Writes an SDPA-solver-style result file (objective values and xVec).
std::string format_sdpa_result(const SolveResult& result);
// Reads the xVec of an SDPA result file.
std::vector<double> parse_sdpa_result(std::string_view text, int nz);

}  // namespace copo
