#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "copo/sdp.hpp"

namespace copo {

namespace {

// Appends every entry of a localizing map as a homogeneous equality row,
// restricted to the upper triangle for symmetric maps. Exact duplicates
// and identically-zero rows are dropped.
class EqualityCollector {
 public:
  explicit EqualityCollector(ConicProblem& problem) : problem_(problem) {}

  void add_row(LinearFunctional row, double rhs) {
    row.normalize();
    if (row.empty()) {
      if (rhs != 0.0)
        throw std::invalid_argument("assemble: inconsistent empty row");
      return;
    }
    auto [it, inserted] = seen_.emplace(row.coeffs, problem_.eq_rows.size());
    if (!inserted) return;
    problem_.eq_rows.push_back(std::move(row));
    problem_.eq_rhs.push_back(rhs);
  }

  void add_map(const LinearMatrixMap& map) {
    for (int r = 0; r < map.dim; ++r) {
      const int c0 = map.symmetric ? r : 0;
      for (int c = c0; c < map.dim; ++c) add_row(map.entry(r, c), 0.0);
    }
  }

 private:
  ConicProblem& problem_;
  std::map<std::vector<std::pair<int, double>>, size_t> seen_;
};

void add_psd_block(ConicProblem& problem, LinearMatrixMap map,
                   std::string label) {
  if (map.is_zero()) return;  // 0 ⪰ 0 is vacuous
  problem.psd_blocks.push_back(
      {std::move(map), Eigen::MatrixXd(), std::move(label)});
}

}  // namespace

ConicProblem assemble_relaxation(const ProblemSpec& spec, int k) {
  if (k < spec.d0)
    throw std::invalid_argument("assemble_relaxation: k below minimal order " +
                                std::to_string(spec.d0));
  const MonomialBasis b2k = monomial_basis(spec.space, 2 * k);
  ConicProblem problem;
  problem.nz = b2k.size();
  problem.objective = riesz_functional(spec.objective, b2k);

  EqualityCollector eq(problem);
  LinearFunctional norm_row;
  norm_row.add(0, 1.0);
  eq.add_row(norm_row, 1.0);  // ⟨1, z⟩ = 1
  eq.add_map(localizing_map(spec.trace_affine, k));
  // The complementarity block X·Θ keeps one uniform truncation; the
  // scalar products p_t·y_t localize individually.
  const int n2 = spec.space.n() * spec.space.n();
  PolyMatrix xtheta(spec.space, spec.space.n(), spec.space.n());
  for (int r = 0; r < spec.space.n(); ++r)
    for (int c = 0; c < spec.space.n(); ++c)
      xtheta.at(r, c) = spec.complementarity[r * spec.space.n() + c];
  eq.add_map(block_localizing_map(xtheta, k));
  for (size_t i = n2; i < spec.complementarity.size(); ++i)
    eq.add_map(localizing_map(spec.complementarity[i], k));

  add_psd_block(problem, moment_matrix_map(spec.space, k), "M_k");
  add_psd_block(problem, block_localizing_map(spec.matrix_variable, k), "L_X");
  add_psd_block(problem, block_localizing_map(spec.multiplier, k), "L_Theta");
  const auto scalars = spec.scalar_nonneg();
  for (size_t i = 0; i < scalars.size(); ++i) {
    std::string label;
    if (i == 0)
      label = "L_norm_upper";
    else if (i == 1)
      label = "L_norm_lower";
    else if (static_cast<int>(i) - 2 < spec.space.m())
      label = "L_y" + std::to_string(i - 1);
    else
      label = "L_p" + std::to_string(i - 1 - spec.space.m());
    add_psd_block(problem, localizing_map(scalars[i], k), std::move(label));
  }
  return problem;
}

ConicProblem assemble_auxiliary(const ProblemSpec& spec,
                                const std::vector<double>& xi, double bound,
                                int k) {
  if (k < spec.d0)
    throw std::invalid_argument("assemble_auxiliary: k below minimal order " +
                                std::to_string(spec.d0));
  const MonomialBasis bd = monomial_basis(spec.space, spec.degree);
  if (static_cast<int>(xi.size()) != bd.size())
    throw std::invalid_argument("assemble_auxiliary: xi length mismatch");
  const MonomialBasis b2k = monomial_basis(spec.space, 2 * k);

  ConicProblem problem;
  problem.nz = b2k.size();
  // ⟨ξᵀ[x]_d, w⟩: the degree-d basis occupies the leading positions of
  // the degree-2k basis.
  for (int a = 0; a < bd.size(); ++a)
    if (xi[a] != 0.0) problem.objective.add(a, xi[a]);
  problem.objective.normalize();

  EqualityCollector eq(problem);
  LinearFunctional norm_row;
  norm_row.add(0, 1.0);
  eq.add_row(norm_row, 1.0);
  eq.add_map(localizing_map(spec.trace_affine, k));

  add_psd_block(problem, moment_matrix_map(spec.space, k), "M_k");
  add_psd_block(problem, block_localizing_map(spec.matrix_variable, k), "L_X");
  if (std::isfinite(bound)) {
    Polynomial sublevel =
        Polynomial::constant(spec.space, bound) - spec.objective;
    add_psd_block(problem, localizing_map(sublevel, k), "L_sublevel");
  }
  for (int t = 1; t <= spec.space.m(); ++t) {
    Polynomial yt = Polynomial::variable(spec.space, spec.space.y_index(t));
    add_psd_block(problem, localizing_map(yt, k), "L_y" + std::to_string(t));
  }
  add_psd_block(problem, localizing_map(spec.norm_upper, k), "L_norm_upper");
  add_psd_block(problem, localizing_map(spec.norm_lower, k), "L_norm_lower");
  return problem;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::PrimalInfeasible:
      return "PrimalInfeasible";
    case SolveStatus::DualInfeasible:
      return "DualInfeasible";
    case SolveStatus::IllPosed:
      return "IllPosed";
    case SolveStatus::IterationLimit:
      return "IterationLimit";
  }
  return "Unknown";
}

}  // namespace copo
