#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>

#include "copo/copotest.hpp"

namespace copo {

std::string to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::Copositive:
      return "Copositive";
    case Verdict::Kind::NotCopositive:
      return "NotCopositive";
    case Verdict::Kind::Inconclusive:
      return "Inconclusive";
    case Verdict::Kind::Error:
      return "Error";
  }
  return "Unknown";
}

std::vector<double> sample_generic_direction(const VarSpace& space, int degree,
                                             std::uint64_t seed) {
  if (degree < 1)
    throw std::invalid_argument("sample_generic_direction: degree must be >= 1");
  const MonomialBasis basis = monomial_basis(space, degree);
  std::mt19937_64 rng(seed);
  // Box-Muller keeps the stream identical across standard libraries.
  auto runif = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  };
  std::vector<double> xi(basis.size());
  for (size_t i = 0; i < xi.size(); i += 2) {
    const double u1 = runif();
    const double u2 = runif();
    const double r = std::sqrt(-2.0 * std::log(u1));
    xi[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < xi.size()) xi[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  return xi;
}

int moment_matrix_rank(const std::vector<double>& z, const VarSpace& space,
                       int t, double rank_tol) {
  const MonomialBasis bt = monomial_basis(space, t);
  // The degree-2t products index into the basis that carries z.
  int zdeg = 0;
  {
    // z covers N_{2k}; recover 2k from its length by growing the basis.
    // Cheaper: the caller always passes consistent data, so search.
    int lo = 2 * t;
    MonomialBasis probe = monomial_basis(space, lo);
    while (probe.size() < static_cast<int>(z.size())) {
      ++lo;
      probe = monomial_basis(space, lo);
    }
    if (probe.size() != static_cast<int>(z.size()))
      throw std::invalid_argument("moment_matrix_rank: z length mismatch");
    zdeg = lo;
  }
  const MonomialBasis bz = monomial_basis(space, zdeg);
  Eigen::MatrixXd M(bt.size(), bt.size());
  Exponent e(space.nvars());
  for (int a = 0; a < bt.size(); ++a)
    for (int b = a; b < bt.size(); ++b) {
      for (int v = 0; v < space.nvars(); ++v)
        e[v] = bt.monomials[a][v] + bt.monomials[b][v];
      M(a, b) = M(b, a) = z[bz.index_of(e)];
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rank_tol * std::max(sv[0], 1e-300);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return rank;
}

std::optional<int> flat_truncation(const std::vector<double>& z,
                                   const VarSpace& space, int k, int dK,
                                   double rank_tol) {
  if (dK > k) return std::nullopt;
  for (int t = dK; t <= k; ++t) {
    const int r_low = moment_matrix_rank(z, space, t - dK, rank_tol);
    const int r_high = moment_matrix_rank(z, space, t, rank_tol);
    if (r_low == r_high) return t;
  }
  return std::nullopt;
}

std::pair<std::vector<double>, std::vector<double>> extract_witness(
    const std::vector<double>& w, const VarSpace& space) {
  if (static_cast<int>(w.size()) < 1 + space.nvars())
    throw std::invalid_argument("extract_witness: moment vector too short");
  if (std::abs(w[0] - 1.0) > 1e-6)
    throw std::invalid_argument("extract_witness: normalization violated");
  std::vector<double> u(w.begin() + 1, w.begin() + 1 + space.sigma());
  std::vector<double> v(w.begin() + 1 + space.sigma(),
                        w.begin() + 1 + space.nvars());
  return {u, v};
}

namespace {

struct WitnessCheck {
  bool feasible = false;
  double value = 0.0;
};

// Verdict invariants: X(u) ⪰ −1e-6·I, tr X + Σv = 1 ± 1e-6,
// v ≥ −1e-8, and f < 0 strictly.
WitnessCheck check_witness(const ProblemSpec& spec,
                           const std::vector<double>& u,
                           const std::vector<double>& v) {
  WitnessCheck out;
  const int n = spec.space.n();
  std::vector<double> point = u;
  point.insert(point.end(), v.begin(), v.end());
  Eigen::MatrixXd X(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      X(i - 1, j - 1) = X(j - 1, i - 1) = u[spec.space.var_index(i, j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-6) return out;
  double total = X.trace();
  for (double vt : v) {
    if (vt < -1e-8) return out;
    total += vt;
  }
  if (std::abs(total - 1.0) > 1e-6) return out;
  out.value = spec.objective.evaluate(point);
  out.feasible = true;
  return out;
}

int flat_truncation_offset(const ProblemSpec& spec) {
  int d2 = std::max(spec.objective.degree(), 1);
  for (const auto& e : spec.equalities()) d2 = std::max(d2, e.degree());
  for (const auto* G : spec.psd_matrices()) d2 = std::max(d2, G->max_degree());
  for (const auto& g : spec.scalar_nonneg()) d2 = std::max(d2, g.degree());
  return (d2 + 1) / 2;  // max over ceil(deg/2)
}

SolveResult solve_with_retry(const ConicProblem& problem,
                             const SolverOptions& base) {
  SolveResult res = solve(problem, base);
  if (res.status == SolveStatus::Optimal ||
      res.status == SolveStatus::PrimalInfeasible ||
      res.status == SolveStatus::DualInfeasible)
    return res;
  SolverOptions tightened = base;
  tightened.eps_feas = base.eps_feas * 0.1;
  tightened.eps_gap = base.eps_gap * 0.1;
  tightened.max_iterations = base.max_iterations * 2;
  SolveResult retry = solve(problem, tightened);
  // Keep whichever run got further.
  if (retry.status == SolveStatus::Optimal ||
      retry.status == SolveStatus::PrimalInfeasible ||
      retry.status == SolveStatus::DualInfeasible)
    return retry;
  return std::max(res.primal_residual, res.gap) <
                 std::max(retry.primal_residual, retry.gap)
             ? res
             : retry;
}

// A stalled run whose best iterate still met loose tolerances carries a
// usable bound; solvers routinely end this way on relaxations whose
// moment matrix is singular along the constraint ideal.
bool usable_bound(const SolveResult& res) {
  if (res.status == SolveStatus::Optimal) return true;
  return res.status == SolveStatus::IterationLimit &&
         res.primal_residual <= 1e-6 && res.dual_residual <= 1e-6 &&
         res.gap <= 1e-6;
}

}  // namespace

Verdict test_copositivity(const Polynomial& f, const TestOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict verdict;
  auto finish = [&](Verdict v) {
    v.total_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return v;
  };

  if (f.is_zero()) {
    verdict.kind = Verdict::Kind::Error;
    verdict.message = "objective is the zero polynomial";
    return finish(verdict);
  }

  std::optional<ProblemSpec> spec_opt;
  try {
    spec_opt = build_problem_spec(f, opts.allow_inhomogeneous);
  } catch (const std::exception& ex) {
    verdict.kind = Verdict::Kind::Error;
    verdict.message = ex.what();
    return finish(verdict);
  }
  const ProblemSpec& spec = *spec_opt;

  const int k_start = opts.k_start.value_or(spec.d0);
  const int k_max = opts.k_max.value_or(spec.d0 + 4);
  if (k_start < spec.d0) {
    verdict.kind = Verdict::Kind::Error;
    verdict.message = "k_start below minimal order " + std::to_string(spec.d0);
    return finish(verdict);
  }
  const int dK = flat_truncation_offset(spec);
  const std::vector<double> xi =
      sample_generic_direction(spec.space, spec.degree, opts.seed);

  double best_bound = -std::numeric_limits<double>::infinity();

  for (int k = k_start; k <= k_max; ++k) {
    OrderStats stats;
    stats.k = k;

    // Step 1: the moment relaxation.
    ConicProblem relax = assemble_relaxation(spec, k);
    SolveResult res = solve_with_retry(relax, opts.solver);
    stats.bound = res.objective_value;
    stats.status = res.status;
    stats.iterations = res.iterations;
    stats.time_s = res.wall_time_s;
    if (opts.verbose)
      std::fprintf(stderr, "k=%d bound=%.6g status=%s iters=%d (%.2fs)\n", k,
                   res.objective_value, to_string(res.status).c_str(),
                   res.iterations, res.wall_time_s);
    if (!usable_bound(res)) {
      verdict.kind = Verdict::Kind::Error;
      verdict.order = k;
      verdict.stats.push_back(stats);
      verdict.message = "relaxation solve failed at order " +
                        std::to_string(k) + ": " + to_string(res.status) +
                        (res.message.empty() ? "" : " (" + res.message + ")");
      return finish(verdict);
    }
    const double bound = res.objective_value;
    best_bound = std::max(best_bound, bound);

    if (bound >= -opts.tol_nonneg) {
      verdict.kind = Verdict::Kind::Copositive;
      verdict.order = k;
      verdict.bound = bound;
      verdict.flat_truncated =
          flat_truncation(res.z, spec.space, k, dK, opts.rank_tol).has_value();
      verdict.stats.push_back(stats);
      return finish(verdict);
    }

    // Flat truncation on the minimizer certifies exactness; a rank-one
    // moment matrix produces the atom directly from the first moments.
    if (auto t = flat_truncation(res.z, spec.space, k, dK, opts.rank_tol)) {
      if (moment_matrix_rank(res.z, spec.space, *t, opts.rank_tol) == 1) {
        auto [u, v] = extract_witness(res.z, spec.space);
        const WitnessCheck chk = check_witness(spec, u, v);
        if (chk.feasible && chk.value < 0.0) {
          verdict.kind = Verdict::Kind::NotCopositive;
          verdict.order = k;
          verdict.bound = bound;
          verdict.flat_truncated = true;
          verdict.witness_u = u;
          verdict.witness_v = v;
          verdict.value = chk.value;
          verdict.stats.push_back(stats);
          return finish(verdict);
        }
      }
    }

    // Step 2: the auxiliary program over the f-sublevel set. The bound
    // gets a hair of slack to avoid an empty numerical interior.
    ConicProblem aux = assemble_auxiliary(spec, xi, bound + 1e-7, k);
    SolveResult ares = solve_with_retry(aux, opts.solver);
    stats.aux_status = ares.status;
    stats.aux_iterations = ares.iterations;
    stats.aux_time_s = ares.wall_time_s;
    verdict.stats.push_back(stats);
    if (opts.verbose)
      std::fprintf(stderr, "k=%d aux status=%s iters=%d (%.2fs)\n", k,
                   to_string(ares.status).c_str(), ares.iterations,
                   ares.wall_time_s);

    if (ares.status == SolveStatus::PrimalInfeasible) continue;
    if (!usable_bound(ares)) {
      verdict.kind = Verdict::Kind::Error;
      verdict.order = k;
      verdict.message = "auxiliary solve failed at order " +
                        std::to_string(k) + ": " + to_string(ares.status) +
                        (ares.message.empty() ? "" : " (" + ares.message + ")");
      return finish(verdict);
    }

    // Step 3: witness test.
    auto [u, v] = extract_witness(ares.z, spec.space);
    const WitnessCheck chk = check_witness(spec, u, v);
    if (chk.feasible && chk.value < 0.0) {
      verdict.kind = Verdict::Kind::NotCopositive;
      verdict.order = k;
      verdict.bound = bound;
      verdict.witness_u = u;
      verdict.witness_v = v;
      verdict.value = chk.value;
      return finish(verdict);
    }
  }

  verdict.kind = Verdict::Kind::Inconclusive;
  verdict.order = k_max;
  verdict.bound = best_bound;
  return finish(verdict);
}

std::string Verdict::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(kind);
  j["order"] = order;
  j["bound"] = bound;
  j["flat_truncated"] = flat_truncated;
  if (kind == Kind::NotCopositive) {
    j["witness"]["u"] = witness_u;
    if (!witness_v.empty()) j["witness"]["v"] = witness_v;
    j["value"] = value;
  }
  if (!message.empty()) j["message"] = message;
  j["total_time_s"] = total_time_s;
  j["orders"] = nlohmann::json::array();
  for (const auto& s : stats) {
    nlohmann::json js;
    js["k"] = s.k;
    js["bound"] = s.bound;
    js["status"] = to_string(s.status);
    js["iterations"] = s.iterations;
    js["time_s"] = s.time_s;
    if (s.aux_status) {
      js["aux_status"] = to_string(*s.aux_status);
      js["aux_iterations"] = s.aux_iterations;
      js["aux_time_s"] = s.aux_time_s;
    }
    j["orders"].push_back(js);
  }
  return j.dump(2);
}

}  // namespace copo
