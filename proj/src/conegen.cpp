#include "copo/conegen.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace copo {

PolyMatrix build_matrix_variable(const VarSpace& space) {
  const int n = space.n();
  PolyMatrix X(space, n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      Polynomial v = Polynomial::variable(space, space.var_index(i, j));
      X.at(i - 1, j - 1) = v;
      X.at(j - 1, i - 1) = v;
    }
  return X;
}

std::pair<Polynomial, Polynomial> structural_polynomials(
    const VarSpace& space) {
  Polynomial h = Polynomial::constant(space, -1.0);
  Polynomial normsq(space);
  for (int i = 1; i <= space.n(); ++i) {
    for (int j = i; j <= space.n(); ++j) {
      Polynomial v = Polynomial::variable(space, space.var_index(i, j));
      if (i == j) {
        h += v;
        normsq += v * v;
      } else {
        normsq += 2.0 * (v * v);
      }
    }
  }
  for (int t = 1; t <= space.m(); ++t) {
    Polynomial v = Polynomial::variable(space, space.y_index(t));
    h += v;
    normsq += v * v;
  }
  return {h, normsq};
}

std::pair<PolyMatrix, std::vector<Polynomial>> build_theta(const Polynomial& f,
                                                           int degree) {
  const VarSpace& space = f.space();
  const int n = space.n();
  Polynomial df = static_cast<double>(degree) * f;
  PolyMatrix theta(space, n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      Polynomial partial = f.differentiate(space.var_index(i, j));
      Polynomial entry =
          (i == j) ? partial - df : 0.5 * partial;
      theta.at(i - 1, j - 1) = entry;
      theta.at(j - 1, i - 1) = entry;
    }
  }
  std::vector<Polynomial> p;
  p.reserve(space.m());
  for (int t = 1; t <= space.m(); ++t)
    p.push_back(f.differentiate(space.y_index(t)) - df);
  return {theta, p};
}

std::vector<Polynomial> complementarity_products(
    const PolyMatrix& X, const PolyMatrix& theta,
    const std::vector<Polynomial>& p) {
  if (X.cols() != theta.rows())
    throw std::invalid_argument("complementarity_products: shape mismatch");
  const VarSpace& space = X.space();
  // The product of two symmetric matrices is generally nonsymmetric;
  // every entry is a generator of the ideal.
  PolyMatrix prod = X * theta;
  std::vector<Polynomial> out;
  out.reserve(static_cast<size_t>(prod.rows()) * prod.cols() + p.size());
  for (int r = 0; r < prod.rows(); ++r)
    for (int c = 0; c < prod.cols(); ++c) out.push_back(prod.at(r, c));
  for (int t = 0; t < static_cast<int>(p.size()); ++t)
    out.push_back(p[t] * Polynomial::variable(space, space.y_index(t + 1)));
  return out;
}

ProblemSpec build_problem_spec(const Polynomial& f, bool allow_inhomogeneous) {
  const VarSpace& space = f.space();
  if (f.is_zero())
    throw std::invalid_argument("build_problem_spec: zero objective");
  int degree = 0;
  if (auto d = f.homogeneous_degree(); d.has_value()) {
    degree = *d;
  } else if (allow_inhomogeneous) {
    degree = f.degree();
  } else {
    throw std::invalid_argument(
        "build_problem_spec: objective is not homogeneous");
  }
  if (degree < 1)
    throw std::invalid_argument(
        "build_problem_spec: objective degree must be >= 1");

  auto [h, normsq] = structural_polynomials(space);
  auto [theta, p] = build_theta(f, degree);
  PolyMatrix X = build_matrix_variable(space);

  ProblemSpec spec{.space = space,
                   .objective = f,
                   .degree = degree,
                   .d0 = (degree + 2) / 2,  // ceil((d+1)/2)
                   .trace_affine = h,
                   .matrix_variable = X,
                   .multiplier = theta,
                   .orthant_multipliers = p,
                   .complementarity = complementarity_products(X, theta, p),
                   .norm_upper = Polynomial::constant(space, 1.0) - normsq,
                   .norm_lower = normsq - Polynomial::constant(
                                              space, 1.0 / (space.n() + space.m()))};
  return spec;
}

std::vector<Polynomial> ProblemSpec::equalities() const {
  std::vector<Polynomial> out;
  out.reserve(1 + complementarity.size());
  out.push_back(trace_affine);
  out.insert(out.end(), complementarity.begin(), complementarity.end());
  return out;
}

std::vector<const PolyMatrix*> ProblemSpec::psd_matrices() const {
  return {&matrix_variable, &multiplier};
}

std::vector<Polynomial> ProblemSpec::scalar_nonneg() const {
  std::vector<Polynomial> out;
  out.push_back(norm_upper);
  out.push_back(norm_lower);
  for (int t = 1; t <= space.m(); ++t)
    out.push_back(Polynomial::variable(space, space.y_index(t)));
  for (const auto& pt : orthant_multipliers) out.push_back(pt);
  return out;
}

std::string ProblemSpec::to_json() const {
  nlohmann::json j;
  j["n"] = space.n();
  j["m"] = space.m();
  j["degree"] = degree;
  j["d0"] = d0;
  j["objective"] = objective.to_string();
  j["equalities"] = nlohmann::json::array();
  for (const auto& e : equalities()) j["equalities"].push_back(e.to_string());
  j["psd_matrices"] = nlohmann::json::array();
  for (const PolyMatrix* M : psd_matrices()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < M->rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < M->cols(); ++c) row.push_back(M->at(r, c).to_string());
      rows.push_back(row);
    }
    j["psd_matrices"].push_back(rows);
  }
  j["scalar_nonneg"] = nlohmann::json::array();
  for (const auto& g : scalar_nonneg())
    j["scalar_nonneg"].push_back(g.to_string());
  return j.dump(2);
}

}  // namespace copo
