#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "copo/conegen.hpp"

using namespace copo;

namespace {

std::vector<double> random_point(int nvars, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> p(nvars);
  for (auto& v : p) v = dist(rng);
  return p;
}

Polynomial random_homogeneous(const VarSpace& space, int degree, int terms,
                              std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, space.nvars() - 1);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Polynomial p(space);
  for (int t = 0; t < terms; ++t) {
    Exponent e(space.nvars(), 0);
    for (int d = 0; d < degree; ++d) e[pick(rng)] += 1;
    p.add_term(e, coeff(rng));
  }
  if (p.is_zero()) p.add_term(Exponent(space.nvars(), 0), 0.0);
  return p;
}

}  // namespace

TEST_CASE("matrix variable") {
  CHECK(build_matrix_variable(VarSpace(1)).at(0, 0).to_string() == "x11");
  PolyMatrix X2 = build_matrix_variable(VarSpace(2));
  CHECK(X2.at(0, 0).to_string() == "x11");
  CHECK(X2.at(0, 1).to_string() == "x12");
  CHECK(X2.at(1, 0).to_string() == "x12");
  CHECK(X2.at(1, 1).to_string() == "x22");
  PolyMatrix X3 = build_matrix_variable(VarSpace(3));
  CHECK(X3.at(0, 2).to_string() == "x13");
  CHECK(X3.at(2, 0).to_string() == "x13");
  CHECK(X3.is_symmetric());
}

TEST_CASE("structural polynomials") {
  {
    auto [h, normsq] = structural_polynomials(VarSpace(2, 0));
    CHECK(h.terms() ==
          parse_polynomial("x11 + x22 - 1", VarSpace(2, 0)).terms());
    CHECK(normsq.terms() ==
          parse_polynomial("x11^2 + 2*x12^2 + x22^2", VarSpace(2, 0)).terms());
  }
  {
    auto [h, normsq] = structural_polynomials(VarSpace(1, 1));
    CHECK(h.terms() ==
          parse_polynomial("x11 + y1 - 1", VarSpace(1, 1)).terms());
    CHECK(normsq.terms() ==
          parse_polynomial("x11^2 + y1^2", VarSpace(1, 1)).terms());
  }
  {
    // At X = I/n the squared norm sits on the lower boundary.
    const int n = 3;
    VarSpace space(n, 0);
    auto [h, normsq] = structural_polynomials(space);
    std::vector<double> point(space.nvars(), 0.0);
    for (int i = 1; i <= n; ++i)
      point[space.var_index(i, i)] = 1.0 / n;
    CHECK(h.evaluate(point) == doctest::Approx(0.0));
    CHECK(normsq.evaluate(point) == doctest::Approx(1.0 / n));
    ProblemSpec spec = build_problem_spec(
        parse_polynomial("x11*x22 - x12^2", VarSpace(2, 0)));
    std::vector<double> p2 = {0.5, 0.0, 0.5};
    CHECK(spec.norm_upper.evaluate(p2) == doctest::Approx(1.0 - 0.5));
    CHECK(spec.norm_lower.evaluate(p2) == doctest::Approx(0.0));
  }
}

TEST_CASE("theta for trivial and quadratic objectives") {
  {
    VarSpace space(1, 0);
    auto [theta, p] = build_theta(parse_polynomial("x11", space), 1);
    CHECK(theta.at(0, 0).terms() ==
          parse_polynomial("1 - x11", space).terms());
    CHECK(p.empty());
  }
  {
    VarSpace space(2, 0);
    Polynomial f = parse_polynomial("x11*x22 - x12^2", space);
    auto [theta, p] = build_theta(f, 2);
    CHECK(theta.at(0, 0).terms() ==
          parse_polynomial("x22 - 2*x11*x22 + 2*x12^2", space).terms());
    CHECK(theta.at(0, 1).terms() == parse_polynomial("-x12", space).terms());
    CHECK(theta.at(1, 1).terms() ==
          parse_polynomial("x11 - 2*x11*x22 + 2*x12^2", space).terms());
    CHECK(theta.is_symmetric());
  }
}

TEST_CASE("trace complementarity identity") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    VarSpace space(2 + (rep % 2), 0);
    const int d = 1 + (rep % 3);
    Polynomial f = random_homogeneous(space, d, 6, rng);
    if (f.is_zero()) continue;
    auto [theta, p] = build_theta(f, d);
    PolyMatrix X = build_matrix_variable(space);
    for (int pt = 0; pt < 25; ++pt) {
      auto u = random_point(space.nvars(), rng);
      auto Xv = X.evaluate(u);
      auto Tv = theta.evaluate(u);
      const int n = space.n();
      double tr_theta_x = 0.0, tr_x = 0.0;
      for (int i = 0; i < n; ++i) {
        tr_x += Xv[i * n + i];
        for (int j = 0; j < n; ++j)
          tr_theta_x += Tv[i * n + j] * Xv[j * n + i];
      }
      const double expected = d * f.evaluate(u) * (1.0 - tr_x);
      CHECK(std::abs(tr_theta_x - expected) <=
            1e-8 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("mixed-cone trace complementarity includes the orthant products") {
  std::mt19937_64 rng(43);
  VarSpace space(2, 2);
  const int d = 2;
  Polynomial f = random_homogeneous(space, d, 8, rng);
  auto [theta, p] = build_theta(f, d);
  PolyMatrix X = build_matrix_variable(space);
  for (int pt = 0; pt < 100; ++pt) {
    auto u = random_point(space.nvars(), rng);
    auto Xv = X.evaluate(u);
    auto Tv = theta.evaluate(u);
    const int n = space.n();
    double tr_theta_x = 0.0, tr_x = 0.0, sum_y = 0.0, sum_py = 0.0;
    for (int i = 0; i < n; ++i) {
      tr_x += Xv[i * n + i];
      for (int j = 0; j < n; ++j)
        tr_theta_x += Tv[i * n + j] * Xv[j * n + i];
    }
    for (int t = 1; t <= space.m(); ++t) {
      const double yt = u[space.y_index(t)];
      sum_y += yt;
      sum_py += p[t - 1].evaluate(u) * yt;
    }
    const double expected = d * f.evaluate(u) * (1.0 - tr_x - sum_y);
    CHECK(std::abs(tr_theta_x + sum_py - expected) <=
          1e-8 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("complementarity products") {
  {
    VarSpace space(1, 0);
    ProblemSpec spec = build_problem_spec(parse_polynomial("x11", space));
    REQUIRE(spec.complementarity.size() == 1);
    CHECK(spec.complementarity[0].terms() ==
          parse_polynomial("x11 - x11^2", space).terms());
  }
  {
    VarSpace space(2, 0);
    Polynomial f = parse_polynomial("x11*x22 - x12^2", space);
    ProblemSpec spec = build_problem_spec(f);
    // (XΘ)(1,1) = x11·(x22 − 2f) − x12².
    Polynomial expected =
        Polynomial::variable(space, 0) * spec.multiplier.at(0, 0) +
        Polynomial::variable(space, 1) * spec.multiplier.at(1, 0);
    CHECK(spec.complementarity[0].terms() == expected.terms());
  }
  {
    VarSpace space(3, 2);
    Polynomial f(space);
    f.add_term({2, 0, 0, 0, 0, 0, 0, 0}, 1.0);
    f.add_term({0, 0, 0, 0, 0, 0, 1, 1}, -1.0);
    ProblemSpec spec = build_problem_spec(f);
    CHECK(spec.complementarity.size() == 9 + 2);
  }
}

TEST_CASE("problem spec census") {
  {
    VarSpace space(2, 0);
    Polynomial f1 = parse_polynomial(
        "x11^2*x12 + x11*x12^2 + x22^3 - 3*x11*x12*x22", space);
    ProblemSpec spec = build_problem_spec(f1);
    CHECK(spec.degree == 3);
    CHECK(spec.d0 == 2);
    CHECK(spec.equalities().size() == 1 + 4);
    CHECK(spec.psd_matrices().size() == 2);
    CHECK(spec.scalar_nonneg().size() == 2);
    for (const auto& e : spec.complementarity) CHECK(e.degree() <= 4);
  }
  {
    VarSpace space(2, 2);
    Polynomial f(space);  // Horn-type quadratic over (x, y)
    for (int i = 0; i < space.nvars(); ++i)
      for (int j = 0; j < space.nvars(); ++j) {
        Exponent e(space.nvars(), 0);
        e[i] += 1;
        e[j] += 1;
        f.add_term(e, (i + j) % 2 == 0 ? 1.0 : -1.0);
      }
    ProblemSpec spec = build_problem_spec(f);
    CHECK(spec.d0 == 2);
    CHECK(spec.equalities().size() == 1 + 4 + 2);
    CHECK(spec.psd_matrices().size() == 2);
    CHECK(spec.scalar_nonneg().size() == 2 + 2 + 2);
  }
  {
    VarSpace space(2, 0);
    Polynomial cube = parse_polynomial(
        "x11^3 + 3*x11^2*x22 + 3*x11*x22^2 + x22^3", space);
    CHECK(build_problem_spec(cube).d0 == 2);
  }
  CHECK_THROWS(build_problem_spec(
      Polynomial::constant(VarSpace(2, 0), 5.0)));
  CHECK_THROWS(build_problem_spec(
      parse_polynomial("x11 + x11^2", VarSpace(2, 0))));
}

// The analytic minimizer X = e1 e1ᵀ of f = x11 x22 − x12² satisfies every
// constraint of the strengthened reformulation.
TEST_CASE("first-order points are feasible for the spec") {
  VarSpace space(2, 0);
  Polynomial f = parse_polynomial("x11*x22 - x12^2", space);
  ProblemSpec spec = build_problem_spec(f);
  const std::vector<double> u = {1.0, 0.0, 0.0};
  CHECK(spec.trace_affine.evaluate(u) == doctest::Approx(0.0));
  for (const auto& e : spec.complementarity)
    CHECK(e.evaluate(u) == doctest::Approx(0.0));
  auto theta = spec.multiplier.evaluate(u);
  Eigen::Map<Eigen::Matrix2d> T(theta.data());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(T);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(spec.norm_upper.evaluate(u) == doctest::Approx(0.0));
  CHECK(spec.norm_lower.evaluate(u) == doctest::Approx(0.5));
}

TEST_CASE("norm sandwich on random feasible points") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 2 + (rep % 3);
    const int m = rep % 3;
    VarSpace space(n, m);
    Eigen::MatrixXd V(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) V(r, c) = gauss(rng);
    Eigen::MatrixXd X = V * V.transpose();
    std::vector<double> y(m);
    double total = X.trace();
    for (auto& v : y) {
      v = gauss(rng);
      v *= v;
      total += v;
    }
    std::vector<double> point(space.nvars(), 0.0);
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j)
        point[space.var_index(i, j)] = X(i - 1, j - 1) / total;
    for (int t = 1; t <= m; ++t) point[space.y_index(t)] = y[t - 1] / total;

    auto [h, normsq] = structural_polynomials(space);
    CHECK(h.evaluate(point) == doctest::Approx(0.0).epsilon(1e-9));
    const double ns = normsq.evaluate(point);
    CHECK(ns <= 1.0 + 1e-9);
    CHECK(ns >= 1.0 / (n + m) - 1e-9);
  }
}

TEST_CASE("spec serializes to json") {
  VarSpace space(1, 1);
  Polynomial f(space);
  f.add_term({2, 0}, 1.0);
  f.add_term({0, 2}, 1.0);
  ProblemSpec spec = build_problem_spec(f);
  const std::string j = spec.to_json();
  CHECK(j.find("\"objective\"") != std::string::npos);
  CHECK(j.find("x11^2 + y1^2") != std::string::npos);
  CHECK(j.find("\"d0\": 2") != std::string::npos);
}
