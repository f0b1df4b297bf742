#include <doctest.h>

#include <cmath>
#include <random>

#include "copo/poly.hpp"

using namespace copo;

namespace {

std::vector<double> random_point(int nvars, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> p(nvars);
  for (auto& v : p) v = dist(rng);
  return p;
}

Polynomial random_polynomial(const VarSpace& space, int degree, int terms,
                             std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, space.nvars() - 1);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Polynomial p(space);
  for (int t = 0; t < terms; ++t) {
    Exponent e(space.nvars(), 0);
    for (int d = 0; d < degree; ++d) e[pick(rng)] += 1;
    p.add_term(e, coeff(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("variable ordering and index maps") {
  VarSpace space(3, 2);
  CHECK(space.sigma() == 6);
  CHECK(space.nvars() == 8);
  CHECK(space.var_index(1, 1) == 0);
  CHECK(space.var_index(1, 3) == 2);
  CHECK(space.var_index(2, 2) == 3);
  CHECK(space.var_index(3, 3) == 5);
  CHECK(space.y_index(1) == 6);
  for (int idx = 0; idx < space.sigma(); ++idx) {
    auto [i, j] = space.matrix_position(idx);
    CHECK(space.var_index(i, j) == idx);
  }
  CHECK(space.var_name(1) == "x12");
  CHECK(space.var_name(7) == "y2");
  CHECK_THROWS(space.var_index(2, 1));
  CHECK_THROWS(space.y_index(3));
}

TEST_CASE("parsing the table-1 cubic") {
  VarSpace space(2);
  Polynomial f1 = parse_polynomial(
      "x11^2*x12 + x11*x12^2 + x22^3 - 3*x11*x12*x22", space);
  CHECK(f1.terms().size() == 4);
  CHECK(f1.homogeneous_degree() == 3);
  CHECK(f1.coeff({2, 1, 0}) == 1.0);
  CHECK(f1.coeff({1, 1, 1}) == -3.0);
}

TEST_CASE("parsing edge cases") {
  VarSpace space(2);
  CHECK(parse_polynomial("0", space).is_zero());
  CHECK(parse_polynomial("x11 - x11", space).is_zero());
  CHECK(parse_polynomial("-x11 + 2x12", space).coeff({1, 0, 0}) == -1.0);
  CHECK(parse_polynomial("3*x11*x12", space).coeff({1, 1, 0}) == 3.0);
  CHECK(parse_polynomial("x11x22", space).coeff({1, 0, 1}) == 1.0);
  CHECK(parse_polynomial("2.5e-1", space).coeff({0, 0, 0}) == 0.25);
  CHECK_THROWS(parse_polynomial("x21", space));
  CHECK_THROWS(parse_polynomial("x33", space));
  CHECK_THROWS(parse_polynomial("z1", space));
  CHECK_THROWS(parse_polynomial("x11 +", space));
  CHECK_THROWS(parse_polynomial("x11 ** x12", space));
}

TEST_CASE("print-parse round trip is a fixed point") {
  std::mt19937_64 rng(7);
  VarSpace space(2, 1);
  for (int rep = 0; rep < 50; ++rep) {
    Polynomial p = random_polynomial(space, 3, 5, rng);
    Polynomial q = parse_polynomial(p.to_string(), space);
    CHECK(q.to_string() == p.to_string());
    CHECK(q.terms() == p.terms());
  }
}

TEST_CASE("arithmetic basics") {
  VarSpace space(2);
  Polynomial x11 = Polynomial::variable(space, 0);
  Polynomial x12 = Polynomial::variable(space, 1);
  Polynomial x22 = Polynomial::variable(space, 2);

  CHECK((x11 - x11).is_zero());
  CHECK(((x11 + x22) + (x11 - x22)).to_string() == "2*x11");
  CHECK(((x11 + x12) * (x11 - x12)).to_string() == "x11^2 - x12^2");
  CHECK((x11 * x12).degree() == 2);
  Polynomial one = Polynomial::constant(space, 1.0);
  Polynomial f = parse_polynomial("x11^2 - 2*x12", space);
  CHECK((f * one).terms() == f.terms());
  CHECK((f + Polynomial(space)).terms() == f.terms());

  VarSpace other(3);
  CHECK_THROWS(x11 + Polynomial::variable(other, 0));
}

TEST_CASE("degrees and homogeneity") {
  VarSpace space(2);
  Polynomial zero(space);
  CHECK(zero.degree() == Polynomial::kZeroDegree);
  CHECK(zero.homogeneous_degree() == 0);
  CHECK(zero.is_zero());
  CHECK(parse_polynomial("x11 + x11^2", space).homogeneous_degree() ==
        std::nullopt);
  CHECK(parse_polynomial("x11*x22 - x12^2", space).homogeneous_degree() == 2);
}

TEST_CASE("differentiation") {
  VarSpace space(2);
  Polynomial f = parse_polynomial("x11^2*x12", space);
  CHECK(f.differentiate(0).to_string() == "2*x11*x12");
  CHECK(parse_polynomial("x22^3", space).differentiate(0).is_zero());
  CHECK_THROWS(f.differentiate(3));

  Polynomial f1 = parse_polynomial(
      "x11^2*x12 + x11*x12^2 + x22^3 - 3*x11*x12*x22", space);
  // Cross-checked by finite differences below.
  Polynomial df1 = f1.differentiate(2);
  CHECK(df1.terms() == parse_polynomial("3*x22^2 - 3*x11*x12", space).terms());
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto u = random_point(3, rng);
    const double eps = 1e-6;
    auto up = u;
    auto um = u;
    up[2] += eps;
    um[2] -= eps;
    const double fd = (f1.evaluate(up) - f1.evaluate(um)) / (2 * eps);
    CHECK(df1.evaluate(u) ==
          doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("mixed partials commute exactly") {
  std::mt19937_64 rng(3);
  VarSpace space(2, 2);
  for (int rep = 0; rep < 20; ++rep) {
    Polynomial p = random_polynomial(space, 4, 8, rng);
    for (int a = 0; a < space.nvars(); ++a)
      for (int b = a + 1; b < space.nvars(); ++b)
        CHECK(p.differentiate(a).differentiate(b).terms() ==
              p.differentiate(b).differentiate(a).terms());
  }
}

TEST_CASE("evaluation at the published refutations") {
  VarSpace space(2);
  Polynomial f2 = parse_polynomial(
      "x11^3 + x12^3 + x22^3 - x11^2*x12 - x11*x12^2 - x11^2*x22 "
      "- x11*x22^2 - x12^2*x22 - x12*x22^2 + 3*x11*x12*x22",
      space);
  const std::vector<double> u2 = {0.5, -0.5, 0.5};
  CHECK(f2.evaluate(u2) == doctest::Approx(-0.5).epsilon(1e-12));

  Polynomial f1 = parse_polynomial(
      "x11^2*x12 + x11*x12^2 + x22^3 - 3*x11*x12*x22", space);
  const std::vector<double> u1 = {0.9570, -0.2029, 0.0430};
  CHECK(f1.evaluate(u1) == doctest::Approx(-0.1213).epsilon(5e-3));
  CHECK(std::abs(f1.evaluate(u1) - (-0.1213)) < 5e-4);

  CHECK(f1.evaluate(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK_THROWS(f1.evaluate(std::vector<double>{1.0}));
  CHECK_THROWS(f1.evaluate(std::vector<double>{1.0, 2.0, std::nan("")}));
}

TEST_CASE("Euler identity for homogeneous polynomials") {
  std::mt19937_64 rng(19);
  VarSpace space(2, 1);
  Polynomial p = random_polynomial(space, 4, 10, rng);
  REQUIRE(p.homogeneous_degree() == 4);
  for (int rep = 0; rep < 1000; ++rep) {
    auto u = random_point(space.nvars(), rng);
    double lhs = 0.0;
    for (int v = 0; v < space.nvars(); ++v)
      lhs += u[v] * p.differentiate(v).evaluate(u);
    const double rhs = 4.0 * p.evaluate(u);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(23);
  VarSpace space(2, 0);
  for (int rep = 0; rep < 200; ++rep) {
    Polynomial p = random_polynomial(space, 3, 4, rng);
    Polynomial q = random_polynomial(space, 2, 4, rng);
    auto u = random_point(space.nvars(), rng);
    const double lhs = (p * q).evaluate(u);
    const double rhs = p.evaluate(u) * q.evaluate(u);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("polynomial matrices") {
  VarSpace space(2);
  PolyMatrix X(space, 2, 2);
  X.at(0, 0) = Polynomial::variable(space, 0);
  X.at(0, 1) = Polynomial::variable(space, 1);
  X.at(1, 0) = Polynomial::variable(space, 1);
  X.at(1, 1) = Polynomial::variable(space, 2);
  CHECK(X.is_symmetric());
  CHECK(X.max_degree() == 1);

  PolyMatrix P = X * X;
  CHECK(P.at(0, 0).terms() ==
        parse_polynomial("x11^2 + x12^2", space).terms());
  CHECK_FALSE(PolyMatrix(space, 2, 3).is_symmetric());
  CHECK_THROWS(X * PolyMatrix(space, 3, 2));
}
