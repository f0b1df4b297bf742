#include <doctest.h>

#include <cmath>
#include <random>

#include "copo/conegen.hpp"
#include "copo/moment.hpp"

using namespace copo;

namespace {

std::vector<double> random_point(int nvars, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> p(nvars);
  for (auto& v : p) v = dist(rng);
  return p;
}

// Index helper for a two-variable space: z_{ab} = moment of x1^a x2^b.
int zidx(const MonomialBasis& basis, int a, int b) {
  return basis.index_of({a, b});
}

}  // namespace

TEST_CASE("basis sizes and ordering") {
  VarSpace space(2, 1);  // three matrix vars + one orthant var
  CHECK(monomial_basis(space, 2).size() == 15);  // C(4+2,2)

  VarSpace s2(2, 0);
  MonomialBasis b1 = monomial_basis(s2, 1);
  CHECK(b1.size() == 4);
  CHECK(b1.monomials[0] == Exponent{0, 0, 0});  // 1
  CHECK(b1.monomials[1] == Exponent{1, 0, 0});  // x11
  CHECK(b1.monomials[2] == Exponent{0, 1, 0});  // x12
  CHECK(b1.monomials[3] == Exponent{0, 0, 1});  // x22
  CHECK(monomial_basis(s2, 2).size() == 10);

  // Two variables: 1, x1, x2, x1^2, x1x2, x2^2.
  VarSpace s11(1, 1);
  MonomialBasis b2 = monomial_basis(s11, 2);
  CHECK(b2.size() == 6);
  CHECK(b2.monomials[3] == Exponent{2, 0});
  CHECK(b2.monomials[4] == Exponent{1, 1});
  CHECK(b2.monomials[5] == Exponent{0, 2});
  for (int i = 0; i < b2.size(); ++i)
    CHECK(b2.index_of(b2.monomials[i]) == i);
}

TEST_CASE("riesz functional") {
  VarSpace space(1, 1);  // two variables
  MonomialBasis b4 = monomial_basis(space, 4);
  std::mt19937_64 rng(5);
  std::vector<double> z(b4.size());
  for (auto& v : z) v = std::uniform_real_distribution<>(-1, 1)(rng);

  Polynomial one = Polynomial::constant(space, 1.0);
  z[0] = 1.0;
  CHECK(riesz_apply(one, z, b4) == 1.0);

  // 1 − x1·x2 pairs z_{00} with z_{11}.
  Polynomial q = one - Polynomial::variable(space, 0) *
                           Polynomial::variable(space, 1);
  CHECK(riesz_apply(q, z, b4) ==
        doctest::Approx(z[zidx(b4, 0, 0)] - z[zidx(b4, 1, 1)]));

  // Substitution identity ⟨p, [u]⟩ = p(u).
  for (int rep = 0; rep < 50; ++rep) {
    auto u = random_point(2, rng);
    auto zu = moment_vector(u, b4);
    Polynomial p(space);
    p.add_term({2, 1}, 1.5);
    p.add_term({0, 4}, -0.75);
    p.add_term({0, 0}, 2.0);
    CHECK(riesz_apply(p, zu, b4) == doctest::Approx(p.evaluate(u)));
  }

  Polynomial too_big = Polynomial::monomial(space, {5, 0}, 1.0);
  CHECK_THROWS(riesz_apply(too_big, z, b4));
}

// The worked 3x3 localizing matrix of 1 − x1x2 at order 2.
TEST_CASE("localizing matrix entries match the printed example") {
  VarSpace space(1, 1);
  MonomialBasis b4 = monomial_basis(space, 4);
  Polynomial one = Polynomial::constant(space, 1.0);
  Polynomial x1 = Polynomial::variable(space, 0);
  Polynomial x2 = Polynomial::variable(space, 1);

  LinearMatrixMap L = localizing_map(one - x1 * x2, 2);
  REQUIRE(L.dim == 3);
  std::mt19937_64 rng(9);
  std::vector<double> z(b4.size());
  for (auto& v : z) v = std::uniform_real_distribution<>(-1, 1)(rng);
  Eigen::MatrixXd Lz = L.evaluate(z);

  auto zc = [&](int a, int b) { return z[zidx(b4, a, b)]; };
  CHECK(Lz(0, 0) == doctest::Approx(zc(0, 0) - zc(1, 1)));
  CHECK(Lz(0, 1) == doctest::Approx(zc(1, 0) - zc(2, 1)));
  CHECK(Lz(0, 2) == doctest::Approx(zc(0, 1) - zc(1, 2)));
  CHECK(Lz(1, 1) == doctest::Approx(zc(2, 0) - zc(3, 1)));
  CHECK(Lz(1, 2) == doctest::Approx(zc(1, 1) - zc(2, 2)));
  CHECK(Lz(2, 2) == doctest::Approx(zc(0, 2) - zc(1, 3)));
  CHECK(Lz(1, 0) == Lz(0, 1));
}

// The 2x2 block example: G = [[1−x1x2, x1+x2], [x1−x2, x1²−x2²]].
TEST_CASE("block localizing matrix of the printed 2x2 example") {
  VarSpace space(1, 1);
  MonomialBasis b4 = monomial_basis(space, 4);
  Polynomial one = Polynomial::constant(space, 1.0);
  Polynomial x1 = Polynomial::variable(space, 0);
  Polynomial x2 = Polynomial::variable(space, 1);

  PolyMatrix G(space, 2, 2);
  G.at(0, 0) = one - x1 * x2;
  G.at(0, 1) = x1 + x2;
  G.at(1, 0) = x1 - x2;
  G.at(1, 1) = x1 * x1 - x2 * x2;
  LinearMatrixMap L = block_localizing_map(G, 2);
  REQUIRE(L.dim == 6);
  CHECK_FALSE(L.symmetric);

  std::mt19937_64 rng(13);
  std::vector<double> z(b4.size());
  for (auto& v : z) v = std::uniform_real_distribution<>(-1, 1)(rng);
  Eigen::MatrixXd Lz = L.evaluate(z);
  auto zc = [&](int a, int b) { return z[zidx(b4, a, b)]; };

  // Top-left block repeats the scalar example; spot-check each block.
  CHECK(Lz(0, 0) == doctest::Approx(zc(0, 0) - zc(1, 1)));
  CHECK(Lz(0, 3) == doctest::Approx(zc(1, 0) + zc(0, 1)));   // L_{x1+x2}(0,0)
  CHECK(Lz(1, 4) == doctest::Approx(zc(3, 0) + zc(2, 1)));   // L_{x1+x2}(1,1)
  CHECK(Lz(3, 0) == doctest::Approx(zc(1, 0) - zc(0, 1)));   // L_{x1-x2}(0,0)
  CHECK(Lz(4, 1) == doctest::Approx(zc(3, 0) - zc(2, 1)));   // L_{x1-x2}(1,1)
  CHECK(Lz(3, 3) == doctest::Approx(zc(2, 0) - zc(0, 2)));   // L_{x1²-x2²}(0,0)
  CHECK(Lz(5, 5) == doctest::Approx(zc(2, 2) - zc(0, 4)));
  CHECK(Lz(4, 5) == doctest::Approx(zc(3, 1) - zc(1, 3)));
}

TEST_CASE("moment matrix at a Dirac vector is the rank-one outer product") {
  VarSpace space(2, 0);
  std::mt19937_64 rng(21);
  MonomialBasis b2 = monomial_basis(space, 2);
  MonomialBasis b1 = monomial_basis(space, 1);
  auto u = random_point(3, rng);
  auto z = moment_vector(u, b2);
  LinearMatrixMap M1 = moment_matrix_map(space, 1);
  REQUIRE(M1.dim == 4);
  Eigen::MatrixXd Mz = M1.evaluate(z);
  Eigen::VectorXd v(4);
  for (int a = 0; a < 4; ++a) {
    double val = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < b1.monomials[a][i]; ++r) val *= u[i];
    v[a] = val;
  }
  CHECK((Mz - v * v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("localizing map of x11 at a coordinate point") {
  VarSpace space(2, 0);
  MonomialBasis b4 = monomial_basis(space, 4);
  const std::vector<double> u = {1.0, 0.0, 0.0};
  auto z = moment_vector(u, b4);
  LinearMatrixMap L = localizing_map(Polynomial::variable(space, 0), 2);
  REQUIRE(L.dim == 4);  // t = 1
  Eigen::MatrixXd Lz = L.evaluate(z);
  // u11·[u]_1[u]_1ᵀ with u = e_1: ones on the (1, x11) corner.
  CHECK(Lz(0, 0) == doctest::Approx(1.0));
  CHECK(Lz(0, 1) == doctest::Approx(1.0));
  CHECK(Lz(1, 1) == doctest::Approx(1.0));
  CHECK(Lz(2, 2) == doctest::Approx(0.0));
  CHECK(Lz(3, 3) == doctest::Approx(0.0));
}

// The central correctness oracle: maps applied to [u]_{2k} reproduce
// q(u)·[u]_t[u]_tᵀ and T_ij(u)·[u]_t[u]_tᵀ entrywise.
TEST_CASE("substitution identity on random points") {
  std::mt19937_64 rng(31);
  VarSpace space(2, 1);
  const int k = 2;
  MonomialBasis b2k = monomial_basis(space, 2 * k);

  Polynomial q(space);
  q.add_term({1, 0, 1, 0}, 1.0);
  q.add_term({0, 0, 0, 2}, -2.0);
  q.add_term({0, 0, 0, 0}, 0.5);
  LinearMatrixMap Lq = localizing_map(q, k);

  PolyMatrix T = build_matrix_variable(space);
  LinearMatrixMap LT = block_localizing_map(T, k);
  MonomialBasis bt = monomial_basis(space, k - 1);

  for (int rep = 0; rep < 200; ++rep) {
    auto u = random_point(space.nvars(), rng);
    auto z = moment_vector(u, b2k);
    auto ut = moment_vector(u, bt);
    Eigen::Map<Eigen::VectorXd> utv(ut.data(), ut.size());

    Eigen::MatrixXd expected_q = q.evaluate(u) * (utv * utv.transpose());
    CHECK((Lq.evaluate(z) - expected_q).cwiseAbs().maxCoeff() < 1e-10);

    Eigen::MatrixXd LTz = LT.evaluate(z);
    for (int I = 0; I < T.rows(); ++I)
      for (int J = 0; J < T.cols(); ++J) {
        Eigen::MatrixXd blk =
            LTz.block(I * bt.size(), J * bt.size(), bt.size(), bt.size());
        Eigen::MatrixXd expected =
            T.at(I, J).evaluate(u) * (utv * utv.transpose());
        CHECK((blk - expected).cwiseAbs().maxCoeff() < 1e-10);
      }
  }
}

TEST_CASE("PSD transfer at feasible points") {
  std::mt19937_64 rng(37);
  VarSpace space(2, 0);
  const int k = 2;
  MonomialBasis b2k = monomial_basis(space, 2 * k);
  LinearMatrixMap LX = block_localizing_map(build_matrix_variable(space), k);
  LinearMatrixMap Mk = moment_matrix_map(space, k);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    // X = V Vᵀ is PSD by construction.
    Eigen::MatrixXd V(2, 2);
    V << dist(rng), dist(rng), dist(rng), dist(rng);
    Eigen::MatrixXd X = V * V.transpose();
    const std::vector<double> u = {X(0, 0), X(0, 1), X(1, 1)};
    auto z = moment_vector(u, b2k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(LX.evaluate(z));
    CHECK(e1.eigenvalues().minCoeff() > -1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(Mk.evaluate(z));
    CHECK(e2.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("map dimensions") {
  VarSpace space(2, 0);
  CHECK(moment_matrix_map(space, 2).dim == 10);
  CHECK(block_localizing_map(build_matrix_variable(space), 2).dim == 8);
  Polynomial deg3 = Polynomial::monomial(space, {1, 1, 1}, 1.0);
  CHECK(localizing_map(deg3, 2).dim == 1);  // t = 0
  CHECK_THROWS(localizing_map(deg3, 1));
}
