#include <algorithm>
#include <cmath>
#include <sstream>

#include "copo/corpus.hpp"

namespace copo {

Polynomial principal_minor_chain(const VarSpace& space) {
  Polynomial f(space);
  for (int i = 1; i < space.n(); ++i) {
    Polynomial xii = Polynomial::variable(space, space.var_index(i, i));
    Polynomial xjj = Polynomial::variable(space, space.var_index(i + 1, i + 1));
    Polynomial xij = Polynomial::variable(space, space.var_index(i, i + 1));
    f += xii * xjj - xij * xij;
  }
  return f;
}

Polynomial quadratic_form(const VarSpace& space, const Eigen::MatrixXd& A) {
  const int nv = space.nvars();
  if (A.rows() != nv || A.cols() != nv)
    throw std::invalid_argument("quadratic_form: matrix size must equal " +
                                std::to_string(nv));
  Polynomial f(space);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      if (A(i, j) == 0.0) continue;
      f += A(i, j) * (Polynomial::variable(space, i) *
                      Polynomial::variable(space, j));
    }
  return f;
}

namespace {

PolyMatrix constant_matrix(const VarSpace& space, const Eigen::MatrixXd& A) {
  PolyMatrix M(space, static_cast<int>(A.rows()), static_cast<int>(A.cols()));
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c)
      M.at(r, c) = Polynomial::constant(space, A(r, c));
  return M;
}

Polynomial trace(const PolyMatrix& M) {
  Polynomial t(M.space());
  for (int i = 0; i < M.rows(); ++i) t += M.at(i, i);
  return t;
}

}  // namespace

Polynomial trace_xa_squared(const VarSpace& space, const Eigen::MatrixXd& A) {
  if (A.rows() != space.n() || A.cols() != space.n())
    throw std::invalid_argument("trace_xa_squared: matrix must be n-by-n");
  PolyMatrix X = build_matrix_variable(space);
  PolyMatrix XA = X * constant_matrix(space, A);
  return trace(XA * XA);
}

Polynomial trace_x2a_plus_xax(const VarSpace& space,
                              const Eigen::MatrixXd& A) {
  if (A.rows() != space.n() || A.cols() != space.n())
    throw std::invalid_argument("trace_x2a_plus_xax: matrix must be n-by-n");
  PolyMatrix X = build_matrix_variable(space);
  PolyMatrix Ac = constant_matrix(space, A);
  return trace(X * X * Ac) + trace(X * Ac * X);
}

Polynomial determinant(const PolyMatrix& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("determinant: matrix must be square");
  const int n = M.rows();
  if (n == 1) return M.at(0, 0);
  Polynomial det(M.space());
  for (int c = 0; c < n; ++c) {
    PolyMatrix minor(M.space(), n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int mc = 0;
      for (int cc = 0; cc < n; ++cc) {
        if (cc == c) continue;
        minor.at(r - 1, mc++) = M.at(r, cc);
      }
    }
    Polynomial cof = M.at(0, c) * determinant(minor);
    if (c % 2 == 0)
      det += cof;
    else
      det -= cof;
  }
  return det;
}

Eigen::MatrixXd horn_matrix() {
  Eigen::MatrixXd A(5, 5);
  A << 1, -1, 1, 1, -1,  //
      -1, 1, -1, 1, 1,   //
      1, -1, 1, -1, 1,   //
      1, 1, -1, 1, -1,   //
      -1, 1, 1, -1, 1;
  return A;
}

Eigen::MatrixXd hoffman_pereira_matrix() {
  Eigen::MatrixXd A(7, 7);
  A << 1, -1, 1, 0, 0, 1, -1,  //
      -1, 1, -1, 1, 0, 0, 1,   //
      1, -1, 1, -1, 1, 0, 0,   //
      0, 1, -1, 1, -1, 1, 0,   //
      0, 0, 1, -1, 1, -1, 1,   //
      1, 0, 0, 1, -1, 1, -1,   //
      -1, 1, 0, 0, 1, -1, 1;
  return A;
}

Eigen::MatrixXd hoffman_pereira_perturbed(double alpha) {
  Eigen::MatrixXd A = hoffman_pereira_matrix();
  const double d = (1.0 + alpha) * (1.0 + alpha);
  for (int i = 3; i < 7; ++i) A(i, i) = d;
  return A;
}

std::vector<CorpusCase> corpus_cases() {
  std::vector<CorpusCase> cases;

  auto poly_case = [](std::string name, std::string suite, int n, int m,
                      std::string text) {
    CorpusCase c;
    c.name = std::move(name);
    c.suite = std::move(suite);
    c.n = n;
    c.m = m;
    c.build = [n, m, text = std::move(text)]() {
      return parse_polynomial(text, VarSpace(n, m));
    };
    return c;
  };

  {
    CorpusCase c = poly_case("f1", "table1", 2, 0,
                             "x11^2*x12 + x11*x12^2 + x22^3 - 3*x11*x12*x22");
    c.expected = {Verdict::Kind::NotCopositive, 2, {{2, -0.1213}}, 1e-3};
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c = poly_case(
        "f2", "table1", 2, 0,
        "x11^3 + x12^3 + x22^3 - x11^2*x12 - x11*x12^2 - x11^2*x22 "
        "- x11*x22^2 - x12^2*x22 - x12*x22^2 + 3*x11*x12*x22");
    c.expected = {Verdict::Kind::NotCopositive, 2, {{2, -0.5000}}, 1e-3};
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c = poly_case("f3", "table1", 2, 0,
                             "x11^2*x12 + x12^2*x22 + x22^2*x11 "
                             "- 3*x11*x12*x22");
    c.expected = {Verdict::Kind::NotCopositive, 2, {{2, -0.1629}}, 1e-3};
    cases.push_back(std::move(c));
  }

  {
    CorpusCase c = poly_case("f4", "table2", 3, 0,
                             "x11*x22 - x12^2 + x22*x33 - x23^2");
    c.expected = {Verdict::Kind::Copositive, 2, {{2, 0.0}}, 1e-4};
    cases.push_back(std::move(c));
  }
  {
    // Mixes degrees 1 and 2 exactly as published; runs under the
    // inhomogeneity escape hatch.
    CorpusCase c = poly_case("f5", "table2", 3, 0,
                             "x22 + x33 + 10*x11*x22 - 10*x12^2");
    c.allow_inhomogeneous = true;
    c.expected = {Verdict::Kind::Copositive, 2, {{2, 0.0}}, 1e-4};
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "f6";
    c.suite = "table2";
    c.n = 3;
    c.build = [] {
      return determinant(build_matrix_variable(VarSpace(3, 0)));
    };
    c.expected = {Verdict::Kind::Copositive, 3, {{2, -0.0208}, {3, 0.0}}, 2e-3};
    cases.push_back(std::move(c));
  }

  for (int n : {2, 3, 4}) {
    CorpusCase c;
    c.name = "minor_chain_n" + std::to_string(n);
    c.suite = "table3";
    c.n = n;
    c.slow = n >= 4;
    c.build = [n] { return principal_minor_chain(VarSpace(n, 0)); };
    c.expected = {Verdict::Kind::Copositive, 2, {{2, 0.0}}, 1e-4};
    cases.push_back(std::move(c));
  }

  {
    const std::map<int, double> bounds = {
        {1, -0.0229}, {2, -0.0152}, {3, -0.0075}, {4, 1.2918e-4},
        {5, 0.0078},  {6, 0.0154},  {7, 0.0229},  {8, 0.0304},
        {9, 0.0379},  {10, 0.0453}};
    for (const auto& [cent, bound] : bounds) {
      const double alpha = cent / 100.0;
      CorpusCase c;
      std::ostringstream name;
      name << "hp_alpha_0." << (cent < 10 ? "0" : "") << cent;
      c.name = name.str();
      c.suite = "table4";
      c.n = 2;
      c.m = 4;
      c.build = [alpha] {
        return quadratic_form(VarSpace(2, 4),
                              hoffman_pereira_perturbed(alpha));
      };
      const bool copositive = bound > 0.0;
      c.expected = {copositive ? Verdict::Kind::Copositive
                               : Verdict::Kind::NotCopositive,
                    2,
                    {{2, bound}},
                    2e-3};
      cases.push_back(std::move(c));
    }
  }

  {
    CorpusCase c;
    c.name = "horn_mixed_n2m2";
    c.suite = "mixed";
    c.n = 2;
    c.m = 2;
    c.build = [] { return quadratic_form(VarSpace(2, 2), horn_matrix()); };
    c.expected = {Verdict::Kind::NotCopositive, std::nullopt, {}, 0.0};
    cases.push_back(std::move(c));
  }
  {
    CorpusCase c;
    c.name = "hoffman_pereira_n3m1";
    c.suite = "mixed";
    c.n = 3;
    c.m = 1;
    c.build = [] {
      return quadratic_form(VarSpace(3, 1), hoffman_pereira_matrix());
    };
    c.expected = {Verdict::Kind::NotCopositive, 2, {}, 0.0};
    cases.push_back(std::move(c));
  }

  {
    CorpusCase c;
    c.name = "horn_trace_n5";
    c.suite = "horn";
    c.n = 5;
    c.slow = true;
    c.k_max = 3;
    c.build = [] {
      return trace_x2a_plus_xax(VarSpace(5, 0), horn_matrix());
    };
    c.expected = {Verdict::Kind::NotCopositive, 2, {}, 0.0};
    cases.push_back(std::move(c));
  }
  {
    Eigen::MatrixXd A(4, 4);
    A << 1, -0.72, -0.59, 1,   //
        -0.72, 1, -0.6, -0.46,  //
        -0.59, -0.6, 1, -0.6,   //
        1, -0.46, -0.6, 1;
    CorpusCase c;
    c.name = "trace_xa2_n4";
    c.suite = "horn";
    c.n = 4;
    c.slow = true;
    c.k_max = 3;
    c.build = [A] { return trace_xa_squared(VarSpace(4, 0), A); };
    c.expected = {Verdict::Kind::Copositive, 3, {}, 0.0};
    cases.push_back(std::move(c));
  }

  return cases;
}

CaseResult run_corpus_case(const CorpusCase& c, const TestOptions& base_opts) {
  CaseResult out;
  out.name = c.name;
  TestOptions opts = base_opts;
  opts.allow_inhomogeneous = c.allow_inhomogeneous;
  if (c.k_max && !opts.k_max) opts.k_max = c.k_max;
  out.verdict = test_copositivity(c.build(), opts);

  std::ostringstream detail;
  bool pass = true;
  if (out.verdict.kind != c.expected.kind) {
    pass = false;
    detail << "verdict " << to_string(out.verdict.kind) << " != expected "
           << to_string(c.expected.kind);
  }
  if (pass && c.expected.order && out.verdict.order != *c.expected.order) {
    pass = false;
    detail << "decision order " << out.verdict.order << " != expected "
           << *c.expected.order;
  }
  if (pass) {
    for (const auto& [k, expected_bound] : c.expected.bounds) {
      const auto it =
          std::find_if(out.verdict.stats.begin(), out.verdict.stats.end(),
                       [k = k](const OrderStats& s) { return s.k == k; });
      if (it == out.verdict.stats.end()) {
        pass = false;
        detail << "no solve at order " << k;
        break;
      }
      if (std::abs(it->bound - expected_bound) > c.expected.bound_tol) {
        pass = false;
        detail << "bound at k=" << k << " is " << it->bound << ", expected "
               << expected_bound << " +/- " << c.expected.bound_tol;
        break;
      }
    }
  }
  out.pass = pass;
  out.detail = detail.str();
  return out;
}

}  // namespace copo
