#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copo/copotest.hpp"

namespace copo {

// Input generators for the built-in cases.

// Σ_{i=1}^{n-1} (x_ii x_{i+1,i+1} − x_{i,i+1}²), the chain of 2x2
// principal minors.
Polynomial principal_minor_chain(const VarSpace& space);
// (x, y)ᵀ A (x, y) over the stacked variable vector.
Polynomial quadratic_form(const VarSpace& space, const Eigen::MatrixXd& A);
// tr((X A)²)
Polynomial trace_xa_squared(const VarSpace& space, const Eigen::MatrixXd& A);
// tr(X² A + X A X)
Polynomial trace_x2a_plus_xax(const VarSpace& space, const Eigen::MatrixXd& A);
// Laplace expansion determinant of a square polynomial matrix.
Polynomial determinant(const PolyMatrix& M);

Eigen::MatrixXd horn_matrix();             // 5x5
Eigen::MatrixXd hoffman_pereira_matrix();  // 7x7
// Hoffman-Pereira with the last four diagonal entries set to (1+alpha)².
Eigen::MatrixXd hoffman_pereira_perturbed(double alpha);

struct ExpectedResult {
  Verdict::Kind kind = Verdict::Kind::Copositive;
  std::optional<int> order;             // decision order, when contractual
  std::map<int, double> bounds;         // expected relaxation bound per k
  double bound_tol = 2e-3;
};

struct CorpusCase {
  std::string name;
  std::string suite;  // table1..table4, horn, mixed
  int n = 1;
  int m = 0;
  bool slow = false;
  bool allow_inhomogeneous = false;
  std::optional<int> k_max;
  std::function<Polynomial()> build;
  ExpectedResult expected;
};

// Every built-in case, grouped by the published tables plus the large
// trace-form instances.
std::vector<CorpusCase> corpus_cases();

struct CaseResult {
  std::string name;
  Verdict verdict;
  bool pass = false;
  std::string detail;  // first failed expectation, empty when passing
};

// Runs one case and compares against its expectations.
CaseResult run_corpus_case(const CorpusCase& c, const TestOptions& base_opts);

}  // namespace copo
