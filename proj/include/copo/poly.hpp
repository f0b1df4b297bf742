#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace copo {

// Exponent tuple over the full variable list of a VarSpace.
using Exponent = std::vector<int>;

int total_degree(const Exponent& e);

// Graded lexicographic order matching the monomial vector [x]_d:
// lower total degree first; within a degree, larger power on an earlier
// variable first (x1^2, x1*x2, x2^2).
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

// Variable set {x_11,...,x_nn} ∪ {y_1,...,y_m}: the upper-triangular
// entries of a symmetric n-by-n matrix followed by m orthant variables,
// in the fixed order x_11, x_12, ..., x_1n, x_22, ..., x_nn, y_1, ..., y_m.
class VarSpace {
 public:
  VarSpace(int n, int m = 0);

  int n() const { return n_; }
  int m() const { return m_; }
  int sigma() const { return n_ * (n_ + 1) / 2; }
  int nvars() const { return sigma() + m_; }

  // 0-based variable index of x_ij, 1 <= i <= j <= n.
  int var_index(int i, int j) const;
  // 0-based variable index of y_t, 1 <= t <= m.
  int y_index(int t) const;
  bool is_matrix_var(int index) const { return index < sigma(); }
  // Inverse of var_index: 1-based (i, j) with i <= j.
  std::pair<int, int> matrix_position(int index) const;
  std::string var_name(int index) const;

  friend bool operator==(const VarSpace&, const VarSpace&) = default;

 private:
  int n_;
  int m_;
};

// Sparse multivariate polynomial with real coefficients. Terms are kept
// in graded lexicographic order and stored zero coefficients are never
// retained, so term maps compare exactly.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, double, GrlexLess>;

  // degree() of the zero polynomial.
  static constexpr int kZeroDegree = -1;

  explicit Polynomial(const VarSpace& space) : space_(space) {}
  static Polynomial constant(const VarSpace& space, double value);
  static Polynomial variable(const VarSpace& space, int var_index);
  static Polynomial monomial(const VarSpace& space, Exponent exponent,
                             double coeff);

  const VarSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Max total degree over terms; kZeroDegree for the zero polynomial.
  int degree() const;
  // d if every term has total degree d; nullopt otherwise. The zero
  // polynomial reports degree 0 (check is_zero() to distinguish).
  std::optional<int> homogeneous_degree() const;

  void add_term(const Exponent& exponent, double coeff);
  double coeff(const Exponent& exponent) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);
  Polynomial operator-() const;
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs);
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs);
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator*(double s, Polynomial p);

  Polynomial differentiate(int var_index) const;
  double evaluate(std::span<const double> point) const;
  std::string to_string() const;

 private:
  void check_same_space(const Polynomial& other) const;

  VarSpace space_;
  TermMap terms_;
};

// Parses the polynomial text grammar: terms of coefficient*monomial
// joined by +/-, variables x11/x12/y1/..., '^' powers, '*' optional,
// whitespace insignificant. Throws std::invalid_argument with the
// offending position on syntax errors.
Polynomial parse_polynomial(std::string_view text, const VarSpace& space);

// Shortest round-trip decimal formatting.
std::string format_double(double v);

// Rectangular array of polynomials over one shared VarSpace.
class PolyMatrix {
 public:
  PolyMatrix(const VarSpace& space, int rows, int cols);

  const VarSpace& space() const { return space_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Polynomial& at(int r, int c);
  const Polynomial& at(int r, int c) const;

  // Exact term-map symmetry.
  bool is_symmetric() const;
  // Max entry degree; Polynomial::kZeroDegree if all entries vanish.
  int max_degree() const;

  PolyMatrix operator*(const PolyMatrix& rhs) const;

  // Entrywise evaluation, row-major.
  std::vector<double> evaluate(std::span<const double> point) const;

 private:
  VarSpace space_;
  int rows_;
  int cols_;
  std::vector<Polynomial> entries_;
};

}  // namespace copo
