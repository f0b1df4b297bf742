#include "copo/poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace copo {

int total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  // Within a degree block, the tuple with more weight on earlier
  // variables comes first.
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

VarSpace::VarSpace(int n, int m) : n_(n), m_(m) {
  if (n < 1) throw std::invalid_argument("VarSpace: n must be >= 1");
  if (m < 0) throw std::invalid_argument("VarSpace: m must be >= 0");
}

int VarSpace::var_index(int i, int j) const {
  if (i < 1 || j < i || j > n_)
    throw std::invalid_argument("VarSpace: matrix index (" + std::to_string(i) +
                                "," + std::to_string(j) + ") out of range");
  const int row = i - 1;
  return row * n_ - row * (row - 1) / 2 + (j - i);
}

int VarSpace::y_index(int t) const {
  if (t < 1 || t > m_)
    throw std::invalid_argument("VarSpace: orthant index " + std::to_string(t) +
                                " out of range");
  return sigma() + (t - 1);
}

std::pair<int, int> VarSpace::matrix_position(int index) const {
  if (index < 0 || index >= sigma())
    throw std::invalid_argument("VarSpace: not a matrix variable index");
  int i = 1;
  int remaining = index;
  while (remaining >= n_ - (i - 1)) {
    remaining -= n_ - (i - 1);
    ++i;
  }
  return {i, i + remaining};
}

std::string VarSpace::var_name(int index) const {
  if (index < 0 || index >= nvars())
    throw std::invalid_argument("VarSpace: variable index out of range");
  if (index < sigma()) {
    auto [i, j] = matrix_position(index);
    if (n_ <= 9) return "x" + std::to_string(i) + std::to_string(j);
    return "x" + std::to_string(i) + "_" + std::to_string(j);
  }
  return "y" + std::to_string(index - sigma() + 1);
}

Polynomial Polynomial::constant(const VarSpace& space, double value) {
  Polynomial p(space);
  p.add_term(Exponent(space.nvars(), 0), value);
  return p;
}

Polynomial Polynomial::variable(const VarSpace& space, int var_index) {
  if (var_index < 0 || var_index >= space.nvars())
    throw std::invalid_argument("Polynomial::variable: index out of range");
  Exponent e(space.nvars(), 0);
  e[var_index] = 1;
  return monomial(space, std::move(e), 1.0);
}

Polynomial Polynomial::monomial(const VarSpace& space, Exponent exponent,
                                double coeff) {
  Polynomial p(space);
  p.add_term(exponent, coeff);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return kZeroDegree;
  // Grlex order puts the highest total degree last.
  return total_degree(terms_.rbegin()->first);
}

std::optional<int> Polynomial::homogeneous_degree() const {
  if (terms_.empty()) return 0;
  const int d = total_degree(terms_.begin()->first);
  if (total_degree(terms_.rbegin()->first) != d) return std::nullopt;
  return d;
}

void Polynomial::add_term(const Exponent& exponent, double coeff) {
  if (static_cast<int>(exponent.size()) != space_.nvars())
    throw std::invalid_argument("Polynomial: exponent length mismatch");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.emplace(exponent, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coeff(const Exponent& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::check_same_space(const Polynomial& other) const {
  if (!(space_ == other.space_))
    throw std::invalid_argument("Polynomial: variable space mismatch");
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  check_same_space(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  check_same_space(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(space_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
  return out;
}

Polynomial operator+(Polynomial lhs, const Polynomial& rhs) {
  lhs += rhs;
  return lhs;
}

Polynomial operator-(Polynomial lhs, const Polynomial& rhs) {
  lhs -= rhs;
  return lhs;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  lhs.check_same_space(rhs);
  Polynomial out(lhs.space_);
  Exponent e(lhs.space_.nvars());
  for (const auto& [ea, ca] : lhs.terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      for (size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(double s, Polynomial p) {
  p *= s;
  return p;
}

Polynomial Polynomial::differentiate(int var_index) const {
  if (var_index < 0 || var_index >= space_.nvars())
    throw std::invalid_argument("differentiate: variable index out of range");
  Polynomial out(space_);
  for (const auto& [e, c] : terms_) {
    if (e[var_index] == 0) continue;
    Exponent d = e;
    d[var_index] -= 1;
    out.add_term(d, c * e[var_index]);
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != space_.nvars())
    throw std::invalid_argument("evaluate: point length mismatch");
  for (double v : point)
    if (!std::isfinite(v))
      throw std::invalid_argument("evaluate: non-finite input");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (size_t v = 0; v < e.size(); ++v)
      for (int rep = 0; rep < e[v]; ++rep) term *= point[v];
    total += term;
  }
  return total;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    const bool first = out.empty();
    double mag = c;
    if (c < 0) {
      out += first ? "-" : " - ";
      mag = -c;
    } else if (!first) {
      out += " + ";
    }
    std::string mono;
    for (size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += space_.var_name(static_cast<int>(v));
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    if (mono.empty()) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += mono;
    } else {
      out += format_double(mag) + "*" + mono;
    }
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const VarSpace& space)
      : text_(text), space_(space) {}

  Polynomial parse() {
    Polynomial result(space_);
    skip_ws();
    bool negative = consume_sign();
    while (true) {
      result += parse_term(negative);
      skip_ws();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '+') {
        ++pos_;
        negative = false;
      } else if (c == '-') {
        ++pos_;
        negative = true;
      } else {
        fail("expected '+' or '-'");
      }
      skip_ws();
    }
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("parse error at position " +
                                std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume_sign() {
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const bool neg = text_[pos_] == '-';
      ++pos_;
      skip_ws();
      return neg;
    }
    return false;
  }

  bool at_digit() const {
    return pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.');
  }

  bool at_var() const {
    return pos_ < text_.size() && (text_[pos_] == 'x' || text_[pos_] == 'y');
  }

  double parse_number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("invalid numeric literal");
    pos_ += static_cast<size_t>(ptr - begin);
    return value;
  }

  int parse_uint() {
    int value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected integer");
    pos_ += static_cast<size_t>(ptr - begin);
    return value;
  }

  // var := 'x'ij | 'x'i'_'j | 'y'k
  int parse_var_index() {
    const size_t var_pos = pos_;
    const char kind = text_[pos_++];
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      pos_ = var_pos;
      fail("unknown variable name");
    }
    if (kind == 'y') {
      const int t = parse_uint();
      if (t < 1 || t > space_.m()) {
        pos_ = var_pos;
        fail("variable y" + std::to_string(t) + " out of range for space");
      }
      return space_.y_index(t);
    }
    // Underscore form x<i>_<j> admits n > 9; the compact form takes one
    // digit per index.
    size_t digits_end = pos_;
    while (digits_end < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[digits_end])))
      ++digits_end;
    int i = 0;
    int j = 0;
    if (digits_end < text_.size() && text_[digits_end] == '_') {
      i = parse_uint();
      ++pos_;  // '_'
      j = parse_uint();
    } else {
      if (digits_end - pos_ != 2) {
        pos_ = var_pos;
        fail("unknown variable name (matrix variables use two indices)");
      }
      i = text_[pos_] - '0';
      j = text_[pos_ + 1] - '0';
      pos_ += 2;
    }
    if (i < 1 || j < i || j > space_.n()) {
      pos_ = var_pos;
      fail("variable x index (" + std::to_string(i) + "," + std::to_string(j) +
           ") out of range for space");
    }
    return space_.var_index(i, j);
  }

  Polynomial parse_term(bool negative) {
    double coeff = negative ? -1.0 : 1.0;
    bool saw_any = false;
    if (at_digit()) {
      coeff *= parse_number();
      saw_any = true;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        skip_ws();
        if (!at_var()) fail("expected variable after '*'");
      }
    }
    Exponent e(space_.nvars(), 0);
    while (at_var()) {
      const int idx = parse_var_index();
      int power = 1;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '^') {
        ++pos_;
        skip_ws();
        power = parse_uint();
        if (power < 0) fail("negative exponent");
        skip_ws();
      }
      e[idx] += power;
      saw_any = true;
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        skip_ws();
        if (!at_var() && !at_digit()) fail("expected factor after '*'");
        if (at_digit()) {
          coeff *= parse_number();
          skip_ws();
          if (pos_ < text_.size() && text_[pos_] == '*') {
            ++pos_;
            skip_ws();
          }
        }
      }
      skip_ws();
    }
    if (!saw_any) fail("expected term");
    return Polynomial::monomial(space_, std::move(e), coeff);
  }

  std::string_view text_;
  size_t pos_ = 0;
  const VarSpace& space_;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, const VarSpace& space) {
  return PolyParser(text, space).parse();
}

PolyMatrix::PolyMatrix(const VarSpace& space, int rows, int cols)
    : space_(space), rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("PolyMatrix: dimensions must be positive");
  entries_.assign(static_cast<size_t>(rows) * cols, Polynomial(space));
}

Polynomial& PolyMatrix::at(int r, int c) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::invalid_argument("PolyMatrix: index out of range");
  return entries_[static_cast<size_t>(r) * cols_ + c];
}

const Polynomial& PolyMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::invalid_argument("PolyMatrix: index out of range");
  return entries_[static_cast<size_t>(r) * cols_ + c];
}

bool PolyMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = r + 1; c < cols_; ++c)
      if (at(r, c).terms() != at(c, r).terms()) return false;
  return true;
}

int PolyMatrix::max_degree() const {
  int d = Polynomial::kZeroDegree;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw std::invalid_argument("PolyMatrix: shape mismatch in product");
  PolyMatrix out(space_, rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < rhs.cols_; ++c)
      for (int k = 0; k < cols_; ++k) out.at(r, c) += at(r, k) * rhs.at(k, c);
  return out;
}

std::vector<double> PolyMatrix::evaluate(std::span<const double> point) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& p : entries_) out.push_back(p.evaluate(point));
  return out;
}

}  // namespace copo
