#include "copo/moment.hpp"

#include <algorithm>
#include <stdexcept>

namespace copo {

namespace {

void enumerate_monomials(int nvars, int degree,
                         std::vector<Exponent>& out) {
  // Generate all tuples with |α| <= degree, then sort grlex.
  Exponent current(nvars, 0);
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      for (int p = 0; p <= remaining; ++p) {
        current[var] = p;
        out.push_back(current);
      }
      current[var] = 0;
      return;
    }
    for (int p = 0; p <= remaining; ++p) {
      current[var] = p;
      self(self, var + 1, remaining - p);
    }
    current[var] = 0;
  };
  rec(rec, 0, degree);
  std::sort(out.begin(), out.end(), GrlexLess{});
}

int ceil_div2(int v) { return (v + 1) / 2; }

}  // namespace

int MonomialBasis::index_of(const Exponent& e) const {
  auto it = index.find(e);
  if (it == index.end())
    throw std::invalid_argument("MonomialBasis: monomial degree overflow");
  return it->second;
}

MonomialBasis monomial_basis(const VarSpace& space, int degree) {
  if (degree < 0)
    throw std::invalid_argument("monomial_basis: degree must be >= 0");
  MonomialBasis basis;
  basis.nvars = space.nvars();
  basis.degree = degree;
  enumerate_monomials(basis.nvars, degree, basis.monomials);
  for (int i = 0; i < basis.size(); ++i)
    basis.index.emplace(basis.monomials[i], i);
  return basis;
}

void LinearFunctional::normalize() {
  std::sort(coeffs.begin(), coeffs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  merged.reserve(coeffs.size());
  for (const auto& [idx, c] : coeffs) {
    if (!merged.empty() && merged.back().first == idx)
      merged.back().second += c;
    else
      merged.emplace_back(idx, c);
  }
  std::erase_if(merged, [](const auto& p) { return p.second == 0.0; });
  coeffs = std::move(merged);
}

double LinearFunctional::apply(std::span<const double> z) const {
  double total = 0.0;
  for (const auto& [idx, c] : coeffs) total += c * z[idx];
  return total;
}

LinearFunctional riesz_functional(const Polynomial& p,
                                  const MonomialBasis& basis) {
  LinearFunctional f;
  for (const auto& [e, c] : p.terms()) f.add(basis.index_of(e), c);
  f.normalize();
  return f;
}

double riesz_apply(const Polynomial& p, std::span<const double> z,
                   const MonomialBasis& basis) {
  if (static_cast<int>(z.size()) != basis.size())
    throw std::invalid_argument("riesz_apply: moment vector length mismatch");
  return riesz_functional(p, basis).apply(z);
}

Eigen::MatrixXd LinearMatrixMap::evaluate(std::span<const double> z) const {
  Eigen::MatrixXd out(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) out(r, c) = entry(r, c).apply(z);
  return out;
}

bool LinearMatrixMap::is_zero() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const LinearFunctional& f) { return f.empty(); });
}

namespace {

// Shared core: entries (a, b) are the Riesz functionals of
// q * x^{α_a} * x^{α_b} over the degree-2k basis.
void fill_localizing_entries(const Polynomial& q, const MonomialBasis& b2k,
                             const MonomialBasis& bt, int block_r, int block_c,
                             LinearMatrixMap& map) {
  const int inner = bt.size();
  Exponent e(b2k.nvars, 0);
  for (int a = 0; a < inner; ++a) {
    for (int b = 0; b < inner; ++b) {
      LinearFunctional& f =
          map.entry(block_r * inner + a, block_c * inner + b);
      for (const auto& [eq, cq] : q.terms()) {
        for (size_t v = 0; v < e.size(); ++v)
          e[v] = eq[v] + bt.monomials[a][v] + bt.monomials[b][v];
        f.add(b2k.index_of(e), cq);
      }
      f.normalize();
    }
  }
}

}  // namespace

LinearMatrixMap localizing_map(const Polynomial& q, int k) {
  const int deg = q.is_zero() ? 0 : q.degree();
  const int t = k - ceil_div2(deg);
  if (t < 0)
    throw std::invalid_argument(
        "localizing_map: order k too small for deg(q)");
  const MonomialBasis b2k = monomial_basis(q.space(), 2 * k);
  const MonomialBasis bt = monomial_basis(q.space(), t);
  LinearMatrixMap map;
  map.dim = bt.size();
  map.symmetric = true;
  map.entries.assign(static_cast<size_t>(map.dim) * map.dim, {});
  fill_localizing_entries(q, b2k, bt, 0, 0, map);
  return map;
}

LinearMatrixMap moment_matrix_map(const VarSpace& space, int k) {
  return localizing_map(Polynomial::constant(space, 1.0), k);
}

LinearMatrixMap block_localizing_map(const PolyMatrix& T, int k) {
  const int deg = std::max(T.max_degree(), 0);
  const int t = k - ceil_div2(deg);
  if (t < 0)
    throw std::invalid_argument(
        "block_localizing_map: order k too small for deg(T)");
  const MonomialBasis b2k = monomial_basis(T.space(), 2 * k);
  const MonomialBasis bt = monomial_basis(T.space(), t);
  if (T.rows() != T.cols())
    throw std::invalid_argument(
        "block_localizing_map: polynomial matrix must be square");
  LinearMatrixMap map;
  map.dim = T.rows() * bt.size();
  map.block_rows = T.rows();
  map.block_cols = T.cols();
  map.symmetric = T.is_symmetric();
  map.entries.assign(static_cast<size_t>(map.dim) * map.dim, {});
  for (int I = 0; I < T.rows(); ++I)
    for (int J = 0; J < T.cols(); ++J)
      fill_localizing_entries(T.at(I, J), b2k, bt, I, J, map);
  return map;
}

std::vector<double> moment_vector(std::span<const double> point,
                                  const MonomialBasis& basis) {
  if (static_cast<int>(point.size()) != basis.nvars)
    throw std::invalid_argument("moment_vector: point length mismatch");
  std::vector<double> z(basis.monomials.size());
  for (size_t a = 0; a < z.size(); ++a) {
    double v = 1.0;
    const Exponent& e = basis.monomials[a];
    for (size_t i = 0; i < e.size(); ++i)
      for (int rep = 0; rep < e[i]; ++rep) v *= point[i];
    z[a] = v;
  }
  return z;
}

}  // namespace copo
