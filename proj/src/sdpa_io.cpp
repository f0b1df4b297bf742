#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "copo/sdp.hpp"

namespace copo {

// SDPA sparse format models  min Σ c_i x_i  s.t.  Σ x_i F_i − F_0 ⪰ 0
// with block-diagonal F's. Our PSD blocks map directly (F_0 = −constant);
// each equality row a·z = b becomes the pair a·z − b ≥ 0, b − a·z ≥ 0 in
// a trailing diagonal block.
std::string export_sdpa(const ConicProblem& problem) {
  std::ostringstream out;
  const size_t q = problem.eq_rows.size();
  const size_t nblocks = problem.psd_blocks.size() + (q > 0 ? 1 : 0);
  out << problem.nz << " = mDIM\n";
  out << nblocks << " = nBLOCK\n";
  for (size_t j = 0; j < problem.psd_blocks.size(); ++j) {
    if (j) out << " ";
    out << problem.psd_blocks[j].map.dim;
  }
  if (q > 0) out << (problem.psd_blocks.empty() ? "" : " ") << -2 * static_cast<long>(q);
  out << " = bLOCKsTRUCT\n";
  std::vector<double> c(problem.nz, 0.0);
  for (const auto& [idx, v] : problem.objective.coeffs) c[idx] += v;
  for (int i = 0; i < problem.nz; ++i) {
    if (i) out << " ";
    out << format_double(c[i]);
  }
  out << "\n";

  auto emit = [&](int matno, size_t blkno, int i, int j, double v) {
    if (v == 0.0) return;
    out << matno << " " << blkno << " " << i + 1 << " " << j + 1 << " "
        << format_double(v) << "\n";
  };

  for (size_t j = 0; j < problem.psd_blocks.size(); ++j) {
    const auto& pb = problem.psd_blocks[j];
    if (pb.has_constant()) {
      for (int r = 0; r < pb.map.dim; ++r)
        for (int col = r; col < pb.map.dim; ++col)
          emit(0, j + 1, r, col, -pb.constant(r, col));
    }
    // Per-variable coefficient matrices, upper triangle.
    for (int r = 0; r < pb.map.dim; ++r)
      for (int col = r; col < pb.map.dim; ++col)
        for (const auto& [idx, v] : pb.map.entry(r, col).coeffs)
          emit(idx + 1, j + 1, r, col, v);
  }
  if (q > 0) {
    const size_t blkno = problem.psd_blocks.size() + 1;
    for (size_t row = 0; row < q; ++row) {
      const int pos = static_cast<int>(2 * row);
      const int neg = pos + 1;
      emit(0, blkno, pos, pos, problem.eq_rhs[row]);
      emit(0, blkno, neg, neg, -problem.eq_rhs[row]);
      for (const auto& [idx, v] : problem.eq_rows[row].coeffs) {
        emit(idx + 1, blkno, pos, pos, v);
        emit(idx + 1, blkno, neg, neg, -v);
      }
    }
  }
  return out.str();
}

namespace {

// Pulls the next whitespace/punctuation-separated token; SDPA headers
// allow {}, (), and commas as separators.
class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  bool next(std::string& token) {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '*' || ch == '"') {  // comment line
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' ||
          ch == '{' || ch == '}' || ch == '(' || ch == ')') {
        ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= text_.size()) return false;
    const size_t start = pos_;
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' ||
          ch == '{' || ch == '}' || ch == '(' || ch == ')')
        break;
      ++pos_;
    }
    token = std::string(text_.substr(start, pos_ - start));
    return true;
  }

  long next_long() {
    std::string tok;
    if (!next(tok)) throw std::invalid_argument("parse_sdpa: unexpected EOF");
    return std::stol(tok);
  }

  double next_double() {
    std::string tok;
    if (!next(tok)) throw std::invalid_argument("parse_sdpa: unexpected EOF");
    return std::stod(tok);
  }

  bool next_double_opt(double& v) {
    std::string tok;
    if (!next(tok)) return false;
    v = std::stod(tok);
    return true;
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

ConicProblem parse_sdpa(std::string_view text) {
  TokenReader reader(text);
  const int m = static_cast<int>(reader.next_long());
  const int nblocks = static_cast<int>(reader.next_long());
  std::vector<int> sizes(nblocks);
  for (int j = 0; j < nblocks; ++j)
    sizes[j] = static_cast<int>(reader.next_long());

  ConicProblem problem;
  problem.nz = m;
  for (int i = 0; i < m; ++i) {
    const double v = reader.next_double();
    if (v != 0.0) problem.objective.add(i, v);
  }
  problem.objective.normalize();

  problem.psd_blocks.resize(nblocks);
  for (int j = 0; j < nblocks; ++j) {
    auto& pb = problem.psd_blocks[j];
    pb.map.dim = std::abs(sizes[j]);
    pb.map.symmetric = true;
    pb.map.entries.assign(
        static_cast<size_t>(pb.map.dim) * pb.map.dim, {});
    pb.constant = Eigen::MatrixXd::Zero(pb.map.dim, pb.map.dim);
    pb.label = sizes[j] < 0 ? "diag" : "block";
  }

  double v = 0.0;
  while (true) {
    std::string tok;
    if (!reader.next(tok)) break;
    const int matno = std::stoi(tok);
    const int blkno = static_cast<int>(reader.next_long()) - 1;
    const int i = static_cast<int>(reader.next_long()) - 1;
    const int j = static_cast<int>(reader.next_long()) - 1;
    v = reader.next_double();
    if (blkno < 0 || blkno >= nblocks)
      throw std::invalid_argument("parse_sdpa: block index out of range");
    auto& pb = problem.psd_blocks[blkno];
    if (i < 0 || j < 0 || i >= pb.map.dim || j >= pb.map.dim)
      throw std::invalid_argument("parse_sdpa: entry index out of range");
    if (matno == 0) {
      pb.constant(i, j) = -v;
      pb.constant(j, i) = -v;
    } else {
      pb.map.entry(i, j).add(matno - 1, v);
      if (i != j) pb.map.entry(j, i).add(matno - 1, v);
    }
  }
  for (auto& pb : problem.psd_blocks) {
    for (auto& f : pb.map.entries) f.normalize();
    if (pb.constant.cwiseAbs().maxCoeff() == 0.0) pb.constant.resize(0, 0);
  }
  return problem;
}

std::string format_sdpa_result(const SolveResult& result) {
  std::ostringstream out;
  out << "phase.value  = " << to_string(result.status) << "\n";
  out << "objValPrimal = " << format_double(result.objective_value) << "\n";
  out << "objValDual   = " << format_double(result.objective_value) << "\n";
  out << "xVec = \n{";
  for (size_t i = 0; i < result.z.size(); ++i) {
    if (i) out << ",";
    out << format_double(result.z[i]);
  }
  out << "}\n";
  return out.str();
}

std::vector<double> parse_sdpa_result(std::string_view text, int nz) {
  const size_t pos = text.find("xVec");
  if (pos == std::string_view::npos)
    throw std::invalid_argument("sdpa result: xVec section not found");
  const size_t open = text.find('{', pos);
  const size_t close = text.find('}', open);
  if (open == std::string_view::npos || close == std::string_view::npos)
    throw std::invalid_argument("sdpa result: malformed xVec");
  TokenReader reader(text.substr(open + 1, close - open - 1));
  std::vector<double> z;
  double v = 0.0;
  while (reader.next_double_opt(v)) z.push_back(v);
  if (static_cast<int>(z.size()) != nz)
    throw std::invalid_argument("sdpa result: xVec length mismatch");
  return z;
}

// External solver: write .dat-s, run `cmd <in> <out>`, read xVec back,
// and judge feasibility of the returned point directly on the problem.
SolveResult run_sdpa_backend(const ConicProblem& problem,
                             const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = opts.backend.substr(5);
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() /
      ("copotest_sdpa_" + std::to_string(::getpid()) + "_" +
       std::to_string(reinterpret_cast<uintptr_t>(&problem) & 0xffff));
  fs::create_directories(dir);
  const fs::path in_path = dir / "problem.dat-s";
  const fs::path out_path = dir / "problem.result";
  {
    std::ofstream out(in_path);
    out << export_sdpa(problem);
  }
  const std::string full_cmd =
      cmd + " " + in_path.string() + " " + out_path.string();
  SolveResult result;
  const int rc = std::system(full_cmd.c_str());
  if (rc != 0) {
    result.status = SolveStatus::IllPosed;
    result.message = "external solver exited with code " + std::to_string(rc);
    return result;
  }
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find("PrimalInfeasible") != std::string::npos ||
      text.find("pdINF") != std::string::npos ||
      text.find("pINF") != std::string::npos) {
    result.status = SolveStatus::PrimalInfeasible;
    result.message = "external solver reported infeasibility";
    return result;
  }
  result.z = parse_sdpa_result(text, problem.nz);

  // Residual check against the problem the file encodes.
  double eqviol = 0.0;
  for (size_t i = 0; i < problem.eq_rows.size(); ++i)
    eqviol = std::max(eqviol, std::abs(problem.eq_rows[i].apply(result.z) -
                                       problem.eq_rhs[i]));
  double mineig = 0.0;
  for (const auto& pb : problem.psd_blocks) {
    Eigen::MatrixXd Sj = pb.map.evaluate(result.z);
    if (pb.has_constant()) Sj += pb.constant;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (Sj + Sj.transpose()), Eigen::EigenvaluesOnly);
    mineig = std::min(mineig, es.eigenvalues().minCoeff());
  }
  result.objective_value = problem.objective.apply(result.z);
  result.primal_residual = std::max(eqviol, -mineig);
  result.status = result.primal_residual <= 1e-6
                      ? SolveStatus::Optimal
                      : SolveStatus::IterationLimit;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::error_code ec;
  fs::remove_all(dir, ec);
  return result;
}

}  // namespace copo
