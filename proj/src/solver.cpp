#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

#include "copo/sdp.hpp"

namespace copo {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FEntry {
  int r;
  int c;
  double v;
};

struct VarEntries {
  int var;
  std::vector<FEntry> entries;
};

// One PSD constraint Q_j(x) + C_j ⪰ 0 in coefficient form. `vars` holds,
// per moment variable, the full (both triangles) entry list of ∂Q/∂x_a.
struct Block {
  int dim = 0;
  MatrixXd constant;
  std::vector<VarEntries> vars;
  size_t total_entries = 0;
  bool pairwise = false;
};

// Nesterov-Todd scaling state: W = R Rᵀ satisfies W Z W = S, and both
// R⁻¹ S R⁻ᵀ and Rᵀ Z R equal diag(lambda).
struct BlockState {
  MatrixXd S;
  MatrixXd Z;
  MatrixXd R;
  MatrixXd Rinv;
  MatrixXd W;
  MatrixXd Vinv;  // W⁻¹
  VectorXd lambda;
  Eigen::LLT<MatrixXd> chol_S;
  Eigen::LLT<MatrixXd> chol_Z;
};

MatrixXd block_apply(const Block& blk, const VectorXd& x) {
  MatrixXd out = MatrixXd::Zero(blk.dim, blk.dim);
  for (const auto& ve : blk.vars) {
    const double xv = x[ve.var];
    if (xv == 0.0) continue;
    for (const auto& e : ve.entries) out(e.r, e.c) += xv * e.v;
  }
  return out;
}

void block_adjoint_accum(const Block& blk, const MatrixXd& U, double scale,
                         VectorXd& out) {
  for (const auto& ve : blk.vars) {
    double acc = 0.0;
    for (const auto& e : ve.entries) acc += e.v * U(e.r, e.c);
    out[ve.var] += scale * acc;
  }
}

double sym_eig_min(const MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A,
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest step to the PSD boundary: sup {a : S + a D ⪰ 0} given chol(S).
double max_psd_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& D) {
  MatrixXd T = chol.matrixL().solve(D);
  MatrixXd Tt = T.transpose();
  T = chol.matrixL().solve(Tt);
  const double emin = sym_eig_min(0.5 * (T + T.transpose()));
  if (emin >= 0.0) return kInf;
  return -1.0 / emin;
}

struct KSolution {
  VectorXd x;
  VectorXd y;
  std::vector<MatrixXd> Z;
};

class InteriorPoint {
 public:
  InteriorPoint(const ConicProblem& problem, const SolverOptions& opts)
      : problem_(problem), opts_(opts) {}

  SolveResult run();

 private:
  void setup();
  void reduce_equalities();
  bool compute_scalings();
  bool factor_system(bool identity_scaling);
  void build_schur_matrix(bool identity_scaling);
  void accumulate_block_schur(const Block& blk, const MatrixXd& V);
  // Solves the reduced KKT system with rhs third row Braw − R g Rᵀ; the
  // scaled part g is folded in analytically so that no R cancels against
  // R⁻¹ in floating point. g may be null.
  KSolution ksolve(const VectorXd& bx, const VectorXd& by,
                   const std::vector<MatrixXd>& Braw,
                   const std::vector<MatrixXd>* g) const;
  void apply_kkt(const KSolution& u, VectorXd& ox, VectorXd& oy,
                 std::vector<MatrixXd>& oZ, bool identity_scaling) const;

  const ConicProblem& problem_;
  SolverOptions opts_;

  int nx_ = 0;
  int ny_ = 0;
  VectorXd c_;
  MatrixXd A_;
  VectorXd b_;
  std::vector<Block> blocks_;
  double cone_degree_ = 0.0;
  double cnorm_ = 1.0, bnorm_ = 1.0, hnorm_ = 1.0;
  bool any_constant_ = false;

  // iterates
  VectorXd x_, y_;
  std::vector<BlockState> st_;
  double tau_ = 1.0, kappa_ = 1.0;

  // per-iteration factorization workspace
  MatrixXd M_;
  std::optional<Eigen::LLT<Eigen::Ref<MatrixXd>>> llt_M_;
  MatrixXd MiAt_;
  Eigen::LLT<MatrixXd> llt_schur_;
};

void InteriorPoint::setup() {
  nx_ = problem_.nz;
  c_ = VectorXd::Zero(nx_);
  for (const auto& [idx, v] : problem_.objective.coeffs) c_[idx] += v;

  blocks_.reserve(problem_.psd_blocks.size());
  for (const auto& pb : problem_.psd_blocks) {
    Block blk;
    blk.dim = pb.map.dim;
    blk.constant = pb.has_constant() ? pb.constant
                                     : MatrixXd::Zero(blk.dim, blk.dim);
    if (pb.has_constant()) any_constant_ = true;
    std::map<int, std::vector<FEntry>> per_var;
    for (int r = 0; r < blk.dim; ++r)
      for (int col = 0; col < blk.dim; ++col)
        for (const auto& [idx, v] : pb.map.entry(r, col).coeffs)
          per_var[idx].push_back({r, col, v});
    blk.total_entries = 0;
    for (auto& [idx, entries] : per_var) {
      blk.total_entries += entries.size();
      blk.vars.push_back({idx, std::move(entries)});
    }
    // Pairwise lookup beats dense accumulation when the block carries
    // few coefficient entries in total.
    blk.pairwise =
        blk.total_entries <
        static_cast<size_t>(blk.dim) * blk.dim + blk.vars.size();
    cone_degree_ += blk.dim;
    blocks_.push_back(std::move(blk));
  }

  reduce_equalities();

  cnorm_ = std::max(1.0, c_.norm());
  bnorm_ = std::max(1.0, b_.norm());
  double h2 = 0.0;
  for (const auto& blk : blocks_) h2 += blk.constant.squaredNorm();
  hnorm_ = std::max(1.0, std::sqrt(h2));
}

void InteriorPoint::reduce_equalities() {
  const int q0 = static_cast<int>(problem_.eq_rows.size());
  if (q0 == 0) {
    ny_ = 0;
    A_.resize(0, nx_);
    b_.resize(0);
    return;
  }
  MatrixXd A0 = MatrixXd::Zero(q0, nx_);
  VectorXd b0(q0);
  for (int i = 0; i < q0; ++i) {
    for (const auto& [idx, v] : problem_.eq_rows[i].coeffs) A0(i, idx) = v;
    b0[i] = problem_.eq_rhs[i];
    const double scale = A0.row(i).norm();
    if (scale > 0.0) {
      A0.row(i) /= scale;
      b0[i] /= scale;
    }
  }

  Eigen::ColPivHouseholderQR<MatrixXd> qr(A0.transpose());
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> keep(qr.colsPermutation().indices().data(),
                        qr.colsPermutation().indices().data() + rank);
  std::sort(keep.begin(), keep.end());
  ny_ = rank;
  A_.resize(ny_, nx_);
  b_.resize(ny_);
  for (int i = 0; i < ny_; ++i) {
    A_.row(i) = A0.row(keep[i]);
    b_[i] = b0[keep[i]];
  }
}

void InteriorPoint::accumulate_block_schur(const Block& blk,
                                           const MatrixXd& V) {
  const int nv = static_cast<int>(blk.vars.size());
  if (blk.pairwise) {
    for (int ia = 0; ia < nv; ++ia) {
      const auto& va = blk.vars[ia];
      for (int ib = ia; ib < nv; ++ib) {
        const auto& vb = blk.vars[ib];
        double sum = 0.0;
        for (const auto& ea : va.entries)
          for (const auto& eb : vb.entries)
            sum += ea.v * eb.v * V(ea.r, eb.r) * V(ea.c, eb.c);
        M_(va.var, vb.var) += sum;
      }
    }
    return;
  }
  MatrixXd U(blk.dim, blk.dim);
  for (int ia = 0; ia < nv; ++ia) {
    const auto& va = blk.vars[ia];
    U.setZero();
    for (const auto& e : va.entries)
      U.noalias() += e.v * V.col(e.r) * V.col(e.c).transpose();
    for (int ib = ia; ib < nv; ++ib) {
      const auto& vb = blk.vars[ib];
      double sum = 0.0;
      for (const auto& e : vb.entries) sum += e.v * U(e.r, e.c);
      M_(va.var, vb.var) += sum;
    }
  }
}

void InteriorPoint::build_schur_matrix(bool identity_scaling) {
  M_ = MatrixXd::Zero(nx_, nx_);
  for (size_t j = 0; j < blocks_.size(); ++j) {
    if (identity_scaling) {
      MatrixXd I = MatrixXd::Identity(blocks_[j].dim, blocks_[j].dim);
      accumulate_block_schur(blocks_[j], I);
    } else {
      accumulate_block_schur(blocks_[j], st_[j].Vinv);
    }
  }
  M_ = M_.selfadjointView<Eigen::Upper>();
}

bool InteriorPoint::factor_system(bool identity_scaling) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    build_schur_matrix(identity_scaling);
    if (attempt > 0) {
      const double reg =
          std::pow(100.0, attempt - 1) * 1e-11 *
          (1.0 + M_.diagonal().maxCoeff());
      M_.diagonal().array() += reg;
    }
    llt_M_.emplace(M_);
    if (llt_M_->info() != Eigen::Success) continue;
    if (ny_ == 0) return true;
    MiAt_ = llt_M_->solve(A_.transpose());
    MatrixXd schur = A_ * MiAt_;
    schur = 0.5 * (schur + schur.transpose());
    llt_schur_.compute(schur);
    if (llt_schur_.info() == Eigen::Success) return true;
    schur.diagonal().array() +=
        1e-11 * (1.0 + schur.diagonal().maxCoeff());
    llt_schur_.compute(schur);
    if (llt_schur_.info() == Eigen::Success) return true;
  }
  return false;
}

// Applies the reduced KKT operator to (x, y, Z): returns the three rows
// Aᵀy + Gᵀz, Ax, Gx − WᵀWz evaluated exactly from the block data.
void InteriorPoint::apply_kkt(const KSolution& u, VectorXd& ox, VectorXd& oy,
                              std::vector<MatrixXd>& oZ,
                              bool identity_scaling) const {
  ox = VectorXd::Zero(nx_);
  if (ny_ > 0) ox = A_.transpose() * u.y;
  for (size_t j = 0; j < blocks_.size(); ++j)
    block_adjoint_accum(blocks_[j], u.Z[j], -1.0, ox);  // Gᵀz = −Q*(z)
  oy = ny_ > 0 ? VectorXd(A_ * u.x) : VectorXd();
  oZ.resize(blocks_.size());
  for (size_t j = 0; j < blocks_.size(); ++j) {
    MatrixXd Qx = block_apply(blocks_[j], u.x);
    if (identity_scaling)
      oZ[j] = -Qx - u.Z[j];
    else
      oZ[j] = -Qx - st_[j].W * u.Z[j] * st_[j].W;
  }
}

KSolution InteriorPoint::ksolve(const VectorXd& bx, const VectorXd& by,
                                const std::vector<MatrixXd>& Braw,
                                const std::vector<MatrixXd>* g) const {
  const bool identity = st_.empty();
  // solve_once takes the same split rhs; refinement passes carry raw
  // residuals only.
  auto solve_once = [&](const VectorXd& rx_in, const VectorXd& ry_in,
                        const std::vector<MatrixXd>& rz_in,
                        const std::vector<MatrixXd>* gz) {
    VectorXd rx = rx_in;
    std::vector<MatrixXd> scaled_g(blocks_.size());
    for (size_t j = 0; j < blocks_.size(); ++j) {
      MatrixXd VBzV = identity
                          ? rz_in[j]
                          : MatrixXd(st_[j].Vinv * rz_in[j] * st_[j].Vinv);
      if (gz) {
        // V (R g Rᵀ) V = R⁻ᵀ g R⁻¹ exactly.
        scaled_g[j] = identity ? (*gz)[j]
                               : MatrixXd(st_[j].Rinv.transpose() *
                                          (*gz)[j] * st_[j].Rinv);
        VBzV -= scaled_g[j];
      }
      block_adjoint_accum(blocks_[j], VBzV, -1.0, rx);
    }
    KSolution u;
    if (ny_ > 0) {
      VectorXd t = llt_M_->solve(rx);
      u.y = llt_schur_.solve(A_ * t - ry_in);
      u.x = t - MiAt_ * u.y;
    } else {
      u.x = llt_M_->solve(rx);
      u.y.resize(0);
    }
    u.Z.resize(blocks_.size());
    for (size_t j = 0; j < blocks_.size(); ++j) {
      MatrixXd inner = block_apply(blocks_[j], u.x) + rz_in[j];
      u.Z[j] = identity ? MatrixXd(-inner)
                        : MatrixXd(-st_[j].Vinv * inner * st_[j].Vinv);
      if (gz) u.Z[j] += scaled_g[j];
    }
    return u;
  };

  KSolution u = solve_once(bx, by, Braw, g);
  // Iterative refinement against the exact operator; the scaled system
  // loses digits once the barrier parameter is tiny.
  std::vector<MatrixXd> Bz(blocks_.size());
  double rhs_scale = bx.norm() + (ny_ > 0 ? by.norm() : 0.0);
  for (size_t j = 0; j < blocks_.size(); ++j) {
    Bz[j] = Braw[j];
    if (g)
      Bz[j] -= identity ? (*g)[j]
                        : MatrixXd(st_[j].R * (*g)[j] * st_[j].R.transpose());
    rhs_scale += Bz[j].norm();
  }
  double prev_err = kInf;
  for (int pass = 0; pass < 4; ++pass) {
    VectorXd ox, oy;
    std::vector<MatrixXd> oZ;
    apply_kkt(u, ox, oy, oZ, identity);
    VectorXd rx = bx - ox;
    VectorXd ry = ny_ > 0 ? VectorXd(by - oy) : VectorXd();
    std::vector<MatrixXd> rz(blocks_.size());
    double err = rx.norm() + (ny_ > 0 ? ry.norm() : 0.0);
    for (size_t j = 0; j < blocks_.size(); ++j) {
      rz[j] = Bz[j] - oZ[j];
      err += rz[j].norm();
    }
    if (err <= 1e-14 * (1.0 + rhs_scale) || err >= 0.5 * prev_err) break;
    prev_err = err;
    KSolution du = solve_once(rx, ry, rz, nullptr);
    u.x += du.x;
    if (ny_ > 0) u.y += du.y;
    for (size_t j = 0; j < blocks_.size(); ++j) u.Z[j] += du.Z[j];
  }
  return u;
}

bool InteriorPoint::compute_scalings() {
  for (size_t j = 0; j < blocks_.size(); ++j) {
    BlockState& st = st_[j];
    st.chol_S.compute(st.S);
    if (st.chol_S.info() != Eigen::Success) return false;
    st.chol_Z.compute(st.Z);
    if (st.chol_Z.info() != Eigen::Success) return false;
    MatrixXd Ls = st.chol_S.matrixL();
    MatrixXd Lz = st.chol_Z.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(
        Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    st.lambda = svd.singularValues();
    if (!(st.lambda.minCoeff() > 0.0)) return false;
    VectorXd isqrt = st.lambda.array().sqrt().inverse();
    st.R = Ls * svd.matrixV() * isqrt.asDiagonal();
    st.Rinv = isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    st.W = st.R * st.R.transpose();
    st.Vinv = st.Rinv.transpose() * st.Rinv;
  }
  return true;
}

SolveResult InteriorPoint::run() {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult result;
  auto finish = [&](SolveStatus status, const std::string& msg) {
    result.status = status;
    result.message = msg;
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
  };

  setup();

  // Initial point from the identity-scaled KKT system, shifted into the
  // cone interior.
  st_.clear();
  if (!factor_system(true))
    return finish(SolveStatus::IllPosed, "initial factorization failed");
  std::vector<MatrixXd> Czero(blocks_.size());
  std::vector<MatrixXd> Cmats(blocks_.size());
  for (size_t j = 0; j < blocks_.size(); ++j) {
    Czero[j] = MatrixXd::Zero(blocks_[j].dim, blocks_[j].dim);
    Cmats[j] = blocks_[j].constant;
  }
  KSolution up = ksolve(VectorXd::Zero(nx_), b_, Cmats, nullptr);
  KSolution ud = ksolve(-c_, VectorXd::Zero(ny_), Czero, nullptr);

  x_ = up.x;
  y_ = ud.y;
  st_.resize(blocks_.size());
  for (size_t j = 0; j < blocks_.size(); ++j) {
    st_[j].S = block_apply(blocks_[j], x_) + blocks_[j].constant;
    st_[j].Z = ud.Z[j];
  }
  double smin = kInf, zmin = kInf;
  for (auto& st : st_) {
    st.S = 0.5 * (st.S + st.S.transpose()).eval();
    st.Z = 0.5 * (st.Z + st.Z.transpose()).eval();
    smin = std::min(smin, sym_eig_min(st.S));
    zmin = std::min(zmin, sym_eig_min(st.Z));
  }
  for (auto& st : st_) {
    const int d = st.S.rows();
    if (smin < 1e-8)
      st.S += (1.0 - smin) * MatrixXd::Identity(d, d);
    if (zmin < 1e-8)
      st.Z += (1.0 - zmin) * MatrixXd::Identity(d, d);
  }
  tau_ = 1.0;
  kappa_ = 1.0;

  double best_metric = kInf;
  VectorXd best_x = x_;
  VectorXd best_y = y_;
  std::vector<MatrixXd> best_Z(blocks_.size());
  for (size_t j = 0; j < blocks_.size(); ++j) best_Z[j] = st_[j].Z;
  double best_tau = 1.0;
  double best_pres = kInf, best_dres = kInf, best_gap = kInf;
  int best_iter = 0;
  int stall_count = 0;

  const double nu = cone_degree_ + 1.0;

  for (int iter = 0;; ++iter) {
    // Residuals of the self-dual model.
    VectorXd res1 = c_ * tau_;
    if (ny_ > 0) res1 += A_.transpose() * y_;
    for (size_t j = 0; j < blocks_.size(); ++j)
      block_adjoint_accum(blocks_[j], st_[j].Z, -1.0, res1);
    VectorXd res2 =
        ny_ > 0 ? VectorXd(b_ * tau_ - A_ * x_) : VectorXd();
    std::vector<MatrixXd> res3(blocks_.size());
    double res3_norm2 = 0.0;
    double hz = 0.0;  // ⟨h, Z⟩
    double sz = 0.0;  // ⟨S, Z⟩
    for (size_t j = 0; j < blocks_.size(); ++j) {
      res3[j] = block_apply(blocks_[j], x_) + blocks_[j].constant * tau_ -
                st_[j].S;
      res3_norm2 += res3[j].squaredNorm();
      hz += blocks_[j].constant.cwiseProduct(st_[j].Z).sum();
      sz += st_[j].S.cwiseProduct(st_[j].Z).sum();
    }
    const double by_hz = (ny_ > 0 ? b_.dot(y_) : 0.0) + hz;
    const double cx = c_.dot(x_);
    const double res4 = -cx - by_hz - kappa_;
    const double mu = (sz + tau_ * kappa_) / nu;

    const double pcost = cx / tau_;
    const double dcost = -by_hz / tau_;
    const double pres =
        std::max(ny_ > 0 ? res2.norm() / (tau_ * bnorm_) : 0.0,
                 std::sqrt(res3_norm2) / (tau_ * hnorm_));
    const double dres = res1.norm() / (tau_ * cnorm_);
    const double gap = sz / (tau_ * tau_);
    const double relgap =
        gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});

    if (opts_.verbose) {
      std::printf(
          "it %3d  pcost %+.6e  dcost %+.6e  pres %.2e  dres %.2e  "
          "gap %.2e  tau %.2e  kappa %.2e\n",
          iter, pcost, dcost, pres, dres, relgap, tau_, kappa_);
    }

    const double metric = std::max({pres, dres, relgap});
    if (metric < best_metric) {
      best_metric = metric;
      best_x = x_;
      best_y = y_;
      for (size_t j = 0; j < blocks_.size(); ++j) best_Z[j] = st_[j].Z;
      best_tau = tau_;
      best_pres = pres;
      best_dres = dres;
      best_gap = relgap;
      best_iter = iter;
    }

    auto fill_solution = [&](const VectorXd& xs, const VectorXd& ys,
                             const std::vector<MatrixXd>& Zs, double ts,
                             double p, double d, double g, int it) {
      result.z.assign(xs.size(), 0.0);
      for (int i = 0; i < xs.size(); ++i) result.z[i] = xs[i] / ts;
      result.objective_value = c_.dot(xs) / ts;
      result.eq_multipliers.assign(ys.size(), 0.0);
      for (int i = 0; i < ys.size(); ++i) result.eq_multipliers[i] = ys[i] / ts;
      result.dual_blocks.resize(Zs.size());
      double hz_total = 0.0;
      for (size_t j = 0; j < Zs.size(); ++j) {
        result.dual_blocks[j] = Zs[j] / ts;
        hz_total += blocks_[j].constant.cwiseProduct(Zs[j]).sum();
      }
      result.dual_objective =
          -((ys.size() > 0 ? b_.dot(ys) : 0.0) + hz_total) / ts;
      result.primal_residual = p;
      result.dual_residual = d;
      result.gap = g;
      result.iterations = it;
    };

    if (pres <= opts_.eps_feas && dres <= opts_.eps_feas &&
        relgap <= opts_.eps_gap) {
      std::vector<MatrixXd> Zs(blocks_.size());
      for (size_t j = 0; j < blocks_.size(); ++j) Zs[j] = st_[j].Z;
      fill_solution(x_, y_, Zs, tau_, pres, dres, relgap, iter);
      return finish(SolveStatus::Optimal, "");
    }

    // Infeasibility certificates.
    if (by_hz < 0.0) {
      VectorXd v = res1 - c_ * tau_;  // Aᵀy + Gᵀz
      const double pinfres = v.norm() / (cnorm_ * (-by_hz));
      if (pinfres <= opts_.eps_feas) {
        result.iterations = iter;
        result.primal_residual = pinfres;
        return finish(SolveStatus::PrimalInfeasible,
                      "primal infeasibility certificate found");
      }
    }
    if (cx < 0.0) {
      double viol2 = ny_ > 0 ? (A_ * x_).squaredNorm() : 0.0;
      for (size_t j = 0; j < blocks_.size(); ++j)
        viol2 += (block_apply(blocks_[j], x_) - st_[j].S).squaredNorm();
      const double dinfres = std::sqrt(viol2) / (-cx) /
                             std::max(bnorm_, hnorm_);
      if (dinfres <= opts_.eps_feas) {
        result.iterations = iter;
        result.dual_residual = dinfres;
        return finish(SolveStatus::DualInfeasible,
                      "dual infeasibility certificate found");
      }
    }

    if (iter >= opts_.max_iterations || stall_count >= 3) {
      fill_solution(best_x, best_y, best_Z, best_tau, best_pres, best_dres,
                    best_gap, best_iter);
      const bool stalled = stall_count >= 3;
      return finish(SolveStatus::IterationLimit,
                    stalled ? "search direction stalled"
                            : "iteration limit reached");
    }

    if (!compute_scalings())
      return finish(SolveStatus::IllPosed, "NT scaling failed");
    if (!factor_system(false))
      return finish(SolveStatus::IllPosed,
                    "KKT factorization failed");

    KSolution u1 = ksolve(-c_, b_, Cmats);
    double u1_chz = 0.0;
    for (size_t j = 0; j < blocks_.size(); ++j)
      u1_chz += blocks_[j].constant.cwiseProduct(u1.Z[j]).sum();
    const double denom =
        kappa_ / tau_ -
        (c_.dot(u1.x) + (ny_ > 0 ? b_.dot(u1.y) : 0.0) + u1_chz);
    if (!std::isfinite(denom) || std::abs(denom) < 1e-40)
      return finish(SolveStatus::IllPosed, "singular tau system");

    struct Direction {
      VectorXd dx, dy;
      std::vector<MatrixXd> dZ, dS;
      double dtau = 0.0, dkappa = 0.0;
    };

    // Solves the Newton system for given residual scaling and centrality
    // targets d5 (scaled space) and d6.
    auto newton = [&](double resid_scale, const std::vector<MatrixXd>& d5,
                      double d6) {
      Direction dir;
      std::vector<MatrixXd> g5(blocks_.size());
      std::vector<MatrixXd> bz(blocks_.size());
      for (size_t j = 0; j < blocks_.size(); ++j) {
        const VectorXd& lam = st_[j].lambda;
        MatrixXd g(blocks_[j].dim, blocks_[j].dim);
        for (int r = 0; r < g.rows(); ++r)
          for (int cc = 0; cc < g.cols(); ++cc)
            g(r, cc) = 2.0 * d5[j](r, cc) / (lam[r] + lam[cc]);
        g5[j] = st_[j].R * g * st_[j].R.transpose();
        // bz = −d̃3 = resid_scale·res3 − Wᵀg5
        bz[j] = resid_scale * res3[j] - g5[j];
      }
      VectorXd bx = -resid_scale * res1;
      VectorXd by =
          ny_ > 0 ? VectorXd(resid_scale * res2) : VectorXd();
      KSolution ur = ksolve(bx, by, bz);

      double ur_chz = 0.0;
      for (size_t j = 0; j < blocks_.size(); ++j)
        ur_chz += blocks_[j].constant.cwiseProduct(ur.Z[j]).sum();
      const double d4 = -resid_scale * res4;
      dir.dtau = (d4 + d6 / tau_ + c_.dot(ur.x) +
                  (ny_ > 0 ? b_.dot(ur.y) : 0.0) + ur_chz) /
                 denom;
      dir.dx = ur.x + dir.dtau * u1.x;
      if (ny_ > 0) dir.dy = ur.y + dir.dtau * u1.y;
      dir.dZ.resize(blocks_.size());
      dir.dS.resize(blocks_.size());
      for (size_t j = 0; j < blocks_.size(); ++j) {
        dir.dZ[j] = ur.Z[j] + dir.dtau * u1.Z[j];
        dir.dZ[j] = 0.5 * (dir.dZ[j] + dir.dZ[j].transpose()).eval();
        dir.dS[j] = g5[j] - st_[j].W * dir.dZ[j] * st_[j].W;
        dir.dS[j] = 0.5 * (dir.dS[j] + dir.dS[j].transpose()).eval();
      }
      dir.dkappa = (d6 - kappa_ * dir.dtau) / tau_;
      return dir;
    };

    auto max_step = [&](const Direction& dir) {
      double alpha = kInf;
      for (size_t j = 0; j < blocks_.size(); ++j) {
        alpha = std::min(alpha, max_psd_step(st_[j].chol_S, dir.dS[j]));
        alpha = std::min(alpha, max_psd_step(st_[j].chol_Z, dir.dZ[j]));
      }
      if (dir.dtau < 0.0) alpha = std::min(alpha, -tau_ / dir.dtau);
      if (dir.dkappa < 0.0) alpha = std::min(alpha, -kappa_ / dir.dkappa);
      return alpha;
    };

    // Predictor.
    std::vector<MatrixXd> d5(blocks_.size());
    for (size_t j = 0; j < blocks_.size(); ++j) {
      d5[j] = MatrixXd::Zero(blocks_[j].dim, blocks_[j].dim);
      d5[j].diagonal() = -st_[j].lambda.array().square();
    }
    Direction aff = newton(1.0, d5, -tau_ * kappa_);
    const double alpha_aff = std::min(1.0, max_step(aff));

    double sz_aff = 0.0;
    for (size_t j = 0; j < blocks_.size(); ++j)
      sz_aff += (st_[j].S + alpha_aff * aff.dS[j])
                    .cwiseProduct(st_[j].Z + alpha_aff * aff.dZ[j])
                    .sum();
    const double mu_aff =
        (sz_aff + (tau_ + alpha_aff * aff.dtau) *
                      (kappa_ + alpha_aff * aff.dkappa)) /
        nu;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, sigma);

    // Corrector: second-order term in the scaled space.
    for (size_t j = 0; j < blocks_.size(); ++j) {
      const MatrixXd dSs = st_[j].Rinv * aff.dS[j] * st_[j].Rinv.transpose();
      const MatrixXd dZs = st_[j].R.transpose() * aff.dZ[j] * st_[j].R;
      MatrixXd corr = 0.5 * (dSs * dZs + dZs * dSs);
      d5[j] = -corr;
      d5[j].diagonal().array() +=
          sigma * mu - st_[j].lambda.array().square();
    }
    const double d6 =
        sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa;
    Direction comb = newton(1.0 - sigma, d5, d6);
    const double alpha = std::min(1.0, 0.99 * max_step(comb));

    if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
      ++stall_count;
      continue;
    }
    if (alpha < 1e-6)
      ++stall_count;
    else
      stall_count = 0;

    x_ += alpha * comb.dx;
    if (ny_ > 0) y_ += alpha * comb.dy;
    for (size_t j = 0; j < blocks_.size(); ++j) {
      st_[j].S += alpha * comb.dS[j];
      st_[j].Z += alpha * comb.dZ[j];
    }
    tau_ += alpha * comb.dtau;
    kappa_ += alpha * comb.dkappa;
    if (opts_.verbose) {
      double se = kInf, ze = kInf;
      for (auto& st : st_) {
        se = std::min(se, sym_eig_min(st.S));
        ze = std::min(ze, sym_eig_min(st.Z));
      }
      std::printf("    step %.4e  minEig(S) %.3e  minEig(Z) %.3e\n", alpha,
                  se, ze);
    }
  }
}

SolveResult solve_internal(const ConicProblem& problem,
                           const SolverOptions& opts) {
  InteriorPoint ip(problem, opts);
  return ip.run();
}

}  // namespace

SolveResult run_sdpa_backend(const ConicProblem& problem,
                             const SolverOptions& opts);

SolveResult solve(const ConicProblem& problem, const SolverOptions& opts) {
  if (problem.nz <= 0)
    throw std::invalid_argument("solve: empty problem");
  if (opts.backend.rfind("sdpa:", 0) == 0)
    return run_sdpa_backend(problem, opts);
  if (opts.backend != "internal")
    throw std::invalid_argument("solve: unknown backend '" + opts.backend +
                                "'");
  return solve_internal(problem, opts);
}

}  // namespace copo
