#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "convlab/core.hpp"

namespace convlab::sdp {

// --- small dense linear-map helpers used to assemble constraints ---

// Orthonormal Hermitian basis of C^{d x d}: d^2 elements, deterministic order.
inline std::vector<Matrix> hermitian_basis(std::size_t d) {
  std::vector<Matrix> basis;
  basis.reserve(d * d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      if (a == b) {
        Matrix e = Matrix::Zero(d, d);
        e(a, a) = 1.0;
        basis.push_back(std::move(e));
      } else {
        Matrix e = Matrix::Zero(d, d);
        e(a, b) = inv_sqrt2;
        e(b, a) = inv_sqrt2;
        basis.push_back(std::move(e));
        Matrix f = Matrix::Zero(d, d);
        f(a, b) = cxd(0, inv_sqrt2);
        f(b, a) = cxd(0, -inv_sqrt2);
        basis.push_back(std::move(f));
      }
    }
  return basis;
}

// Coordinates of a Hermitian matrix in the orthonormal basis above; the map
// is a Frobenius isometry.
inline RealVector hermvec(const Matrix& m) {
  const std::size_t d = m.rows();
  RealVector v(d * d);
  const double sqrt2 = std::sqrt(2.0);
  std::size_t k = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      if (a == b) {
        v[k++] = m(a, a).real();
      } else {
        v[k++] = sqrt2 * m(a, b).real();
        v[k++] = -sqrt2 * m(a, b).imag();
      }
    }
  return v;
}

inline Matrix unhermvec(const RealVector& v, std::size_t d) {
  Matrix m = Matrix::Zero(d, d);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::size_t k = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      if (a == b) {
        m(a, a) = v[k++];
      } else {
        const double re = v[k++] * inv_sqrt2;
        const double im = -v[k++] * inv_sqrt2;
        m(a, b) = cxd(re, im);
        m(b, a) = cxd(re, -im);
      }
    }
  return m;
}

// Partial traces of a matrix on a bipartite space d1 (x) d2.
inline Matrix ptrace_first(const Matrix& m, std::size_t d1, std::size_t d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (std::size_t a = 0; a < d1; ++a)
    out += m.block(a * d2, a * d2, d2, d2);
  return out;
}

inline Matrix ptrace_second(const Matrix& m, std::size_t d1, std::size_t d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d1; ++j) {
      cxd acc = 0;
      for (std::size_t b = 0; b < d2; ++b) acc += m(i * d2 + b, j * d2 + b);
      out(i, j) = acc;
    }
  return out;
}

inline Matrix kron_dense(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Corner embeddings on a 2d x 2d block [[TL, TR],[BL, BR]].
inline Matrix embed_tl(const Matrix& b, std::size_t d) {
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = b;
  return m;
}
inline Matrix embed_br(const Matrix& b, std::size_t d) {
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.bottomRightCorner(d, d) = b;
  return m;
}
// <G, W> = Re Tr X for W = [[.., X],[X^dagger, ..]].
inline Matrix re_tr_offdiag(std::size_t d) {
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topRightCorner(d, d) = 0.5 * Matrix::Identity(d, d);
  m.bottomLeftCorner(d, d) = 0.5 * Matrix::Identity(d, d);
  return m;
}

// --- problem description ---

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "?";
}

struct LinExpr {
  std::vector<std::pair<int, Matrix>> herm;      // complex Hermitian blocks
  std::vector<std::pair<int, RealMatrix>> sym;   // real symmetric blocks
  std::vector<std::pair<int, double>> sca;       // scalar blocks
  LinExpr& add(int block, Matrix coef) {
    herm.emplace_back(block, std::move(coef));
    return *this;
  }
  LinExpr& add_real(int block, RealMatrix coef) {
    sym.emplace_back(block, std::move(coef));
    return *this;
  }
  LinExpr& add_scalar(int block, double coef) {
    sca.emplace_back(block, coef);
    return *this;
  }
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 50000;
  double rho = 1.0;           // ADMM penalty (adapted during the run)
  double relaxation = 1.6;    // over-relaxation factor
  double infeas_threshold = 1e-6;
};

// Dense SDP over a product of PSD blocks with scalar linear constraints:
//   minimize sum_b <C_b, Z_b>  s.t.  <A_b, Z_b> (=, <=, >=) rhs,  Z_b PSD.
// Complex Hermitian blocks are embedded as real symmetric blocks
// [[X_re, -X_im],[X_im, X_re]] with the factor-2 trace correction.
class SdpProblem {
 public:
  enum class BlockKind { complex_herm, real_sym, scalar };

  struct Block {
    BlockKind kind;
    std::size_t dim;  // complex dim, real dim, or 1
  };

  struct Row {
    LinExpr expr;
    char sense;  // '=', '<', '>'
    double rhs;
  };

  int add_hermitian_block(std::size_t complex_dim) {
    blocks_.push_back({BlockKind::complex_herm, complex_dim});
    return static_cast<int>(blocks_.size() - 1);
  }
  int add_real_block(std::size_t dim) {
    blocks_.push_back({BlockKind::real_sym, dim});
    return static_cast<int>(blocks_.size() - 1);
  }
  int add_scalar_block() {
    blocks_.push_back({BlockKind::scalar, 1});
    return static_cast<int>(blocks_.size() - 1);
  }

  void add_objective(int block, const Matrix& c) { objective_.add(block, c); }
  void add_objective_real(int block, const RealMatrix& c) {
    objective_.add_real(block, c);
  }
  void add_objective_scalar(int block, double c) {
    objective_.add_scalar(block, c);
  }

  void add_eq(LinExpr e, double rhs) { rows_.push_back({std::move(e), '=', rhs}); }
  void add_le(LinExpr e, double rhs) { rows_.push_back({std::move(e), '<', rhs}); }
  void add_ge(LinExpr e, double rhs) { rows_.push_back({std::move(e), '>', rhs}); }

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Row>& rows() const { return rows_; }
  const LinExpr& objective() const { return objective_; }

 private:
  std::vector<Block> blocks_;
  std::vector<Row> rows_;
  LinExpr objective_;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::max_iter;
  double value = 0.0;
  double primal_residual = 0.0;
  double dual_gap = 0.0;
  int iterations = 0;
  double infeasibility_distance = 0.0;  // phase-1 distance (when computed)
  // Primal blocks, indexed like the problem's blocks.
  std::vector<Matrix> herm_blocks;
  std::vector<RealMatrix> real_blocks;
  std::vector<double> scalar_blocks;

  Matrix block(int b) const { return herm_blocks.at(b); }
  RealMatrix real_block(int b) const { return real_blocks.at(b); }
  double scalar(int b) const { return scalar_blocks.at(b); }
};

namespace detail {

struct BlockLayout {
  SdpProblem::BlockKind kind;
  std::size_t complex_dim;  // meaningful for complex_herm
  std::size_t n;            // real symmetric dimension
  std::size_t offset;       // svec offset
  std::size_t len;          // n(n+1)/2
};

inline std::size_t svec_len(std::size_t n) { return n * (n + 1) / 2; }

inline void svec_accumulate(const RealMatrix& m, double scale, std::size_t offset,
                            RealVector& out) {
  const std::size_t n = m.rows();
  const double sqrt2 = std::sqrt(2.0);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i, ++k)
      out[offset + k] += m(i, j) * (i == j ? 1.0 : sqrt2) * scale;
}

inline RealMatrix real_embed(const Matrix& c) {
  const std::size_t d = c.rows();
  RealMatrix r(2 * d, 2 * d);
  r.topLeftCorner(d, d) = c.real();
  r.bottomRightCorner(d, d) = c.real();
  r.topRightCorner(d, d) = -c.imag();
  r.bottomLeftCorner(d, d) = c.imag();
  return r;
}

inline Matrix real_unembed(const RealMatrix& r) {
  const std::size_t d = r.rows() / 2;
  Matrix c(d, d);
  c.real() = 0.5 * (r.topLeftCorner(d, d) + r.bottomRightCorner(d, d));
  c.imag() = 0.5 * (r.bottomLeftCorner(d, d) - r.topRightCorner(d, d));
  return c;
}

inline void unsvec_into(const RealVector& x, std::size_t offset, RealMatrix& m) {
  const std::size_t n = m.rows();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i, ++k) {
      const double v = x[offset + k];
      if (i == j) {
        m(i, j) = v;
      } else {
        m(i, j) = v * inv_sqrt2;
        m(j, i) = v * inv_sqrt2;
      }
    }
}

// Projection workspace for one block.
struct BlockWork {
  RealMatrix m;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es;
};

}  // namespace detail

// First-order operator-splitting solve: alternating projection onto the PSD
// cone and the affine constraint set with over-relaxation.  Deterministic
// given identical inputs.
inline SdpSolution solve(const SdpProblem& p, SdpOptions opt = {}) {
  using detail::BlockLayout;
  if (opt.tol <= 0) throw SdpError("solve: tol must be positive");

  // Block table: user blocks plus one scalar slack per inequality.
  std::vector<BlockLayout> blocks;
  std::size_t n_total = 0;
  auto push_block = [&](SdpProblem::BlockKind kind, std::size_t dim) {
    BlockLayout bl;
    bl.kind = kind;
    bl.complex_dim = dim;
    bl.n = (kind == SdpProblem::BlockKind::complex_herm) ? 2 * dim
          : (kind == SdpProblem::BlockKind::real_sym)    ? dim
                                                         : 1;
    bl.offset = n_total;
    bl.len = detail::svec_len(bl.n);
    n_total += bl.len;
    blocks.push_back(bl);
  };
  for (const auto& b : p.blocks()) push_block(b.kind, b.dim);
  const std::size_t n_user_blocks = blocks.size();
  std::vector<int> slack_of_row(p.rows().size(), -1);
  for (std::size_t r = 0; r < p.rows().size(); ++r)
    if (p.rows()[r].sense != '=') {
      slack_of_row[r] = static_cast<int>(blocks.size());
      push_block(SdpProblem::BlockKind::scalar, 1);
    }

  // Objective vector.
  RealVector c = RealVector::Zero(n_total);
  auto accumulate_expr = [&](const LinExpr& e, RealVector& out) {
    for (const auto& [b, coef] : e.herm) {
      if (blocks[b].kind != SdpProblem::BlockKind::complex_herm)
        throw SdpError("complex coefficient on non-complex block");
      detail::svec_accumulate(detail::real_embed(coef), 0.5, blocks[b].offset, out);
    }
    for (const auto& [b, coef] : e.sym) {
      if (blocks[b].kind != SdpProblem::BlockKind::real_sym)
        throw SdpError("real coefficient on non-real block");
      detail::svec_accumulate(coef, 1.0, blocks[b].offset, out);
    }
    for (const auto& [b, coef] : e.sca) {
      if (blocks[b].kind != SdpProblem::BlockKind::scalar)
        throw SdpError("scalar coefficient on non-scalar block");
      out[blocks[b].offset] += coef;
    }
  };
  accumulate_expr(p.objective(), c);

  // Constraint matrix (row-normalized) as equalities; '<' rows gain +slack,
  // '>' rows gain -slack.
  const std::size_t m_rows = p.rows().size();
  std::vector<Eigen::Triplet<double>> trips;
  RealVector b_rhs = RealVector::Zero(m_rows);
  {
    RealVector rowbuf = RealVector::Zero(n_total);
    for (std::size_t r = 0; r < m_rows; ++r) {
      const auto& row = p.rows()[r];
      rowbuf.setZero();
      accumulate_expr(row.expr, rowbuf);
      if (slack_of_row[r] >= 0)
        rowbuf[blocks[slack_of_row[r]].offset] += (row.sense == '<') ? 1.0 : -1.0;
      double norm = rowbuf.norm();
      if (norm < 1e-300) norm = 1.0;
      for (std::size_t k = 0; k < n_total; ++k)
        if (rowbuf[k] != 0.0)
          trips.emplace_back(static_cast<int>(r), static_cast<int>(k),
                             rowbuf[k] / norm);
      b_rhs[r] = row.rhs / norm;
    }
  }
  Eigen::SparseMatrix<double> A(m_rows, n_total);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseMatrix<double> At = A.transpose();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kkt;
  if (m_rows > 0) {
    Eigen::SparseMatrix<double> aat = (A * At).pruned();
    double diag_max = 0.0;
    for (std::size_t r = 0; r < m_rows; ++r)
      diag_max = std::max(diag_max, aat.coeff(r, r));
    Eigen::SparseMatrix<double> reg(m_rows, m_rows);
    reg.setIdentity();
    aat += (1e-12 * (1.0 + diag_max)) * reg;
    kkt.compute(aat);
    if (kkt.info() != Eigen::Success)
      throw SdpError("solve: failed to factor constraint Gram matrix");
  }

  auto project_affine = [&](const RealVector& v, RealVector& out, RealVector& mu) {
    if (m_rows == 0) {
      out = v;
      mu.setZero();
      return;
    }
    mu = kkt.solve(A * v - b_rhs);
    out = v - At * mu;
  };

  // PSD cone projection per block, with a fast path for (numerically)
  // diagonal blocks and re-symmetrization of complex embeddings.
  std::vector<detail::BlockWork> work(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    work[b].m.resize(blocks[b].n, blocks[b].n);

  auto project_cone = [&](RealVector& x) {
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto& bl = blocks[bi];
      if (bl.n == 1) {
        x[bl.offset] = std::max(x[bl.offset], 0.0);
        continue;
      }
      RealMatrix& m = work[bi].m;
      detail::unsvec_into(x, bl.offset, m);
      if (bl.kind == SdpProblem::BlockKind::complex_herm) {
        // Average with J m J^T to stay exactly in the embedded subspace.
        const std::size_t d = bl.complex_dim;
        RealMatrix tl = 0.5 * (m.topLeftCorner(d, d) + m.bottomRightCorner(d, d));
        RealMatrix tr = 0.5 * (m.topRightCorner(d, d) - m.bottomLeftCorner(d, d));
        m.topLeftCorner(d, d) = tl;
        m.bottomRightCorner(d, d) = tl;
        m.topRightCorner(d, d) = tr;
        m.bottomLeftCorner(d, d) = -tr;
      }
      double offdiag = 0.0, diagscale = 0.0;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        diagscale = std::max(diagscale, std::abs(m(i, i)));
        for (Eigen::Index j = 0; j < i; ++j)
          offdiag = std::max(offdiag, std::abs(m(i, j)));
      }
      if (offdiag <= 1e-14 * (1.0 + diagscale)) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          for (Eigen::Index j = 0; j < i; ++j) m(i, j) = m(j, i) = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          m(i, i) = std::max(m(i, i), 0.0);
      } else {
        auto& es = work[bi].es;
        es.compute(m);
        RealVector lam = es.eigenvalues().cwiseMax(0.0);
        m = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      }
      std::size_t k = 0;
      const double sqrt2 = std::sqrt(2.0);
      for (std::size_t j = 0; j < bl.n; ++j)
        for (std::size_t i = j; i < bl.n; ++i, ++k)
          x[bl.offset + k] = m(i, j) * (i == j ? 1.0 : sqrt2);
    }
  };

  RealVector x = RealVector::Zero(n_total), z = RealVector::Zero(n_total),
             u = RealVector::Zero(n_total), v(n_total),
             mu = RealVector::Zero(m_rows), z_prev(n_total), w(n_total),
             y = RealVector::Zero(m_rows);
  double rho = opt.rho;
  SdpSolution sol;

  auto finish = [&](SolveStatus status, int iters) {
    sol.status = status;
    sol.iterations = iters;
    sol.value = c.dot(z);
    sol.primal_residual = (m_rows > 0) ? (A * z - b_rhs).norm() / (1.0 + b_rhs.norm()) : 0.0;
    sol.dual_gap = c.dot(z) - b_rhs.dot(y);
    sol.herm_blocks.resize(n_user_blocks);
    sol.real_blocks.resize(n_user_blocks);
    sol.scalar_blocks.assign(n_user_blocks, 0.0);
    for (std::size_t bi = 0; bi < n_user_blocks; ++bi) {
      const auto& bl = blocks[bi];
      RealMatrix m(bl.n, bl.n);
      detail::unsvec_into(z, bl.offset, m);
      switch (bl.kind) {
        case SdpProblem::BlockKind::complex_herm:
          sol.herm_blocks[bi] = detail::real_unembed(m);
          break;
        case SdpProblem::BlockKind::real_sym:
          sol.real_blocks[bi] = m;
          break;
        case SdpProblem::BlockKind::scalar:
          sol.scalar_blocks[bi] = m(0, 0);
          break;
      }
    }
    return sol;
  };

  // Phase-1 residual minimization: plain alternating projections between the
  // affine set and the cone; the limiting gap estimates the distance between
  // the two sets.
  auto phase1_distance = [&]() {
    RealVector wz = RealVector::Zero(n_total), pa(n_total), dummy(m_rows);
    double dist = 0.0, prev = -1.0;
    int stable = 0;
    const int budget = 20000;  // runs to its own stability, not opt.max_iter
    for (int it = 0; it < budget; ++it) {
      project_affine(wz, pa, dummy);
      wz = pa;
      project_cone(wz);
      dist = (pa - wz).norm();
      if (prev >= 0.0 && std::abs(dist - prev) <= 1e-13 * (1.0 + dist)) {
        if (++stable > 20) break;
      } else {
        stable = 0;
      }
      prev = dist;
    }
    return dist;
  };

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    v = z - u - c / rho;
    project_affine(v, x, mu);
    y = -rho * mu;
    z_prev = z;
    w = opt.relaxation * x + (1.0 - opt.relaxation) * z + u;
    z = w;
    project_cone(z);
    u = w - z;

    const double pr =
        (m_rows > 0) ? (A * z - b_rhs).norm() / (1.0 + b_rhs.norm()) : 0.0;
    const double dr = rho * (z - z_prev).norm() / (1.0 + rho * u.norm());
    const double obj = c.dot(z);
    const double dobj = b_rhs.dot(y);
    const double gap = std::abs(obj - dobj) / (1.0 + std::abs(obj) + std::abs(dobj));
    if (pr <= opt.tol && dr <= opt.tol && gap <= 10.0 * opt.tol)
      return finish(SolveStatus::optimal, it + 1);

    if (z.norm() > 1e12 || (obj < -1e8 * (1.0 + b_rhs.norm()) && pr <= 1e-4))
      return finish(SolveStatus::unbounded, it + 1);
    if (rho * u.norm() > 1e10) break;  // diverging: likely infeasible

    if ((it + 1) % 100 == 0) {
      if (pr > 10.0 * dr && rho < 1e6) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dr > 10.0 * pr && rho > 1e-6) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }

  const double dist = phase1_distance();
  sol.infeasibility_distance = dist;
  if (dist > opt.infeas_threshold) return finish(SolveStatus::infeasible, it);
  return finish(SolveStatus::max_iter, it);
}

// --- fidelity epigraph bundle ---
//
// A PSD block W = [[r, X],[X^dagger, s]] whose off-diagonal trace
// Re Tr X, maximized over X, equals F(r, s).

struct FidelityEpigraph {
  int w_block = -1;
  std::size_t d = 0;
  Matrix re_tr_x;  // coefficient with <re_tr_x, W> = Re Tr X
};

inline FidelityEpigraph add_fidelity_epigraph(SdpProblem& p, std::size_t d) {
  FidelityEpigraph e;
  e.w_block = p.add_hermitian_block(2 * d);
  e.d = d;
  e.re_tr_x = re_tr_offdiag(d);
  return e;
}

// Pin a Hermitian corner of the epigraph block to a fixed matrix.
inline void fix_corner(SdpProblem& p, const FidelityEpigraph& e, bool top_left,
                       const Matrix& value) {
  for (const auto& bk : hermitian_basis(e.d)) {
    const Matrix coef = top_left ? embed_tl(bk, e.d) : embed_br(bk, e.d);
    p.add_eq(LinExpr{}.add(e.w_block, coef), (bk * value).trace().real());
  }
}

// Tie the bottom-right corner to omega (x) u_fixed with omega a variable
// block on the first factor.
inline void tie_corner_br_kron(SdpProblem& p, const FidelityEpigraph& e,
                               int omega_block, std::size_t d_omega,
                               const Matrix& u_fixed) {
  const std::size_t d_u = u_fixed.rows();
  if (d_omega * d_u != e.d) throw SdpError("epigraph corner dimension mismatch");
  Matrix iu = Matrix::Identity(d_omega, d_omega);
  for (const auto& bk : hermitian_basis(e.d)) {
    // <B_k, omega (x) u> = <ptrace_2[(I (x) u) B_k], omega>
    Matrix weighted = kron_dense(iu, u_fixed) * bk;
    Matrix adj = ptrace_second(weighted, d_omega, d_u);
    p.add_eq(LinExpr{}
                 .add(e.w_block, embed_br(bk, e.d))
                 .add(omega_block, -0.5 * (adj + adj.adjoint().eval())),
             0.0);
  }
}

}  // namespace convlab::sdp
