#pragma once

#include <string>
#include <vector>

#include "convlab/distances.hpp"
#include "convlab/sdp.hpp"

namespace convlab {

// All entropies are in bits.

struct EntropyRequest {
  DensityState state;
  std::string target;
  std::vector<std::string> conditioning;
  double eps = 0.0;

  EntropyRequest(DensityState s, std::string a, std::vector<std::string> b,
                 double e = 0.0)
      : state(std::move(s)), target(std::move(a)), conditioning(std::move(b)),
        eps(e) {
    (void)state.layout().index_of(target);
    for (const auto& l : conditioning) {
      (void)state.layout().index_of(l);
      if (l == target)
        throw LayoutError("target label appears in the conditioning set");
    }
    if (eps < 0.0 || eps >= 1.0)
      throw DomainError("smoothing parameter must lie in [0, 1)");
  }
};

inline double von_neumann(const DensityState& s) {
  if (!s.is_normalized())
    throw StateError("von_neumann requires a normalized state");
  auto es = herm_eig(s.matrix());
  double out = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-12) out -= p * std::log2(p);
  }
  return out;
}

inline double conditional_entropy(const DensityState& s, const std::string& a,
                                  const std::vector<std::string>& b) {
  std::vector<std::string> ab = b;
  ab.insert(ab.begin(), a);
  const double s_ab = von_neumann(partial_trace(s, ab));
  const double s_b = b.empty() ? 0.0 : von_neumann(partial_trace(s, b));
  return s_ab - s_b;
}

inline double coherent_information(const DensityState& s, const std::string& a,
                                   const std::vector<std::string>& b) {
  return -conditional_entropy(s, a, b);
}

namespace detail {

struct Bipartite {
  Matrix rho;
  std::size_t da, db;
  double trace;
};

// Reduce to target + conditioning and permute to [target, conditioning...].
inline Bipartite reduce_bipartite(const DensityState& s, const std::string& a,
                                  const std::vector<std::string>& b) {
  EntropyRequest check(s, a, b);  // validates labels
  std::vector<std::string> keep = {a};
  keep.insert(keep.end(), b.begin(), b.end());
  DensityState red = permute_subsystems(partial_trace(s, keep), keep);
  Bipartite out{red.matrix(), s.layout().dim_of(a), 1, red.trace()};
  out.db = red.layout().total_dim() / out.da;
  return out;
}

inline double require_optimal(const sdp::SdpSolution& sol, const char* what) {
  if (sol.status != sdp::SolveStatus::optimal)
    throw SdpError(std::string(what) + " SDP did not converge (status " +
                   sdp::to_string(sol.status) + ")");
  return sol.value;
}

// min Tr sigma  s.t.  I (x) sigma >= rho.  Returns the SDP optimum.
inline double hmin_optimum(const Matrix& rho, std::size_t da, std::size_t db,
                           const sdp::SdpOptions& opt) {
  sdp::SdpProblem p;
  const int sigma = p.add_hermitian_block(db);
  const int slack = p.add_hermitian_block(da * db);
  for (const auto& bk : sdp::hermitian_basis(da * db))
    p.add_eq(sdp::LinExpr{}
                 .add(slack, bk)
                 .add(sigma, -sdp::ptrace_first(bk, da, db)),
             -(bk * rho).trace().real());
  p.add_objective(sigma, Matrix::Identity(db, db));
  return require_optimal(sdp::solve(p, opt), "h_min");
}

// Joint smoothing SDP: min Tr sigma over sub-normalized rho' with
// F(rho', rho) >= sqrt(1 - eps^2) and rho' <= I (x) sigma.  Since the
// reference state is normalized the generalized fidelity reduces to the
// plain fidelity epigraph.
inline double hmin_smooth_optimum(const Matrix& rho, std::size_t da,
                                  std::size_t db, double eps,
                                  const sdp::SdpOptions& opt) {
  const std::size_t d = da * db;
  sdp::SdpProblem p;
  auto epi = sdp::add_fidelity_epigraph(p, d);  // TL = rho', BR = rho
  sdp::fix_corner(p, epi, false, rho);
  const int sigma = p.add_hermitian_block(db);
  const int slack = p.add_hermitian_block(d);
  for (const auto& bk : sdp::hermitian_basis(d))
    p.add_eq(sdp::LinExpr{}
                 .add(slack, bk)
                 .add(epi.w_block, sdp::embed_tl(bk, d))
                 .add(sigma, -sdp::ptrace_first(bk, da, db)),
             0.0);
  p.add_le(sdp::LinExpr{}.add(epi.w_block,
                              sdp::embed_tl(Matrix::Identity(d, d), d)),
           1.0);
  p.add_ge(sdp::LinExpr{}.add(epi.w_block, epi.re_tr_x),
           std::sqrt(std::max(0.0, 1.0 - eps * eps)));
  p.add_objective(sigma, Matrix::Identity(db, db));
  return require_optimal(sdp::solve(p, opt), "h_min_smooth");
}

inline std::string fresh_label(const SystemLayout& l,
                               const std::string& base = "#purifier") {
  if (!l.has_label(base)) return base;
  for (int k = 2;; ++k) {
    std::string cand = base + std::to_string(k);
    if (!l.has_label(cand)) return cand;
  }
}

}  // namespace detail

inline double h_min(const DensityState& s, const std::string& a,
                    const std::vector<std::string>& b,
                    const sdp::SdpOptions& opt = {}) {
  auto bi = detail::reduce_bipartite(s, a, b);
  const double v = detail::hmin_optimum(bi.rho, bi.da, bi.db, opt);
  return -std::log2(std::max(v, 1e-300));
}

inline double h_min_smooth(const DensityState& s, const std::string& a,
                           const std::vector<std::string>& b, double eps,
                           const sdp::SdpOptions& opt = {}) {
  if (eps < 0.0 || eps >= 1.0)
    throw DomainError("smoothing parameter must lie in [0, 1)");
  if (!s.is_normalized())
    throw StateError("h_min_smooth requires a normalized state");
  auto bi = detail::reduce_bipartite(s, a, b);
  const double v = detail::hmin_smooth_optimum(bi.rho, bi.da, bi.db, eps, opt);
  return -std::log2(std::max(v, 1e-300));
}

// H_max(A|B) = -H_min(A|C) on a canonical purification with a fresh leg.
inline double h_max(const DensityState& s, const std::string& a,
                    const std::vector<std::string>& b,
                    const sdp::SdpOptions& opt = {}) {
  if (!s.is_normalized())
    throw StateError("h_max requires a normalized state");
  std::vector<std::string> keep = {a};
  keep.insert(keep.end(), b.begin(), b.end());
  DensityState red = partial_trace(s, keep);
  const std::string c = detail::fresh_label(red.layout());
  PureState psi = purify(red, c);
  DensityState ac = partial_trace(psi, {a, c});
  return -h_min(ac, a, {c}, opt);
}

inline double h_max_smooth(const DensityState& s, const std::string& a,
                           const std::vector<std::string>& b, double eps,
                           const sdp::SdpOptions& opt = {}) {
  if (!s.is_normalized())
    throw StateError("h_max_smooth requires a normalized state");
  std::vector<std::string> keep = {a};
  keep.insert(keep.end(), b.begin(), b.end());
  DensityState red = partial_trace(s, keep);
  const std::string c = detail::fresh_label(red.layout());
  PureState psi = purify(red, c);
  DensityState ac = partial_trace(psi, {a, c});
  return -h_min_smooth(ac, a, {c}, eps, opt);
}

}  // namespace convlab
