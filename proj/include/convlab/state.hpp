#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "convlab/core.hpp"
#include "convlab/layout.hpp"

namespace convlab {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPureNormTol = 1e-12;
inline constexpr double kRankTol = 1e-12;

// Hermitian eigendecomposition is the single numerical kernel; matrix
// functions below go through it.
inline Eigen::SelfAdjointEigenSolver<Matrix> herm_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw StateError("Hermitian eigendecomposition failed");
  return es;
}

// PSD square root with eigenvalues clipped at -1e-10 before the sqrt.
inline Matrix mat_sqrt_psd(const Matrix& m) {
  auto es = herm_eig(m);
  RealVector lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -kPsdTol)
      throw StateError("matrix is not PSD within tolerance (eigenvalue " +
                       std::to_string(lam[i]) + ")");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Trace norm of a Hermitian matrix.
inline double trace_norm_herm(const Matrix& m) {
  return herm_eig(m).eigenvalues().cwiseAbs().sum();
}

namespace detail {

// Composite-index arithmetic for labeled tensor legs.  `positions` selects
// subsystems (in the order given); the result maps each composite value of
// the selected legs to its contribution to the flat row-major index.
inline std::vector<std::size_t> index_bases(const SystemLayout& layout,
                                            const std::vector<std::size_t>& positions) {
  const auto strides = layout.strides();
  std::size_t count = 1;
  for (auto p : positions) count *= layout.subsystems()[p].dim;
  std::vector<std::size_t> base(count, 0);
  for (std::size_t v = 0; v < count; ++v) {
    std::size_t rem = v;
    for (std::size_t k = positions.size(); k-- > 0;) {
      const std::size_t d = layout.subsystems()[positions[k]].dim;
      base[v] += (rem % d) * strides[positions[k]];
      rem /= d;
    }
  }
  return base;
}

inline std::vector<std::size_t> positions_of(const SystemLayout& layout,
                                             const std::vector<std::string>& labels) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) pos.push_back(layout.index_of(l));
  return pos;
}

}  // namespace detail

class PureState;

// A possibly sub-normalized PSD operator on a labeled tensor product.
class DensityState {
 public:
  DensityState(SystemLayout layout, Matrix matrix)
      : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(layout_.total_dim());
    if (layout_.total_dim() > dim_cap())
      throw DimensionCapError("state dimension " + std::to_string(layout_.total_dim()) +
                              " exceeds cap " + std::to_string(dim_cap()));
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw StateError("matrix size does not match layout dimension");
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw StateError("matrix is not Hermitian");
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint().eval());
    const double min_eig = herm_eig(matrix_).eigenvalues().minCoeff();
    if (min_eig < -kPsdTol)
      throw StateError("state rejected: eigenvalue " + std::to_string(min_eig) +
                       " below -1e-10");
    const double tr = matrix_.trace().real();
    if (tr <= 0.0) throw StateError("state has non-positive trace");
    if (tr > 1.0 + kTraceTol)
      throw StateError("state trace " + std::to_string(tr) + " exceeds 1");
    normalization_ = std::min(tr, 1.0);
  }

  const SystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }
  double normalization() const { return normalization_; }
  double trace() const { return matrix_.trace().real(); }
  bool is_normalized(double tol = kTraceTol) const {
    return std::abs(trace() - 1.0) <= tol;
  }

 private:
  SystemLayout layout_;
  Matrix matrix_;
  double normalization_ = 1.0;
};

class PureState {
 public:
  PureState(SystemLayout layout, Vector amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != static_cast<Eigen::Index>(layout_.total_dim()))
      throw StateError("amplitude size does not match layout dimension");
    if (std::abs(amplitudes_.norm() - 1.0) > kPureNormTol)
      throw StateError("pure state is not normalized");
  }

  const SystemLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }

  DensityState to_density() const {
    return DensityState(layout_, amplitudes_ * amplitudes_.adjoint());
  }

 private:
  SystemLayout layout_;
  Vector amplitudes_;
};

inline DensityState tensor_product(const DensityState& a, const DensityState& b) {
  SystemLayout layout = concat(a.layout(), b.layout());
  const auto da = a.matrix().rows(), db = b.matrix().rows();
  Matrix m(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return DensityState(std::move(layout), std::move(m));
}

inline PureState tensor_product(const PureState& a, const PureState& b) {
  SystemLayout layout = concat(a.layout(), b.layout());
  const auto da = a.amplitudes().size(), db = b.amplitudes().size();
  Vector v(da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    v.segment(i * db, db) = a.amplitudes()[i] * b.amplitudes();
  return PureState(std::move(layout), std::move(v));
}

namespace detail {

struct TraceSplit {
  std::vector<std::size_t> keep_pos, trace_pos;
  std::vector<std::size_t> keep_base, trace_base;
  SystemLayout out_layout;
};

inline TraceSplit trace_split(const SystemLayout& layout,
                              const std::vector<std::string>& keep) {
  if (keep.empty()) throw LayoutError("partial_trace: empty keep set");
  for (const auto& l : keep) (void)layout.index_of(l);
  TraceSplit s;
  std::vector<Subsystem> kept;
  for (std::size_t p = 0; p < layout.size(); ++p) {
    const auto& sub = layout.subsystems()[p];
    if (std::find(keep.begin(), keep.end(), sub.label) != keep.end()) {
      s.keep_pos.push_back(p);
      kept.push_back(sub);
    } else {
      s.trace_pos.push_back(p);
    }
  }
  s.keep_base = index_bases(layout, s.keep_pos);
  s.trace_base = index_bases(layout, s.trace_pos);
  s.out_layout = SystemLayout(std::move(kept));
  return s;
}

}  // namespace detail

// Trace out all subsystems not in `keep`; kept legs retain their original
// relative order.
inline DensityState partial_trace(const DensityState& s,
                                  const std::vector<std::string>& keep) {
  auto split = detail::trace_split(s.layout(), keep);
  const std::size_t dk = split.keep_base.size(), dt = split.trace_base.size();
  Matrix out = Matrix::Zero(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cxd acc = 0;
      for (std::size_t t = 0; t < dt; ++t)
        acc += s.matrix()(split.keep_base[i] + split.trace_base[t],
                          split.keep_base[j] + split.trace_base[t]);
      out(i, j) = acc;
    }
  return DensityState(split.out_layout, std::move(out));
}

// Reduction of a pure state without materializing its full density matrix.
inline DensityState partial_trace(const PureState& s,
                                  const std::vector<std::string>& keep) {
  auto split = detail::trace_split(s.layout(), keep);
  const std::size_t dk = split.keep_base.size(), dt = split.trace_base.size();
  Matrix out = Matrix::Zero(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      cxd acc = 0;
      for (std::size_t t = 0; t < dt; ++t)
        acc += s.amplitudes()[split.keep_base[i] + split.trace_base[t]] *
               std::conj(s.amplitudes()[split.keep_base[j] + split.trace_base[t]]);
      out(i, j) = acc;
      out(j, i) = std::conj(acc);
    }
  return DensityState(split.out_layout, std::move(out));
}

namespace detail {

inline std::vector<std::size_t> permutation_map(const SystemLayout& layout,
                                                const std::vector<std::string>& order) {
  if (order.size() != layout.size())
    throw LayoutError("permutation must list every subsystem label");
  const auto pos = positions_of(layout, order);
  {
    auto sorted = pos;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if (sorted[k] != k) throw LayoutError("permutation repeats a label");
  }
  const auto strides = layout.strides();
  const std::size_t total = layout.total_dim();
  // map[new_index] = old_index
  std::vector<std::size_t> map(total, 0);
  std::vector<std::size_t> dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    dims[k] = layout.subsystems()[pos[k]].dim;
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t rem = v, old = 0;
    for (std::size_t k = order.size(); k-- > 0;) {
      old += (rem % dims[k]) * strides[pos[k]];
      rem /= dims[k];
    }
    map[v] = old;
  }
  return map;
}

inline SystemLayout permuted_layout(const SystemLayout& layout,
                                    const std::vector<std::string>& order) {
  std::vector<Subsystem> subs;
  subs.reserve(order.size());
  for (const auto& l : order)
    subs.push_back(layout.subsystems()[layout.index_of(l)]);
  return SystemLayout(std::move(subs));
}

}  // namespace detail

inline DensityState permute_subsystems(const DensityState& s,
                                       const std::vector<std::string>& order) {
  const auto map = detail::permutation_map(s.layout(), order);
  Matrix out(map.size(), map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < map.size(); ++j)
      out(i, j) = s.matrix()(map[i], map[j]);
  return DensityState(detail::permuted_layout(s.layout(), order), std::move(out));
}

inline PureState permute_subsystems(const PureState& s,
                                    const std::vector<std::string>& order) {
  const auto map = detail::permutation_map(s.layout(), order);
  Vector out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = s.amplitudes()[map[i]];
  return PureState(detail::permuted_layout(s.layout(), order), std::move(out));
}

// Canonical purification from the eigendecomposition; the purifying leg has
// dimension rank(s) and is appended after the existing subsystems.
inline PureState purify(const DensityState& s, const std::string& new_label) {
  if (!s.is_normalized())
    throw StateError("purify requires a normalized state");
  if (s.layout().has_label(new_label))
    throw LayoutError("purifier label '" + new_label + "' already in layout");
  auto es = herm_eig(s.matrix());
  const auto d = es.eigenvalues().size();
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return es.eigenvalues()[a] > es.eigenvalues()[b];
  });
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(d) &&
         es.eigenvalues()[order[rank]] > kRankTol)
    ++rank;
  if (rank == 0) throw StateError("purify: state has numerical rank 0");
  Vector amps = Vector::Zero(d * static_cast<Eigen::Index>(rank));
  for (std::size_t c = 0; c < rank; ++c) {
    const double w = std::sqrt(es.eigenvalues()[order[c]]);
    for (Eigen::Index i = 0; i < d; ++i)
      amps[i * rank + c] = w * es.eigenvectors()(i, order[c]);
  }
  amps /= amps.norm();
  SystemLayout layout = concat(
      s.layout(), SystemLayout({{new_label, rank}}));
  return PureState(std::move(layout), std::move(amps));
}

namespace detail {

// Shared machinery for applying a (possibly rectangular) operator V to an
// ordered group of legs: permutes the targets to the front, forms V (x) I on
// the rest, and replaces the group with `replacement` legs.
struct OpPlan {
  std::vector<std::string> front_order;
  SystemLayout out_layout;
  std::size_t d_rest;
};

inline OpPlan op_plan(const SystemLayout& layout,
                      const std::vector<std::string>& targets,
                      const std::vector<Subsystem>& replacement,
                      Eigen::Index v_rows, Eigen::Index v_cols) {
  OpPlan plan;
  std::size_t d_in = 1;
  for (const auto& t : targets) d_in *= layout.dim_of(t);
  if (static_cast<Eigen::Index>(d_in) != v_cols)
    throw ChannelError("operator input dimension mismatch");
  std::size_t d_out = 1;
  for (const auto& r : replacement) d_out *= r.dim;
  if (static_cast<Eigen::Index>(d_out) != v_rows)
    throw ChannelError("operator output dimension mismatch");
  plan.front_order = targets;
  std::vector<Subsystem> rest;
  for (const auto& sub : layout.subsystems())
    if (std::find(targets.begin(), targets.end(), sub.label) == targets.end()) {
      plan.front_order.push_back(sub.label);
      rest.push_back(sub);
    }
  plan.d_rest = 1;
  for (const auto& r : rest) plan.d_rest *= r.dim;
  std::vector<Subsystem> out_subs = replacement;
  for (auto& r : rest) out_subs.push_back(r);
  plan.out_layout = SystemLayout(std::move(out_subs));
  return plan;
}

inline Matrix extend_right(const Matrix& v, std::size_t d_rest) {
  Matrix full = Matrix::Zero(v.rows() * d_rest, v.cols() * d_rest);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (v(i, j) != cxd(0, 0))
        for (std::size_t r = 0; r < d_rest; ++r)
          full(i * d_rest + r, j * d_rest + r) = v(i, j);
  return full;
}

}  // namespace detail

// rho -> (V (x) I) rho (V (x) I)^dagger on the given leg group; the group is
// replaced by `replacement` legs at the front of the layout.
inline DensityState apply_operator(const DensityState& s, const Matrix& v,
                                   const std::vector<std::string>& targets,
                                   const std::vector<Subsystem>& replacement) {
  auto plan = detail::op_plan(s.layout(), targets, replacement, v.rows(), v.cols());
  DensityState p = permute_subsystems(s, plan.front_order);
  Matrix full = detail::extend_right(v, plan.d_rest);
  Matrix out = full * p.matrix() * full.adjoint();
  return DensityState(plan.out_layout, std::move(out));
}

// Isometry application to a pure state (norm preserved).
inline PureState apply_operator(const PureState& s, const Matrix& v,
                                const std::vector<std::string>& targets,
                                const std::vector<Subsystem>& replacement) {
  auto plan = detail::op_plan(s.layout(), targets, replacement, v.rows(), v.cols());
  PureState p = permute_subsystems(s, plan.front_order);
  const std::size_t d_rest = plan.d_rest;
  Vector out = Vector::Zero(v.rows() * static_cast<Eigen::Index>(d_rest));
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const cxd w = v(i, j);
      if (w == cxd(0, 0)) continue;
      for (std::size_t r = 0; r < d_rest; ++r)
        out[i * d_rest + r] += w * p.amplitudes()[j * d_rest + r];
    }
  out /= out.norm();
  return PureState(plan.out_layout, std::move(out));
}

// Common constructions.
inline DensityState maximally_mixed(const std::string& label, std::size_t dim) {
  return DensityState(SystemLayout({{label, dim}}),
                      Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

inline PureState basis_state(const std::string& label, std::size_t dim,
                             std::size_t k) {
  Vector v = Vector::Zero(dim);
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return PureState(SystemLayout({{label, dim}}), std::move(v));
}

// (1/sqrt(N)) sum_i |ii> on two labeled legs of equal dimension.
inline PureState maximally_entangled(const std::string& label_a,
                                     const std::string& label_b, std::size_t n) {
  Vector v = Vector::Zero(n * n);
  for (std::size_t i = 0; i < n; ++i)
    v[i * n + i] = 1.0 / std::sqrt(static_cast<double>(n));
  return PureState(SystemLayout({{label_a, n}, {label_b, n}}), std::move(v));
}

inline PureState random_pure(const SystemLayout& layout, Rng& rng) {
  Vector v(layout.total_dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian_complex();
  v /= v.norm();
  return PureState(layout, std::move(v));
}

// Random normalized mixed state (full rank almost surely): the reduction of
// a random pure state on layout (x) ancilla of equal dimension.
inline DensityState random_mixed(const SystemLayout& layout, Rng& rng) {
  SystemLayout big = concat(layout, SystemLayout({{"#anc", layout.total_dim()}}));
  PureState psi = random_pure(big, rng);
  return partial_trace(psi, layout.labels());
}

}  // namespace convlab
