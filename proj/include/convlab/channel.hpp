#pragma once

#include <string>
#include <vector>

#include "convlab/state.hpp"

namespace convlab {

inline constexpr double kTpTol = 1e-9;
inline constexpr double kCpTol = 1e-9;
inline constexpr double kIsoTol = 1e-10;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// CPTP map stored as a Kraus set.  env_dim is the number of Kraus operators.
class QuantumChannel {
 public:
  QuantumChannel(std::size_t in_dim, std::size_t out_dim,
                 std::vector<Matrix> kraus)
      : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
    if (in_dim_ < 1 || out_dim_ < 1) throw ChannelError("channel dimension 0");
    if (in_dim_ > dim_cap() || out_dim_ > dim_cap())
      throw DimensionCapError("channel dimension exceeds cap");
    if (kraus_.empty()) throw ChannelError("channel needs at least one Kraus operator");
    Matrix acc = Matrix::Zero(in_dim_, in_dim_);
    for (const auto& k : kraus_) {
      if (k.rows() != static_cast<Eigen::Index>(out_dim_) ||
          k.cols() != static_cast<Eigen::Index>(in_dim_))
        throw ChannelError("Kraus operator shape mismatch");
      acc += k.adjoint() * k;
    }
    if ((acc - Matrix::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff() > kTpTol)
      throw ChannelError("Kraus set is not trace-preserving within 1e-9");
  }

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  std::size_t env_dim() const { return kraus_.size(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(out_dim_, out_dim_);
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
  }

 private:
  std::size_t in_dim_, out_dim_;
  std::vector<Matrix> kraus_;
};

// --- channel zoo ---

inline QuantumChannel identity_channel(std::size_t d) {
  return QuantumChannel(d, d, {Matrix::Identity(d, d)});
}

// Output space = input space (+) one flag dimension (flag = last basis
// state), Kraus set {sqrt(1-p) embed, sqrt(p) |flag><i|}.
inline QuantumChannel erasure_channel(double p, std::size_t d = 2) {
  if (p < 0.0 || p > 1.0) throw ChannelError("erasure parameter outside [0,1]");
  std::vector<Matrix> kraus;
  Matrix embed = Matrix::Zero(d + 1, d);
  embed.topRows(d) = Matrix::Identity(d, d);
  kraus.push_back(std::sqrt(1.0 - p) * embed);
  for (std::size_t i = 0; i < d; ++i) {
    Matrix k = Matrix::Zero(d + 1, d);
    k(d, i) = std::sqrt(p);
    kraus.push_back(k);
  }
  return QuantumChannel(d, d + 1, std::move(kraus));
}

// rho -> (1-p) rho + p I/2 on a qubit.
inline QuantumChannel depolarizing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw ChannelError("depolarizing parameter outside [0,1]");
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cxd(0, -1), cxd(0, 1), 0;
  z << 1, 0, 0, -1;
  std::vector<Matrix> kraus;
  kraus.push_back(std::sqrt(1.0 - 0.75 * p) * Matrix::Identity(2, 2));
  kraus.push_back(std::sqrt(0.25 * p) * x);
  kraus.push_back(std::sqrt(0.25 * p) * y);
  kraus.push_back(std::sqrt(0.25 * p) * z);
  return QuantumChannel(2, 2, std::move(kraus));
}

// g is the decay probability |1> -> |0>.
inline QuantumChannel amplitude_damping_channel(double g) {
  if (g < 0.0 || g > 1.0) throw ChannelError("damping parameter outside [0,1]");
  Matrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  return QuantumChannel(2, 2, {k0, k1});
}

inline QuantumChannel channel_from_kraus(std::size_t in_dim, std::size_t out_dim,
                                         std::vector<Matrix> kraus) {
  return QuantumChannel(in_dim, out_dim, std::move(kraus));
}

// --- representations ---

// Choi operator on out (x) in: J = sum_{ij} N(E_ij) (x) E_ij.
struct ChoiMatrix {
  std::size_t in_dim = 0, out_dim = 0;
  Matrix matrix;
};

inline ChoiMatrix to_choi(const QuantumChannel& c) {
  const auto d = c.out_dim() * c.in_dim();
  Matrix j = Matrix::Zero(d, d);
  for (const auto& k : c.kraus()) {
    Vector v(d);
    for (std::size_t b = 0; b < c.out_dim(); ++b)
      for (std::size_t a = 0; a < c.in_dim(); ++a)
        v[b * c.in_dim() + a] = k(b, a);
    j += v * v.adjoint();
  }
  return ChoiMatrix{c.in_dim(), c.out_dim(), std::move(j)};
}

inline Matrix choi_trace_out(const ChoiMatrix& j) {
  Matrix t = Matrix::Zero(j.in_dim, j.in_dim);
  for (std::size_t a = 0; a < j.in_dim; ++a)
    for (std::size_t a2 = 0; a2 < j.in_dim; ++a2)
      for (std::size_t b = 0; b < j.out_dim; ++b)
        t(a, a2) += j.matrix(b * j.in_dim + a, b * j.in_dim + a2);
  return t;
}

inline void validate_choi(const ChoiMatrix& j, double cp_tol = kCpTol,
                          double tp_tol = kTpTol) {
  if (j.matrix.rows() != static_cast<Eigen::Index>(j.in_dim * j.out_dim))
    throw ChannelError("Choi matrix size mismatch");
  const double min_eig = herm_eig(0.5 * (j.matrix + j.matrix.adjoint().eval()))
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -cp_tol)
    throw ChannelError("Choi matrix fails complete positivity (eigenvalue " +
                       std::to_string(min_eig) + ")");
  const Matrix t = choi_trace_out(j);
  if ((t - Matrix::Identity(j.in_dim, j.in_dim)).cwiseAbs().maxCoeff() > tp_tol)
    throw ChannelError("Choi matrix fails trace preservation");
}

inline QuantumChannel from_choi(const ChoiMatrix& j, double cp_tol = kCpTol,
                                double tp_tol = kTpTol) {
  validate_choi(j, cp_tol, tp_tol);
  auto es = herm_eig(0.5 * (j.matrix + j.matrix.adjoint().eval()));
  std::vector<Matrix> kraus;
  for (Eigen::Index l = es.eigenvalues().size(); l-- > 0;) {
    const double lam = es.eigenvalues()[l];
    if (lam <= kPsdTol) continue;  // Kraus count = Choi rank
    Matrix k(j.out_dim, j.in_dim);
    for (std::size_t b = 0; b < j.out_dim; ++b)
      for (std::size_t a = 0; a < j.in_dim; ++a)
        k(b, a) = std::sqrt(lam) * es.eigenvectors()(b * j.in_dim + a, l);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) throw ChannelError("Choi matrix has numerical rank 0");
  return QuantumChannel(j.in_dim, j.out_dim, std::move(kraus));
}

// Max-abs entry distance between Choi matrices; zero iff equal action.
inline double choi_distance(const QuantumChannel& a, const QuantumChannel& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
    throw ChannelError("choi_distance: dimension mismatch");
  return (to_choi(a).matrix - to_choi(b).matrix).cwiseAbs().maxCoeff();
}

// V : in -> out (x) env with V|phi> = sum_i (K_i |phi>) (x) |i>_E.
struct StinespringIsometry {
  std::size_t in_dim = 0, out_dim = 0, env_dim = 0;
  Matrix v;  // (out_dim * env_dim) x in_dim, row index = b * env_dim + e
};

inline StinespringIsometry stinespring(const QuantumChannel& c) {
  const std::size_t env = c.env_dim();
  Matrix v = Matrix::Zero(c.out_dim() * env, c.in_dim());
  for (std::size_t e = 0; e < env; ++e)
    for (std::size_t b = 0; b < c.out_dim(); ++b)
      for (std::size_t a = 0; a < c.in_dim(); ++a)
        v(b * env + e, a) = c.kraus()[e](b, a);
  if ((v.adjoint() * v - Matrix::Identity(c.in_dim(), c.in_dim()))
          .cwiseAbs()
          .maxCoeff() > kIsoTol)
    throw ChannelError("Stinespring isometry fails V^dagger V = I");
  return StinespringIsometry{c.in_dim(), c.out_dim(), env, std::move(v)};
}

// Swap the B and E legs of the dilation: Kraus_j[e, a] = K_e[j, a].
inline QuantumChannel complementary(const QuantumChannel& c) {
  std::vector<Matrix> kraus(c.out_dim());
  for (std::size_t j = 0; j < c.out_dim(); ++j) {
    Matrix k(c.env_dim(), c.in_dim());
    for (std::size_t e = 0; e < c.env_dim(); ++e)
      for (std::size_t a = 0; a < c.in_dim(); ++a)
        k(e, a) = c.kraus()[e](j, a);
    kraus[j] = std::move(k);
  }
  return QuantumChannel(c.in_dim(), c.env_dim(), std::move(kraus));
}

// compose(f, g) applies g first: (f o g)(rho) = f(g(rho)).
inline QuantumChannel compose(const QuantumChannel& f, const QuantumChannel& g) {
  if (f.in_dim() != g.out_dim())
    throw ChannelError("compose: dimension mismatch");
  std::vector<Matrix> kraus;
  kraus.reserve(f.env_dim() * g.env_dim());
  for (const auto& kf : f.kraus())
    for (const auto& kg : g.kraus()) kraus.push_back(kf * kg);
  return QuantumChannel(g.in_dim(), f.out_dim(), std::move(kraus));
}

inline QuantumChannel tensor_power(const QuantumChannel& c, std::size_t n) {
  if (n < 1) throw ChannelError("tensor_power: n must be >= 1");
  std::size_t din = 1, dout = 1;
  for (std::size_t k = 0; k < n; ++k) {
    din *= c.in_dim();
    dout *= c.out_dim();
    if (din > dim_cap() || dout > dim_cap())
      throw DimensionCapError("tensor_power dimension exceeds cap");
  }
  std::vector<Matrix> kraus = c.kraus();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<Matrix> next;
    next.reserve(kraus.size() * c.env_dim());
    for (const auto& a : kraus)
      for (const auto& b : c.kraus()) next.push_back(kron(a, b));
    kraus = std::move(next);
  }
  return QuantumChannel(din, dout, std::move(kraus));
}

// Channel action on an ordered group of labeled legs; the group is replaced
// by `replacement` legs at the front of the resulting layout.
inline DensityState apply_channel(const DensityState& s, const QuantumChannel& c,
                                  const std::vector<std::string>& targets,
                                  const std::vector<Subsystem>& replacement) {
  auto plan = detail::op_plan(s.layout(), targets, replacement,
                              static_cast<Eigen::Index>(c.out_dim()),
                              static_cast<Eigen::Index>(c.in_dim()));
  DensityState p = permute_subsystems(s, plan.front_order);
  Matrix out = Matrix::Zero(c.out_dim() * plan.d_rest, c.out_dim() * plan.d_rest);
  for (const auto& k : c.kraus()) {
    Matrix full = detail::extend_right(k, plan.d_rest);
    out += full * p.matrix() * full.adjoint();
  }
  return DensityState(plan.out_layout, std::move(out));
}

// Isometric dilation applied to a labeled leg: the leg is replaced by
// output and environment legs (in that order) at the front of the layout.
inline PureState apply_isometry(const PureState& s, const StinespringIsometry& v,
                                const std::string& target,
                                const std::string& out_label,
                                const std::string& env_label) {
  return apply_operator(s, v.v, {target},
                        {{out_label, v.out_dim}, {env_label, v.env_dim}});
}

inline DensityState apply_isometry(const DensityState& s,
                                   const StinespringIsometry& v,
                                   const std::string& target,
                                   const std::string& out_label,
                                   const std::string& env_label) {
  return apply_operator(s, v.v, {target},
                        {{out_label, v.out_dim}, {env_label, v.env_dim}});
}

// Haar-like random channel: isometry from QR of a Gaussian matrix with the
// phase convention fixed for determinism.
inline QuantumChannel random_channel(std::size_t in_dim, std::size_t out_dim,
                                     std::size_t env_dim, Rng& rng) {
  if (out_dim * env_dim < in_dim)
    throw ChannelError("random_channel: out*env must be >= in");
  Matrix g(out_dim * env_dim, in_dim);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.gaussian_complex();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(out_dim * env_dim, in_dim);
  Matrix r = qr.matrixQR().topRows(in_dim).triangularView<Eigen::Upper>();
  for (std::size_t a = 0; a < in_dim; ++a) {
    const cxd d = r(a, a);
    if (std::abs(d) > 0) q.col(a) *= d / std::abs(d);
  }
  std::vector<Matrix> kraus(env_dim, Matrix::Zero(out_dim, in_dim));
  for (std::size_t e = 0; e < env_dim; ++e)
    for (std::size_t b = 0; b < out_dim; ++b)
      for (std::size_t a = 0; a < in_dim; ++a)
        kraus[e](b, a) = q(b * env_dim + e, a);
  return QuantumChannel(in_dim, out_dim, std::move(kraus));
}

inline Matrix random_unitary(std::size_t dim, Rng& rng) {
  QuantumChannel c = random_channel(dim, dim, 1, rng);
  return c.kraus()[0];
}

}  // namespace convlab
