#pragma once

#include <algorithm>
#include <cmath>

#include "convlab/state.hpp"

namespace convlab {

namespace detail {
inline void require_same_layout(const DensityState& r, const DensityState& s) {
  if (!(r.layout() == s.layout()))
    throw LayoutError("states live on different layouts");
}
}  // namespace detail

// F(r, s) = ||sqrt(r) sqrt(s)||_1, extended for sub-normalized inputs by the
// generalized fidelity term sqrt((1 - Tr r)(1 - Tr s)).
inline double fidelity(const DensityState& r, const DensityState& s) {
  detail::require_same_layout(r, s);
  const Matrix rt = mat_sqrt_psd(r.matrix());
  const Matrix inner = rt * s.matrix() * rt;
  auto es = herm_eig(inner);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
  const double a = std::max(0.0, 1.0 - r.trace());
  const double b = std::max(0.0, 1.0 - s.trace());
  f += std::sqrt(a * b);
  return std::min(f, 1.0);
}

inline double trace_distance(const DensityState& r, const DensityState& s) {
  detail::require_same_layout(r, s);
  return 0.5 * trace_norm_herm(r.matrix() - s.matrix());
}

// P(r, s) = sqrt(1 - F(r, s)^2) with the generalized fidelity.
inline double purified_distance(const DensityState& r, const DensityState& s) {
  const double f = fidelity(r, s);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

inline double fidelity(const PureState& r, const PureState& s) {
  return fidelity(r.to_density(), s.to_density());
}
inline double trace_distance(const PureState& r, const PureState& s) {
  return trace_distance(r.to_density(), s.to_density());
}
inline double purified_distance(const PureState& r, const PureState& s) {
  return purified_distance(r.to_density(), s.to_density());
}

}  // namespace convlab
