#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "convlab/channel.hpp"
#include "convlab/distances.hpp"
#include "convlab/state.hpp"

namespace tst {

using namespace convlab;

inline DensityState seeded_mixed_2x2(std::uint64_t seed) {
  Rng rng(seed);
  return random_mixed(SystemLayout({{"A", 2}, {"B", 2}}), rng);
}

inline PureState seeded_pure(const SystemLayout& layout, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(layout, rng);
}

inline bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace tst
