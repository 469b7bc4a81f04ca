#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace convlab {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Error taxonomy.  CLI maps these onto stable exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LayoutError : Error {
  using Error::Error;
};
struct StateError : Error {
  using Error::Error;
};
struct ChannelError : Error {
  using Error::Error;
};
struct DimensionCapError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct SdpError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

// Total-dimension cap for density operators, overridable via CONVLAB_MAX_DIM.
inline std::size_t dim_cap() {
  static const std::size_t cap = [] {
    if (const char* env = std::getenv("CONVLAB_MAX_DIM")) {
      long v = std::atol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::size_t{256};
  }();
  return cap;
}

// 64-bit FNV-1a, the input-hash stated in every tool report.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic random stream.  Gaussian variates are generated by an
// explicit Box-Muller transform so sequences do not depend on the standard
// library's unspecified std::normal_distribution algorithm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Substream for item `index` of a seeded batch.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 1)));
  }

  std::uint64_t next_u64() { return gen_(); }

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cxd gaussian_complex() { return cxd(gaussian(), gaussian()); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace convlab
