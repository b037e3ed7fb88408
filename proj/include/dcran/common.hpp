/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace dcran {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Deterministic random source. All transforms are implemented here so a
/// (seed, stream) pair yields the same draw sequence on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(mix(mix(seed, 0x9e3779b97f4a7c15ull), stream)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in [0, 1).
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal via Box-Muller; second value cached.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u = 1.0 - uniform01();  // (0, 1]
    const double r = std::sqrt(-2.0 * std::log(u));
    const double th = 2.0 * M_PI * uniform01();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  Cplx cgauss() {
    const double u = 1.0 - uniform01();
    const double r = std::sqrt(-std::log(u));
    const double th = 2.0 * M_PI * uniform01();
    return {r * std::cos(th), r * std::sin(th)};
  }

  /// Poisson draw by inverse products (split recursively for large means to
  /// avoid exp underflow).
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
      const int lhs = poisson(0.5 * mean);
      return lhs + poisson(mean - 0.5 * mean);
    }
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int count = 0;
    do {
      prod *= uniform01();
      ++count;
    } while (prod > limit);
    return count - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t v, std::uint64_t salt) {
    // splitmix64 finalizer
    std::uint64_t z = v + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dcran
