#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pmod/matrix.hpp"

namespace pmod {

/// Seeded generator with a fixed, platform-independent sampling recipe.
/// std::uniform_real_distribution and std::normal_distribution are not
/// specified bit-for-bit, so both are done by hand here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  cplx unit_phase() { return std::polar(1.0, uniform(-M_PI, M_PI)); }

  CMatrix gaussian(std::size_t rows, std::size_t cols) {
    CMatrix m(rows, cols);
    for (auto& x : m.entries()) x = complex_normal();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Unitary from Gram-Schmidt on a complex Gaussian matrix (two passes).
inline CMatrix random_unitary(std::size_t n, Rng& rng) {
  CMatrix g = rng.gaussian(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto v = g.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const auto q = g.col(k);
        const cplx c = dot(q, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    const double nv = norm2(v);
    for (auto& x : v) x /= nv;
    g.set_col(j, v);
  }
  return g;
}

inline std::vector<cplx> random_unit_vector(std::size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = rng.complex_normal();
  const double nv = norm2(v);
  for (auto& x : v) x /= nv;
  return v;
}

}  // namespace pmod
