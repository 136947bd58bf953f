#pragma once

#include <cmath>
#include <complex>

#include "pmod/families.hpp"
#include "pmod/module.hpp"

namespace fixtures {

using pmod::CMatrix;
using pmod::cplx;
using pmod::PModule;

inline const double kLambda = 1.0 / std::sqrt(2.0);

/// 2-dim module whose complete part is the common eigenvector (1,1)/√2.
inline PModule common_eigenvector_module() {
  const double r = std::sqrt(2.0);
  const CMatrix a{{r / 4, r / 4}, {(r - 2) / 4, (r + 2) / 4}};
  const CMatrix b{{(r + 2) / 4, (r - 2) / 4}, {r / 4, r / 4}};
  return PModule(a, b);
}

inline PModule half_scalar() { return pmod::to_module({0.5, std::sqrt(3.0) / 2}); }

/// Rotation by θ: eigenvectors (1, ±i).
inline CMatrix rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return CMatrix{{c, s}, {-s, c}};
}

struct RotationPair {
  double a = 0.6, at = 0.7, theta = M_PI / 5;
  cplx alpha = std::polar(1.0, M_PI / 5), alpha_t = std::polar(1.0, M_PI / 3);

  PModule left() const {
    return PModule(CMatrix::diag({0.0, alpha * a}), rotation(theta) * CMatrix::diag({1.0, std::sqrt(1 - a * a)}));
  }
  PModule right() const {
    return PModule(CMatrix::diag({alpha_t * at, 0.0}), rotation(theta) * CMatrix::diag({std::sqrt(1 - at * at), 1.0}));
  }
  PModule product() const { return pmod::boxtimes(left(), right()); }
};

/// D₂ factor (diag(iλ, −iλ), antidiag with lower entry `lower`·λ).
inline PModule d2_factor(cplx lower) {
  const cplx i(0, 1);
  return PModule(CMatrix{{i * kLambda, 0.0}, {0.0, -i * kLambda}}, CMatrix{{0.0, kLambda}, {lower * kLambda, 0.0}});
}

}  // namespace fixtures
