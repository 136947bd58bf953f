#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "pmod/error.hpp"
#include "pmod/matrix.hpp"

namespace pmod {

inline constexpr double kDefaultRtol = 1e-9;

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // unitary, columns are eigenvectors
};

struct PolarPair {
  CMatrix unitary;
  CMatrix positive;
};

/// Singular values (descending) with right singular vectors as columns of `v`.
/// `left` holds M·v, i.e. left singular vectors scaled by the singular values;
/// it is empty when the tall-matrix QR shortcut was taken.
struct SvdResult {
  std::vector<double> values;
  CMatrix v;
  CMatrix left;
};

struct KernelResult {
  CMatrix basis;                       // orthonormal columns
  double threshold = 0.0;
  double largest_kernel_value = 0.0;   // 0 when the kernel is empty
  double smallest_range_value = 0.0;   // 0 when the kernel is everything
};

enum class SpectralFn { Sqrt, InvSqrt, Inv };

namespace detail {

/// Unitary 2x2 rotation G (acting on columns p,q) that zeroes the (p,q) entry
/// of a Hermitian pair block [[a, h],[conj(h), b]].
struct Rotation {
  cplx gpp, gpq, gqp, gqq;
};

inline Rotation jacobi_rotation(double a, double b, cplx h) {
  const double g = std::abs(h);
  const cplx e = h / g;
  const double theta = (b - a) / (2.0 * g);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const cplx eb = std::conj(e);
  return {c, s, -s * eb, c * eb};
}

inline void rotate_columns(CMatrix& m, std::size_t p, std::size_t q, const Rotation& g) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const cplx xp = m(i, p);
    const cplx xq = m(i, q);
    m(i, p) = xp * g.gpp + xq * g.gqp;
    m(i, q) = xp * g.gpq + xq * g.gqq;
  }
}

inline void rotate_rows_adjoint(CMatrix& m, std::size_t p, std::size_t q, const Rotation& g) {
  const cplx cpp = std::conj(g.gpp), cqp = std::conj(g.gqp), cpq = std::conj(g.gpq), cqq = std::conj(g.gqq);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const cplx xp = m(p, j);
    const cplx xq = m(q, j);
    m(p, j) = cpp * xp + cqp * xq;
    m(q, j) = cpq * xp + cqq * xq;
  }
}

/// Rotate the phase of v so that its first significant coordinate is real positive.
inline void normalize_phase(std::span<cplx> v) {
  double big = 0.0;
  for (const auto& x : v) big = std::max(big, std::abs(x));
  if (big == 0.0) return;
  for (const auto& x : v) {
    if (std::abs(x) > 1e-8 * big) {
      const cplx ph = std::conj(x) / std::abs(x);
      for (auto& y : v) y *= ph;
      return;
    }
  }
}

inline void normalize_column_phases(CMatrix& q) {
  for (std::size_t j = 0; j < q.cols(); ++j) {
    auto c = q.col(j);
    normalize_phase(c);
    q.set_col(j, c);
  }
}

/// Householder QR; returns the cols x cols upper-triangular factor.
inline CMatrix householder_r(CMatrix a) {
  const std::size_t m = a.rows(), n = a.cols();
  for (std::size_t k = 0; k < n && k < m; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k; i < m; ++i) xnorm += std::norm(a(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const cplx x0 = a(k, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;
    std::vector<cplx> v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) continue;
    for (auto& x : v) x /= vnorm;
    for (std::size_t j = k; j < n; ++j) {
      cplx s{};
      for (std::size_t i = k; i < m; ++i) s += std::conj(v[i - k]) * a(i, j);
      for (std::size_t i = k; i < m; ++i) a(i, j) -= 2.0 * v[i - k] * s;
    }
  }
  const std::size_t r = std::min(m, n);
  CMatrix out(n, n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < n; ++j) out(i, j) = a(i, j);
  return out;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for Hermitian matrices.
inline HermEig hermitian_eig(const CMatrix& m, double rtol = kDefaultRtol) {
  if (!m.square()) throw Error(ErrorKind::ShapeMismatch, "hermitian_eig needs a square matrix");
  const std::size_t n = m.rows();
  const double mnorm = frobenius(m);
  if (hermitian_defect(m) > rtol * mnorm)
    throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian within tolerance");

  CMatrix a = m;
  // exact Hermitian symmetrisation of the working copy
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx h = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = h;
      a(j, i) = std::conj(h);
    }
  }
  CMatrix q = CMatrix::identity(n);
  const double target = 1e-14 * mnorm;
  bool converged = (n <= 1 || mnorm == 0.0);
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += std::norm(a(i, j));
    if (std::sqrt(off) <= target) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) {
        const cplx h = a(p, r);
        if (std::abs(h) == 0.0) continue;
        const auto g = detail::jacobi_rotation(a(p, p).real(), a(r, r).real(), h);
        detail::rotate_columns(a, p, r, g);
        detail::rotate_rows_adjoint(a, p, r, g);
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(r, r) = a(r, r).real();
        detail::rotate_columns(q, p, r, g);
      }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += std::norm(a(i, j));
    if (std::sqrt(off) > target) throw Error(ErrorKind::NoConvergence, "Jacobi sweep budget exhausted");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermEig out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    auto c = q.col(order[k]);
    detail::normalize_phase(c);
    out.vectors.set_col(k, c);
  }
  return out;
}

/// Q f(Λ) Q* for a precomputed eigendecomposition.
template <typename F>
CMatrix spectral_apply(const HermEig& e, F&& f) {
  const std::size_t n = e.values.size();
  CMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx qik = e.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += qik * std::conj(e.vectors(j, k));
    }
  }
  return out;
}

inline CMatrix psd_funcalc(const CMatrix& m, SpectralFn fn, double rtol = kDefaultRtol) {
  const auto e = hermitian_eig(m, rtol);
  double scale = 0.0;
  for (double v : e.values) scale = std::max(scale, std::abs(v));
  const double lo = e.values.empty() ? 0.0 : e.values.front();
  if (lo < -rtol * std::max(1.0, scale))
    throw Error(ErrorKind::NotPsd, "matrix has a negative eigenvalue beyond tolerance");
  switch (fn) {
    case SpectralFn::Sqrt:
      return spectral_apply(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
    case SpectralFn::InvSqrt:
    case SpectralFn::Inv:
      if (!(lo > static_cast<double>(m.rows()) * rtol * scale))
        throw Error(ErrorKind::SingularOperand, "smallest eigenvalue below the inversion threshold");
      if (fn == SpectralFn::Inv) return spectral_apply(e, [](double x) { return 1.0 / x; });
      return spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
  }
  return {};
}

/// One-sided (Hestenes) Jacobi SVD. Tall inputs are first reduced by QR unless
/// left vectors are requested.
inline SvdResult svd(const CMatrix& m, bool need_left = true) {
  CMatrix w = (!need_left && m.rows() > m.cols()) ? detail::householder_r(m) : m;
  const std::size_t n = w.cols();
  CMatrix v = CMatrix::identity(n);
  std::vector<double> colnorm(n);
  bool converged = n <= 1;
  const double eps = std::numeric_limits<double>::epsilon();
  const double pair_tol = std::max(1e-15, 4.0 * eps * static_cast<double>(w.rows()));
  // columns at rounding level count as zero
  const double floor = std::pow(static_cast<double>(std::max(n, w.rows())) * eps * frobenius(w), 2);
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma{};
        for (std::size_t i = 0; i < w.rows(); ++i) {
          const cplx xp = w(i, p), xq = w(i, q);
          alpha += std::norm(xp);
          beta += std::norm(xq);
          gamma += std::conj(xp) * xq;
        }
        if (alpha <= floor || beta <= floor) continue;
        if (std::abs(gamma) <= pair_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const auto g = detail::jacobi_rotation(alpha, beta, gamma);
        detail::rotate_columns(w, p, q, g);
        detail::rotate_columns(v, p, q, g);
      }
    if (!rotated) converged = true;
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "one-sided Jacobi sweep budget exhausted");

  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) s += std::norm(w(i, j));
    colnorm[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return colnorm[a] > colnorm[b]; });
  SvdResult out;
  out.values.resize(n);
  out.v = CMatrix(n, n);
  if (need_left) out.left = CMatrix(w.rows(), n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = colnorm[order[k]];
    out.v.set_col(k, v.col(order[k]));
    if (need_left) out.left.set_col(k, w.col(order[k]));
  }
  return out;
}

/// Orthonormal basis of span(q)^⊥ by Gram-Schmidt over e_1, e_2, ... in order.
/// `q` must have orthonormal columns.
inline CMatrix complement_basis(const CMatrix& q, std::size_t n) {
  const std::size_t r = q.cols();
  const std::size_t want = n - r;
  std::vector<std::vector<cplx>> basis;
  for (std::size_t k = 0; k < r; ++k) basis.push_back(q.col(k));
  const double accept = 0.5 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
  CMatrix out(n, want);
  std::size_t found = 0;
  for (std::size_t i = 0; i < n && found < want; ++i) {
    std::vector<cplx> x(n);
    x[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const cplx c = dot(b, x);
        for (std::size_t t = 0; t < n; ++t) x[t] -= c * b[t];
      }
    const double nx = norm2(x);
    if (nx <= accept) continue;
    for (auto& t : x) t /= nx;
    out.set_col(found++, x);
    basis.push_back(std::move(x));
  }
  return out;
}

/// Polar decomposition M = U·P with the deterministic kernel completion:
/// the Gram-Schmidt basis of ker|M| is matched, in order, to that of ker|M*|.
inline PolarPair polar(const CMatrix& m, double rtol = kDefaultRtol) {
  if (!m.square()) throw Error(ErrorKind::ShapeMismatch, "polar needs a square matrix");
  const std::size_t n = m.rows();
  const auto s = svd(m, true);
  const double smax = s.values.empty() ? 0.0 : s.values.front();
  std::size_t rank = 0;
  while (rank < n && smax > 0.0 && s.values[rank] > rtol * smax) ++rank;

  CMatrix vr(n, rank), ur(n, rank);
  for (std::size_t k = 0; k < rank; ++k) {
    vr.set_col(k, s.v.col(k));
    auto u = s.left.col(k);
    for (auto& x : u) x /= s.values[k];
    ur.set_col(k, u);
  }
  PolarPair out;
  out.unitary = CMatrix(n, n);
  for (std::size_t k = 0; k < rank; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.unitary(i, j) += ur(i, k) * std::conj(vr(j, k));
  const CMatrix kx = complement_basis(vr, n);
  const CMatrix ky = complement_basis(ur, n);
  for (std::size_t k = 0; k < kx.cols(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.unitary(i, j) += ky(i, k) * std::conj(kx(j, k));

  out.positive = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out.positive(i, j) += s.v(i, k) * s.values[k] * std::conj(s.v(j, k));
  out.positive = 0.5 * (out.positive + out.positive.adjoint());
  return out;
}

/// Numerical kernel: right singular vectors with value <= rtol*max(σ_max, scale).
/// `scale` guards against matrices that are entirely at noise level.
inline KernelResult kernel_basis_ex(const CMatrix& m, double rtol = kDefaultRtol, double scale = 0.0) {
  const std::size_t n = m.cols();
  KernelResult out;
  if (n == 0) return out;
  const auto s = svd(m, false);
  const double smax = s.values.front();
  out.threshold = rtol * std::max(smax, scale);
  std::size_t rank = 0;
  while (rank < n && s.values[rank] > out.threshold) ++rank;
  out.basis = CMatrix(n, n - rank);
  for (std::size_t k = rank; k < n; ++k) out.basis.set_col(n - 1 - k, s.v.col(k));
  detail::normalize_column_phases(out.basis);
  out.largest_kernel_value = rank < n ? s.values[rank] : 0.0;
  out.smallest_range_value = rank > 0 ? s.values[rank - 1] : 0.0;
  return out;
}

inline CMatrix kernel_basis(const CMatrix& m, double rtol = kDefaultRtol, double scale = 0.0) {
  return kernel_basis_ex(m, rtol, scale).basis;
}

/// Orthonormal basis of the column space (rank decided relative to σ_max and `scale`).
inline CMatrix range_basis(const CMatrix& m, double rtol = kDefaultRtol, double scale = 0.0) {
  if (m.cols() == 0) return CMatrix(m.rows(), 0);
  // left vectors of M are right vectors of M*
  const auto s = svd(m.adjoint(), false);
  const double smax = s.values.front();
  const double thr = rtol * std::max(smax, scale);
  std::size_t rank = 0;
  while (rank < s.values.size() && s.values[rank] > thr) ++rank;
  CMatrix out(m.rows(), rank);
  for (std::size_t k = 0; k < rank; ++k) out.set_col(k, s.v.col(k));
  detail::normalize_column_phases(out);
  return out;
}

/// Orthonormal basis of span(sub) ∩ span(v)^⊥, both given by orthonormal columns.
inline CMatrix complement_within(const CMatrix& sub, const CMatrix& v, double rtol = kDefaultRtol) {
  CMatrix proj = sub;
  if (v.cols() > 0) proj = sub - v * (v.adjoint() * sub);
  return range_basis(proj, std::max(rtol, 1e-8), 1.0);
}

struct CommutationPair {
  CMatrix left;   // M_k (rows x rows)
  CMatrix right;  // N_k (cols x cols)
};

/// Frobenius-orthonormal basis of {X : X·N_k = M_k·X for all k}.
inline std::vector<CMatrix> commutation_kernel(const std::vector<CommutationPair>& pairs,
                                               double rtol = kDefaultRtol) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "commutation_kernel needs at least one pair");
  const std::size_t r = pairs.front().left.rows();
  const std::size_t c = pairs.front().right.rows();
  const std::size_t unknowns = r * c;
  CMatrix l(pairs.size() * unknowns, unknowns);
  double scale = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& mk = pairs[k].left;
    const auto& nk = pairs[k].right;
    if (!mk.square() || !nk.square() || mk.rows() != r || nk.rows() != c)
      throw Error(ErrorKind::ShapeMismatch, "inconsistent shapes in commutation pairs");
    scale = std::max(scale, frobenius(mk) + frobenius(nk));
    const std::size_t base = k * unknowns;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t row = base + i * c + j;
        for (std::size_t t = 0; t < c; ++t) l(row, i * c + t) += nk(t, j);
        for (std::size_t t = 0; t < r; ++t) l(row, t * c + j) -= mk(i, t);
      }
  }
  const CMatrix kb = kernel_basis(l, rtol, scale);
  std::vector<CMatrix> out;
  out.reserve(kb.cols());
  for (std::size_t k = 0; k < kb.cols(); ++k) {
    CMatrix x(r, c);
    for (std::size_t t = 0; t < unknowns; ++t) x.entries()[t] = kb(t, k);
    out.push_back(std::move(x));
  }
  return out;
}

struct NormalEig {
  std::vector<cplx> values;
  CMatrix vectors;
};

/// Eigendecomposition of a normal matrix through its commuting Hermitian parts.
inline NormalEig normal_eig(const CMatrix& nmat, double rtol = kDefaultRtol) {
  if (!nmat.square()) throw Error(ErrorKind::ShapeMismatch, "normal_eig needs a square matrix");
  const std::size_t n = nmat.rows();
  const double scale = std::max(1.0, frobenius(nmat));
  const CMatrix re = 0.5 * (nmat + nmat.adjoint());
  const CMatrix im = cplx(0.0, -0.5) * (nmat - nmat.adjoint());
  const auto e1 = hermitian_eig(re, 1e-6);
  NormalEig out;
  out.vectors = CMatrix(n, n);
  out.values.resize(n);
  const double cluster = 1e-8 * scale;
  std::size_t start = 0;
  std::size_t filled = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && e1.values[end] - e1.values[end - 1] <= cluster) ++end;
    const CMatrix q = e1.vectors.cols_range(start, end - start);
    const CMatrix sub = q.adjoint() * im * q;
    const auto e2 = hermitian_eig(0.5 * (sub + sub.adjoint()), 1e-6);
    const CMatrix qq = q * e2.vectors;
    for (std::size_t k = 0; k < qq.cols(); ++k) {
      auto v = qq.col(k);
      detail::normalize_phase(v);
      out.vectors.set_col(filled, v);
      const auto nv = nmat * v;
      out.values[filled] = dot(v, nv);
      ++filled;
    }
    start = end;
  }
  const CMatrix resid = nmat * out.vectors - out.vectors * CMatrix::diag(out.values);
  if (frobenius(resid) > 1e3 * rtol * scale)
    throw Error(ErrorKind::NoConvergence, "normal_eig residual too large (matrix not normal?)");
  // deterministic ordering by argument, then modulus
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t k) {
    const double a = std::abs(out.values[k]) > 0.0 ? std::arg(out.values[k]) : 0.0;
    return std::pair(std::round(a * 1e9) / 1e9, std::abs(out.values[k]));
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  NormalEig sorted;
  sorted.values.resize(n);
  sorted.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted.values[k] = out.values[order[k]];
    sorted.vectors.set_col(k, out.vectors.col(order[k]));
  }
  return sorted;
}

/// Largest singular value.
inline double spectral_norm(const CMatrix& m) {
  if (m.empty()) return 0.0;
  return svd(m, false).values.front();
}

/// Smallest singular value of a square matrix.
inline double smallest_singular_value(const CMatrix& m) {
  if (m.empty()) return 0.0;
  return svd(m, false).values.back();
}

/// Largest principal angle (radians) between two subspaces with orthonormal columns.
inline double subspace_angle(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) return M_PI / 2;
  if (a.cols() == 0) return 0.0;
  const auto s = svd(a.adjoint() * b, false);
  const double c = std::clamp(s.values.back(), 0.0, 1.0);
  // acos loses precision near 1; use the sine of the projector difference instead
  const CMatrix diff = a * a.adjoint() - b * b.adjoint();
  const double sn = std::min(1.0, spectral_norm(diff));
  return c > 0.7 ? std::asin(sn) : std::acos(c);
}

}  // namespace pmod
