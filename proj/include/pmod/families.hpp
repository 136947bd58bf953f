#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pmod/error.hpp"
#include "pmod/linalg.hpp"
#include "pmod/module.hpp"
#include "pmod/rng.hpp"

namespace pmod {

struct AtomicLabel {
  std::string word;
  cplx phase{1.0, 0.0};
};

struct GPVector {
  std::vector<ScalarModule> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool invertible(double tol = 1e-12) const {
    return std::all_of(entries.begin(), entries.end(),
                       [&](const ScalarModule& s) { return std::abs(s.a) > tol && std::abs(s.b) > tol; });
  }
};

// ---------------------------------------------------------------- words

inline bool is_binary_word(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c == '0' || c == '1'; });
}

/// True when w is not a proper power of a shorter word.
inline bool is_prime_word(const std::string& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return false;
  }
  return n > 0;
}

inline std::string least_rotation(const std::string& w) {
  std::string best = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::string r = w.substr(k) + w.substr(0, k);
    if (r < best) best = std::move(r);
  }
  return best;
}

/// Binary Lyndon words of length exactly d, in lexicographic order.
inline std::vector<std::string> prime_words(std::size_t d) {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "word length must be positive");
  std::vector<std::string> out;
  std::vector<int> w{-1};
  while (!w.empty()) {
    ++w.back();
    const std::size_t m = w.size();
    if (m == d) {
      std::string s;
      for (int c : w) s.push_back(static_cast<char>('0' + c));
      out.push_back(std::move(s));
    }
    while (w.size() < d) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == 1) w.pop_back();
  }
  return out;
}

// ---------------------------------------------------------------- atomic

/// (A_w·D_z, B_w·D_z) with partial shifts along w and D_z = diag(1,…,1,z).
inline PModule atomic_module(const AtomicLabel& label) {
  const std::string& w = label.word;
  if (!is_binary_word(w)) throw Error(ErrorKind::InvalidArgument, "atomic word must be a nonempty binary string");
  if (!is_prime_word(w)) throw Error(ErrorKind::NotPrime, "word '" + w + "' is a proper power");
  const std::size_t d = w.size();
  CMatrix a(d, d), b(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const cplx scale = k + 1 == d ? label.phase : cplx(1.0);
    CMatrix& x = w[k] == '0' ? a : b;
    x((k + 1) % d, k) = scale;
  }
  return PModule(std::move(a), std::move(b));
}

inline AtomicLabel canonical_label(const AtomicLabel& l) { return {least_rotation(l.word), l.phase}; }

// ---------------------------------------------------------------- GP

/// A e_i = a_i e_{i+1}, B e_i = b_i e_{i+1}, indices mod d.
inline PModule gp_module(const GPVector& z) {
  const std::size_t d = z.size();
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "empty GP vector");
  CMatrix a(d, d), b(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    a((i + 1) % d, i) = z.entries[i].a;
    b((i + 1) % d, i) = z.entries[i].b;
  }
  return PModule(std::move(a), std::move(b));
}

inline GPVector gp_rotate(const GPVector& z, std::size_t k) {
  GPVector r;
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) r.entries.push_back(z.entries[(i + k) % n]);
  return r;
}

inline GPVector gp_repeat(const GPVector& z, std::size_t times) {
  GPVector r;
  for (std::size_t t = 0; t < times; ++t) r.entries.insert(r.entries.end(), z.entries.begin(), z.entries.end());
  return r;
}

inline GPVector gp_inverse(const GPVector& z) {
  GPVector r;
  for (const auto& s : z.entries) r.entries.push_back(scalar_inverse(s));
  return r;
}

/// Closed-form decomposition of gp_module(z) ⊠ gp_module(z̃) into hcf(r,s) GP vectors of length lcm(r,s).
inline std::vector<GPVector> gp_fuse(const GPVector& z, const GPVector& zt) {
  if (z.size() == 0 || zt.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty GP vector");
  if (!z.invertible() || !zt.invertible()) throw Error(ErrorKind::NotInvertible, "gp_fuse needs invertible GP vectors");
  const std::size_t r = z.size(), s = zt.size();
  const std::size_t l = std::lcm(r, s), h = std::gcd(r, s);
  const GPVector zd = gp_repeat(z, l / r);
  const GPVector ze = gp_repeat(zt, l / s);
  std::vector<GPVector> out;
  for (std::size_t k = 0; k < h; ++k) {
    GPVector y;
    for (std::size_t i = 0; i < l; ++i) y.entries.push_back(boxtimes(zd.entries[i], ze.entries[(i + k) % l]));
    out.push_back(std::move(y));
  }
  return out;
}

namespace detail {

inline bool scalar_close(const ScalarModule& x, const ScalarModule& y, double tol) {
  return std::abs(x.a - y.a) <= tol && std::abs(x.b - y.b) <= tol;
}

/// -1, 0, 1 comparing (Re a, Im a, Re b, Im b) with a tolerance on equality.
inline int scalar_order(const ScalarModule& x, const ScalarModule& y, double tol) {
  const std::array<double, 4> u{x.a.real(), x.a.imag(), x.b.real(), x.b.imag()};
  const std::array<double, 4> v{y.a.real(), y.a.imag(), y.b.real(), y.b.imag()};
  for (std::size_t k = 0; k < 4; ++k) {
    if (std::abs(u[k] - v[k]) <= tol) continue;
    return u[k] < v[k] ? -1 : 1;
  }
  return 0;
}

}  // namespace detail

struct GPCanonical {
  GPVector canonical;
  bool aperiodic = true;
};

inline GPCanonical gp_canonical(const GPVector& z, double tol = 1e-12) {
  const std::size_t n = z.size();
  GPCanonical out;
  out.canonical = z;
  for (std::size_t k = 1; k < n; ++k) {
    GPVector r = gp_rotate(z, k);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = detail::scalar_order(r.entries[i], out.canonical.entries[i], tol);
      if (c < 0) {
        out.canonical = r;
        break;
      }
      if (c > 0) break;
    }
  }
  for (std::size_t p = 1; p < n && out.aperiodic; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i)
      periodic = detail::scalar_close(z.entries[i], z.entries[i - p], tol);
    if (periodic) out.aperiodic = false;
  }
  return out;
}

// ---------------------------------------------------------------- atomic ⊠ diffuse

/// Labels (w, φ_i·z) for the eigenvalues φ_i of V = V_{x_r}···V_{x_1}.
inline std::vector<AtomicLabel> atomic_diffuse_fuse(const AtomicLabel& label, const PModule& md,
                                                    double rtol = kDefaultRtol) {
  require_binary(md, "atomic_diffuse_fuse");
  if (!is_binary_word(label.word)) throw Error(ErrorKind::InvalidArgument, "atomic word must be binary");
  if (!is_prime_word(label.word)) throw Error(ErrorKind::NotPrime, "word '" + label.word + "' is a proper power");
  if (!is_invertible(md.a(), rtol) || !is_invertible(md.b(), rtol))
    throw Error(ErrorKind::NotInvertible, "diffuse factor needs invertible legs");
  const CMatrix va = polar(md.a(), rtol).unitary;
  const CMatrix vb = polar(md.b(), rtol).unitary;
  CMatrix v = CMatrix::identity(md.dim());
  for (char c : label.word) v = (c == '0' ? va : vb) * v;
  const auto e = normal_eig(v, rtol);
  std::vector<AtomicLabel> out;
  for (const auto& phi : e.values) out.push_back({label.word, phase_of(phi) * label.phase});
  return out;
}

// ---------------------------------------------------------------- D2

struct D2Block {
  PModule module;
  std::vector<ScalarModule> split;  // two scalars when the diagonal entries coincide, else empty
};

struct D2Fusion {
  std::array<D2Block, 2> blocks;

  /// Final list of components: split scalars or unsplit 2-dim blocks.
  std::vector<PModule> components() const {
    std::vector<PModule> out;
    for (const auto& b : blocks) {
      if (b.split.empty()) {
        out.push_back(b.module);
      } else {
        for (const auto& s : b.split) out.push_back(to_module(s));
      }
    }
    return out;
  }
};

inline bool is_d2(const PModule& m, double tol = 1e-12) {
  if (m.arity() != 2 || m.dim() != 2) return false;
  const auto& a = m.a();
  const auto& b = m.b();
  if (std::abs(a(0, 1)) > tol || std::abs(a(1, 0)) > tol) return false;
  if (std::abs(b(0, 0)) > tol || std::abs(b(1, 1)) > tol) return false;
  return std::abs(a(0, 0)) > tol && std::abs(a(1, 1)) > tol && std::abs(b(1, 0)) > tol && std::abs(b(0, 1)) > tol;
}

/// Split (diag(a,a), antidiag) into (a, β₁) ⊕ (a, β₂) with β² = b₁b₂.
inline std::vector<ScalarModule> d2_split(cplx a, cplx b1, cplx b2) {
  const cplx r = std::sqrt(b1 * b2);
  std::vector<ScalarModule> out{{a, r}, {a, -r}};
  std::sort(out.begin(), out.end(), [](const ScalarModule& x, const ScalarModule& y) {
    return std::pair(x.b.real(), x.b.imag()) < std::pair(y.b.real(), y.b.imag());
  });
  return out;
}

inline D2Fusion d2_fuse(const PModule& m, const PModule& n, double tol = 1e-12) {
  if (!is_d2(m, tol) || !is_d2(n, tol))
    throw Error(ErrorKind::NotD2Shape, "operands must have diagonal A, anti-diagonal B, nonzero entries");
  const std::array<cplx, 2> a{m.a()(0, 0), m.a()(1, 1)}, at{n.a()(0, 0), n.a()(1, 1)};
  const std::array<cplx, 2> b{m.b()(1, 0), m.b()(0, 1)}, bt{n.b()(1, 0), n.b()(0, 1)};
  auto k = [&](std::size_t i, std::size_t j) {
    return 1.0 / std::sqrt(std::norm(a[i]) * std::norm(at[j]) + std::norm(b[i]) * std::norm(bt[j]));
  };
  auto ak = [&](std::size_t i, std::size_t j) { return a[i] * at[j] * k(i, j); };
  auto bk = [&](std::size_t i, std::size_t j) { return b[i] * bt[j] * k(i, j); };
  auto make_block = [&](std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) {
    const cplx d1 = ak(i1, j1), d2 = ak(i2, j2);
    const cplx lo = bk(i1, j1), hi = bk(i2, j2);
    D2Block blk{PModule(CMatrix{{d1, 0.0}, {0.0, d2}}, CMatrix{{0.0, hi}, {lo, 0.0}}), {}};
    if (std::abs(d1 - d2) <= 1e-10) blk.split = d2_split(0.5 * (d1 + d2), lo, hi);
    return blk;
  };
  // span{e1⊗e1, e2⊗e2} and span{e1⊗e2, e2⊗e1}
  return D2Fusion{{make_block(0, 0, 1, 1), make_block(0, 1, 1, 0)}};
}

/// Isometry C^4 <- block basis for d2_fuse block `which` (0 or 1).
inline CMatrix d2_block_isometry(std::size_t which) {
  CMatrix v(4, 2);
  if (which == 0) {
    v(0, 0) = 1.0;
    v(3, 1) = 1.0;
  } else {
    v(1, 0) = 1.0;
    v(2, 1) = 1.0;
  }
  return v;
}

// ---------------------------------------------------------------- sampling

enum class ModuleClass { M, N };

/// A = W diag(c) W*, B = V (I − A*A)^{1/2}; |c_i| in [0.05, 0.95] except `zeros`
/// leading eigenvalues set to 0 (class M only).
inline PModule random_module(std::size_t d, ModuleClass cls, std::uint64_t seed, std::size_t zeros = 0) {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (zeros > d) throw Error(ErrorKind::InvalidArgument, "more zero eigenvalues than the dimension");
  if (cls == ModuleClass::N && zeros > 0) throw Error(ErrorKind::InvalidArgument, "class N legs are invertible");
  constexpr double eps = 0.05;
  Rng rng(seed);
  const CMatrix w = random_unitary(d, rng);
  const CMatrix v = random_unitary(d, rng);
  std::vector<cplx> c(d), s(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double r = i < zeros ? 0.0 : rng.uniform(eps, 1.0 - eps);
    c[i] = std::polar(r, rng.uniform(-M_PI, M_PI));
    s[i] = std::sqrt(1.0 - r * r);
  }
  const CMatrix a = w * CMatrix::diag(c) * w.adjoint();
  const CMatrix b = v * (w * CMatrix::diag(s) * w.adjoint());
  return PModule(a, b);
}

inline GPVector random_gp_vector(std::size_t len, Rng& rng) {
  GPVector z;
  for (std::size_t i = 0; i < len; ++i) {
    const double r = rng.uniform(0.1, 0.9);
    z.entries.push_back({std::polar(r, rng.uniform(-M_PI, M_PI)),
                         std::polar(std::sqrt(1.0 - r * r), rng.uniform(-M_PI, M_PI))});
  }
  return z;
}

}  // namespace pmod
