#pragma once

#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include "pmod/error.hpp"
#include "pmod/linalg.hpp"
#include "pmod/matrix.hpp"

namespace pmod {

/// Tuple of n >= 2 square legs of equal dimension. The Pythagorean identity
/// is not enforced on construction; see validate().
class PModule {
 public:
  PModule() = default;
  explicit PModule(std::vector<CMatrix> legs) : legs_(std::move(legs)) {
    if (legs_.size() < 2) throw Error(ErrorKind::ShapeMismatch, "a module needs at least two legs");
    const std::size_t d = legs_.front().rows();
    for (const auto& l : legs_)
      if (!l.square() || l.rows() != d || d == 0)
        throw Error(ErrorKind::ShapeMismatch, "legs must be square of one common dimension");
  }
  PModule(CMatrix a, CMatrix b) : PModule(std::vector<CMatrix>{std::move(a), std::move(b)}) {}

  std::size_t dim() const noexcept { return legs_.empty() ? 0 : legs_.front().rows(); }
  std::size_t arity() const noexcept { return legs_.size(); }
  const std::vector<CMatrix>& legs() const noexcept { return legs_; }
  const CMatrix& leg(std::size_t k) const { return legs_.at(k); }
  const CMatrix& a() const { return legs_.at(0); }
  const CMatrix& b() const { return legs_.at(1); }

 private:
  std::vector<CMatrix> legs_;
};

struct ScalarModule {
  cplx a;
  cplx b;
};

struct GroupCoords {
  cplx u;
  cplx v;
  double t = 0.0;
};

struct ValidationReport {
  bool pass = false;
  double residual = 0.0;
};

inline void require_binary(const PModule& m, std::string_view op) {
  if (m.arity() != 2)
    throw Error(ErrorKind::ArityUnsupported, std::string(op) + " is defined for two-leg modules only");
}

inline double pythagorean_residual(const PModule& m) {
  CMatrix s(m.dim(), m.dim());
  for (const auto& l : m.legs()) s += l.adjoint() * l;
  return frobenius(s - CMatrix::identity(m.dim()));
}

inline ValidationReport validate(const PModule& m, double tol = kDefaultRtol) {
  const double r = pythagorean_residual(m);
  return {r <= tol, r};
}

inline PModule unit_module() {
  const double s = 1.0 / std::sqrt(2.0);
  return PModule(CMatrix::scalar(s), CMatrix::scalar(s));
}

inline PModule to_module(const ScalarModule& s) { return PModule(CMatrix::scalar(s.a), CMatrix::scalar(s.b)); }

inline ScalarModule to_scalar(const PModule& m) {
  if (m.dim() != 1 || m.arity() != 2) throw Error(ErrorKind::ShapeMismatch, "not a one-dimensional two-leg module");
  return {m.a()(0, 0), m.b()(0, 0)};
}

/// Arg with branch (−π, π].
inline double arg_branch(cplx z) {
  const double a = std::arg(z);
  return a <= -M_PI ? M_PI : a;
}

inline cplx phase_of(cplx z) { return std::abs(z) > 0.0 ? z / std::abs(z) : cplx(1.0); }

/// p⋆q on the unit square minus (0,1) and (1,0).
inline double star(double p, double q) {
  const double den = p * p * q * q + (1.0 - p * p) * (1.0 - q * q);
  if (!(den > 0.0)) throw Error(ErrorKind::SingularDenominator, "p*q on an excluded corner of the unit square");
  return p * q / std::sqrt(den);
}

/// (P⊗Q)(P²⊗Q² + (I−P²)⊗(I−Q²))^{-1/2}.
inline CMatrix star(const CMatrix& p, const CMatrix& q, double rtol = kDefaultRtol) {
  const CMatrix p2 = p * p, q2 = q * q;
  const CMatrix ip = CMatrix::identity(p.rows()), iq = CMatrix::identity(q.rows());
  const CMatrix w = kron(p2, q2) + kron(ip - p2, iq - q2);
  CMatrix inv;
  try {
    inv = psd_funcalc(w, SpectralFn::InvSqrt, rtol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularOperand)
      throw Error(ErrorKind::SingularDenominator, "P⋆Q denominator is not invertible");
    throw;
  }
  return kron(p, q) * inv;
}

/// ⊠ on one-dimensional modules.
inline ScalarModule boxtimes(const ScalarModule& s, const ScalarModule& t) {
  const double k2 = std::norm(s.a) * std::norm(t.a) + std::norm(s.b) * std::norm(t.b);
  if (!(k2 > 1e-20)) throw Error(ErrorKind::KernelOverlap, "scalar K vanishes");
  const double k = std::sqrt(k2);
  return {s.a * t.a / k, s.b * t.b / k};
}

/// ((A⊗Ã)K^{-1}, (B⊗B̃)K^{-1}) with K = (|A|²⊗|Ã|² + |B|²⊗|B̃|²)^{1/2}.
inline PModule boxtimes(const PModule& m, const PModule& n, double rtol = kDefaultRtol) {
  require_binary(m, "boxtimes");
  require_binary(n, "boxtimes");
  const CMatrix k2 = kron(m.a().adjoint() * m.a(), n.a().adjoint() * n.a()) +
                     kron(m.b().adjoint() * m.b(), n.b().adjoint() * n.b());
  const auto e = hermitian_eig(0.5 * (k2 + k2.adjoint()), rtol);
  const double top = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  const double gate = static_cast<double>(m.dim() * n.dim()) * 1e-10 * top;
  if (!(e.values.front() > gate)) throw Error(ErrorKind::KernelOverlap, "K is numerically singular");
  const CMatrix kinv = spectral_apply(e, [](double x) { return 1.0 / std::sqrt(x); });
  return PModule(kron(m.a(), n.a()) * kinv, kron(m.b(), n.b()) * kinv);
}

/// The same product through polar data: ((U_A⊗U_Ã)(|A|⋆|Ã|), (U_B⊗U_B̃)(|B|⋆|B̃|)).
inline PModule boxtimes_polar(const PModule& m, const PModule& n, double rtol = kDefaultRtol) {
  require_binary(m, "boxtimes");
  require_binary(n, "boxtimes");
  const auto pa = polar(m.a(), rtol), pb = polar(m.b(), rtol);
  const auto qa = polar(n.a(), rtol), qb = polar(n.b(), rtol);
  return PModule(kron(pa.unitary, qa.unitary) * star(pa.positive, qa.positive, rtol),
                 kron(pb.unitary, qb.unitary) * star(pb.positive, qb.positive, rtol));
}

inline PModule direct_sum(const PModule& m, const PModule& n) {
  if (m.arity() != n.arity()) throw Error(ErrorKind::ShapeMismatch, "direct sum of modules with different arity");
  std::vector<CMatrix> legs;
  for (std::size_t k = 0; k < m.arity(); ++k) legs.push_back(direct_sum(m.leg(k), n.leg(k)));
  return PModule(std::move(legs));
}

/// Legs U·L·U*.
inline PModule conjugate(const PModule& m, const CMatrix& u) {
  std::vector<CMatrix> legs;
  for (const auto& l : m.legs()) legs.push_back(u * l * u.adjoint());
  return PModule(std::move(legs));
}

/// Compression V*·L·V of each leg onto the columns of an isometry V.
inline PModule restrict_to(const PModule& m, const CMatrix& v) {
  std::vector<CMatrix> legs;
  for (const auto& l : m.legs()) legs.push_back(v.adjoint() * l * v);
  return PModule(std::move(legs));
}

inline bool is_normal(const CMatrix& a) {
  const double n = frobenius(a);
  return frobenius(a * a.adjoint() - a.adjoint() * a) <= 1e-8 * n * n;
}

inline bool is_invertible(const CMatrix& a, double rtol = kDefaultRtol) {
  return smallest_singular_value(a) > static_cast<double>(a.rows()) * rtol;
}

/// A normal, B invertible.
inline bool in_class_m(const PModule& m, double rtol = kDefaultRtol) {
  return m.arity() == 2 && is_normal(m.a()) && is_invertible(m.b(), rtol);
}

/// A normal, both legs invertible.
inline bool in_class_n(const PModule& m, double rtol = kDefaultRtol) {
  return in_class_m(m, rtol) && is_invertible(m.a(), rtol);
}

/// (conj(U_A)·conj(|B|), conj(U_B)·conj(|A|)) in the coordinate identification.
inline PModule dual_module(const PModule& m, double rtol = kDefaultRtol) {
  require_binary(m, "dual");
  if (!is_invertible(m.a(), rtol) || !is_invertible(m.b(), rtol))
    throw Error(ErrorKind::NotInvertible, "dual needs both legs invertible");
  const auto pa = polar(m.a(), rtol);
  const auto pb = polar(m.b(), rtol);
  return PModule(pa.unitary.conj() * pb.positive.conj(), pb.unitary.conj() * pa.positive.conj());
}

struct DualityReport {
  double quantum_dim = 0.0;
  cplx ev_factor;
  double ev_residual = 0.0;
  cplx coev_factor;
  double coev_residual = 0.0;
  double zigzag_residual = 0.0;
};

/// Row vector of ev: e_i⊗e_j ↦ δ_ij.
inline CMatrix evaluation_map(std::size_t d) {
  CMatrix e(1, d * d);
  for (std::size_t i = 0; i < d; ++i) e(0, i * d + i) = 1.0;
  return e;
}

/// Column vector of coev: 1 ↦ Σ e_i⊗e_i.
inline CMatrix coevaluation_map(std::size_t d) { return evaluation_map(d).transpose(); }

inline DualityReport duality_check(const PModule& m, double rtol = kDefaultRtol) {
  const std::size_t d = m.dim();
  const PModule md = dual_module(m, rtol);
  const PModule left = boxtimes(md, m, rtol);
  const PModule right = boxtimes(m, md, rtol);
  const CMatrix ev = evaluation_map(d);
  const CMatrix coev = coevaluation_map(d);
  const double dd = static_cast<double>(d);

  DualityReport r;
  // least-squares scalar shared by both legs
  cplx num{};
  for (const auto& l : left.legs()) num += (ev * l * ev.adjoint())(0, 0);
  r.ev_factor = num / (2.0 * dd);
  for (const auto& l : left.legs())
    r.ev_residual = std::max(r.ev_residual, frobenius(ev * l - r.ev_factor * ev) / std::sqrt(dd));
  num = {};
  for (const auto& l : right.legs()) num += (coev.adjoint() * l * coev)(0, 0);
  r.coev_factor = num / (2.0 * dd);
  for (const auto& l : right.legs())
    r.coev_residual = std::max(r.coev_residual, frobenius(l * coev - r.coev_factor * coev) / std::sqrt(dd));
  if (r.ev_residual > rtol || r.coev_residual > rtol)
    throw Error(ErrorKind::NotIntertwiner, "no single scalar makes ev/coev intertwine the unit");

  const CMatrix id = CMatrix::identity(d);
  const double z1 = frobenius(kron(id, ev) * kron(coev, id) - id);
  const double z2 = frobenius(kron(ev, id) * kron(id, coev) - id);
  r.zigzag_residual = std::max(z1, z2);
  r.quantum_dim = (ev * flip_permutation(d, d) * coev)(0, 0).real();
  return r;
}

inline ScalarModule scalar_inverse(const ScalarModule& s, double tol = 1e-15) {
  if (std::abs(s.a) <= tol || std::abs(s.b) <= tol)
    throw Error(ErrorKind::OnUnitAxis, "inverse needs a != 0 and b != 0");
  return {std::abs(s.b) * std::polar(1.0, -arg_branch(s.a)), std::abs(s.a) * std::polar(1.0, -arg_branch(s.b))};
}

inline ScalarModule scalar_from_coords(const GroupCoords& c) {
  const double et = std::exp(c.t);
  return {c.u / std::sqrt(et + 1.0), std::sqrt(et / (et + 1.0)) * c.v};
}

inline GroupCoords coords_from_scalar(const ScalarModule& s) {
  const double a2 = std::norm(s.a), b2 = std::norm(s.b);
  if (a2 == 0.0 || b2 == 0.0) throw Error(ErrorKind::OnUnitAxis, "coordinates need a != 0 and b != 0");
  return {phase_of(s.a), phase_of(s.b), std::log(b2 / a2)};
}

/// Group law of S¹×S¹×ℝ.
inline GroupCoords operator+(const GroupCoords& x, const GroupCoords& y) { return {x.u * y.u, x.v * y.v, x.t + y.t}; }

/// Leg ñ·i+j is legs(m)[i] ⊗ legs(n)[j].
inline PModule kawamura_tensor(const PModule& m, const PModule& n) {
  std::vector<CMatrix> legs;
  legs.reserve(m.arity() * n.arity());
  for (const auto& x : m.legs())
    for (const auto& y : n.legs()) legs.push_back(kron(x, y));
  return PModule(std::move(legs));
}

/// X_{w_ℓ}···X_{w_1}: the first letter acts first.
inline CMatrix word_operator(const PModule& m, const std::vector<std::size_t>& word) {
  CMatrix w = CMatrix::identity(m.dim());
  for (std::size_t letter : word) {
    if (letter >= m.arity()) throw Error(ErrorKind::InvalidArgument, "word letter exceeds module arity");
    w = m.leg(letter) * w;
  }
  return w;
}

inline std::vector<std::size_t> parse_word(std::string_view w) {
  std::vector<std::size_t> out;
  for (char c : w) {
    if (c < '0' || c > '9') throw Error(ErrorKind::InvalidArgument, "word letters must be digits");
    out.push_back(static_cast<std::size_t>(c - '0'));
  }
  return out;
}

inline CMatrix word_operator(const PModule& m, std::string_view word) { return word_operator(m, parse_word(word)); }

/// |Σ_{|w|=n} ‖W_w ξ‖² − 1| for a unit vector ξ.
inline double conservation_defect(const PModule& m, const std::vector<cplx>& xi, std::size_t n) {
  std::vector<std::vector<cplx>> level{xi};
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<std::vector<cplx>> next;
    next.reserve(level.size() * m.arity());
    for (const auto& v : level)
      for (const auto& l : m.legs()) next.push_back(l * v);
    level = std::move(next);
  }
  double total = 0.0;
  for (const auto& v : level) total += std::real(dot(v, v));
  return std::abs(total - std::real(dot(xi, xi)));
}

}  // namespace pmod
