#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmod/error.hpp"
#include "pmod/families.hpp"
#include "pmod/linalg.hpp"
#include "pmod/module.hpp"
#include "pmod/rng.hpp"

namespace pmod {

enum class Confidence { Certified, Heuristic };
enum class SummandTag { Atomic, Diffuse, Unknown };

inline std::string_view to_string(Confidence c) { return c == Confidence::Certified ? "certified" : "heuristic"; }

inline std::string_view to_string(SummandTag t) {
  switch (t) {
    case SummandTag::Atomic: return "atomic";
    case SummandTag::Diffuse: return "diffuse";
    case SummandTag::Unknown: return "unknown";
  }
  return "unknown";
}

struct Summand {
  CMatrix isometry;
  std::size_t dim = 0;
  SummandTag tag = SummandTag::Unknown;
  std::optional<AtomicLabel> atomic;
  std::optional<GPVector> gp;
  std::vector<double> fingerprint;
};

struct DecompositionReport {
  std::vector<Summand> summands;
  std::size_t residual_dimension = 0;
  std::size_t p_dimension = 0;
  Confidence confidence = Confidence::Certified;
  std::uint64_t seed = 0;
  double invariance_defect = 0.0;
};

struct AtomicComponent {
  AtomicLabel label;
  CMatrix isometry;
};

struct CompleteSubmodule {
  CMatrix isometry;
  std::size_t p_dimension = 0;
  Confidence confidence = Confidence::Heuristic;
  double gap_ratio = 0.0;
  double invariance_defect = 0.0;
};

struct ClassifyReport {
  std::size_t diffuse_dim = 0;
  std::size_t atomic_dim = 0;
  std::size_t residual_dim = 0;
  std::size_t p_dimension = 0;
  std::size_t diffuse_commutant_dim = 0;
  Confidence confidence = Confidence::Heuristic;
  std::vector<AtomicComponent> atoms;
  CMatrix complete;
  CMatrix diffuse;
};

enum class Verdict { True, False, Undecided };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

struct EquivalenceResult {
  Verdict verdict = Verdict::Undecided;
  std::optional<CMatrix> witness;
  std::string reason;
};

inline constexpr double kInvarianceTol = 1e-8;
inline constexpr std::size_t kTraceWordCap = 4096;

// ---------------------------------------------------------------- intertwiners

/// Basis of {X : X·leg_k(m) = leg_k(n)·X}.
inline std::vector<CMatrix> intertwiner_basis(const PModule& m, const PModule& n, double rtol = kDefaultRtol) {
  if (m.arity() != n.arity()) throw Error(ErrorKind::ShapeMismatch, "intertwiners need equal arity");
  std::vector<CommutationPair> pairs;
  for (std::size_t k = 0; k < m.arity(); ++k) pairs.push_back({n.leg(k), m.leg(k)});
  return commutation_kernel(pairs, rtol);
}

/// Intertwiners of the legs and of their adjoints.
inline std::vector<CMatrix> star_intertwiner_basis(const PModule& m, const PModule& n, double rtol = kDefaultRtol) {
  if (m.arity() != n.arity()) throw Error(ErrorKind::ShapeMismatch, "intertwiners need equal arity");
  std::vector<CommutationPair> pairs;
  for (std::size_t k = 0; k < m.arity(); ++k) {
    pairs.push_back({n.leg(k), m.leg(k)});
    pairs.push_back({n.leg(k).adjoint(), m.leg(k).adjoint()});
  }
  return commutation_kernel(pairs, rtol);
}

inline std::vector<CMatrix> star_commutant(const PModule& m, double rtol = kDefaultRtol) {
  return star_intertwiner_basis(m, m, rtol);
}

/// max_k ‖(I − VV*)·leg_k·V‖_F.
inline double invariance_defect(const PModule& m, const CMatrix& v) {
  if (v.cols() == 0) return 0.0;
  double worst = 0.0;
  for (const auto& l : m.legs()) {
    const CMatrix lv = l * v;
    worst = std::max(worst, frobenius(lv - v * (v.adjoint() * lv)));
  }
  return worst;
}

// ---------------------------------------------------------------- complete part

/// Smallest complete submodule, taken as the support of a stationary state of
/// ρ ↦ Σ_k X_k ρ X_k*: the common column space of every fixed point.
inline CompleteSubmodule complete_submodule(const PModule& m, double rtol = kDefaultRtol) {
  const std::size_t d = m.dim();
  CMatrix l = -CMatrix::identity(d * d);
  for (const auto& x : m.legs()) l += kron(x, x.conj());
  const auto ker = kernel_basis_ex(l, rtol, 1.0);
  CompleteSubmodule out;
  CMatrix cols(d, 0);
  for (std::size_t k = 0; k < ker.basis.cols(); ++k) {
    CMatrix y(d, d);
    for (std::size_t t = 0; t < d * d; ++t) y.entries()[t] = ker.basis(t, k);
    cols = hcat(cols, y);
  }
  out.isometry = cols.cols() ? range_basis(cols, 1e-8, 0.0) : CMatrix(d, 0);
  out.p_dimension = out.isometry.cols();
  out.invariance_defect = invariance_defect(m, out.isometry);
  const double below = std::max(ker.largest_kernel_value, 1e-300);
  out.gap_ratio = ker.smallest_range_value > 0.0 ? ker.smallest_range_value / below : 1e300;
  const bool gap_ok = out.gap_ratio >= 1e4;
  out.confidence = (gap_ok && out.invariance_defect <= kInvarianceTol && out.p_dimension > 0) ? Confidence::Certified
                                                                                             : Confidence::Heuristic;
  return out;
}

// ---------------------------------------------------------------- atomic part

namespace detail {

inline bool is_lyndon(const std::string& w) { return is_prime_word(w) && least_rotation(w) == w; }

struct AtomicSearch {
  const PModule& m;
  std::size_t max_len;
  double norm_tol;
  std::vector<AtomicComponent> found;
  CMatrix span;

  bool already_found(const CMatrix& carrier) const {
    if (span.cols() == 0) return false;
    return frobenius(carrier - span * (span.adjoint() * carrier)) <= 1e-6;
  }

  /// Largest W-invariant subspace of span(q) on which W is isometric.
  CMatrix invariant_core(const CMatrix& w, CMatrix q) const {
    const std::size_t d = m.dim();
    while (q.cols() > 0) {
      const CMatrix wq = w * q;
      const CMatrix t = wq - q * (q.adjoint() * wq);
      const CMatrix k = kernel_basis(t, 1e-7, 1.0);
      if (k.cols() == q.cols()) break;
      q = k.cols() ? q * k : CMatrix(d, 0);
    }
    return q;
  }

  void emit(const std::string& word, const CMatrix& q) {
    const CMatrix w = word_operator(m, word);
    const CMatrix core = invariant_core(w, q);
    if (core.cols() == 0) return;
    const CMatrix u = core.adjoint() * w * core;
    NormalEig e;
    try {
      e = normal_eig(u, 1e-6);
    } catch (const Error&) {
      return;
    }
    const auto letters = parse_word(word);
    for (std::size_t k = 0; k < e.values.size(); ++k) {
      if (std::abs(std::abs(e.values[k]) - 1.0) > 1e-6) continue;
      auto v = core * e.vectors.col(k);
      CMatrix orbit(m.dim(), letters.size());
      for (std::size_t j = 0; j < letters.size(); ++j) {
        orbit.set_col(j, v);
        v = m.leg(letters[j]) * v;
      }
      const CMatrix carrier = range_basis(orbit, 1e-6, 1.0);
      if (carrier.cols() != letters.size() || already_found(carrier)) continue;
      found.push_back({{word, phase_of(e.values[k])}, carrier});
      span = span.cols() ? hcat(span, carrier) : carrier;
    }
  }

  /// Depth-first over words; q spans {η : the prefix word is isometric on η},
  /// wq is the prefix word applied to q.
  void descend(const std::string& prefix, const CMatrix& q, const CMatrix& wq) {
    for (std::size_t letter = 0; letter < m.arity(); ++letter) {
      const CMatrix y = m.leg(letter) * wq;
      const CMatrix g = y.adjoint() * y;
      const auto e = hermitian_eig(0.5 * (g + g.adjoint()), 1e-6);
      std::size_t first = 0;
      while (first < e.values.size() && e.values[first] < 1.0 - norm_tol) ++first;
      if (first == e.values.size()) continue;
      const CMatrix c = e.vectors.cols_range(first, e.values.size() - first);
      const CMatrix q2 = q * c;
      const CMatrix wq2 = y * c;
      const std::string word = prefix + static_cast<char>('0' + letter);
      if (is_lyndon(word)) emit(word, q2);
      if (word.size() < max_len) descend(word, q2, wq2);
    }
  }
};

}  // namespace detail

/// Irreducible atomic submodules m_{w,z} with |w| ≤ max_len, each with its carrier.
inline std::vector<AtomicComponent> atomic_part(const PModule& m, std::size_t max_len = 0,
                                                double rtol = kDefaultRtol) {
  require_binary(m, "atomic_part");
  if (max_len == 0) max_len = 2 * m.dim();
  detail::AtomicSearch s{m, max_len, std::max(1e-7, 100.0 * rtol), {}, CMatrix(m.dim(), 0)};
  const CMatrix id = CMatrix::identity(m.dim());
  s.descend("", id, id);
  return s.found;
}

// ---------------------------------------------------------------- fingerprints and GP detection

inline double round_sig(double x) {
  const double r = std::round(x * 1e8) / 1e8;
  return r == 0.0 ? 0.0 : r;
}

/// Rounded traces of words of length ≤ 2.
inline std::vector<double> trace_fingerprint(const PModule& m) {
  std::vector<double> out;
  auto push = [&](cplx t) {
    out.push_back(round_sig(t.real()));
    out.push_back(round_sig(t.imag()));
  };
  for (const auto& l : m.legs()) push(trace(l));
  for (std::size_t i = 0; i < m.arity(); ++i)
    for (std::size_t j = i; j < m.arity(); ++j) push(trace(m.leg(i) * m.leg(j)));
  return out;
}

/// Recover a GP vector when m is unitarily a weighted cyclic shift.
inline std::optional<GPVector> detect_gp(const PModule& m, double rtol = kDefaultRtol) {
  if (m.arity() != 2) return std::nullopt;
  const std::size_t d = m.dim();
  try {
    if (!is_invertible(m.b(), rtol)) return std::nullopt;
    const auto pb = polar(m.b(), rtol);
    const CMatrix binv = psd_funcalc(pb.positive, SpectralFn::Inv, rtol) * pb.unitary.adjoint();
    const CMatrix t = binv * m.a();
    if (!is_normal(t)) return std::nullopt;
    const auto e = normal_eig(t, 1e-6);
    std::vector<std::vector<cplx>> v{e.vectors.col(0)};
    GPVector z;
    for (std::size_t k = 0; k < d; ++k) {
      const auto av = m.a() * v[k];
      const auto bv = m.b() * v[k];
      const double na = norm2(av);
      if (na < 1e-9) return std::nullopt;
      std::vector<cplx> next;
      if (k + 1 < d) {
        next = av;
        for (auto& x : next) x /= na;
        const cplx ph = std::conj(phase_of(dot(next, bv)));
        for (auto& x : next) x /= ph;
      } else {
        next = v[0];
      }
      const cplx ak = dot(next, av), bk = dot(next, bv);
      double res = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        res += std::norm(av[i] - ak * next[i]) + std::norm(bv[i] - bk * next[i]);
      if (std::sqrt(res) > 1e-7) return std::nullopt;
      z.entries.push_back({ak, bk});
      if (k + 1 < d) v.push_back(std::move(next));
    }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(dot(v[i], v[j])) > 1e-7) return std::nullopt;
    return gp_canonical(z, 1e-9).canonical;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- reducing decomposition

namespace detail {

struct Splitter {
  const PModule& m;
  double rtol;
  Rng rng;
  bool certified = true;
  double worst_defect = 0.0;
  std::vector<CMatrix> parts;

  void split(const CMatrix& v) {
    const PModule sub = restrict_to(m, v);
    const auto comm = star_commutant(sub, rtol);
    if (comm.size() <= 1) {
      if (comm.empty()) certified = false;
      parts.push_back(v);
      return;
    }
    const std::size_t k = v.cols();
    for (int attempt = 0; attempt < 8; ++attempt) {
      CMatrix h(k, k);
      for (const auto& x : comm) h += rng.complex_normal() * x;
      h = 0.5 * (h + h.adjoint());
      const auto e = hermitian_eig(h, 1e-6);
      const double tol = 1e-7 * std::max(1.0, frobenius(h));
      std::vector<std::pair<std::size_t, std::size_t>> clusters;
      std::size_t start = 0;
      for (std::size_t i = 1; i <= k; ++i)
        if (i == k || e.values[i] - e.values[i - 1] > tol) {
          clusters.emplace_back(start, i - start);
          start = i;
        }
      if (clusters.size() < 2) continue;
      for (const auto& [s, len] : clusters) {
        const CMatrix q = e.vectors.cols_range(s, len);
        const CMatrix rest = complement_within(CMatrix::identity(k), q);
        const double defect = std::max(invariance_defect(sub, q), invariance_defect(sub, rest));
        worst_defect = std::max(worst_defect, defect);
        if (defect > kInvarianceTol * std::sqrt(static_cast<double>(m.dim())))
          throw Error(ErrorKind::NotFullSuspected, "complement of an invariant subspace is not invariant");
      }
      for (const auto& [s, len] : clusters) split(v * e.vectors.cols_range(s, len));
      return;
    }
    certified = false;
    parts.push_back(v);
  }
};

inline std::vector<CMatrix> reducing_parts(const PModule& m, double rtol, std::uint64_t seed, bool& certified,
                                           double& defect) {
  Splitter s{m, rtol, Rng(seed)};
  s.split(CMatrix::identity(m.dim()));
  certified = s.certified;
  defect = s.worst_defect;
  return s.parts;
}

inline Summand describe_summand(const PModule& m, const CMatrix& v, double rtol) {
  Summand s;
  s.isometry = v;
  s.dim = v.cols();
  const PModule sub = restrict_to(m, v);
  s.fingerprint = trace_fingerprint(sub);
  if (m.arity() != 2) return s;
  const auto atoms = atomic_part(sub, sub.dim(), rtol);
  if (!atoms.empty() && atoms.front().isometry.cols() == sub.dim()) {
    s.tag = SummandTag::Atomic;
    s.atomic = atoms.front().label;
  } else {
    s.tag = SummandTag::Diffuse;
    s.gp = detect_gp(sub, rtol);
  }
  return s;
}

inline void canonical_sort(std::vector<Summand>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Summand& a, const Summand& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.fingerprint < b.fingerprint;
  });
}

}  // namespace detail

/// Decomposition of a full module into irreducible summands via its *-commutant.
inline DecompositionReport decompose_full(const PModule& m, double rtol = kDefaultRtol, std::uint64_t seed = 0) {
  if (m.dim() <= 16) {
    const auto cs = complete_submodule(m, rtol);
    if (cs.p_dimension < m.dim())
      throw Error(ErrorKind::NotFullSuspected, "stationary support is smaller than the carrier");
  }
  DecompositionReport r;
  r.seed = seed;
  bool certified = true;
  const auto parts = detail::reducing_parts(m, rtol, seed, certified, r.invariance_defect);
  for (const auto& v : parts) {
    r.summands.push_back(detail::describe_summand(m, v, rtol));
    r.invariance_defect = std::max(r.invariance_defect, invariance_defect(m, v));
  }
  detail::canonical_sort(r.summands);
  r.p_dimension = m.dim();
  r.residual_dimension = 0;
  r.confidence = certified ? Confidence::Certified : Confidence::Heuristic;
  return r;
}

/// Restrict to the complete submodule, then decompose it.
inline DecompositionReport decompose(const PModule& m, double rtol = kDefaultRtol, std::uint64_t seed = 0) {
  const auto cs = complete_submodule(m, rtol);
  DecompositionReport r;
  r.seed = seed;
  r.p_dimension = cs.p_dimension;
  r.residual_dimension = m.dim() - cs.p_dimension;
  if (cs.p_dimension == 0) {
    r.confidence = Confidence::Heuristic;
    return r;
  }
  const PModule sub = restrict_to(m, cs.isometry);
  bool certified = true;
  const auto parts = detail::reducing_parts(sub, rtol, seed, certified, r.invariance_defect);
  for (const auto& v : parts) {
    Summand s = detail::describe_summand(sub, v, rtol);
    s.isometry = cs.isometry * v;
    r.invariance_defect = std::max(r.invariance_defect, invariance_defect(m, s.isometry));
    r.summands.push_back(std::move(s));
  }
  detail::canonical_sort(r.summands);
  r.confidence = (certified && cs.confidence == Confidence::Certified) ? Confidence::Certified
                                                                       : Confidence::Heuristic;
  return r;
}

// ---------------------------------------------------------------- classification

inline ClassifyReport classify_parts(const PModule& m, double rtol = kDefaultRtol, std::size_t max_len = 0) {
  require_binary(m, "classify_parts");
  const std::size_t d = m.dim();
  ClassifyReport r;
  const auto cs = complete_submodule(m, rtol);
  r.complete = cs.isometry;
  r.p_dimension = cs.p_dimension;
  r.residual_dim = d - cs.p_dimension;
  r.atoms = atomic_part(m, max_len, rtol);
  CMatrix atom_span(d, 0);
  for (const auto& a : r.atoms) atom_span = hcat(atom_span, a.isometry);
  r.atomic_dim = atom_span.cols();
  r.diffuse = complement_within(cs.isometry, atom_span);
  r.diffuse_dim = r.diffuse.cols();

  bool certified = cs.confidence == Confidence::Certified && r.atomic_dim + r.diffuse_dim == cs.p_dimension;
  if (r.diffuse_dim > 0) {
    if (invariance_defect(m, r.diffuse) > kInvarianceTol) certified = false;
    const PModule sub = restrict_to(m, r.diffuse);
    r.diffuse_commutant_dim = star_commutant(sub, rtol).size();
    const bool contractive = spectral_norm(sub.a()) < 1.0 - 1e-9 && spectral_norm(sub.b()) < 1.0 - 1e-9;
    if (!contractive && !atomic_part(sub, sub.dim(), rtol).empty()) certified = false;
  }
  r.confidence = certified ? Confidence::Certified : Confidence::Heuristic;
  return r;
}

// ---------------------------------------------------------------- equivalence

namespace detail {

inline std::vector<cplx> word_traces(const PModule& m, std::size_t max_len, std::size_t cap) {
  std::vector<cplx> out;
  std::vector<CMatrix> level{CMatrix::identity(m.dim())};
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (out.size() + level.size() * m.arity() > cap) break;
    std::vector<CMatrix> next;
    for (const auto& w : level)
      for (const auto& l : m.legs()) {
        next.push_back(l * w);
        out.push_back(trace(next.back()));
      }
    level = std::move(next);
  }
  return out;
}

/// Unitary U with U·leg_k(m)·U* = leg_k(n), for *-irreducible m.
inline EquivalenceResult irreducible_match(const PModule& m, const PModule& n, double rtol) {
  const auto hom = star_intertwiner_basis(m, n, rtol);
  if (hom.empty()) return {Verdict::False, std::nullopt, "no intertwiner"};
  if (hom.size() > 1) return {Verdict::Undecided, std::nullopt, "intertwiner space not one-dimensional"};
  const CMatrix& x = hom.front();
  const CMatrix g = x.adjoint() * x;
  const double c = trace(g).real() / static_cast<double>(m.dim());
  if (!(c > 0.0) || frobenius(g - c * CMatrix::identity(m.dim())) > 1e-7 * c)
    return {Verdict::False, std::nullopt, "intertwiner is not a multiple of a unitary"};
  return {Verdict::True, (1.0 / std::sqrt(c)) * x, "irreducible"};
}

inline double conjugation_defect(const PModule& m, const PModule& n, const CMatrix& u) {
  double worst = frobenius(u.adjoint() * u - CMatrix::identity(m.dim()));
  for (std::size_t k = 0; k < m.arity(); ++k)
    worst = std::max(worst, frobenius(u * m.leg(k) * u.adjoint() - n.leg(k)));
  return worst;
}

}  // namespace detail

inline EquivalenceResult equivalent(const PModule& m, const PModule& n, double rtol = kDefaultRtol,
                                    std::uint64_t seed = 0) {
  if (m.dim() != n.dim()) return {Verdict::False, std::nullopt, "dimension mismatch"};
  if (m.arity() != n.arity()) return {Verdict::False, std::nullopt, "arity mismatch"};
  const std::size_t d = m.dim();

  const std::size_t len = 2 * d;
  const auto tm = detail::word_traces(m, len, kTraceWordCap);
  const auto tn = detail::word_traces(n, len, kTraceWordCap);
  const double trace_tol = std::max(1e-7, 1e3 * rtol) * static_cast<double>(d);
  for (std::size_t k = 0; k < tm.size(); ++k)
    if (std::abs(tm[k] - tn[k]) > trace_tol) return {Verdict::False, std::nullopt, "word trace mismatch"};

  const double verify_tol = 1e-7 * std::max(1.0, static_cast<double>(d));
  try {
    if (star_commutant(m, rtol).size() == 1) {
      auto r = detail::irreducible_match(m, n, rtol);
      if (r.verdict == Verdict::True && detail::conjugation_defect(m, n, *r.witness) > verify_tol)
        return {Verdict::Undecided, std::nullopt, "witness failed verification"};
      return r;
    }
    bool cert_m = true, cert_n = true;
    double dm = 0.0, dn = 0.0;
    const auto pm = detail::reducing_parts(m, rtol, seed, cert_m, dm);
    const auto pn = detail::reducing_parts(n, rtol, seed, cert_n, dn);
    if (!cert_m || !cert_n) return {Verdict::Undecided, std::nullopt, "decomposition not certified"};
    if (pm.size() != pn.size()) return {Verdict::False, std::nullopt, "different number of irreducible summands"};

    std::vector<bool> used(pn.size(), false);
    CMatrix u(d, d);
    for (const auto& vm : pm) {
      const PModule sm = restrict_to(m, vm);
      bool matched = false;
      for (std::size_t j = 0; j < pn.size() && !matched; ++j) {
        if (used[j] || pn[j].cols() != vm.cols()) continue;
        const PModule sn = restrict_to(n, pn[j]);
        const auto r = detail::irreducible_match(sm, sn, rtol);
        if (r.verdict != Verdict::True) continue;
        used[j] = true;
        matched = true;
        u += pn[j] * *r.witness * vm.adjoint();
      }
      if (!matched) return {Verdict::False, std::nullopt, "summand without partner"};
    }
    if (detail::conjugation_defect(m, n, u) > verify_tol)
      return {Verdict::Undecided, std::nullopt, "assembled witness failed verification"};
    return {Verdict::True, u, "summands matched"};
  } catch (const Error& e) {
    return {Verdict::Undecided, std::nullopt, e.what()};
  }
}

}  // namespace pmod
