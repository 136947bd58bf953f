#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmod/error.hpp"
#include "pmod/families.hpp"
#include "pmod/module.hpp"
#include "pmod/structure.hpp"

namespace pmod::io {

using json = nlohmann::json;

/// Round to 12 significant digits so that rendered output is stable.
inline double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

/// Text rendering of a complex number; parts below 1e-13 in modulus print as 0.
inline std::string fmt(cplx z) {
  const double re = std::abs(z.real()) < 1e-13 ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < 1e-13 ? 0.0 : round12(z.imag());
  return fmt(re) + (im < 0 ? "-" : "+") + fmt(std::abs(im)) + "i";
}

inline json to_json(cplx z) { return json::array({round12(z.real()), round12(z.imag())}); }

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const PModule& m) {
  json legs = json::array();
  for (const auto& l : m.legs()) legs.push_back(to_json(l));
  return {{"arity", m.arity()}, {"dim", m.dim()}, {"legs", std::move(legs)}};
}

inline json to_json(const ScalarModule& s) { return {{"a", to_json(s.a)}, {"b", to_json(s.b)}}; }

inline json to_json(const AtomicLabel& l) { return {{"phase", to_json(l.phase)}, {"word", l.word}}; }

inline json to_json(const GPVector& z) {
  json out = json::array();
  for (const auto& s : z.entries) out.push_back(json::array({to_json(s.a), to_json(s.b)}));
  return out;
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline cplx parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::ShapeError, where + ": expected [re, im] pair");
  const cplx z{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error(ErrorKind::ShapeError, where + ": non-finite entry");
  return z;
}

inline CMatrix parse_matrix(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim)
    throw Error(ErrorKind::ShapeError, where + ": expected " + std::to_string(dim) + " rows");
  CMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != dim)
      throw Error(ErrorKind::ShapeError, rw + ": expected " + std::to_string(dim) + " entries");
    for (std::size_t c = 0; c < dim; ++c) m(i, c) = parse_complex(j[i][c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline std::size_t parse_count(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorKind::ShapeError, std::string("missing field '") + key + "'");
  const json& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw Error(ErrorKind::ShapeError, std::string("field '") + key + "' must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

/// Module from a JSON document; the Pythagorean identity is checked at `tol` (negative: skip).
inline PModule module_from_json(const json& doc, double tol) {
  if (!doc.is_object()) throw Error(ErrorKind::ShapeError, "module file must be a JSON object");
  const std::size_t arity = detail::parse_count(doc, "arity");
  const std::size_t dim = detail::parse_count(doc, "dim");
  if (arity < 2) throw Error(ErrorKind::ShapeError, "arity must be at least 2");
  if (!doc.contains("legs") || !doc["legs"].is_array() || doc["legs"].size() != arity)
    throw Error(ErrorKind::ShapeError, "legs: expected " + std::to_string(arity) + " matrices");
  std::vector<CMatrix> legs;
  for (std::size_t k = 0; k < arity; ++k)
    legs.push_back(detail::parse_matrix(doc["legs"][k], dim, "legs[" + std::to_string(k) + "]"));
  PModule m(std::move(legs));
  if (tol >= 0.0) {
    const auto v = validate(m, tol);
    if (!v.pass)
      throw Error(ErrorKind::PythagoreanViolation, "residual " + fmt(v.residual) + " exceeds tolerance " + fmt(tol));
  }
  return m;
}

inline PModule parse_module(const std::string& text, double tol = 1e-8) { return module_from_json(parse_json(text), tol); }

inline std::string render_module(const PModule& m) { return to_json(m).dump(2) + "\n"; }

/// GP vector from inline JSON: [[a, b], ...] with a, b as [re, im] pairs or reals.
inline GPVector parse_gp_vector(const std::string& text, double tol = 1e-8) {
  const json j = parse_json(text);
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::ShapeError, "GP vector must be a nonempty array");
  GPVector z;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw Error(ErrorKind::ShapeError, where + ": expected [a, b]");
    const ScalarModule s{detail::parse_complex(j[i][0], where + "[0]"), detail::parse_complex(j[i][1], where + "[1]")};
    const double r = std::abs(std::norm(s.a) + std::norm(s.b) - 1.0);
    if (r > tol) throw Error(ErrorKind::PythagoreanViolation, where + ": |a|^2+|b|^2 off by " + fmt(r));
    z.entries.push_back(s);
  }
  return z;
}

// ---------------------------------------------------------------- reports

enum class Format { Text, Json };

inline std::string matrix_text(const CMatrix& m, const std::string& indent) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << indent;
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "  " : "") << fmt(m(i, j));
    os << "\n";
  }
  return os.str();
}

inline std::string render(const PModule& m, Format f) {
  if (f == Format::Json) return render_module(m);
  std::ostringstream os;
  os << "module: arity " << m.arity() << ", dim " << m.dim() << "\n";
  for (std::size_t k = 0; k < m.arity(); ++k) os << "leg " << k << ":\n" << matrix_text(m.leg(k), "  ");
  return os.str();
}

inline std::string render(const ValidationReport& v, Format f) {
  if (f == Format::Json) return json{{"pass", v.pass}, {"residual", round12(v.residual)}}.dump(2) + "\n";
  return std::string(v.pass ? "pass" : "fail") + " (residual " + fmt(v.residual) + ")\n";
}

inline json summand_json(const PModule& m, const Summand& s) {
  json j{{"dim", s.dim},
         {"tag", std::string(to_string(s.tag))},
         {"fingerprint", s.fingerprint},
         {"isometry", to_json(s.isometry)},
         {"legs", to_json(restrict_to(m, s.isometry))["legs"]}};
  if (s.atomic) j["label"] = to_json(*s.atomic);
  if (s.gp) j["gp_vector"] = to_json(*s.gp);
  return j;
}

inline std::string render(const PModule& m, const DecompositionReport& r, Format f) {
  if (f == Format::Json) {
    json summands = json::array();
    for (const auto& s : r.summands) summands.push_back(summand_json(m, s));
    json j{{"summands", std::move(summands)},
           {"residual_dimension", r.residual_dimension},
           {"p_dimension", r.p_dimension},
           {"confidence", std::string(to_string(r.confidence))},
           {"seed", r.seed},
           {"invariance_defect", round12(r.invariance_defect)}};
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "summands: " << r.summands.size() << "\n";
  for (std::size_t i = 0; i < r.summands.size(); ++i) {
    const auto& s = r.summands[i];
    os << "[" << i << "] dim " << s.dim << ", " << to_string(s.tag);
    if (s.atomic) os << ", label (" << s.atomic->word << ", " << fmt(s.atomic->phase) << ")";
    os << "\n";
    const PModule sub = restrict_to(m, s.isometry);
    if (s.dim == 1) {
      os << "    legs (" << fmt(sub.a()(0, 0)) << ", " << fmt(sub.b()(0, 0)) << ")\n";
    } else {
      for (std::size_t k = 0; k < sub.arity(); ++k) os << "    leg " << k << ":\n" << matrix_text(sub.leg(k), "      ");
    }
  }
  os << "residual_dimension: " << r.residual_dimension << "\n";
  os << "p_dimension: " << r.p_dimension << "\n";
  os << "confidence: " << to_string(r.confidence) << " (seed " << r.seed << ")\n";
  return os.str();
}

inline std::string render(const ClassifyReport& r, Format f) {
  if (f == Format::Json) {
    json atoms = json::array();
    for (const auto& a : r.atoms) atoms.push_back({{"label", to_json(a.label)}, {"isometry", to_json(a.isometry)}});
    json j{{"atomic_dim", r.atomic_dim},
           {"diffuse_dim", r.diffuse_dim},
           {"residual_dim", r.residual_dim},
           {"p_dimension", r.p_dimension},
           {"diffuse_commutant_dim", r.diffuse_commutant_dim},
           {"confidence", std::string(to_string(r.confidence))},
           {"atoms", std::move(atoms)}};
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "atomic_dim: " << r.atomic_dim << "\n";
  os << "diffuse_dim: " << r.diffuse_dim << "\n";
  os << "residual_dim: " << r.residual_dim << "\n";
  os << "p_dimension: " << r.p_dimension << "\n";
  os << "diffuse_commutant_dim: " << r.diffuse_commutant_dim << "\n";
  for (const auto& a : r.atoms) os << "atom (" << a.label.word << ", " << fmt(a.label.phase) << ")\n";
  os << "confidence: " << to_string(r.confidence) << "\n";
  return os.str();
}

inline std::string render(const EquivalenceResult& r, Format f) {
  if (f == Format::Json) {
    json j{{"verdict", std::string(to_string(r.verdict))}, {"reason", r.reason}};
    if (r.witness) j["witness"] = to_json(*r.witness);
    return j.dump(2) + "\n";
  }
  std::string s = std::string(to_string(r.verdict)) + " (" + r.reason + ")\n";
  if (r.witness) s += "witness:\n" + matrix_text(*r.witness, "  ");
  return s;
}

inline std::string render(const DualityReport& r, Format f) {
  if (f == Format::Json) {
    json j{{"quantum_dim", round12(r.quantum_dim)},
           {"ev_factor", to_json(r.ev_factor)},
           {"ev_residual", round12(r.ev_residual)},
           {"coev_factor", to_json(r.coev_factor)},
           {"coev_residual", round12(r.coev_residual)},
           {"zigzag_residual", round12(r.zigzag_residual)}};
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "quantum_dim: " << fmt(r.quantum_dim) << "\n";
  os << "ev_factor: " << fmt(r.ev_factor) << " (residual " << fmt(r.ev_residual) << ")\n";
  os << "coev_factor: " << fmt(r.coev_factor) << " (residual " << fmt(r.coev_residual) << ")\n";
  os << "zigzag_residual: " << fmt(r.zigzag_residual) << "\n";
  return os.str();
}

inline std::string render(const std::vector<AtomicLabel>& labels, Format f) {
  if (f == Format::Json) {
    json j = json::array();
    for (const auto& l : labels) j.push_back(to_json(l));
    return json{{"labels", j}}.dump(2) + "\n";
  }
  std::ostringstream os;
  for (const auto& l : labels) os << "(" << l.word << ", " << fmt(l.phase) << ")\n";
  return os.str();
}

inline std::string render(const std::vector<GPVector>& vs, Format f) {
  if (f == Format::Json) {
    json j = json::array();
    for (const auto& v : vs) j.push_back(to_json(v));
    return json{{"vectors", j}}.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "vectors: " << vs.size() << "\n";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    os << "y" << i + 1 << " (length " << vs[i].size() << "):";
    for (const auto& s : vs[i].entries) os << " (" << fmt(s.a) << ", " << fmt(s.b) << ")";
    os << "\n";
  }
  return os.str();
}

inline std::string render(const D2Fusion& r, Format f) {
  if (f == Format::Json) {
    json blocks = json::array();
    for (const auto& b : r.blocks) {
      json split = json::array();
      for (const auto& s : b.split) split.push_back(to_json(s));
      blocks.push_back({{"module", to_json(b.module)}, {"split", split}});
    }
    return json{{"blocks", blocks}}.dump(2) + "\n";
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    const auto& b = r.blocks[i];
    os << "block " << i << ":\n";
    for (std::size_t k = 0; k < 2; ++k) os << "  leg " << k << ":\n" << matrix_text(b.module.leg(k), "    ");
    for (const auto& s : b.split) os << "  splits into (" << fmt(s.a) << ", " << fmt(s.b) << ")\n";
  }
  return os.str();
}

inline std::string render(const std::vector<std::string>& words, Format f) {
  if (f == Format::Json) return json{{"count", words.size()}, {"words", words}}.dump(2) + "\n";
  std::ostringstream os;
  os << "count: " << words.size() << "\n";
  for (const auto& w : words) os << w << "\n";
  return os.str();
}

}  // namespace pmod::io
