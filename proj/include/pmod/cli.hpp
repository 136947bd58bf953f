#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmod/error.hpp"
#include "pmod/families.hpp"
#include "pmod/io.hpp"
#include "pmod/module.hpp"
#include "pmod/structure.hpp"

namespace pmod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Exit code for a library error.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::ShapeError:
    case ErrorKind::InvalidArgument:
      return kExitUsage;
    default:
      return kExitDomain;
  }
}

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PModule load(const std::string& path, double input_tol) { return io::parse_module(read_file(path), input_tol); }

}  // namespace detail

/// Runs one command line (without the program name); reports go to `out`,
/// diagnostics to `err`.
inline int execute_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pythagorean module calculator", "pmod"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  double tol = kDefaultRtol;
  double input_tol = 1e-8;
  std::size_t max_word_len = 0;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  app.add_option("--tol", tol, "relative numerical tolerance")->capture_default_str();
  app.add_option("--input-tol", input_tol, "Pythagorean tolerance for input files")->capture_default_str();
  app.add_option("--max-word-len", max_word_len, "word budget for atomic search (default 2*dim)");
  app.add_option("--seed", seed, "seed for randomized steps");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::string file_a, file_b;
  auto* validate_cmd = app.add_subcommand("validate", "check the Pythagorean identity of a module file");
  validate_cmd->add_option("file", file_a)->required();

  auto* fuse_cmd = app.add_subcommand("fuse", "fusion product of two modules");
  fuse_cmd->add_option("a", file_a)->required();
  fuse_cmd->add_option("b", file_b)->required();

  auto* kfuse_cmd = app.add_subcommand("kfuse", "arity-multiplying tensor of two modules");
  kfuse_cmd->add_option("a", file_a)->required();
  kfuse_cmd->add_option("b", file_b)->required();

  bool dual_check = false;
  auto* dual_cmd = app.add_subcommand("dual", "dual module (both legs invertible)");
  dual_cmd->add_option("file", file_a)->required();
  dual_cmd->add_flag("--check", dual_check, "report ev/coev and quantum dimension instead");

  auto* decompose_cmd = app.add_subcommand("decompose", "complete part and irreducible summands");
  decompose_cmd->add_option("file", file_a)->required();

  auto* classify_cmd = app.add_subcommand("classify", "atomic, diffuse and residual dimensions");
  classify_cmd->add_option("file", file_a)->required();

  auto* equiv_cmd = app.add_subcommand("equiv", "unitary equivalence test");
  equiv_cmd->add_option("a", file_a)->required();
  equiv_cmd->add_option("b", file_b)->required();

  std::string word;
  std::vector<double> phase{1.0, 0.0};
  std::string fuse_with;
  auto* atomic_cmd = app.add_subcommand("atomic", "atomic module for a prime word and phase");
  atomic_cmd->add_option("--word", word)->required();
  atomic_cmd->add_option("--phase", phase, "phase as RE IM")->expected(2);
  atomic_cmd->add_option("--fuse-with", fuse_with, "diffuse module file to absorb");

  std::string zs, zts;
  auto* gp_cmd = app.add_subcommand("gp-fuse", "closed-form fusion of two GP vectors");
  gp_cmd->add_option("--z", zs, "JSON list of [a, b] pairs")->required();
  gp_cmd->add_option("--zt", zts, "JSON list of [a, b] pairs")->required();

  auto* d2_cmd = app.add_subcommand("d2-fuse", "closed-form fusion of two D2 modules");
  d2_cmd->add_option("a", file_a)->required();
  d2_cmd->add_option("b", file_b)->required();

  std::size_t dim = 0, zeros = 0;
  std::string cls = "N";
  auto* sample_cmd = app.add_subcommand("sample", "seeded random module of class M or N");
  sample_cmd->add_option("--dim", dim)->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--class", cls)->check(CLI::IsMember({"M", "N"}))->capture_default_str();
  sample_cmd->add_option("--zeros", zeros, "zero eigenvalues of A (class M)");

  std::size_t length = 0;
  auto* words_cmd = app.add_subcommand("prime-words", "Lyndon words of a given length");
  words_cmd->add_option("--length", length)->required()->check(CLI::PositiveNumber);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  const io::Format fmt = format == "json" ? io::Format::Json : io::Format::Text;
  try {
    if (validate_cmd->parsed()) {
      const PModule m = io::module_from_json(io::parse_json(detail::read_file(file_a)), -1.0);
      const auto v = validate(m, input_tol);
      out << io::render(v, fmt);
      return v.pass ? kExitOk : kExitDomain;
    }
    if (fuse_cmd->parsed()) {
      out << io::render(boxtimes(detail::load(file_a, input_tol), detail::load(file_b, input_tol), tol), fmt);
      return kExitOk;
    }
    if (kfuse_cmd->parsed()) {
      out << io::render(kawamura_tensor(detail::load(file_a, input_tol), detail::load(file_b, input_tol)), fmt);
      return kExitOk;
    }
    if (dual_cmd->parsed()) {
      const PModule m = detail::load(file_a, input_tol);
      if (dual_check) {
        out << io::render(duality_check(m, tol), fmt);
      } else {
        out << io::render(dual_module(m, tol), fmt);
      }
      return kExitOk;
    }
    if (decompose_cmd->parsed()) {
      const PModule m = detail::load(file_a, input_tol);
      out << io::render(m, decompose(m, tol, seed.value_or(0)), fmt);
      return kExitOk;
    }
    if (classify_cmd->parsed()) {
      const PModule m = detail::load(file_a, input_tol);
      out << io::render(classify_parts(m, tol, max_word_len), fmt);
      return kExitOk;
    }
    if (equiv_cmd->parsed()) {
      const auto r = equivalent(detail::load(file_a, input_tol), detail::load(file_b, input_tol), tol,
                                seed.value_or(0));
      out << io::render(r, fmt);
      return kExitOk;
    }
    if (atomic_cmd->parsed()) {
      const AtomicLabel label{word, {phase[0], phase[1]}};
      if (std::abs(std::abs(label.phase) - 1.0) > input_tol)
        throw Error(ErrorKind::InvalidArgument, "phase must have unit modulus");
      if (fuse_with.empty()) {
        out << io::render(atomic_module(label), fmt);
      } else {
        out << io::render(atomic_diffuse_fuse(label, detail::load(fuse_with, input_tol), tol), fmt);
      }
      return kExitOk;
    }
    if (gp_cmd->parsed()) {
      out << io::render(gp_fuse(io::parse_gp_vector(zs, input_tol), io::parse_gp_vector(zts, input_tol)), fmt);
      return kExitOk;
    }
    if (d2_cmd->parsed()) {
      out << io::render(d2_fuse(detail::load(file_a, input_tol), detail::load(file_b, input_tol)), fmt);
      return kExitOk;
    }
    if (sample_cmd->parsed()) {
      if (!seed) throw detail::UsageError("sample requires --seed");
      out << io::render(random_module(dim, cls == "M" ? ModuleClass::M : ModuleClass::N, *seed, zeros), fmt);
      return kExitOk;
    }
    if (words_cmd->parsed()) {
      out << io::render(prime_words(length), fmt);
      return kExitOk;
    }
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kExitUsage;
}

}  // namespace pmod::cli
