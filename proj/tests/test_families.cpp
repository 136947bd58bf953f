#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "pmod/structure.hpp"

using namespace pmod;

namespace {

bool scalar_near(const ScalarModule& x, const ScalarModule& y, double tol) {
  return std::abs(x.a - y.a) <= tol && std::abs(x.b - y.b) <= tol;
}

int mobius(std::size_t n) {
  int mu = 1;
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

std::size_t necklace_count(std::size_t n) {
  long long total = 0;
  for (std::size_t d = 1; d <= n; ++d)
    if (n % d == 0) total += mobius(d) * (1LL << (n / d));
  return static_cast<std::size_t>(total / static_cast<long long>(n));
}

/// Binary strings of length n that are strictly smaller than all their rotations.
std::vector<std::string> brute_force_lyndon(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    std::string w(n, '0');
    for (std::size_t i = 0; i < n; ++i)
      if (bits >> (n - 1 - i) & 1) w[i] = '1';
    bool ok = true;
    for (std::size_t k = 1; k < n && ok; ++k) ok = w < w.substr(k) + w.substr(0, k);
    if (ok) out.push_back(w);
  }
  return out;
}

}  // namespace

TEST(PrimeWords, MatchBruteForceAndNecklaceFormula) {
  for (std::size_t d = 1; d <= 12; ++d) {
    const auto got = prime_words(d);
    EXPECT_EQ(got, brute_force_lyndon(d)) << d;
    EXPECT_EQ(got.size(), necklace_count(d)) << d;
  }
  EXPECT_EQ(prime_words(6).size(), 9u);
  EXPECT_EQ(prime_words(3), (std::vector<std::string>{"001", "011"}));
}

TEST(PrimeWords, Predicates) {
  EXPECT_TRUE(is_prime_word("011"));
  EXPECT_TRUE(is_prime_word("110"));
  EXPECT_FALSE(is_prime_word("0101"));
  EXPECT_FALSE(is_binary_word("012"));
  EXPECT_EQ(least_rotation("110"), "011");
}

TEST(AtomicModule, Layout) {
  const cplx z = std::polar(1.0, 0.3);
  const PModule m = atomic_module({"01", z});
  EXPECT_EQ(m.a(), (CMatrix{{0.0, 0.0}, {1.0, 0.0}}));
  EXPECT_EQ(m.b(), (CMatrix{{0.0, z}, {0.0, 0.0}}));
  const CMatrix ba = m.b() * m.a();
  EXPECT_LE(std::abs(ba(0, 0) - z), 1e-15);
  EXPECT_LE(validate(m).residual, 1e-15);
}

TEST(AtomicModule, Errors) {
  try {
    atomic_module({"0101", 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPrime);
  }
  EXPECT_THROW(atomic_module({"", 1.0}), Error);
}

TEST(AtomicModule, RotatedWordIsEquivalent) {
  const cplx z = std::polar(1.0, -1.2);
  EXPECT_EQ(equivalent(atomic_module({"011", z}), atomic_module({"110", z})).verdict, Verdict::True);
}

TEST(GPModule, LayoutAndIdentity) {
  Rng rng(2);
  const GPVector z = random_gp_vector(3, rng);
  const PModule m = gp_module(z);
  EXPECT_EQ(m.a()(1, 0), z.entries[0].a);
  EXPECT_EQ(m.b()(0, 2), z.entries[2].b);
  EXPECT_LE(validate(m).residual, 1e-15);
}

TEST(GPFuse, CoprimeLengthsGiveOneVector) {
  Rng rng(3);
  const GPVector z = random_gp_vector(2, rng), zt = random_gp_vector(3, rng);
  const auto ys = gp_fuse(z, zt);
  ASSERT_EQ(ys.size(), 1u);
  EXPECT_EQ(ys[0].size(), 6u);
  const auto& y = ys[0].entries;
  const ScalarModule lhs = boxtimes(y[0], scalar_inverse(y[2]));
  const ScalarModule rhs = boxtimes(y[3], scalar_inverse(y[5]));
  EXPECT_TRUE(scalar_near(lhs, rhs, 1e-12));
}

TEST(GPFuse, CountsAndLengths) {
  Rng rng(4);
  for (auto [r, s] : {std::pair<std::size_t, std::size_t>{2, 2}, {4, 6}, {3, 4}, {1, 5}}) {
    const auto ys = gp_fuse(random_gp_vector(r, rng), random_gp_vector(s, rng));
    EXPECT_EQ(ys.size(), std::gcd(r, s));
    for (const auto& y : ys) EXPECT_EQ(y.size(), std::lcm(r, s));
  }
}

TEST(GPFuse, InversePairContainsUnits) {
  const GPVector z{{{0.6, 0.8}, {cplx(0, 0.3), std::sqrt(0.91)}}};
  const auto ys = gp_fuse(z, gp_inverse(z));
  ASSERT_EQ(ys.size(), 2u);
  for (const auto& s : ys[0].entries) EXPECT_TRUE(scalar_near(s, {fixtures::kLambda, fixtures::kLambda}, 1e-10));
  EXPECT_TRUE(scalar_near(ys[1].entries[0], boxtimes(z.entries[0], scalar_inverse(z.entries[1])), 1e-12));
  EXPECT_TRUE(scalar_near(ys[1].entries[1], boxtimes(z.entries[1], scalar_inverse(z.entries[0])), 1e-12));
}

TEST(GPFuse, MatchesDirectProduct) {
  Rng rng(5);
  const GPVector z = random_gp_vector(2, rng), zt = random_gp_vector(2, rng);
  const auto ys = gp_fuse(z, zt);
  PModule sum = gp_module(ys[0]);
  for (std::size_t k = 1; k < ys.size(); ++k) sum = direct_sum(sum, gp_module(ys[k]));
  EXPECT_EQ(equivalent(boxtimes(gp_module(z), gp_module(zt)), sum).verdict, Verdict::True);
}

TEST(GPFuse, NotInvertible) {
  const GPVector z{{{1.0, 0.0}}};
  try {
    gp_fuse(z, z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInvertible);
  }
}

TEST(GPCanonical, RotationAndPeriod) {
  Rng rng(6);
  const GPVector z = random_gp_vector(4, rng);
  const auto c0 = gp_canonical(z), c1 = gp_canonical(gp_rotate(z, 3));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(scalar_near(c0.canonical.entries[i], c1.canonical.entries[i], 0.0));
  EXPECT_TRUE(c0.aperiodic);
  EXPECT_FALSE(gp_canonical(gp_repeat(random_gp_vector(2, rng), 2)).aperiodic);
}

TEST(AtomicDiffuse, PhasesAreEigenvaluesOfV) {
  const PModule md = random_module(2, ModuleClass::N, 8);
  const cplx z = std::polar(1.0, 0.4);
  const auto labels = atomic_diffuse_fuse({"011", z}, md);
  ASSERT_EQ(labels.size(), 2u);
  const CMatrix va = polar(md.a()).unitary, vb = polar(md.b()).unitary;
  const CMatrix v = vb * vb * va;
  // 2×2 eigenvalues from the characteristic polynomial
  const cplx tr = trace(v), det = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  std::vector<cplx> expected{(tr + disc) / 2.0 * z, (tr - disc) / 2.0 * z};
  for (const auto& l : labels) {
    EXPECT_EQ(l.word, "011");
    const double best = std::min(std::abs(l.phase - expected[0]), std::abs(l.phase - expected[1]));
    EXPECT_LE(best, 1e-9);
  }
}

TEST(AtomicDiffuse, AgreesWithAtomicSearch) {
  const PModule md = random_module(2, ModuleClass::N, 9);
  const AtomicLabel label{"01", std::polar(1.0, 2.0)};
  const auto labels = atomic_diffuse_fuse(label, md);
  const auto atoms = atomic_part(boxtimes(atomic_module(label), md));
  ASSERT_EQ(atoms.size(), labels.size());
  for (const auto& l : labels) {
    double best = 1.0;
    for (const auto& a : atoms) best = std::min(best, std::abs(a.label.phase - l.phase));
    EXPECT_LE(best, 1e-9);
  }
}

TEST(AtomicDiffuse, ScalarFactorShiftsPhase) {
  const cplx alpha = std::polar(1.0, 0.9), beta = std::polar(1.0, -0.5), z = std::polar(1.0, 1.3);
  const PModule g = to_module({0.6 * alpha, 0.8 * beta});
  const auto labels = atomic_diffuse_fuse({"0011", z}, g);
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_LE(std::abs(labels[0].phase - alpha * alpha * beta * beta * z), 1e-12);
}

TEST(D2, SplitAndFuse) {
  const cplx alpha = std::polar(1.0, M_PI / 7);
  const D2Fusion f = d2_fuse(fixtures::d2_factor(alpha), fixtures::d2_factor(std::conj(alpha)));
  const auto comps = f.components();
  ASSERT_EQ(comps.size(), 4u);
  const double l = fixtures::kLambda;
  std::vector<ScalarModule> want{{-l, l}, {-l, -l}, {l, l}, {l, -l}};
  for (const auto& w : want) {
    const bool hit = std::any_of(comps.begin(), comps.end(), [&](const PModule& c) {
      return c.dim() == 1 && scalar_near(to_scalar(c), w, 1e-12);
    });
    EXPECT_TRUE(hit);
  }
}

TEST(D2, BlocksAreInvariant) {
  const PModule m(CMatrix::diag({0.6, cplx(0, 0.8)}), CMatrix{{0.0, cplx(0, 0.6)}, {0.8, 0.0}});
  const PModule n(CMatrix::diag({0.28, -0.96}), CMatrix{{0.0, 0.28}, {0.96, 0.0}});
  const PModule p = boxtimes(m, n);
  const D2Fusion f = d2_fuse(m, n);
  for (std::size_t b = 0; b < 2; ++b) {
    const CMatrix v = d2_block_isometry(b);
    const PModule sub = restrict_to(p, v);
    EXPECT_LE(frobenius(sub.a() - f.blocks[b].module.a()), 1e-12);
    EXPECT_LE(frobenius(sub.b() - f.blocks[b].module.b()), 1e-12);
    EXPECT_TRUE(f.blocks[b].split.empty());
  }
}

TEST(D2, ShapeError) {
  try {
    d2_fuse(unit_module(), unit_module());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotD2Shape);
  }
}

TEST(RandomModule, ClassesAndDeterminism) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PModule n = random_module(4, ModuleClass::N, s);
    EXPECT_LE(validate(n).residual, 1e-12);
    EXPECT_TRUE(in_class_n(n));
    const PModule m = random_module(3, ModuleClass::M, s, 2);
    EXPECT_TRUE(in_class_m(m));
    EXPECT_FALSE(in_class_n(m));
  }
  EXPECT_EQ(random_module(3, ModuleClass::N, 42).a(), random_module(3, ModuleClass::N, 42).a());
  EXPECT_THROW(random_module(2, ModuleClass::N, 1, 1), Error);
}
