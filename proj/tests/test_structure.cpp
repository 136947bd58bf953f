#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "pmod/structure.hpp"

using namespace pmod;

namespace {

CMatrix unit_column(std::vector<cplx> v) {
  double n = 0.0;
  for (auto x : v) n += std::norm(x);
  for (auto& x : v) x /= std::sqrt(n);
  return CMatrix::column(v);
}

}  // namespace

TEST(Intertwiners, SelfIntertwinersOfUnitary) {
  Rng rng(1);
  const CMatrix u = random_unitary(3, rng);
  const PModule m = random_module(3, ModuleClass::N, 2);
  const auto hom = intertwiner_basis(m, conjugate(m, u));
  ASSERT_EQ(hom.size(), 1u);
  const CMatrix& x = hom.front();
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LE(frobenius(x * m.leg(k) - u * m.leg(k) * u.adjoint() * x), 1e-10);
  EXPECT_EQ(star_commutant(direct_sum(m, m)).size(), 4u);
}

TEST(CompleteSubmodule, CommonEigenvector) {
  const auto cs = complete_submodule(fixtures::common_eigenvector_module());
  EXPECT_EQ(cs.p_dimension, 1u);
  EXPECT_EQ(cs.confidence, Confidence::Certified);
  EXPECT_LE(subspace_angle(cs.isometry, unit_column({1.0, 1.0})), 1e-8);
}

TEST(CompleteSubmodule, FullModules) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto cs = complete_submodule(random_module(3, ModuleClass::M, s, 1));
    EXPECT_EQ(cs.p_dimension, 3u);
    EXPECT_EQ(cs.confidence, Confidence::Certified);
  }
}

TEST(CompleteSubmodule, NilpotentShiftHasAtomicCore) {
  // A: e1 -> e2, B: e2 -> e2 and e1 -> 0 on C², so e2 is a fixed point of B
  const PModule m(CMatrix{{0.0, 0.0}, {1.0, 0.0}}, CMatrix{{0.0, 0.0}, {0.0, 1.0}});
  ASSERT_LE(validate(m).residual, 1e-15);
  const auto cs = complete_submodule(m);
  EXPECT_EQ(cs.p_dimension, 1u);
  EXPECT_LE(subspace_angle(cs.isometry, unit_column({0.0, 1.0})), 1e-12);
}

TEST(FusionBreaksFullness, ScalarTimesCommonEigenvectorModule) {
  const PModule m = fixtures::common_eigenvector_module();
  const PModule n = fixtures::half_scalar();
  const PModule nm = boxtimes(n, m);
  EXPECT_EQ(star_commutant(nm).size(), 1u);
  EXPECT_EQ(intertwiner_basis(nm, nm).size(), 1u);
  EXPECT_EQ(complete_submodule(nm).p_dimension, 2u);
  const PModule back = boxtimes(to_module(scalar_inverse(to_scalar(n))), nm);
  EXPECT_EQ(equivalent(back, m).verdict, Verdict::True);
  EXPECT_EQ(complete_submodule(back).p_dimension, 1u);
}

TEST(DecomposeFull, NonFullIsRejected) {
  try {
    decompose_full(fixtures::common_eigenvector_module());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFullSuspected);
  }
  const auto r = decompose(fixtures::common_eigenvector_module());
  EXPECT_EQ(r.summands.size(), 1u);
  EXPECT_EQ(r.residual_dimension, 1u);
}

TEST(DecomposeFull, DirectSumOfDistinctModules) {
  const PModule x = random_module(2, ModuleClass::N, 11), y = random_module(1, ModuleClass::N, 12);
  Rng rng(13);
  const PModule m = conjugate(direct_sum(x, y), random_unitary(3, rng));
  const auto r = decompose_full(m);
  ASSERT_EQ(r.summands.size(), 2u);
  EXPECT_EQ(r.summands[0].dim, 1u);
  EXPECT_EQ(r.summands[1].dim, 2u);
  EXPECT_EQ(r.confidence, Confidence::Certified);
  EXPECT_LE(r.invariance_defect, 1e-8);
  EXPECT_EQ(equivalent(restrict_to(m, r.summands[0].isometry), y).verdict, Verdict::True);
}

TEST(DecomposeFull, Deterministic) {
  const PModule m = boxtimes(random_module(2, ModuleClass::N, 1), random_module(2, ModuleClass::N, 2));
  const auto r1 = decompose_full(m, kDefaultRtol, 5), r2 = decompose_full(m, kDefaultRtol, 5);
  ASSERT_EQ(r1.summands.size(), r2.summands.size());
  for (std::size_t i = 0; i < r1.summands.size(); ++i) EXPECT_EQ(r1.summands[i].isometry, r2.summands[i].isometry);
}

TEST(DecomposeFull, D2ProductSplitsIntoScalars) {
  const cplx alpha = std::polar(1.0, M_PI / 7);
  const PModule p = boxtimes(fixtures::d2_factor(alpha), fixtures::d2_factor(std::conj(alpha)));
  const auto r = decompose_full(p);
  ASSERT_EQ(r.summands.size(), 4u);
  for (const auto& s : r.summands) {
    EXPECT_EQ(s.dim, 1u);
    EXPECT_EQ(s.tag, SummandTag::Diffuse);
  }
}

TEST(Equivalent, RandomConjugation) {
  Rng rng(4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const PModule m = random_module(3, ModuleClass::N, s);
    const CMatrix u = random_unitary(3, rng);
    const auto r = equivalent(m, conjugate(m, u));
    ASSERT_EQ(r.verdict, Verdict::True);
    EXPECT_LE(frobenius(*r.witness * m.a() * r.witness->adjoint() - conjugate(m, u).a()), 1e-7);
  }
}

TEST(Equivalent, ReducibleConjugation) {
  const PModule x = random_module(2, ModuleClass::N, 21);
  Rng rng(5);
  const PModule m = direct_sum(x, random_module(1, ModuleClass::N, 22));
  EXPECT_EQ(equivalent(m, conjugate(m, random_unitary(3, rng))).verdict, Verdict::True);
  const PModule mm = direct_sum(x, x);
  EXPECT_EQ(equivalent(mm, conjugate(mm, random_unitary(4, rng))).verdict, Verdict::True);
}

TEST(Equivalent, GPRotationIsEquivalent) {
  Rng rng(6);
  const GPVector z = random_gp_vector(3, rng);
  EXPECT_EQ(equivalent(gp_module(z), gp_module(gp_rotate(z, 1))).verdict, Verdict::True);
}

TEST(Equivalent, DifferentPhasesAreNot) {
  const auto r = equivalent(atomic_module({"01", 1.0}), atomic_module({"01", cplx(0, 1)}));
  EXPECT_EQ(r.verdict, Verdict::False);
  EXPECT_EQ(equivalent(unit_module(), fixtures::half_scalar()).verdict, Verdict::False);
  EXPECT_EQ(equivalent(unit_module(), direct_sum(unit_module(), unit_module())).verdict, Verdict::False);
}

TEST(AtomicPart, AtomicModulesAreFound) {
  for (const std::string w : {"0", "1", "01", "001", "011", "0111"}) {
    const cplx z = std::polar(1.0, 0.7);
    const PModule m = atomic_module({w, z});
    const auto atoms = atomic_part(m);
    ASSERT_EQ(atoms.size(), 1u) << w;
    EXPECT_EQ(atoms.front().label.word, w);
    EXPECT_LE(std::abs(atoms.front().label.phase - z), 1e-9);
    EXPECT_EQ(atoms.front().isometry.cols(), w.size());
  }
}

TEST(AtomicPart, DiffuseModulesHaveNone) {
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_TRUE(atomic_part(random_module(3, ModuleClass::N, s)).empty());
}

TEST(AtomicPart, RotationPairProductHasOneFixedLine) {
  const auto atoms = atomic_part(fixtures::RotationPair{}.product());
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(atoms.front().label.word, "1");
  EXPECT_LE(std::abs(atoms.front().label.phase - 1.0), 1e-9);
  EXPECT_LE(subspace_angle(atoms.front().isometry, unit_column({1.0, 0.0, 0.0, 1.0})), 1e-8);
}

TEST(Classify, RotationPairProduct) {
  const auto r = classify_parts(fixtures::RotationPair{}.product());
  EXPECT_EQ(r.p_dimension, 4u);
  EXPECT_EQ(r.atomic_dim, 1u);
  EXPECT_EQ(r.diffuse_dim, 3u);
  EXPECT_EQ(r.residual_dim, 0u);
  EXPECT_EQ(r.diffuse_commutant_dim, 1u);
  EXPECT_EQ(r.confidence, Confidence::Certified);
}

TEST(Classify, MixedSum) {
  const PModule m = direct_sum(atomic_module({"01", -1.0}), random_module(2, ModuleClass::N, 3));
  const auto r = classify_parts(m);
  EXPECT_EQ(r.atomic_dim, 2u);
  EXPECT_EQ(r.diffuse_dim, 2u);
  EXPECT_EQ(r.residual_dim, 0u);
}

TEST(Decompose, SummandsAreTagged) {
  const PModule m = direct_sum(atomic_module({"011", 1.0}), gp_module({{{0.6, 0.8}, {cplx(0, 0.8), 0.6}}}));
  const auto r = decompose(m);
  ASSERT_EQ(r.summands.size(), 2u);
  EXPECT_EQ(r.summands[0].tag, SummandTag::Diffuse);
  ASSERT_TRUE(r.summands[0].gp.has_value());
  EXPECT_EQ(r.summands[0].gp->size(), 2u);
  EXPECT_EQ(r.summands[1].tag, SummandTag::Atomic);
  EXPECT_EQ(r.summands[1].atomic->word, "011");
}

TEST(Intertwiners, IrreducibleSelfMapIsScaledIdentity) {
  const auto hom = intertwiner_basis(atomic_module({"01", 1.0}), atomic_module({"01", 1.0}));
  ASSERT_EQ(hom.size(), 1u);
  EXPECT_LE(frobenius(hom.front() - (1.0 / std::sqrt(2.0)) * CMatrix::identity(2)), 1e-12);
}

TEST(Intertwiners, AxisScalarsHaveNone) {
  EXPECT_TRUE(intertwiner_basis(to_module({1.0, 0.0}), to_module({0.0, 1.0})).empty());
}

TEST(Intertwiners, UnitEmbedsIntoCommonEigenvectorModule) {
  const auto hom = intertwiner_basis(unit_module(), fixtures::common_eigenvector_module());
  ASSERT_GE(hom.size(), 1u);
  EXPECT_LE(subspace_angle(range_basis(hom.front()), unit_column({1.0, 1.0})), 1e-10);
}

TEST(DecomposeFull, UnitPlusScalar) {
  const auto r = decompose_full(direct_sum(unit_module(), fixtures::half_scalar()));
  ASSERT_EQ(r.summands.size(), 2u);
  EXPECT_EQ(r.summands[0].dim + r.summands[1].dim, 2u);
  EXPECT_EQ(r.confidence, Confidence::Certified);
}

TEST(CompleteSubmodule, UnitPlusUnit) {
  const auto cs = complete_submodule(direct_sum(unit_module(), unit_module()));
  EXPECT_EQ(cs.p_dimension, 2u);
}

TEST(Classify, UnitAndAtomic) {
  const auto u = classify_parts(unit_module());
  EXPECT_EQ(u.diffuse_dim, 1u);
  EXPECT_EQ(u.atomic_dim, 0u);
  EXPECT_EQ(u.p_dimension, 1u);
  const auto a = classify_parts(atomic_module({"01", cplx(0, 1)}));
  EXPECT_EQ(a.atomic_dim, 2u);
  EXPECT_EQ(a.diffuse_dim, 0u);
}

TEST(AtomicPart, AxisScalar) {
  const auto atoms = atomic_part(to_module({1.0, 0.0}));
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(atoms.front().label.word, "0");
  EXPECT_LE(std::abs(atoms.front().label.phase - 1.0), 1e-12);
}

TEST(AtomicPart, LabelsStableUnderConjugation) {
  const PModule m = direct_sum(atomic_module({"011", std::polar(1.0, 0.5)}), random_module(2, ModuleClass::N, 4));
  Rng rng(8);
  const auto before = atomic_part(m);
  const auto after = atomic_part(conjugate(m, random_unitary(5, rng)));
  ASSERT_EQ(before.size(), 1u);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(before[0].label.word, after[0].label.word);
  EXPECT_LE(std::abs(before[0].label.phase - after[0].label.phase), 1e-9);
}

TEST(Equivalent, SymmetricVerdicts) {
  const PModule x = random_module(2, ModuleClass::N, 30), y = random_module(2, ModuleClass::N, 31);
  EXPECT_EQ(equivalent(x, y).verdict, equivalent(y, x).verdict);
  EXPECT_EQ(equivalent(x, x).verdict, Verdict::True);
}
