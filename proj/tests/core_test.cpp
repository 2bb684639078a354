#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "trigapprox/acsets.hpp"
#include "trigapprox/groups.hpp"
#include "trigapprox/measures.hpp"

using namespace trigapprox;

// ---------------------------------------------------------------------------
// groups

TEST(Groups, IdentityCharacterIsOne) {
  for (const auto& g : {GroupSpec::integers(16), GroupSpec::cyclic(7), GroupSpec::lattice2(6)})
    for (const auto& v : g.character_samples(Frequency{0})) EXPECT_EQ(v, cplx(1.0));
}

TEST(Groups, CyclicFourthRoots) {
  const auto v = GroupSpec::cyclic(4).character_samples(Frequency{1});
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], cplx(1, 0));
  EXPECT_EQ(v[1], cplx(0, 1));
  EXPECT_EQ(v[2], cplx(-1, 0));
  EXPECT_EQ(v[3], cplx(0, -1));
}

TEST(Groups, CircleCharacterMatchesDirectEvaluation) {
  const auto g = GroupSpec::integers(8);
  const auto v = g.character_samples(Frequency{2});
  for (std::size_t j = 0; j < 8; ++j) EXPECT_LT(std::abs(v[j] - std::polar(1.0, 2.0 * ref::theta(j, 8))), 1e-15);
}

TEST(Groups, CharactersHaveUnitModulusAndMultiply) {
  const auto g = GroupSpec::integers(64);
  const auto a = g.character_samples(Frequency{5});
  const auto b = g.character_samples(Frequency{-9});
  const auto ab = g.character_samples(Frequency{-4});
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_NEAR(std::abs(a[j]), 1.0, 1e-15);
    EXPECT_LT(std::abs(a[j] * b[j] - ab[j]), 1e-14);
  }
}

TEST(Groups, TorusCharacter) {
  const auto g = GroupSpec::lattice2(8);
  const auto v = g.character_samples(Frequency{1, 3});
  for (std::size_t j = 0; j < v.size(); ++j) {
    const auto j1 = static_cast<std::int64_t>(j) / 8, j2 = static_cast<std::int64_t>(j) % 8;
    EXPECT_LT(std::abs(v[j] - std::polar(1.0, ref::theta(j1, 8) + 3.0 * ref::theta(j2, 8))), 1e-14);
  }
}

TEST(Groups, TwoDimensionalFrequencyOnCircleIsRejected) {
  EXPECT_THROW(GroupSpec::integers(8).character_samples(Frequency{1, 1}), InvalidInput);
  EXPECT_THROW(GroupSpec::integers(1), InvalidInput);
}

TEST(Groups, QuadratureNormalizedAndOrthogonal) {
  const auto g = GroupSpec::integers(32);
  std::vector<cplx> one(32, 1.0);
  EXPECT_NEAR(std::abs(g.quadrature(one) - 1.0), 0.0, 1e-15);
  for (std::int64_t x = -15; x <= 15; ++x)
    for (std::int64_t y = -15; y <= 15; ++y) {
      const auto a = g.character_samples(Frequency{x});
      const auto b = g.character_samples(Frequency{y});
      std::vector<cplx> p(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) p[j] = a[j] * std::conj(b[j]);
      EXPECT_LT(std::abs(g.quadrature(p) - (x == y ? 1.0 : 0.0)), 1e-12);
    }
}

TEST(Groups, CyclicOrthogonalityIsExactForQuarterPoints) {
  const auto g = GroupSpec::cyclic(4);
  const auto a = g.character_samples(Frequency{1});
  std::vector<cplx> p(4);
  for (std::size_t j = 0; j < 4; ++j) p[j] = a[j] * std::conj(a[j]);
  EXPECT_EQ(g.quadrature(p), cplx(1.0));
}

TEST(Groups, QuadratureOfCosSquared) {
  const auto g = GroupSpec::integers(64);
  std::vector<double> v(64);
  for (std::size_t j = 0; j < 64; ++j) v[j] = std::pow(std::cos(g.angles(j)[0]), 2);
  EXPECT_NEAR(g.quadrature(v), 0.5, 1e-12);
  EXPECT_THROW(g.quadrature(std::vector<double>(63, 1.0)), InvalidInput);
}

TEST(Groups, BandLimit) {
  const auto g = GroupSpec::integers(16);
  EXPECT_EQ(g.band_limit(), 7);
  EXPECT_NO_THROW(g.check_band(Frequency{-7}));
  EXPECT_THROW(g.check_band(Frequency{8}), InvalidInput);
  EXPECT_NO_THROW(GroupSpec::cyclic(6).check_band(Frequency{100}));
  EXPECT_EQ(GroupSpec::cyclic(6).reduce(Frequency{-1}), Frequency{5});
}

TEST(Groups, RefinedGridKeepsNodes) {
  const auto g = GroupSpec::integers(16);
  const auto f = g.refined();
  for (std::size_t j = 0; j < 16; ++j) EXPECT_DOUBLE_EQ(g.angles(j)[0], f.angles(g.refined_node(j))[0]);
  const auto t = GroupSpec::lattice2(4);
  const auto tf = t.refined();
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_DOUBLE_EQ(t.angles(j)[0], tf.angles(t.refined_node(j))[0]);
    EXPECT_DOUBLE_EQ(t.angles(j)[1], tf.angles(t.refined_node(j))[1]);
  }
}

// ---------------------------------------------------------------------------
// measures

TEST(Measures, PseudoinverseOfDiagonal) {
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 0) = 2.0;
  const CMatrix p = moore_penrose(h);
  EXPECT_NEAR(std::abs(p(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(p.cwiseAbs().sum() - 0.5, 0.0, 1e-15);
  EXPECT_LT((moore_penrose(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(Measures, PseudoinverseOfRankOne) {
  CVector u(2);
  u << cplx(1.0, 0.0), cplx(0.0, 1.0);
  const CMatrix h = u * u.adjoint();
  const CMatrix p = moore_penrose(h);
  EXPECT_LT((p - h / 4.0).norm(), 1e-14);
}

TEST(Measures, PenroseIdentitiesOnRandomPsd) {
  std::mt19937_64 rng(1);
  for (int q = 1; q <= 3; ++q)
    for (int r = 1; r <= q; ++r)
      for (int t = 0; t < 10; ++t) {
        const CMatrix h = ref::random_psd(rng, q, r);
        const CMatrix p = moore_penrose(h);
        const double s = h.norm() * p.norm();
        EXPECT_LT((h * p * h - h).norm() / s, 1e-10);
        EXPECT_LT((p * h * p - p).norm() / s, 1e-10);
        EXPECT_LT((h * p - (h * p).adjoint()).norm(), 1e-10);
        EXPECT_LT((p * h - (p * h).adjoint()).norm(), 1e-10);
        EXPECT_LT((range_projection(h) - p * h).norm(), 1e-10);
        EXPECT_EQ(numerical_rank(h), r);
      }
}

TEST(Measures, ScalarPseudoinverseIsReciprocalOnCarrier) {
  EXPECT_EQ(moore_penrose(CMatrix::Constant(1, 1, 4.0))(0, 0), cplx(0.25));
  EXPECT_EQ(moore_penrose(CMatrix::Constant(1, 1, 0.0))(0, 0), cplx(0.0));
}

TEST(Measures, NonHermitianInputIsRejected) {
  CMatrix h = CMatrix::Identity(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(moore_penrose(h), InvalidInput);
  EXPECT_THROW(psd_spectrum(-CMatrix::Identity(2, 2)), InvalidInput);
}

TEST(Measures, RangeProjection) {
  EXPECT_LT((range_projection(3.0 * CMatrix::Identity(2, 2)) - CMatrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_EQ(range_projection(CMatrix::Zero(2, 2)).norm(), 0.0);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  EXPECT_LT((range_projection(d) - d).norm(), 1e-14);
  std::mt19937_64 rng(2);
  const CMatrix h = ref::random_psd(rng, 3, 2);
  const CMatrix p = range_projection(h);
  EXPECT_LT((p * p - p).norm(), 1e-12);
  EXPECT_LT((p - p.adjoint()).norm(), 1e-12);
  EXPECT_LT((p * h - h).norm(), 1e-12);
}

TEST(Measures, NormalizeEquivalence) {
  const auto g = GroupSpec::cyclic(3);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  const auto w = MatrixWeight::from_samples(g, {d, d, d});
  GridFunction f(3, CVector::Ones(2));
  const auto out = normalize_equivalence(f, w);
  for (const auto& v : out) {
    EXPECT_EQ(v(0), cplx(1.0));
    EXPECT_EQ(v(1), cplx(0.0));
  }
  const auto id = MatrixWeight::from_samples(g, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)});
  EXPECT_EQ(normalize_equivalence(f, id), f);

  std::mt19937_64 rng(3);
  std::vector<CMatrix> ws;
  GridFunction r;
  for (int j = 0; j < 3; ++j) {
    ws.push_back(ref::random_psd(rng, 2, 1));
    r.push_back(CVector::Random(2));
  }
  const auto wr = MatrixWeight::from_samples(g, ws);
  const auto once = normalize_equivalence(r, wr);
  const auto twice = normalize_equivalence(once, wr);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_LT((once[j] - twice[j]).norm(), 1e-14);
}

TEST(Measures, WeightValidation) {
  const auto g = GroupSpec::cyclic(2);
  EXPECT_THROW(MatrixWeight::from_scalar_samples(g, {1.0}), InvalidInput);
  EXPECT_THROW(MatrixWeight::from_scalar_samples(g, {1.0, -1.0}), InvalidInput);
  // Tiny negative eigenvalues are clipped.
  const auto w = MatrixWeight::from_scalar_samples(g, {1.0, -1e-14});
  EXPECT_EQ(w.at(1)(0, 0), cplx(0.0));
  EXPECT_THROW(MatrixWeight::from_scalar_samples(g, {1.0, std::numeric_limits<double>::infinity()}), InvalidInput);
}

TEST(Measures, AtomsMustBeDistinctAndOnGrid) {
  const CMatrix one = CMatrix::Constant(1, 1, 1.0);
  EXPECT_THROW(AtomicMeasure({Atom{1, one}, Atom{1, one}}), InvalidInput);
  const auto w = MatrixWeight::from_scalar_samples(GroupSpec::cyclic(4), {1, 1, 1, 1});
  EXPECT_THROW(SpectralMeasure(w, AtomicMeasure({Atom{4, one}})), InvalidInput);
  EXPECT_THROW(SpectralMeasure(w, AtomicMeasure({Atom{0, CMatrix::Identity(2, 2)}})), InvalidInput);
}

TEST(Measures, RestrictAndCombine) {
  const auto g = GroupSpec::cyclic(4);
  const SpectralMeasure m(MatrixWeight::from_scalar_samples(g, {1, 2, 3, 4}),
                          AtomicMeasure({Atom{2, CMatrix::Constant(1, 1, 0.5)}}));
  const auto ac = restrict(m, MeasurePart::AcOnly);
  const auto sing = restrict(m, MeasurePart::SingularOnly);
  EXPECT_FALSE(ac.has_atoms());
  EXPECT_TRUE(sing.ac().is_zero());
  EXPECT_EQ(sing.singular().size(), 1u);
  const auto back = combine(ac, sing);
  EXPECT_EQ(back.scalar_grid_masses(), m.scalar_grid_masses());

  const SpectralMeasure plain(MatrixWeight::from_scalar_samples(g, {1, 1, 1, 1}));
  EXPECT_TRUE(restrict(plain, MeasurePart::SingularOnly).ac().is_zero());
  EXPECT_FALSE(restrict(plain, MeasurePart::SingularOnly).has_atoms());
}

TEST(Measures, GridMassesAndEffectiveDensity) {
  const auto g = GroupSpec::cyclic(4);
  const SpectralMeasure m(MatrixWeight::from_scalar_samples(g, {1, 2, 3, 4}),
                          AtomicMeasure({Atom{1, CMatrix::Constant(1, 1, 0.5)}}));
  const RVector mass = m.scalar_grid_masses();
  EXPECT_DOUBLE_EQ(mass(0), 0.25);
  EXPECT_DOUBLE_EQ(mass(1), 0.5 + 0.5);
  EXPECT_DOUBLE_EQ(m.scalar_effective_density()(1), 4.0);
}

TEST(Measures, FamiliesResample) {
  const auto g = GroupSpec::integers(8);
  const auto w = MatrixWeight::from_family(g, families::trig_modulus(std::vector<cplx>{1.0, -0.5}));
  for (std::size_t j = 0; j < 8; ++j)
    EXPECT_NEAR(w.at(j)(0, 0).real(), 1.25 - std::cos(ref::theta(j, 8)), 1e-14);
  const auto fine = w.resampled(g.refined());
  ASSERT_TRUE(fine.has_value());
  EXPECT_EQ(fine->samples().size(), 16u);
  EXPECT_FALSE(MatrixWeight::from_scalar_samples(g, std::vector<double>(8, 1.0)).resampled(g.refined()));

  const auto pc = MatrixWeight::from_family(g, families::piecewise_constant({-1, 0, 1}, {2.0, 5.0}));
  EXPECT_EQ(pc.at(0)(0, 0), cplx(2.0));  // theta = 0 lies in (-pi, 0]
  EXPECT_EQ(pc.at(1)(0, 0), cplx(5.0));
  EXPECT_EQ(pc.at(4)(0, 0), cplx(5.0));  // theta = pi
  EXPECT_EQ(pc.at(5)(0, 0), cplx(2.0));

  CMatrix a0 = CMatrix::Identity(2, 2), a1 = CMatrix::Zero(2, 2);
  a1(0, 1) = 1.0;
  const auto mp = MatrixWeight::from_family(g, families::matrix_polynomial({a0, a1}));
  EXPECT_EQ(mp.dimension(), 2);
  EXPECT_LT((mp.at(0) - (a0 + a1) * (a0 + a1).adjoint()).norm(), 1e-14);
}

// ---------------------------------------------------------------------------
// acsets

TEST(AcSets, Membership) {
  EXPECT_TRUE(contains(FrequencySet::explicit_set({0, 5}), Frequency{5}));
  EXPECT_FALSE(contains(FrequencySet::explicit_set({0, 5}), Frequency{4}));
  EXPECT_TRUE(contains(FrequencySet::half_line(FrequencySet::Direction::Ge, 1).complement(), Frequency{0}));
  EXPECT_TRUE(contains(FrequencySet::explicit_set({0}).translate(Frequency{3}), Frequency{3}));
  EXPECT_TRUE(contains(FrequencySet::half_line(FrequencySet::Direction::Ge, 2).negate(), Frequency{-2}));
  EXPECT_TRUE(contains(FrequencySet::all(), Frequency{-100}));
}

TEST(AcSets, ExplicitListsAreDeduplicated) {
  EXPECT_EQ(FrequencySet::explicit_set({3, 1, 3}).elements().size(), 2u);
}

TEST(AcSets, Windows) {
  const auto g = GroupSpec::integers(64);
  EXPECT_EQ(window(FrequencySet::explicit_set({0}).complement(), g, 2),
            (std::vector<Frequency>{Frequency{-2}, Frequency{-1}, Frequency{1}, Frequency{2}}));
  EXPECT_EQ(window(FrequencySet::half_line(FrequencySet::Direction::Ge, 1), g, 3),
            (std::vector<Frequency>{Frequency{1}, Frequency{2}, Frequency{3}}));
  const auto c6 = GroupSpec::cyclic(6);
  EXPECT_EQ(window(FrequencySet::explicit_set({1, -1, 8}), c6, 3),
            (std::vector<Frequency>{Frequency{1}, Frequency{2}, Frequency{5}}));
  EXPECT_EQ(window(FrequencySet::all(), c6, 10).size(), 6u);
}

TEST(AcSets, WindowsAreNestedInRadius) {
  const auto g = GroupSpec::lattice2(32);
  const auto S = FrequencySet::sector(0, 200);
  for (std::int64_t f = 0; f < 6; ++f) {
    const auto a = window(S, g, f);
    const auto b = window(S, g, f + 1);
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
  }
}

TEST(AcSets, Parse) {
  const auto s = FrequencySet::parse("complement(halfline(ge,1))");
  EXPECT_TRUE(contains(s, Frequency{0}));
  EXPECT_FALSE(contains(s, Frequency{1}));
  const auto e = FrequencySet::parse("explicit(0,5,-3)");
  EXPECT_TRUE(contains(e, Frequency{-3}));
  const auto sec = FrequencySet::parse("sector2(30deg,240deg)");
  EXPECT_NEAR(sec.sector_opening(), 210.0, 1e-12);
  EXPECT_TRUE(contains(FrequencySet::parse("translate(explicit(0), (1,2))"), Frequency{1, 2}));
  EXPECT_EQ(FrequencySet::parse(e.to_string()).elements(), e.elements());
  EXPECT_THROW(FrequencySet::parse("halfline(up,1)"), InvalidInput);
  EXPECT_THROW(FrequencySet::parse("explicit(0"), InvalidInput);
}

TEST(AcSets, ClassifierRules) {
  const auto z = GroupSpec::integers(64);
  const auto z2 = GroupSpec::lattice2(16);
  using V = ACStatus::Verdict;
  EXPECT_EQ(classify_ac(FrequencySet::half_line(FrequencySet::Direction::Ge, 3), z).verdict, V::ProvenAC);
  EXPECT_EQ(classify_ac(FrequencySet::half_line(FrequencySet::Direction::Le, -2), z).verdict, V::ProvenAC);
  EXPECT_EQ(classify_ac(FrequencySet::explicit_set({0, 5}).complement(), z).verdict, V::ProvenAC);
  EXPECT_EQ(classify_ac(FrequencySet::explicit_set({0, 5}), GroupSpec::cyclic(8)).verdict, V::ProvenAC);
  EXPECT_EQ(classify_ac(FrequencySet::half_line(FrequencySet::Direction::Ge, 1), z2).verdict, V::KnownNotAC);
  EXPECT_EQ(classify_ac(FrequencySet::sector(0, 200), z2).verdict, V::ProvenAC);
  EXPECT_EQ(classify_ac(FrequencySet::sector(0, 90), z2).verdict, V::Unknown);
  EXPECT_EQ(classify_ac(FrequencySet::all(), z).verdict, V::ProvenAC);
}

TEST(AcSets, FiniteSetOnIntegersIsNotClaimed) {
  // delta_a - delta_b with b - a = 2 pi / 5 has a transform vanishing on {0, 5},
  // so a finite set of integers cannot be certified.
  EXPECT_EQ(classify_ac(FrequencySet::explicit_set({0, 5}), GroupSpec::integers(64)).verdict, ACStatus::Verdict::Unknown);
}

TEST(AcSets, TranslateAndNegatePreserveVerdict) {
  const auto z = GroupSpec::integers(64);
  const auto h = FrequencySet::half_line(FrequencySet::Direction::Ge, 1);
  EXPECT_TRUE(classify_ac(h.translate(Frequency{-7}), z).is_proven());
  EXPECT_TRUE(classify_ac(h.negate(), z).is_proven());
  EXPECT_TRUE(classify_ac(h.negate().translate(Frequency{4}).complement().complement(), z).is_proven());
}

TEST(AcSets, ReduceMeasure) {
  const auto g = GroupSpec::integers(64);
  const auto w = MatrixWeight::from_family(g, families::constant(1.0));
  const SpectralMeasure with_atom(w, AtomicMeasure({Atom{3, CMatrix::Constant(1, 1, 0.7)}}));
  const auto r = reduce_measure(with_atom, FrequencySet::half_line(FrequencySet::Direction::Le, 0), g);
  EXPECT_EQ(r.report.decision, ReductionReport::Decision::Reduced);
  EXPECT_FALSE(r.measure.has_atoms());
  EXPECT_EQ(r.measure.ac().samples(), w.samples());

  const auto plain = reduce_measure(SpectralMeasure(w), FrequencySet::explicit_set({0}), g);
  EXPECT_EQ(plain.report.decision, ReductionReport::Decision::TriviallyReduced);

  const auto t = GroupSpec::lattice2(8);
  const SpectralMeasure tm(MatrixWeight::from_family(t, families::constant(1.0)),
                           AtomicMeasure({Atom{0, CMatrix::Constant(1, 1, 1.0)}}));
  const auto kept = reduce_measure(tm, FrequencySet::half_line(FrequencySet::Direction::Le, 0), t);
  EXPECT_EQ(kept.report.decision, ReductionReport::Decision::NotReducible);
  EXPECT_EQ(kept.report.status.verdict, ACStatus::Verdict::KnownNotAC);
  EXPECT_TRUE(kept.measure.has_atoms());
}
