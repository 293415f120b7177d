#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "wickforge/slices.hpp"

using namespace wickforge;
using std::numbers::pi;

namespace {

const Expr u = Expr::u();
const Expr v = Expr::v();

SurfaceChart catenoid() {
  return {"catenoid", Program::chart({cos(u) * cosh(v), sin(u) * cosh(v), v}),
          {pow(Expr::coord(1), 2.0) + pow(Expr::coord(2), 2.0) - pow(cosh(Expr::coord(3)), 2.0)}};
}

SurfaceChart lorentz_hyperbolic() {
  return {"lorentz-hyp", Program::chart({kI * sinh(u) * cosh(v), cosh(u) * cosh(v), v})};
}

SurfaceChart lorentz_elliptic() {
  return {"lorentz-elliptic", Program::chart({kI * v, cos(u) * cos(v), sin(u) * cos(v)})};
}

SurfaceChart spacelike_hyperbolic() {
  return {"spacelike-hyp", Program::chart({kI * cosh(u) * sin(v), sinh(u) * sin(v), v})};
}

GridSpec grid(double u0, double u1, double v0, double v1, int n = 11) {
  GridSpec g;
  g.u0 = u0;
  g.u1 = u1;
  g.v0 = v0;
  g.v1 = v1;
  g.nu = g.nv = n;
  return g;
}

double max_difference(const SurfaceChart &a, const SurfaceChart &b, const GridSpec &g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = g.at(i);
    worst = std::max(worst, (a.point(p.u, p.v) - b.point(p.u, p.v)).cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace

TEST(SliceSpec, StandardNamedAndJson) {
  const auto s = SliceSpec::named("R3_1");
  EXPECT_EQ(s.ambient_dim(), 3);
  EXPECT_EQ(s.signature(), 1);
  EXPECT_EQ(s.mask(), (std::vector<bool>{true, false, false}));
  EXPECT_EQ(SliceSpec::named("R4").signature(), 0);
  EXPECT_THROW(SliceSpec::named("R3_4"), ParseError);
  EXPECT_THROW(SliceSpec::named("S3"), ParseError);

  CVec base(3);
  base << Complex(0, 1), 2.0, Complex(0.5, -0.5);
  const SliceSpec t({false, true, true}, base);
  const auto back = slice_from_json(nlohmann::json::parse(to_json(t).dump()));
  EXPECT_EQ(back.mask(), t.mask());
  EXPECT_EQ(back.base(), t.base());
  EXPECT_THROW(slice_from_json(nlohmann::json::parse(R"({"n":3,"k":2,"mask":[true,false,false]})")),
               ParseError);
}

TEST(SliceSpec, DirectionsFormARealSliceOfMatchingSignature) {
  const auto g = BilinearForm::standard(5);
  for (int n = 1; n <= 5; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto dirs = SliceSpec::standard(n, k).directions();
      const auto c = classify_subspace(BilinearForm::standard(n), dirs);
      EXPECT_EQ(c.kind, SubspaceKind::real_slice);
      EXPECT_TRUE(c.totally_real);
      ASSERT_TRUE(c.signature.has_value());
      EXPECT_EQ(*c.signature, k);
    }
  // masks in any position
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<bool> mask(5);
    for (std::size_t j = 0; j < 5; ++j)
      mask[j] = rng() % 2;
    const SliceSpec s(mask);
    const auto c = classify_subspace(g, s.directions());
    ASSERT_TRUE(c.signature.has_value());
    EXPECT_EQ(*c.signature, s.signature());
  }
}

TEST(Slices, CatenoidChartsLieInTheirSlices) {
  const auto g = grid(-1, 1, -1, 1);
  const auto r1 = verify_in_slice(lorentz_hyperbolic(), SliceSpec::named("R3_1"), g);
  EXPECT_TRUE(r1.in_slice());
  EXPECT_EQ(r1.membership_residual, 0.0);
  EXPECT_LE(r1.secondary_metric, 1e-10);
  const auto r0 = verify_in_slice(catenoid(), SliceSpec::named("R3"), grid(0, 2 * pi, -1, 1));
  EXPECT_TRUE(r0.in_slice());
  EXPECT_EQ(r0.membership_residual, 0.0);
}

TEST(Slices, WrongSliceIsReported) {
  const auto r = verify_in_slice(catenoid(), SliceSpec::named("R3_1"), grid(0, 2 * pi, -1, 1));
  EXPECT_FALSE(r.in_slice());
  EXPECT_GE(r.membership_residual, 1.0);
  EXPECT_GE(r.coordinate_residual(0), 1.0);
  EXPECT_EQ(r.coordinate_residual(1), 0.0);
  EXPECT_THROW(induced_signature(catenoid(), SliceSpec::named("R3_1"), grid(0, 2 * pi, -1, 1)), NotInSlice);
}

TEST(Slices, ComplexGridIsRejected) {
  auto g = grid(-1, 1, -1, 1);
  g.u_im = 0.1;
  EXPECT_THROW(verify_in_slice(catenoid(), SliceSpec::named("R3"), g), Error);
}

TEST(Slices, InducedSignatures) {
  const auto r1 = induced_signature(lorentz_hyperbolic(), SliceSpec::named("R3_1"), grid(-1, 1, -1, 1));
  ASSERT_TRUE(r1.signature.has_value());
  EXPECT_EQ(*r1.signature, 1);
  EXPECT_EQ(r1.degenerate_count, 0u);
  const auto r4 = induced_signature(spacelike_hyperbolic(), SliceSpec::named("R3_1"), grid(-1, 1, 0.2, 1.5));
  ASSERT_TRUE(r4.signature.has_value());
  EXPECT_EQ(*r4.signature, 0);
  const auto r0 = induced_signature(catenoid(), SliceSpec::named("R3"), grid(0, 2 * pi, -1, 1));
  ASSERT_TRUE(r0.signature.has_value());
  EXPECT_EQ(*r0.signature, 0);
}

TEST(Slices, DegenerateLineIsCountedNotFatal) {
  // the spacelike hyperbolic chart collapses at v = 0
  const auto r = induced_signature(spacelike_hyperbolic(), SliceSpec::named("R3_1"), grid(-1, 1, 0.0, 1.0));
  EXPECT_EQ(r.degenerate_count, 11u);
  EXPECT_EQ(r.signature, std::optional<int>(0));
}

TEST(Wick, RotationTurnsCatenoidIntoLorentzianCharts) {
  const auto g = grid(-1, 1, -1, 1);
  const auto hyp = apply_wick_move(catenoid(), WickMove{RotateParam{Param::u, kI}, PermuteCoords{{1, 0, 2}}});
  EXPECT_LE(max_difference(hyp, lorentz_hyperbolic(), g), 1e-14);
  const auto ell = apply_wick_move(catenoid(), WickMove{RotateParam{Param::v, kI}, PermuteCoords{{2, 0, 1}}});
  EXPECT_LE(max_difference(ell, lorentz_elliptic(), g), 1e-14);
}

TEST(Wick, IdentityMoveChangesNothing) {
  const auto same = apply_wick_move(catenoid(), WickMove{});
  EXPECT_EQ(max_difference(same, catenoid(), grid(-1, 1, -1, 1)), 0.0);
}

TEST(Wick, DilationByITwiceIsMinusOne) {
  const auto twice = apply_wick_move(catenoid(), WickMove{Dilate{kI}, Dilate{kI}});
  const auto minus = apply_wick_move(catenoid(), WickMove{Dilate{-1.0}});
  EXPECT_LE(max_difference(twice, minus, grid(-1, 1, -1, 1)), 1e-15);
}

TEST(Wick, MovesCompose) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto random_atom = [&]() -> WickAtom {
    switch (rng() % 5) {
    case 0:
      return RotateParam{rng() % 2 ? Param::u : Param::v, rng() % 2 ? kI : -kI};
    case 1:
      return TranslateParam{rng() % 2 ? Param::u : Param::v, Complex(d(rng), d(rng))};
    case 2: {
      std::vector<int> p{0, 1, 2};
      std::shuffle(p.begin(), p.end(), rng);
      return PermuteCoords{p};
    }
    case 3:
      return Dilate{Complex(1.0 + d(rng), d(rng))};
    default:
      return TranslateAmbient{(CVec(3) << Complex(d(rng), d(rng)), d(rng), Complex(0, d(rng))).finished()};
    }
  };
  const auto g = grid(-0.5, 0.5, -0.5, 0.5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WickAtom> a, b;
    for (int k = 0; k < 3; ++k) {
      a.push_back(random_atom());
      b.push_back(random_atom());
    }
    const WickMove m1(a), m2(b);
    const auto stepwise = apply_wick_move(apply_wick_move(catenoid(), m1), m2);
    const auto joined = apply_wick_move(catenoid(), m1.then(m2));
    EXPECT_LE(max_difference(stepwise, joined, g), 1e-12);
  }
}

TEST(Wick, AmbientAtomsPullImplicitResidualsBack) {
  // CC -> z1^2+z2^2 = -sinh^2 z3 -> z1^2+z2^2 = -sin^2 z3 -> z2^2+z3^2 = -sin^2 z1
  const CVec shift = (CVec(3) << 0.0, 0.0, kI * pi / 2.0).finished();
  const auto moved = apply_wick_move(catenoid(), WickMove{TranslateAmbient{shift}, Dilate{kI}, PermuteCoords{{2, 1, 0}}});
  const Expr z1 = Expr::coord(1), z2 = Expr::coord(2), z3 = Expr::coord(3);
  const Expr target = pow(z2, 2.0) + pow(z3, 2.0) + pow(sin(z1), 2.0);
  ASSERT_EQ(moved.implicit_residuals.size(), 1u);
  auto g = grid(0, 2 * pi, -1, 1);
  g.u_im = 0.2;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = g.at(i);
    const CVec z = moved.point(p.u, p.v);
    const std::span<const Complex> in(z.data(), 3);
    EXPECT_LE(std::abs(target.eval<Complex>(in)), 1e-9);
    EXPECT_LE(std::abs(moved.implicit_residuals[0].eval<Complex>(in)), 1e-9);
  }
}

TEST(Wick, AmbientAtomsAreSimilarities) {
  EXPECT_FALSE(ambient_similarity(RotateParam{Param::u, kI}, 3).has_value());
  const auto d = ambient_similarity(Dilate{kI}, 3);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->conformal_factor(), Complex(-1.0));
  EXPECT_THROW(ambient_similarity(PermuteCoords{{1, 0}}, 3), DimensionMismatch);
}

TEST(Wick, MalformedAtomsAreRejected) {
  EXPECT_THROW(WickMove({RotateParam{Param::u, 2.0}}), Error);
  EXPECT_THROW(WickMove({PermuteCoords{{0, 0, 1}}}), Error);
  EXPECT_THROW(WickMove({Dilate{0.0}}), Error);
  EXPECT_THROW(wick_move_from_json(nlohmann::json::parse(R"([{"atom":"shear"}])")), ParseError);
  EXPECT_THROW(wick_move_from_json(nlohmann::json::parse(R"([{"atom":"rotate_param","param":"w","factor":[0,1]}])")),
               ParseError);
}

TEST(Wick, JsonRoundTrip) {
  const WickMove m{RotateParam{Param::v, -kI}, TranslateParam{Param::u, Complex(0.0, pi / 2)},
                   PermuteCoords{{2, 0, 1}}, Dilate{kI},
                   TranslateAmbient{(CVec(3) << 0.0, 1.0, Complex(0, -1)).finished()}};
  const auto back = wick_move_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(to_json(back), to_json(m));
  EXPECT_LE(max_difference(apply_wick_move(catenoid(), m), apply_wick_move(catenoid(), back), grid(-1, 1, -1, 1)),
            0.0);
}

TEST(Transfer, CatenoidMinimalityCarriesOver) {
  const auto r = property_transfer_check(catenoid(), WickMove{RotateParam{Param::v, kI}, PermuteCoords{{2, 0, 1}}},
                                         Property::minimal, grid(0, 2 * pi, -1, 1), grid(0, 2 * pi, -1, 1));
  EXPECT_LT(r.source_residual, 1e-8);
  EXPECT_LT(r.target_residual, 1e-8);
}

TEST(Transfer, PlaneStaysTotallyGeodesic) {
  const SurfaceChart plane{"plane", Program::chart({u, v, 0.0})};
  const WickMove m{RotateParam{Param::u, kI}, Dilate{Complex(2.0, 1.0)}, PermuteCoords{{2, 0, 1}},
                   TranslateAmbient{(CVec(3) << 1.0, kI, 0.0).finished()}};
  EXPECT_NO_THROW(property_transfer_check(plane, m, Property::totally_geodesic, grid(-1, 1, -1, 1), grid(-1, 1, -1, 1)));
}

TEST(Transfer, SphereDilationKeepsParallelAndFlipsCurvature) {
  const SurfaceChart sphere{"CS2", Program::chart({cos(u) * cos(v), cos(u) * sin(v), sin(u)})};
  const auto g = grid(-1, 1, -pi, pi);
  EXPECT_NO_THROW(property_transfer_check(sphere, WickMove{Dilate{kI}}, Property::parallel, g, g));
  const auto moved = apply_wick_move(sphere, WickMove{Dilate{kI}});
  EXPECT_LE(std::abs(sectional_curvature(sphere, 0.3, 0.4) - 1.0), 1e-12);
  EXPECT_LE(std::abs(sectional_curvature(moved, 0.3, 0.4) + 1.0), 1e-12);
}

TEST(Transfer, SourceMustSatisfyProperty) {
  EXPECT_THROW(property_transfer_check(catenoid(), WickMove{}, Property::parallel, grid(0, 2 * pi, -1, 1),
                                       grid(0, 2 * pi, -1, 1)),
               Error);
}

TEST(Transfer, ViolationCarriesBothResiduals) {
  // nearly minimal within tolerance; shrinking by 1e-3 magnifies H past it
  const SurfaceChart almost{"almost", Program::chart({u, v, 1e-9 * u * u})};
  try {
    property_transfer_check(almost, WickMove{Dilate{1e-3}}, Property::minimal, grid(-1, 1, -1, 1), grid(-1, 1, -1, 1));
    FAIL() << "expected TransferViolation";
  } catch (const TransferViolation &e) {
    EXPECT_LT(e.source, 1e-8);
    EXPECT_GT(e.target, 1e-7);
  }
}

TEST(SimilarityCovariance, CurvatureScalesByConformalFactor) {
  // K of alpha * M * L is K(L) / alpha^2; h and nabla h vanish together
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  const SurfaceChart base{"poly", Program::chart({u + Complex(0.2, 0.1) * v * v, v - 0.3 * u * u * v,
                                                  Complex(0.1, 0.4) * u * u + 0.5 * u * v})};
  for (Complex alpha : {Complex(2.0), kI, Complex(1.0, 1.0)}) {
    const auto moved = apply_wick_move(base, WickMove{Dilate{alpha}, PermuteCoords{{2, 0, 1}},
                                                      TranslateAmbient{(CVec(3) << 1.0, kI, -2.0).finished()}});
    for (int trial = 0; trial < 5; ++trial) {
      const Complex a(d(rng), d(rng)), b(d(rng), d(rng));
      const Complex k0 = sectional_curvature(base, a, b);
      const Complex k1 = sectional_curvature(moved, a, b);
      EXPECT_LE(std::abs(k1 * alpha * alpha - k0), 1e-10 * std::max(1.0, std::abs(k0)));
    }
  }
}
