#include <gtest/gtest.h>

#include <random>

#include "wickforge/submanifold.hpp"

using namespace wickforge;

namespace {

const Expr u = Expr::u();
const Expr v = Expr::v();

SurfaceChart plane() { return {"plane", Program::chart({u, v, 0.0})}; }

SurfaceChart catenoid() {
  return {"catenoid", Program::chart({cos(u) * cosh(v), sin(u) * cosh(v), v})};
}

SurfaceChart sphere(Complex alpha) {
  return {"sphere",
          Program::chart({alpha * cos(u) * cos(v), alpha * cos(u) * sin(v), alpha * sin(u)})};
}

SurfaceChart cylinder() { return {"cylinder", Program::chart({cos(u), sin(u), v})}; }

SurfaceChart surface_b() {
  const Expr w = u + kI * v;
  return {"B", Program::chart({u - pow(w, 3.0) / 6.0, v - kI * pow(w, 3.0) / 6.0, pow(w, 2.0) / 2.0})};
}

/// Random chart in C^n: (u, v, 0, ...) plus random quadratic and cubic terms.
SurfaceChart random_polynomial_chart(std::mt19937_64 &rng, int n) {
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  auto c = [&] { return Expr(Complex(d(rng), d(rng))); };
  std::vector<Expr> outs;
  for (int a = 0; a < n; ++a) {
    Expr e = a == 0 ? u : a == 1 ? v : Expr(0.0);
    e = e + c() * u + c() * v;
    e = e + c() * u * u + c() * u * v + c() * v * v;
    e = e + c() * u * u * u + c() * u * u * v + c() * u * v * v + c() * v * v * v;
    outs.push_back(e);
  }
  return {"poly", Program::chart(std::move(outs))};
}

CVec vec3(Complex a, Complex b, Complex c) {
  CVec x(3);
  x << a, b, c;
  return x;
}

bool parallel_up_to_sign(const CVec &a, const CVec &b, double tol) {
  return (a - b).norm() < tol || (a + b).norm() < tol;
}

} // namespace

TEST(Frame, CatenoidAtOrigin) {
  const auto f = frame_at(catenoid(), 0.0, 0.0);
  EXPECT_TRUE(parallel_up_to_sign(f.tangent_basis[0], vec3(0, 1, 0), 1e-14));
  EXPECT_TRUE(parallel_up_to_sign(f.tangent_basis[1], vec3(0, 0, 1), 1e-14));
  ASSERT_EQ(f.normal_basis.size(), 1u);
  EXPECT_TRUE(parallel_up_to_sign(f.normal_basis[0], vec3(1, 0, 0), 1e-14));
}

TEST(Frame, PlaneEverywhere) {
  for (Complex p : {Complex(0.0), Complex(1.5, -2.0)}) {
    const auto f = frame_at(plane(), p, 2.0 * p);
    EXPECT_TRUE(parallel_up_to_sign(f.tangent_basis[0], vec3(1, 0, 0), 1e-15));
    EXPECT_TRUE(parallel_up_to_sign(f.tangent_basis[1], vec3(0, 1, 0), 1e-15));
    EXPECT_TRUE(parallel_up_to_sign(f.normal_basis[0], vec3(0, 0, 1), 1e-15));
  }
}

TEST(Frame, NullTangentPlaneIsDegenerate) {
  // L_u = (1, i, 0) is null everywhere; det g = 4 v^2 vanishes at v = 0.
  const SurfaceChart chart{"null", Program::chart({u, kI * u + v * v, v})};
  EXPECT_THROW(frame_at(chart, 0.3, 0.0), DegeneratePoint);
  // Away from v = 0 the plane is fine even though L_u stays null.
  const auto f = frame_at(chart, 0.3, 0.5);
  const auto g = BilinearForm::standard(3);
  std::vector<CVec> all{f.tangent_basis[0], f.tangent_basis[1], f.normal_basis[0]};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_LE(std::abs(g(all[i], all[j]) - Complex(i == j)), 1e-9);
}

TEST(Forms, PlaneIsTotallyGeodesic) {
  const auto ff = fundamental_forms(plane(), Complex(0.2, 0.1), -0.7);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_EQ(ff.second[i][j].norm(), 0.0);
  EXPECT_EQ(ff.mean_curvature.norm(), 0.0);
}

TEST(Forms, UnitSphereHasUnitMeanCurvature) {
  // With L_uu = e3 the mean curvature vector is e3, so g(H, H) = 1.
  const auto g = BilinearForm::standard(3);
  for (auto [a, b] : {std::pair{0.1, 0.4}, std::pair{-0.6, 1.3}, std::pair{0.9, -2.0}}) {
    const auto ff = fundamental_forms(sphere(1.0), a, b);
    EXPECT_LE(std::abs(g(ff.mean_curvature, ff.mean_curvature) - 1.0), 1e-12);
  }
}

TEST(Forms, CatenoidFirstFormAtOrigin) {
  const auto ff = fundamental_forms(catenoid(), 0.0, 0.0);
  EXPECT_LE((ff.first - CMat2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Forms, SecondFormSymmetricMeanCurvatureNormalAndWeingartenDual) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  const auto g = BilinearForm::standard(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto chart = random_polynomial_chart(rng, 4);
    const auto geo = LocalGeometry::at(chart, Complex(d(rng), d(rng)), Complex(d(rng), d(rng)));
    const auto &ff = geo.forms();
    EXPECT_LE((ff.second[0][1] - ff.second[1][0]).norm(), 1e-12);
    for (const auto &t : geo.jets().d1)
      EXPECT_LE(std::abs(g(ff.mean_curvature, t)), 1e-9);
    ASSERT_EQ(ff.shape_operators.size(), geo.frame().normal_basis.size());
    for (std::size_t a = 0; a < ff.shape_operators.size(); ++a) {
      // g(A X, Y) = A^T g in coordinates
      const CMat2 lhs = ff.shape_operators[a].transpose() * ff.first;
      EXPECT_LE((lhs - ff.second_components[a]).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Forms, ChristoffelsFromKoszulMatchTangentialProjection) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto chart = random_polynomial_chart(rng, 3);
    const auto geo = LocalGeometry::at(chart, Complex(0.1, 0.05), Complex(-0.2, 0.1));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto c = geo.coordinates(geo.jets().d2[i][j]);
        for (int k = 0; k < 2; ++k)
          EXPECT_LE(std::abs(geo.forms().christoffel[k](i, j) - c(k)), 1e-11);
      }
  }
}

TEST(Forms, SecondFormMatchesFiniteDifferences) {
  // Second central differences of L, projected to the normal space.
  const auto chart = catenoid();
  const Complex u0(0.4, 0.1), v0(0.3, -0.2);
  const auto geo = LocalGeometry::at(chart, u0, v0);
  const double h = 1e-4;
  auto L = [&](Complex a, Complex b) { return chart.point(a, b); };
  const CVec luu = (L(u0 + h, v0) - 2.0 * L(u0, v0) + L(u0 - h, v0)) / (h * h);
  const CVec lvv = (L(u0, v0 + h) - 2.0 * L(u0, v0) + L(u0, v0 - h)) / (h * h);
  const CVec luv =
      (L(u0 + h, v0 + h) - L(u0 + h, v0 - h) - L(u0 - h, v0 + h) + L(u0 - h, v0 - h)) / (4 * h * h);
  const auto &ff = geo.forms();
  auto rel = [](const CVec &a, const CVec &b) { return (a - b).norm() / std::max(1.0, b.norm()); };
  EXPECT_LE(rel(ff.second[0][0], geo.normal(luu)), 1e-5);
  EXPECT_LE(rel(ff.second[1][1], geo.normal(lvv)), 1e-5);
  EXPECT_LE(rel(ff.second[0][1], geo.normal(luv)), 1e-5);
}

TEST(Curvature, ComplexSphereIsOneOverAlphaSquared) {
  EXPECT_LE(std::abs(sectional_curvature(sphere(1.0), 0.3, 0.7) - 1.0), 1e-12);
  EXPECT_LE(std::abs(sectional_curvature(sphere(kI), 0.3, 0.7) + 1.0), 1e-12);
}

TEST(Curvature, CylinderIsFlat) {
  EXPECT_LE(std::abs(sectional_curvature(cylinder(), Complex(0.3, 0.2), 0.7)), 1e-14);
}

TEST(Curvature, IndependentOfTangentBasisAndMatchesIntrinsic) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto chart = random_polynomial_chart(rng, 3);
    const auto geo = LocalGeometry::at(chart, Complex(0.1, 0.2), Complex(0.05, -0.1));
    const Complex k = geo.sectional_curvature();
    Eigen::Vector2cd x(Complex(d(rng), d(rng)), Complex(d(rng), d(rng)));
    Eigen::Vector2cd y(Complex(d(rng), d(rng)), Complex(d(rng), d(rng)));
    EXPECT_LE(std::abs(geo.sectional_curvature(x, y) - k), 1e-8 * std::max(1.0, std::abs(k)));
    EXPECT_LE(std::abs(geo.intrinsic_curvature() - k), 1e-8 * std::max(1.0, std::abs(k)));
  }
}

TEST(Curvature, NullPlaneThrows) {
  const auto geo = LocalGeometry::at(plane(), 0.0, 0.0);
  Eigen::Vector2cd x(1.0, kI);
  EXPECT_THROW(geo.sectional_curvature(x, x), DegeneratePlane);
}

TEST(NablaH, ParallelSurfacesVanish) {
  for (const auto &chart : {plane(), sphere(1.0), cylinder(), surface_b()})
    for (auto [a, b] : {std::pair{0.2, 0.3}, std::pair{-0.7, 1.1}}) {
      EXPECT_LE(std::sqrt(nabla_h_norm(chart, Complex(a, 0.1), b).norm2), 1e-9) << chart.name;
    }
}

TEST(NablaH, CatenoidIsNotParallel) {
  EXPECT_GE(std::sqrt(nabla_h_norm(catenoid(), 0.0, 1.0).norm2), 1e-3);
}

TEST(NablaH, FullySymmetricByCodazzi) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const auto chart = random_polynomial_chart(rng, 3 + trial % 2);
    const auto geo = LocalGeometry::at(chart, Complex(0.1, -0.1), Complex(0.2, 0.1));
    EXPECT_LE(geo.nabla_h_asymmetry(), 1e-9);
  }
}

TEST(Gauss, PlaneVanishes) { EXPECT_LE(gauss_residual(plane(), 0.3, 0.4), 1e-15); }

TEST(Gauss, RandomPolynomialCharts) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto chart = random_polynomial_chart(rng, 3 + trial % 2);
    EXPECT_LE(gauss_residual(chart, Complex(d(rng), d(rng)), Complex(d(rng), d(rng))), 1e-8);
  }
}

TEST(Relative, ComplexSphereInCS3IsTotallyGeodesic) {
  const SurfaceChart inner{"CS2-in-CS3",
                           Program::chart({cos(u) * cos(v), cos(u) * sin(v), sin(u), 0.0})};
  const auto amb = Ambient::sphere(3, 1.0);
  for (Complex p : {Complex(0.3, 0.2), Complex(-1.0, 0.4)}) {
    const auto r = relative_second_form(inner, amb, p, Complex(0.7, -0.3));
    EXPECT_TRUE(r.totally_geodesic);
    EXPECT_LE(r.max_component, 1e-12);
    ASSERT_TRUE(r.gauss_residual.has_value());
    EXPECT_LE(*r.gauss_residual, 1e-10);
  }
}

TEST(Relative, RoundSphereInS3AtRealPoints) {
  const SurfaceChart inner{"S2-in-S3",
                           Program::chart({cos(u) * cos(v), cos(u) * sin(v), sin(u), 0.0})};
  const auto r = relative_second_form(inner, Ambient::sphere(3, 1.0), 0.4, 1.2);
  EXPECT_TRUE(r.totally_geodesic);
}

TEST(Relative, SmallSphereIsNotTotallyGeodesic) {
  // CS3 cut by z4 = 1/2 is a sphere of radius sqrt(3)/2: umbilic, not geodesic.
  const double rho = std::sqrt(3.0) / 2.0;
  const SurfaceChart inner{
      "small", Program::chart({rho * cos(u) * cos(v), rho * cos(u) * sin(v), rho * sin(u), 0.5})};
  const auto amb = Ambient::sphere(3, 1.0);
  const auto r = relative_second_form(inner, amb, 0.3, 0.2);
  EXPECT_FALSE(r.totally_geodesic);
  EXPECT_GT(r.max_component, 0.1);
  ASSERT_TRUE(r.gauss_residual.has_value());
  EXPECT_LE(*r.gauss_residual, 1e-10);
}

TEST(Relative, PointOffAmbientThrows) {
  const SurfaceChart inner{"off", Program::chart({cos(u) * cos(v), cos(u) * sin(v), sin(u), 0.1})};
  EXPECT_THROW(relative_second_form(inner, Ambient::sphere(3, 1.0), 0.3, 0.2), PointNotOnAmbient);
}

TEST(Relative, FlatAmbientReducesToFullSecondForm) {
  const auto r = relative_second_form(catenoid(), Ambient::flat(3), 0.3, 0.2);
  const auto geo = LocalGeometry::at(catenoid(), 0.3, 0.2);
  EXPECT_LE((r.vectors[0][0] - geo.forms().second[0][0]).norm(), 1e-14);
  EXPECT_FALSE(r.totally_geodesic);
}
