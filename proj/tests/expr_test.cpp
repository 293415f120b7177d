#include <gtest/gtest.h>

#include <random>

#include "wickforge/expr.hpp"

using namespace wickforge;

namespace {

/// Random expression over u, v built from every node type, kept away from
/// poles and cuts by shifting the arguments of div/log/sqrt/pow.
Expr random_expr(std::mt19937_64 &rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 13);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const Expr u = Expr::u(), v = Expr::v();
  if (depth == 0) {
    switch (pick(rng) % 3) {
    case 0:
      return u;
    case 1:
      return v;
    default:
      return Expr(Complex(c(rng), c(rng)));
    }
  }
  const Expr a = random_expr(rng, depth - 1);
  const Expr b = random_expr(rng, depth - 1);
  auto positive = [](const Expr &x) { return Expr(4.0) + 0.1 * x; };
  switch (pick(rng)) {
  case 0:
    return a + b;
  case 1:
    return a - b;
  case 2:
    return a * b;
  case 3:
    return a / positive(b);
  case 4:
    return -a;
  case 5:
    return pow(a, 2.0);
  case 6:
    return exp(0.3 * a);
  case 7:
    return log(positive(a));
  case 8:
    return sin(a);
  case 9:
    return cos(a);
  case 10:
    return sinh(0.3 * a);
  case 11:
    return cosh(0.3 * a);
  case 12:
    return sqrt(positive(a));
  default:
    return pow(positive(a), Complex(0.5, 0.25));
  }
}

} // namespace

TEST(Expr, JsonRoundTripPreservesValues) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = random_expr(rng, 4);
    const Expr back = expr_from_json(nlohmann::json::parse(to_json(e).dump()));
    const Complex in[2] = {Complex(0.2, -0.1), Complex(-0.3, 0.4)};
    const auto a = e.eval<Complex>(in);
    const auto b = back.eval<Complex>(in);
    EXPECT_EQ(a, b) << e.to_string();
  }
}

TEST(Expr, LeafFormats) {
  EXPECT_EQ(to_json(Expr::u()), nlohmann::json::parse(R"({"var":"u"})"));
  EXPECT_EQ(to_json(Expr(Complex(1.0, -2.0))), nlohmann::json::parse(R"({"const":[1.0,-2.0]})"));
  EXPECT_EQ(to_json(cosh(Expr::v())),
            nlohmann::json::parse(R"({"op":"cosh","args":[{"var":"v"}]})"));
}

TEST(Expr, RejectsNonHolomorphicAndMalformedNodes) {
  EXPECT_THROW(expr_from_json(nlohmann::json::parse(R"({"op":"conj","args":[{"var":"u"}]})")),
               ParseError);
  EXPECT_THROW(expr_from_json(nlohmann::json::parse(R"({"op":"frob","args":[]})")), ParseError);
  EXPECT_THROW(expr_from_json(nlohmann::json::parse(R"({"op":"add","args":[{"var":"u"}]})")),
               ParseError);
  EXPECT_THROW(expr_from_json(nlohmann::json::parse(R"({"var":"w"})")), ParseError);
  EXPECT_THROW(expr_from_json(nlohmann::json::parse(R"({"const":[1]})")), ParseError);
}

TEST(Expr, ProgramDomainsDoNotMix) {
  EXPECT_THROW(Program::chart({Expr::u() + Expr::coord(1)}), ParseError);
  EXPECT_THROW(Program::of_coordinates(2, {Expr::coord(3)}), ParseError);
  EXPECT_NO_THROW(Program::of_coordinates(3, {Expr::coord(3) - Expr::coord(1)}));
}

TEST(Expr, SubstitutionComposes) {
  const Expr u = Expr::u(), v = Expr::v();
  const Expr e = cos(u) * cosh(v);
  const Expr moved = e.substitute(std::vector<Expr>{kI * u, v + 1.0});
  const Complex in[2] = {Complex(0.3, 0.1), Complex(-0.2, 0.5)};
  const Complex expected = std::cos(kI * in[0]) * std::cosh(in[1] + 1.0);
  EXPECT_LE(std::abs(moved.eval<Complex>(in) - expected), 1e-15);
}

TEST(Expr, ConstantFoldingDropsTrivialTerms) {
  const Expr u = Expr::u();
  EXPECT_EQ((Expr(0.0) * u + u * Expr(1.0)).id(), u.id());
  EXPECT_TRUE((Expr(2.0) * Expr(3.0)).is_constant(6.0));
}

TEST(Expr, SharedSubtreesEvaluateOnce) {
  // A deep chain of squares of a shared node would be exponential without memoization.
  Expr e = Expr::u();
  for (int k = 0; k < 40; ++k)
    e = e * e * Complex(1.0, 0.0) + e - e * e;
  const Complex in[2] = {Complex(0.1), Complex(0.0)};
  EXPECT_NO_THROW(e.eval<Complex>(in));
}
