#pragma once

// Pointwise geometry of a holomorphic surface chart L: C^2 -> C^n with the
// flat ambient metric g0.
//
// All tensors are taken in the coordinate frame d_u, d_v of the chart. Index
// 0 is u and 1 is v. Ambient-valued quantities (h, H, nabla h) are kept as
// vectors of C^n; components against the orthonormal normal frame are
// derived from them.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "wickforge/errors.hpp"
#include "wickforge/expr.hpp"
#include "wickforge/jet.hpp"
#include "wickforge/linalg.hpp"

namespace wickforge {

/// Relative threshold on |det g_ij| below which a tangent plane counts as null.
inline constexpr double kDegenerateTolerance = 1e-9;

struct SurfaceChart {
  std::string name;
  int ambient_dim = 3;
  ChartProgram program;
  /// Scalar functions of z1..zn that vanish on the image, if known.
  std::vector<Expr> implicit_residuals;

  SurfaceChart() = default;
  SurfaceChart(std::string name_, ChartProgram program_, std::vector<Expr> residuals = {})
      : name(std::move(name_)), ambient_dim(static_cast<int>(program_.output_count())),
        program(std::move(program_)), implicit_residuals(std::move(residuals)) {
    if (program.domain() != VarDomain::parameters || program.arity() != 2)
      throw Error("surface chart '" + name + "' must be a program in u and v");
    if (ambient_dim < 3)
      throw Error("surface chart '" + name + "' needs an ambient dimension of at least 3");
    for (const auto &r : implicit_residuals)
      if (r.uses_domain(VarDomain::parameters) || r.arity() > ambient_dim)
        throw Error("implicit residual of '" + name + "' must use z1..z" +
                    std::to_string(ambient_dim));
  }

  CVec point(Complex u, Complex v) const { return program.value(u, v); }
};

template <typename T> using Pair = std::array<T, 2>;
template <typename T> using PairPair = Pair<Pair<T>>;
template <typename T> using PairPairPair = Pair<PairPair<T>>;

/// Chart derivatives up to third order at one parameter point.
struct ChartJets {
  CVec point;
  Pair<CVec> d1;         ///< L_i
  PairPair<CVec> d2;     ///< L_ij
  PairPairPair<CVec> d3; ///< L_ijk
};

inline ChartJets chart_jets(const SurfaceChart &chart, Complex u, Complex v) {
  const auto jets = jet_eval(chart.program, u, v);
  const auto n = static_cast<Eigen::Index>(jets.size());
  auto fill = [&](int p, int q) {
    CVec out(n);
    for (Eigen::Index a = 0; a < n; ++a)
      out(a) = partial(jets[static_cast<std::size_t>(a)], p, q);
    return out;
  };
  ChartJets d;
  d.point = fill(0, 0);
  for (int i = 0; i < 2; ++i) {
    d.d1[i] = fill(i == 0, i == 1);
    for (int j = 0; j < 2; ++j) {
      const int pu2 = (i == 0) + (j == 0);
      d.d2[i][j] = fill(pu2, 2 - pu2);
      for (int k = 0; k < 2; ++k) {
        const int pu3 = pu2 + (k == 0);
        d.d3[i][j][k] = fill(pu3, 3 - pu3);
      }
    }
  }
  if (!all_finite(d.point))
    throw SingularEvaluation("chart value is not finite", chart.name);
  return d;
}

struct FrameData {
  CVec point;
  Pair<CVec> raw_tangents; ///< L_u, L_v
  Pair<CVec> tangent_basis;
  std::vector<CVec> normal_basis;
};

struct FundamentalForms {
  CMat2 first;                  ///< g_ij
  CMat2 first_inverse;          ///< g^ij
  PairPair<CVec> second;        ///< h(d_i, d_j) as ambient vectors
  std::vector<CMat2> second_components; ///< [a](i, j) = g0(h_ij, nu_a)
  std::vector<CMat2> shape_operators;   ///< [a](k, i): A_{nu_a} d_i = sum_k (.)(k, i) d_k
  CVec mean_curvature;          ///< H = (1/2) g^ij h_ij
  Pair<CMat2> christoffel;      ///< [k](i, j) = Gamma^k_ij
};

/// Everything the pointwise operations need, computed once per point.
class LocalGeometry {
public:
  static LocalGeometry at(const SurfaceChart &chart, Complex u, Complex v) {
    return LocalGeometry(chart, chart_jets(chart, u, v));
  }

  LocalGeometry(const SurfaceChart &chart, ChartJets jets)
      : g0_(BilinearForm::standard(chart.ambient_dim)), jets_(std::move(jets)) {
    const auto &L = jets_.d1;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        forms_.first(i, j) = g0_(L[i], L[j]);
    const Complex det = forms_.first.determinant();
    const double scale = L[0].squaredNorm() * L[1].squaredNorm();
    if (!(std::abs(det) > kDegenerateTolerance * scale))
      throw DegeneratePoint("null tangent plane on '" + chart.name +
                            "' (|det g| = " + std::to_string(std::abs(det)) + ")");
    forms_.first_inverse = forms_.first.inverse();

    build_frame(chart.ambient_dim);
    build_metric_derivatives();
    build_second_form();
    build_shape_operators();
    build_nabla_h();
  }

  const BilinearForm &metric() const noexcept { return g0_; }
  const ChartJets &jets() const noexcept { return jets_; }
  const FrameData &frame() const noexcept { return frame_; }
  const FundamentalForms &forms() const noexcept { return forms_; }
  Eigen::Index ambient_dim() const noexcept { return g0_.dimension(); }

  /// d_m g_ij
  const Pair<CMat2> &metric_derivative() const noexcept { return dg_; }
  /// d_m Gamma^k_ij as [m][k](i, j)
  const PairPair<CMat2> &christoffel_derivative() const noexcept { return dgamma_; }
  /// (nabla h)(d_i, d_j, d_k) as ambient vectors.
  const PairPairPair<CVec> &nabla_h() const noexcept { return nabla_h_; }

  /// Tangential part of an ambient vector.
  CVec tangential(const CVec &x) const { return lift(coordinates(x)); }
  CVec normal(const CVec &x) const { return x - tangential(x); }

  /// Coefficients of the tangential part of x in the basis d_u, d_v.
  Eigen::Vector2cd coordinates(const CVec &x) const {
    Eigen::Vector2cd dots(g0_(jets_.d1[0], x), g0_(jets_.d1[1], x));
    return forms_.first_inverse * dots;
  }

  CVec lift(const Eigen::Vector2cd &c) const { return c(0) * jets_.d1[0] + c(1) * jets_.d1[1]; }

  /// d_i (P_tangent) applied to a fixed ambient vector x.
  CVec tangential_projector_derivative(int i, const CVec &x) const {
    const auto &L = jets_.d1;
    const auto &L2 = jets_.d2;
    const CMat2 &ginv = forms_.first_inverse;
    const CMat2 dginv = -ginv * dg_[i] * ginv;
    CVec out = CVec::Zero(x.size());
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const Complex lk = g0_(L[k], x);
        out += (dginv(j, k) * lk + ginv(j, k) * g0_(L2[k][i], x)) * L[j];
        out += (ginv(j, k) * lk) * L2[j][i];
      }
    return out;
  }

  /// Riemann tensor R_ijkw = g(R(d_i, d_j) d_k, d_w) from the Christoffel symbols.
  Complex riemann(int i, int j, int k, int w) const {
    const auto &G = forms_.christoffel;
    Complex total = 0.0;
    for (int l = 0; l < 2; ++l) {
      Complex r = dgamma_[i][l](j, k) - dgamma_[j][l](i, k);
      for (int m = 0; m < 2; ++m)
        r += G[l](i, m) * G[m](j, k) - G[l](j, m) * G[m](i, k);
      total += r * forms_.first(l, w);
    }
    return total;
  }

  /// Curvature of the tangent plane through the Gauss equation with flat ambient.
  Complex sectional_curvature() const {
    const auto &h = forms_.second;
    const Complex det = forms_.first.determinant();
    return (g0_(h[0][0], h[1][1]) - g0_(h[0][1], h[0][1])) / det;
  }

  /// Same curvature computed intrinsically from the Christoffel symbols.
  Complex intrinsic_curvature() const { return riemann(0, 1, 1, 0) / forms_.first.determinant(); }

  /// Curvature of the plane spanned by X = x0 d_u + x1 d_v and Y likewise.
  Complex sectional_curvature(const Eigen::Vector2cd &x, const Eigen::Vector2cd &y) const {
    const CVec hxx = second_form(x, x), hyy = second_form(y, y), hxy = second_form(x, y);
    const Complex gxx = (x.transpose() * forms_.first * x)(0, 0);
    const Complex gyy = (y.transpose() * forms_.first * y)(0, 0);
    const Complex gxy = (x.transpose() * forms_.first * y)(0, 0);
    const Complex denom = gxx * gyy - gxy * gxy;
    const double scale = x.squaredNorm() * y.squaredNorm() * forms_.first.cwiseAbs2().sum();
    if (!(std::abs(denom) > kDegenerateTolerance * scale))
      throw DegeneratePlane("tangent plane is null");
    return (g0_(hxx, hyy) - g0_(hxy, hxy)) / denom;
  }

  CVec second_form(const Eigen::Vector2cd &x, const Eigen::Vector2cd &y) const {
    CVec out = CVec::Zero(ambient_dim());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out += (x(i) * y(j)) * forms_.second[i][j];
    return out;
  }

  /// max over index combinations of |R_ijkw - g(h_iw, h_jk) + g(h_jw, h_ik)|.
  double gauss_residual() const {
    const auto &h = forms_.second;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int w = 0; w < 2; ++w) {
            const Complex rhs = g0_(h[i][w], h[j][k]) - g0_(h[j][w], h[i][k]);
            worst = std::max(worst, std::abs(riemann(i, j, k, w) - rhs));
          }
    return worst;
  }

  /// sum of |g0(nabla h_ijk, nu_a)|^2 over all indices.
  double nabla_h_norm2() const {
    double s = 0.0;
    for (const auto &nu : frame_.normal_basis)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            s += std::norm(g0_(nabla_h_[i][j][k], nu));
    return s;
  }

  /// sum of |h components|^2 in the orthonormal normal frame.
  double h_norm2() const {
    double s = 0.0;
    for (const auto &c : forms_.second_components)
      s += c.cwiseAbs2().sum();
    return s;
  }

  /// Largest departure of nabla h from symmetry in (j, k) and in (i, j).
  double nabla_h_asymmetry() const {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          worst = std::max(worst, (nabla_h_[i][j][k] - nabla_h_[i][k][j]).cwiseAbs().maxCoeff());
          worst = std::max(worst, (nabla_h_[i][j][k] - nabla_h_[j][i][k]).cwiseAbs().maxCoeff());
        }
    return worst;
  }

private:
  void build_frame(int n) {
    frame_.point = jets_.point;
    frame_.raw_tangents = jets_.d1;
    auto tangents = orthonormal_basis(g0_, {jets_.d1[0], jets_.d1[1]}, 2);
    frame_.tangent_basis = {tangents[0], tangents[1]};
    std::vector<CVec> axes;
    for (int k = 0; k < n; ++k)
      axes.push_back(unit_vector(n, k));
    auto full = orthonormal_basis(g0_, axes, static_cast<std::size_t>(n), tangents);
    frame_.normal_basis.assign(full.begin() + 2, full.end());
  }

  void build_metric_derivatives() {
    const auto &L1 = jets_.d1;
    const auto &L2 = jets_.d2;
    const auto &L3 = jets_.d3;
    const CMat2 &ginv = forms_.first_inverse;

    for (int m = 0; m < 2; ++m)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          dg_[m](i, j) = g0_(L2[m][i], L1[j]) + g0_(L1[i], L2[m][j]);

    // second derivatives d_m d_p g_ij
    PairPair<CMat2> ddg;
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 2; ++p)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            ddg[m][p](i, j) = g0_(L3[m][p][i], L1[j]) + g0_(L2[p][i], L2[m][j]) +
                              g0_(L2[m][i], L2[p][j]) + g0_(L1[i], L3[m][p][j]);

    // Koszul: Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
    auto koszul = [&](int i, int j, int l) { return dg_[i](j, l) + dg_[j](i, l) - dg_[l](i, j); };
    auto koszul_derivative = [&](int m, int i, int j, int l) {
      return ddg[m][i](j, l) + ddg[m][j](i, l) - ddg[m][l](i, j);
    };
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Complex s = 0.0;
          for (int l = 0; l < 2; ++l)
            s += ginv(k, l) * koszul(i, j, l);
          forms_.christoffel[k](i, j) = 0.5 * s;
        }
    for (int m = 0; m < 2; ++m) {
      const CMat2 dginv = -ginv * dg_[m] * ginv;
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            Complex s = 0.0;
            for (int l = 0; l < 2; ++l)
              s += dginv(k, l) * koszul(i, j, l) + ginv(k, l) * koszul_derivative(m, i, j, l);
            dgamma_[m][k](i, j) = 0.5 * s;
          }
    }
  }

  void build_second_form() {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        forms_.second[i][j] = normal(jets_.d2[i][j]);
    for (const auto &nu : frame_.normal_basis) {
      CMat2 c;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          c(i, j) = g0_(forms_.second[i][j], nu);
      forms_.second_components.push_back(c);
    }
    const CMat2 &ginv = forms_.first_inverse;
    forms_.mean_curvature = CVec::Zero(ambient_dim());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        forms_.mean_curvature += (0.5 * ginv(i, j)) * forms_.second[i][j];
  }

  // A_xi X = -(D_X xi)^T with xi = P_normal(nu_a), so D_i xi = -(d_i P_tangent) nu_a.
  void build_shape_operators() {
    for (const auto &nu : frame_.normal_basis) {
      CMat2 a;
      for (int i = 0; i < 2; ++i) {
        const CVec d_xi = -tangential_projector_derivative(i, nu);
        a.col(i) = -coordinates(d_xi);
      }
      forms_.shape_operators.push_back(a);
    }
  }

  // (nabla h)_ijk = (D_i h_jk)^perp - h(nabla_i d_j, d_k) - h(d_j, nabla_i d_k), where
  // D_i h_jk = d_i(P_normal L_jk) = -(d_i P_tangent) L_jk + P_normal L_ijk.
  void build_nabla_h() {
    const auto &G = forms_.christoffel;
    const auto &h = forms_.second;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const CVec d_h =
              -tangential_projector_derivative(i, jets_.d2[j][k]) + normal(jets_.d3[i][j][k]);
          CVec t = normal(d_h);
          for (int m = 0; m < 2; ++m)
            t -= G[m](i, j) * h[m][k] + G[m](i, k) * h[j][m];
          nabla_h_[i][j][k] = t;
        }
  }

  BilinearForm g0_;
  ChartJets jets_;
  FrameData frame_;
  FundamentalForms forms_;
  Pair<CMat2> dg_;
  PairPair<CMat2> dgamma_;
  PairPairPair<CVec> nabla_h_;
};

inline FrameData frame_at(const SurfaceChart &chart, Complex u, Complex v) {
  return LocalGeometry::at(chart, u, v).frame();
}

inline FundamentalForms fundamental_forms(const SurfaceChart &chart, Complex u, Complex v) {
  return LocalGeometry::at(chart, u, v).forms();
}

inline Complex sectional_curvature(const SurfaceChart &chart, Complex u, Complex v) {
  const auto geo = LocalGeometry::at(chart, u, v);
  const Complex det = geo.forms().first.determinant();
  const double scale = geo.jets().d1[0].squaredNorm() * geo.jets().d1[1].squaredNorm();
  if (!(std::abs(det) > kDegenerateTolerance * scale))
    throw DegeneratePlane("tangent plane is null");
  return geo.sectional_curvature();
}

struct NablaH {
  double norm2 = 0.0;
  PairPairPair<CVec> tensor;
};

inline NablaH nabla_h_norm(const SurfaceChart &chart, Complex u, Complex v) {
  const auto geo = LocalGeometry::at(chart, u, v);
  return {geo.nabla_h_norm2(), geo.nabla_h()};
}

inline double gauss_residual(const SurfaceChart &chart, Complex u, Complex v) {
  return LocalGeometry::at(chart, u, v).gauss_residual();
}

// Nested submanifolds ----------------------------------------------------------

/// A submanifold of C^n cut out by holomorphic equations F_k(z) = 0.
/// `curvature` is set for the constant-curvature quadrics CS^m(alpha).
struct Ambient {
  std::string name;
  int dim = 3;
  std::vector<Expr> equations;
  std::optional<Complex> curvature;

  static Ambient flat(int n) { return {"C" + std::to_string(n), n, {}, Complex{0.0}}; }

  /// CS^m(alpha) = {z in C^{m+1} : z1^2 + ... + z_{m+1}^2 = alpha^2}.
  static Ambient sphere(int m, Complex alpha) {
    Expr sum = 0.0;
    for (int k = 1; k <= m + 1; ++k)
      sum = sum + pow(Expr::coord(k), 2.0);
    return {"CS" + std::to_string(m), m + 1, {sum - Expr(alpha * alpha)}, 1.0 / (alpha * alpha)};
  }

  double residual(const CVec &z) const {
    if (z.size() != dim)
      throw DimensionMismatch("point dimension does not match ambient");
    double worst = 0.0;
    const std::span<const Complex> in(z.data(), static_cast<std::size_t>(z.size()));
    for (const auto &e : equations)
      worst = std::max(worst, std::abs(e.eval<Complex>(in)));
    return worst;
  }

  /// Holomorphic gradients dF_k/dz_j at z.
  std::vector<CVec> gradients(const CVec &z) const {
    std::vector<CVec> out;
    for (const auto &e : equations) {
      CVec grad(dim);
      for (int j = 0; j < dim; ++j) {
        std::vector<Jet2> in;
        for (int l = 0; l < dim; ++l)
          in.push_back(l == j ? Jet2::variable_u(z(l)) : Jet2::constant(z(l)));
        grad(j) = partial(e.eval<Jet2>(std::span<const Jet2>(in)), 1, 0);
      }
      out.push_back(grad);
    }
    return out;
  }
};

struct RelativeSecondForm {
  PairPair<CVec> vectors;             ///< h_rel(d_i, d_j)
  std::vector<CMat2> components;      ///< against an orthonormal basis of T_ambient minus T_inner
  double max_component = 0.0;
  /// Gauss-equation residual relative to the ambient curvature, when that is known.
  std::optional<double> gauss_residual;
  bool totally_geodesic = false;
};

inline constexpr double kAmbientMembershipTolerance = 1e-9;

/// Second fundamental form of the inner surface as a submanifold of `ambient`.
inline RelativeSecondForm relative_second_form(const SurfaceChart &inner, const Ambient &ambient,
                                               Complex u, Complex v, double tol = 1e-9) {
  if (inner.ambient_dim != ambient.dim)
    throw DimensionMismatch("inner chart and ambient live in different C^n");
  const auto geo = LocalGeometry::at(inner, u, v);
  const auto &g0 = geo.metric();
  const CVec &p = geo.jets().point;
  const double off = ambient.residual(p);
  if (off > kAmbientMembershipTolerance)
    throw PointNotOnAmbient("point of '" + inner.name + "' is off '" + ambient.name +
                            "' by " + std::to_string(off));

  const auto grads = ambient.gradients(p);
  const auto amb_normals = orthonormal_basis(g0, grads, grads.size());
  auto amb_normal_part = [&](const CVec &x) {
    CVec out = CVec::Zero(x.size());
    for (const auto &nu : amb_normals)
      out += g0(nu, x) * nu;
    return out;
  };

  std::vector<CVec> seed{geo.frame().tangent_basis[0], geo.frame().tangent_basis[1]};
  seed.insert(seed.end(), amb_normals.begin(), amb_normals.end());
  const auto seed_size = seed.size();
  std::vector<CVec> axes;
  for (int k = 0; k < ambient.dim; ++k)
    axes.push_back(unit_vector(ambient.dim, k));
  const auto full = orthonormal_basis(g0, axes, static_cast<std::size_t>(ambient.dim), seed);
  const std::vector<CVec> rel_normals(full.begin() + static_cast<std::ptrdiff_t>(seed_size),
                                      full.end());

  RelativeSecondForm out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const CVec &h = geo.forms().second[i][j];
      out.vectors[i][j] = h - amb_normal_part(h);
    }
  for (const auto &nu : rel_normals) {
    CMat2 c;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        c(i, j) = g0(out.vectors[i][j], nu);
    out.max_component = std::max(out.max_component, c.cwiseAbs().maxCoeff());
    out.components.push_back(c);
  }

  if (ambient.curvature) {
    const Complex kt = *ambient.curvature;
    const CMat2 &g = geo.forms().first;
    const auto &hr = out.vectors;
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int w = 0; w < 2; ++w) {
            const Complex rhs = kt * (g(j, k) * g(i, w) - g(i, k) * g(j, w)) +
                                g0(hr[i][w], hr[j][k]) - g0(hr[j][w], hr[i][k]);
            worst = std::max(worst, std::abs(geo.riemann(i, j, k, w) - rhs));
          }
    out.gauss_residual = worst;
  }
  out.totally_geodesic = out.max_component < tol;
  return out;
}

} // namespace wickforge
