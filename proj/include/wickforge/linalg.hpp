#pragma once

// Complex-bilinear ("holomorphic") inner-product algebra on C^n.
//
// Nothing here conjugates: g(X, Y) = sum G_ij X_i Y_j. Vectors and matrices
// are Eigen's dynamic complex types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wickforge/errors.hpp"

namespace wickforge {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using CMat2 = Eigen::Matrix2cd;

inline constexpr Complex kI{0.0, 1.0};

/// Null-vector threshold relative to the squared size of the input.
inline constexpr double kNullTolerance = 1e-9;
/// Threshold for the a = +-bi branch of the 2x2 normal form.
inline constexpr double kBranchTolerance = 1e-9;
/// Zero threshold for real eigenvalues when reading off a signature.
inline constexpr double kSignatureTolerance = 1e-9;

inline bool all_finite(const CVec &v) {
  return std::all_of(v.data(), v.data() + v.size(), [](const Complex &z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

inline CVec unit_vector(Eigen::Index n, Eigen::Index j) {
  CVec e = CVec::Zero(n);
  e(j) = 1.0;
  return e;
}

/// Non-conjugating dot product, i.e. the standard form g0.
inline Complex bilinear_dot(const CVec &x, const CVec &y) {
  return (x.array() * y.array()).sum();
}

/// A non-degenerate complex symmetric bilinear form given by its Gram matrix.
class BilinearForm {
public:
  explicit BilinearForm(CMat gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols() || gram_.rows() < 1)
      throw DimensionMismatch("Gram matrix must be square and non-empty");
    const double scale = std::max(1.0, gram_.cwiseAbs().maxCoeff());
    if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error("Gram matrix is not symmetric");
    if (std::abs(gram_.determinant()) <= 1e-12 * std::pow(scale, double(gram_.rows())))
      throw Error("Gram matrix is degenerate");
    standard_ = gram_.isIdentity(0.0);
  }

  /// The standard form g0 on C^n.
  static BilinearForm standard(Eigen::Index n) { return BilinearForm(CMat::Identity(n, n)); }

  Eigen::Index dimension() const noexcept { return gram_.rows(); }
  const CMat &gram() const noexcept { return gram_; }
  bool is_standard() const noexcept { return standard_; }

  Complex operator()(const CVec &x, const CVec &y) const {
    if (x.size() != dimension() || y.size() != dimension())
      throw DimensionMismatch("vector length " + std::to_string(x.size()) + "/" +
                              std::to_string(y.size()) + " does not match form dimension " +
                              std::to_string(dimension()));
    if (standard_)
      return bilinear_dot(x, y);
    return (x.transpose() * gram_ * y)(0, 0);
  }

private:
  CMat gram_;
  bool standard_ = false;
};

inline Complex holo_inner(const BilinearForm &g, const CVec &x, const CVec &y) { return g(x, y); }

namespace detail {

inline double squared_scale(const std::vector<CVec> &vs) {
  double s = 0.0;
  for (const auto &v : vs)
    s = std::max(s, v.squaredNorm());
  return s;
}

inline CVec remove_components(const BilinearForm &g, const std::vector<CVec> &basis, CVec r) {
  for (const auto &u : basis)
    r -= g(u, r) * u;
  return r;
}

} // namespace detail

/// Classical Gram-Schmidt for a non-conjugating form. Normalizes by the
/// principal square root of g(r, r); throws NullVectorEncountered when a
/// residual is null, so callers that can re-seed should use orthonormal_basis.
inline std::vector<CVec> gram_schmidt(const BilinearForm &g, const std::vector<CVec> &vectors,
                                      double null_tol = kNullTolerance) {
  const double scale = detail::squared_scale(vectors);
  std::vector<CVec> out;
  out.reserve(vectors.size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    CVec r = detail::remove_components(g, out, vectors[k]);
    // one reorthogonalization pass
    r = detail::remove_components(g, out, r);
    const Complex rr = g(r, r);
    if (!(std::abs(rr) >= null_tol * scale) || scale == 0.0)
      throw NullVectorEncountered("null residual at vector " + std::to_string(k) +
                                  " (|g(r,r)| = " + std::to_string(std::abs(rr)) + ")");
    out.push_back(r / std::sqrt(rr));
  }
  return out;
}

/// Extends `seed` (already orthonormal) to `target_dim` orthonormal vectors
/// drawn from the span of `candidates`. Null pivots are re-seeded with sums of
/// pairs, which works whenever the spanned subspace is non-degenerate.
inline std::vector<CVec> orthonormal_basis(const BilinearForm &g, std::vector<CVec> candidates,
                                           std::size_t target_dim, std::vector<CVec> seed = {},
                                           double null_tol = kNullTolerance) {
  const double scale = std::max(detail::squared_scale(candidates), detail::squared_scale(seed));
  std::vector<CVec> basis = std::move(seed);
  while (basis.size() < target_dim) {
    std::vector<CVec> pool;
    for (auto &c : candidates) {
      CVec r = detail::remove_components(g, basis, detail::remove_components(g, basis, c));
      if (r.squaredNorm() > 1e-20 * scale)
        pool.push_back(std::move(r));
    }
    if (pool.empty())
      throw NullVectorEncountered("candidates do not span enough directions");

    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const double q = std::abs(g(pool[k], pool[k])) / pool[k].squaredNorm();
      if (q > best_norm) {
        best_norm = q;
        best = k;
      }
    }
    const Complex rr = g(pool[best], pool[best]);
    if (std::abs(rr) >= null_tol * scale) {
      basis.push_back(pool[best] / std::sqrt(rr));
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
      candidates = std::move(pool);
      continue;
    }

    // Every residual is null: g(a + b, a + b) = 2 g(a, b) for null a, b.
    std::size_t ia = 0, ib = 0;
    double best_cross = 0.0;
    for (std::size_t a = 0; a < pool.size(); ++a)
      for (std::size_t b = a + 1; b < pool.size(); ++b) {
        const double c = std::abs(g(pool[a], pool[b]));
        if (c > best_cross) {
          best_cross = c;
          ia = a;
          ib = b;
        }
      }
    if (best_cross < null_tol * scale)
      throw NullVectorEncountered("spanned subspace is degenerate");
    pool[ia] += pool[ib];
    candidates = std::move(pool);
  }
  return basis;
}

enum class SubspaceKind { real_slice, totally_real, generic, degenerate };

inline const char *to_string(SubspaceKind k) {
  switch (k) {
  case SubspaceKind::real_slice:
    return "real_slice";
  case SubspaceKind::totally_real:
    return "totally_real";
  case SubspaceKind::generic:
    return "generic";
  case SubspaceKind::degenerate:
    return "degenerate";
  }
  return "?";
}

/// A real-linear subspace W of C^n and where it sits relative to g.
///
/// `kind` is the strongest property that holds, in the order
/// real_slice > totally_real > generic > degenerate. The individual flags are
/// kept so that, e.g., a real slice that is also generic can be reported as such.
struct RealSubspace {
  Eigen::Index ambient_dim = 0;
  std::vector<CVec> basis;
  SubspaceKind kind = SubspaceKind::degenerate;
  bool totally_real = false; ///< W and iW meet only in 0
  bool generic = false;      ///< W + iW = C^n
  bool real_slice = false;   ///< g|W real valued and non-degenerate
  std::optional<int> signature;
};

namespace detail {

inline Eigen::MatrixXd realify(const std::vector<CVec> &vs, Eigen::Index n) {
  Eigen::MatrixXd m(2 * n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)).head(n) = vs[j].real();
    m.col(static_cast<Eigen::Index>(j)).tail(n) = vs[j].imag();
  }
  return m;
}

template <typename Matrix> Eigen::Index numerical_rank(const Matrix &m, double rel_tol = 1e-9) {
  if (m.size() == 0)
    return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto &s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0)
    return 0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * s(0))
      ++r;
  return r;
}

} // namespace detail

/// Number of negative eigenvalues of a real symmetric matrix, or nullopt when
/// some eigenvalue is within tol * (largest |eigenvalue|) of zero.
inline std::optional<int> real_signature(const Eigen::MatrixXd &gram, double tol = kSignatureTolerance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const auto &ev = es.eigenvalues();
  const double scale = std::max(1e-300, ev.cwiseAbs().maxCoeff());
  int negatives = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) <= tol * scale)
      return std::nullopt;
    if (ev(k) < 0)
      ++negatives;
  }
  return negatives;
}

inline RealSubspace classify_subspace(const BilinearForm &g, const std::vector<CVec> &basis,
                                      double tol = 1e-9) {
  const Eigen::Index n = g.dimension();
  for (const auto &b : basis)
    if (b.size() != n)
      throw DimensionMismatch("basis vector has wrong dimension");
  if (basis.empty())
    throw Error("empty basis");

  const auto m = static_cast<Eigen::Index>(basis.size());
  if (detail::numerical_rank(detail::realify(basis, n), tol) != m)
    throw Error("basis is not real-linearly independent");

  RealSubspace out;
  out.ambient_dim = n;
  out.basis = basis;

  std::vector<CVec> doubled = basis;
  for (const auto &b : basis)
    doubled.push_back(kI * b);
  out.totally_real = detail::numerical_rank(detail::realify(doubled, n), tol) == 2 * m;

  CMat cm(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    cm.col(j) = basis[static_cast<std::size_t>(j)];
  out.generic = detail::numerical_rank(cm, tol) == n;

  CMat gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      gram(i, j) = g(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
  const double scale = std::max(1e-300, gram.cwiseAbs().maxCoeff());
  if (gram.imag().cwiseAbs().maxCoeff() <= tol * scale) {
    out.signature = real_signature(gram.real(), tol);
    out.real_slice = out.signature.has_value();
    if (!out.real_slice)
      out.signature.reset();
  }

  if (out.real_slice)
    out.kind = SubspaceKind::real_slice;
  else if (out.totally_real)
    out.kind = SubspaceKind::totally_real;
  else if (out.generic)
    out.kind = SubspaceKind::generic;
  else
    out.kind = SubspaceKind::degenerate;
  return out;
}

// 2x2 complex symmetric normal forms ----------------------------------------

enum class NormalFormKind { diagonal, undiagonalizable };

inline const char *to_string(NormalFormKind k) {
  return k == NormalFormKind::diagonal ? "diagonal" : "undiagonalizable";
}

/// Q^T A Q = F with Q in O(2, C). For `diagonal` F = diag(alpha, beta); for
/// `undiagonalizable` F = [[alpha + 1, i], [i, alpha - 1]] and beta is unused.
struct NormalForm2 {
  NormalFormKind kind = NormalFormKind::diagonal;
  Complex alpha{};
  Complex beta{};
  CMat2 frame = CMat2::Identity();

  CMat2 form() const {
    CMat2 f;
    if (kind == NormalFormKind::diagonal)
      f << alpha, 0.0, 0.0, beta;
    else
      f << alpha + 1.0, kI, kI, alpha - 1.0;
    return f;
  }
};

namespace detail {

/// Rotation [[cos t, -sin t], [sin t, cos t]] given cos 2t and sin 2t.
inline CMat2 rotation_from_double_angle(Complex c2, Complex s2) {
  Complex c = std::sqrt((1.0 + c2) / 2.0);
  Complex s = std::sqrt((1.0 - c2) / 2.0);
  // fix the relative sign through sin 2t = 2 sin t cos t, dividing by the larger of the two
  if (std::abs(c) >= std::abs(s))
    s = s2 / (2.0 * c);
  else
    c = s2 / (2.0 * s);
  CMat2 q;
  q << c, -s, s, c;
  return q;
}

/// Rotation by t where e^{2ti} = w.
inline CMat2 rotation_from_exponential(Complex w) {
  const Complex eit = std::sqrt(w);
  const Complex c = (eit + 1.0 / eit) / 2.0;
  const Complex s = (eit - 1.0 / eit) / (2.0 * kI);
  CMat2 q;
  q << c, -s, s, c;
  return q;
}

} // namespace detail

/// Orthonormal normal form of a g0-symmetric operator on C^2.
///
/// Writing A = [[m + a, b], [b, m - a]], a rotation by complex t acts on the
/// traceless part as (a, b) -> (a cos 2t + b sin 2t, b cos 2t - a sin 2t).
/// When a^2 + b^2 != 0 the rotation with (cos 2t, sin 2t) = (a, b)/sqrt(a^2 + b^2)
/// diagonalizes. When a = +-bi the orbit is a single null direction and A is
/// brought to [[m + 1, i], [i, m - 1]].
inline NormalForm2 classify_symmetric_2x2(const CMat2 &a_mat) {
  const double scale = std::max(1.0, a_mat.cwiseAbs().maxCoeff());
  if ((a_mat - a_mat.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error("matrix is not symmetric");

  const Complex m = (a_mat(0, 0) + a_mat(1, 1)) / 2.0;
  const Complex a = (a_mat(0, 0) - a_mat(1, 1)) / 2.0;
  const Complex b = (a_mat(0, 1) + a_mat(1, 0)) / 2.0;

  NormalForm2 nf;
  if (b == 0.0) {
    nf.kind = NormalFormKind::diagonal;
    nf.alpha = a_mat(0, 0);
    nf.beta = a_mat(1, 1);
    return nf;
  }

  const double ab = std::max(std::abs(a), std::abs(b));
  if (std::abs(a - kI * b) < kBranchTolerance * ab) {
    // a = bi: rotating with e^{2ti} = ib gives traceless part [[1, -i], [-i, -1]];
    // the reflection e2 -> -e2 flips the off-diagonal sign.
    CMat2 flip = CMat2::Identity();
    flip(1, 1) = -1.0;
    nf.kind = NormalFormKind::undiagonalizable;
    nf.alpha = m;
    nf.frame = detail::rotation_from_exponential(kI * b) * flip;
    return nf;
  }
  if (std::abs(a + kI * b) < kBranchTolerance * ab) {
    // a = -bi: e^{2ti} = i/b gives [[1, i], [i, -1]] directly.
    nf.kind = NormalFormKind::undiagonalizable;
    nf.alpha = m;
    nf.frame = detail::rotation_from_exponential(kI / b);
    return nf;
  }

  const Complex r = std::sqrt(a * a + b * b);
  nf.kind = NormalFormKind::diagonal;
  nf.alpha = m + r;
  nf.beta = m - r;
  nf.frame = detail::rotation_from_double_angle(a / r, b / r);
  return nf;
}

// Similarities ---------------------------------------------------------------

/// Affine map z -> dilation * (rotation * z) + translation with rotation in
/// O(n, C) and dilation != 0. Pulls g0 back to dilation^2 * g0.
class Similarity {
public:
  Similarity(CMat rotation, Complex dilation, CVec translation)
      : rotation_(std::move(rotation)), dilation_(dilation), translation_(std::move(translation)) {
    const Eigen::Index n = rotation_.rows();
    if (rotation_.cols() != n || translation_.size() != n)
      throw DimensionMismatch("similarity parts have inconsistent dimensions");
    if (dilation_ == 0.0)
      throw Error("dilation factor must be non-zero");
    if ((rotation_.transpose() * rotation_ - CMat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9)
      throw Error("linear part is not complex orthogonal");
  }

  static Similarity identity(Eigen::Index n) {
    return {CMat::Identity(n, n), 1.0, CVec::Zero(n)};
  }
  static Similarity dilation(Eigen::Index n, Complex alpha) {
    return {CMat::Identity(n, n), alpha, CVec::Zero(n)};
  }
  static Similarity translation(CVec w) {
    const auto n = w.size();
    return {CMat::Identity(n, n), 1.0, std::move(w)};
  }
  static Similarity rotation(CMat m) {
    const auto n = m.rows();
    return {std::move(m), 1.0, CVec::Zero(n)};
  }
  /// Coordinate permutation: image coordinate j is source coordinate perm[j].
  static Similarity permutation(const std::vector<int> &perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    CMat p = CMat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      p(j, perm[static_cast<std::size_t>(j)]) = 1.0;
    return rotation(std::move(p));
  }

  Eigen::Index dimension() const noexcept { return rotation_.rows(); }
  const CMat &linear_rotation() const noexcept { return rotation_; }
  Complex dilation_factor() const noexcept { return dilation_; }
  const CVec &translation_part() const noexcept { return translation_; }
  Complex conformal_factor() const noexcept { return dilation_ * dilation_; }

  /// The full linear part dilation * rotation.
  CMat linear() const { return dilation_ * rotation_; }

  CVec operator()(const CVec &x) const {
    if (x.size() != dimension())
      throw DimensionMismatch("point dimension does not match similarity");
    return dilation_ * (rotation_ * x) + translation_;
  }

  /// `next` applied after *this.
  Similarity then(const Similarity &next) const {
    return {next.rotation_ * rotation_, next.dilation_ * dilation_,
            next.dilation_ * (next.rotation_ * translation_) + next.translation_};
  }

private:
  CMat rotation_;
  Complex dilation_;
  CVec translation_;
};

inline CVec apply_similarity(const Similarity &t, const CVec &x) { return t(x); }

} // namespace wickforge
