#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickforge/expr.hpp"
#include "wickforge/grid.hpp"
#include "wickforge/properties.hpp"
#include "wickforge/submanifold.hpp"

namespace wickforge {

/// Absolute tolerance on slice coordinates that must vanish.
inline constexpr double kMembershipTolerance = 1e-10;

// Slices ---------------------------------------------------------------------

/// The affine slice base + span{i e_j : mask_j} + span{e_j : !mask_j}.
class SliceSpec {
public:
  SliceSpec(std::vector<bool> mask, CVec base) : mask_(std::move(mask)), base_(std::move(base)) {
    if (mask_.empty())
      throw DimensionMismatch("slice needs at least one coordinate");
    if (base_.size() != static_cast<Eigen::Index>(mask_.size()))
      throw DimensionMismatch("slice base point has the wrong dimension");
    if (!all_finite(base_))
      throw Error("slice base point must be finite");
  }
  explicit SliceSpec(std::vector<bool> mask)
      : SliceSpec(mask, CVec::Zero(static_cast<Eigen::Index>(mask.size()))) {}

  /// R^n_k: the first k coordinates are imaginary.
  static SliceSpec standard(int n, int k) {
    if (n < 1 || k < 0 || k > n)
      throw Error("need 0 <= k <= n for R^n_k");
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill_n(mask.begin(), k, true);
    return SliceSpec(std::move(mask));
  }

  /// Imaginary coordinates given 1-based.
  static SliceSpec imaginary(int n, const std::vector<int> &coords) {
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    for (int c : coords) {
      if (c < 1 || c > n)
        throw Error("slice coordinate out of range");
      mask[static_cast<std::size_t>(c - 1)] = true;
    }
    return SliceSpec(std::move(mask));
  }

  /// "R3", "R3_1", "R4_0" and so on.
  static SliceSpec named(const std::string &name) {
    static const std::regex pattern(R"(R(\d+)(?:_(\d+))?)");
    std::smatch m;
    if (!std::regex_match(name, m, pattern))
      throw ParseError("unknown slice name '" + name + "'");
    const int n = std::stoi(m[1]);
    const int k = m[2].matched ? std::stoi(m[2]) : 0;
    if (n < 1 || k > n)
      throw ParseError("unknown slice name '" + name + "'");
    return standard(n, k);
  }

  int ambient_dim() const noexcept { return static_cast<int>(mask_.size()); }
  int signature() const noexcept { return static_cast<int>(std::count(mask_.begin(), mask_.end(), true)); }
  const std::vector<bool> &mask() const noexcept { return mask_; }
  const CVec &base() const noexcept { return base_; }

  std::vector<CVec> directions() const {
    std::vector<CVec> out;
    for (int j = 0; j < ambient_dim(); ++j)
      out.push_back((mask_[static_cast<std::size_t>(j)] ? kI : Complex(1.0)) * unit_vector(ambient_dim(), j));
    return out;
  }

  /// Real coordinates (y on imaginary axes, x on real ones) of z - base.
  Eigen::VectorXd coordinates(const CVec &z) const {
    check(z);
    Eigen::VectorXd out(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const Complex d = z(j) - base_(j);
      out(j) = mask_[static_cast<std::size_t>(j)] ? d.imag() : d.real();
    }
    return out;
  }

  /// Per coordinate, the part of z - base that must vanish on the slice.
  Eigen::VectorXd deviation(const CVec &z) const {
    check(z);
    Eigen::VectorXd out(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const Complex d = z(j) - base_(j);
      out(j) = std::abs(mask_[static_cast<std::size_t>(j)] ? d.real() : d.imag());
    }
    return out;
  }

  double membership_residual(const CVec &z) const { return deviation(z).maxCoeff(); }

private:
  void check(const CVec &z) const {
    if (z.size() != base_.size())
      throw DimensionMismatch("point dimension does not match slice");
  }

  std::vector<bool> mask_;
  CVec base_;
};

inline nlohmann::json to_json(const SliceSpec &s) {
  return {{"n", s.ambient_dim()}, {"k", s.signature()}, {"mask", s.mask()}, {"base", cvec_to_json(s.base())}};
}

inline SliceSpec slice_from_json(const nlohmann::json &j) {
  try {
    const auto mask = j.at("mask").get<std::vector<bool>>();
    const int n = j.contains("n") ? j.at("n").get<int>() : static_cast<int>(mask.size());
    CVec base = j.contains("base") ? cvec_from_json(j.at("base"))
                                   : CVec::Zero(static_cast<Eigen::Index>(mask.size()));
    if (n != static_cast<int>(mask.size()))
      throw ParseError("slice mask length differs from n");
    SliceSpec s(mask, std::move(base));
    if (j.contains("k") && j.at("k").get<int>() != s.signature())
      throw ParseError("slice k differs from the number of imaginary coordinates");
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("malformed slice: ") + e.what());
  }
}

struct SliceReport {
  std::size_t points = 0;
  std::size_t failed_points = 0;         ///< chart could not be evaluated
  double membership_residual = 0.0;      ///< max over points and coordinates
  Eigen::VectorXd coordinate_residual;   ///< max per coordinate
  double secondary_metric = 0.0;         ///< max |Im g(L_i, L_j)|

  bool in_slice(double tol = kMembershipTolerance) const {
    return failed_points == 0 && membership_residual <= tol;
  }
};

/// Checks a chart against a slice at the real parameter points of `grid`.
inline SliceReport verify_in_slice(const SurfaceChart &chart, const SliceSpec &slice,
                                   const GridSpec &grid, int jobs = 1) {
  grid.validate();
  if (!grid.is_real())
    throw Error("slice membership is checked at real parameters only");
  if (chart.ambient_dim != slice.ambient_dim())
    throw DimensionMismatch("chart and slice live in different C^n");

  struct Sample {
    bool ok = false;
    Eigen::VectorXd deviation;
    double secondary = 0.0;
  };
  const auto samples = parallel_map(grid.size(), jobs, [&](std::size_t i) {
    const auto p = grid.at(i);
    Sample s;
    try {
      const auto jets = chart_jets(chart, p.u, p.v);
      s.deviation = slice.deviation(jets.point);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          s.secondary = std::max(s.secondary, std::abs(bilinear_dot(jets.d1[a], jets.d1[b]).imag()));
      s.ok = s.deviation.allFinite();
    } catch (const SingularEvaluation &) {
    }
    return s;
  });

  SliceReport r;
  r.points = samples.size();
  r.coordinate_residual = Eigen::VectorXd::Zero(slice.ambient_dim());
  for (const auto &s : samples) {
    if (!s.ok) {
      ++r.failed_points;
      continue;
    }
    r.coordinate_residual = r.coordinate_residual.cwiseMax(s.deviation);
    r.secondary_metric = std::max(r.secondary_metric, s.secondary);
  }
  r.membership_residual = r.coordinate_residual.maxCoeff();
  return r;
}

struct SignatureReport {
  std::optional<int> signature;                ///< set when constant over the non-degenerate points
  std::vector<std::optional<int>> per_point;   ///< grid order; empty optional marks a degenerate point
  std::size_t degenerate_count = 0;
  bool signature_changes = false;
};

/// Signature of the real induced metric of a chart lying in `slice`.
inline SignatureReport induced_signature(const SurfaceChart &chart, const SliceSpec &slice,
                                         const GridSpec &grid, int jobs = 1,
                                         double tol = kMembershipTolerance) {
  const auto check = verify_in_slice(chart, slice, grid, jobs);
  if (!check.in_slice(tol))
    throw NotInSlice("chart '" + chart.name + "' leaves the slice by " +
                     std::to_string(check.membership_residual));

  SignatureReport r;
  r.per_point = parallel_map(grid.size(), jobs, [&](std::size_t i) -> std::optional<int> {
    const auto p = grid.at(i);
    const auto jets = chart_jets(chart, p.u, p.v);
    Eigen::Matrix2d g;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        g(a, b) = bilinear_dot(jets.d1[a], jets.d1[b]).real();
    return real_signature(g, kDegenerateTolerance);
  });
  for (const auto &s : r.per_point) {
    if (!s) {
      ++r.degenerate_count;
      continue;
    }
    if (!r.signature)
      r.signature = s;
    else if (*r.signature != *s)
      r.signature_changes = true;
  }
  if (r.signature_changes)
    r.signature.reset();
  return r;
}

// Wick moves -----------------------------------------------------------------

enum class Param { u, v };

struct RotateParam {
  Param which;
  Complex factor; ///< i or -i
};
struct TranslateParam {
  Param which;
  Complex offset;
};
/// Image coordinate j is source coordinate perm[j] (0-based).
struct PermuteCoords {
  std::vector<int> perm;
};
struct Dilate {
  Complex alpha;
};
struct TranslateAmbient {
  CVec w;
};

using WickAtom = std::variant<RotateParam, TranslateParam, PermuteCoords, Dilate, TranslateAmbient>;

namespace detail {

inline void validate_atom(const WickAtom &atom) {
  std::visit(
      [](const auto &a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, RotateParam>) {
          if (std::abs(a.factor - kI) > 1e-15 && std::abs(a.factor + kI) > 1e-15)
            throw Error("parameter rotation factor must be i or -i");
        } else if constexpr (std::is_same_v<A, TranslateParam>) {
          if (!std::isfinite(a.offset.real()) || !std::isfinite(a.offset.imag()))
            throw Error("parameter translation must be finite");
        } else if constexpr (std::is_same_v<A, PermuteCoords>) {
          std::vector<int> sorted = a.perm;
          std::sort(sorted.begin(), sorted.end());
          for (std::size_t k = 0; k < sorted.size(); ++k)
            if (sorted[k] != static_cast<int>(k))
              throw Error("coordinate permutation is not a permutation");
        } else if constexpr (std::is_same_v<A, Dilate>) {
          if (a.alpha == 0.0 || !std::isfinite(std::abs(a.alpha)))
            throw Error("dilation factor must be finite and non-zero");
        } else {
          if (!all_finite(a.w))
            throw Error("ambient translation must be finite");
        }
      },
      atom);
}

} // namespace detail

/// The similarity of C^n behind an ambient atom; empty for parameter atoms.
inline std::optional<Similarity> ambient_similarity(const WickAtom &atom, int n) {
  if (const auto *p = std::get_if<PermuteCoords>(&atom)) {
    if (static_cast<int>(p->perm.size()) != n)
      throw DimensionMismatch("permutation length differs from the ambient dimension");
    return Similarity::permutation(p->perm);
  }
  if (const auto *d = std::get_if<Dilate>(&atom))
    return Similarity::dilation(n, d->alpha);
  if (const auto *t = std::get_if<TranslateAmbient>(&atom)) {
    if (t->w.size() != n)
      throw DimensionMismatch("translation length differs from the ambient dimension");
    return Similarity::translation(t->w);
  }
  return std::nullopt;
}

/// An ordered list of atoms, applied first to last.
class WickMove {
public:
  WickMove() = default;
  WickMove(std::initializer_list<WickAtom> atoms) : WickMove(std::vector<WickAtom>(atoms)) {}
  explicit WickMove(std::vector<WickAtom> atoms) : atoms_(std::move(atoms)) {
    for (const auto &a : atoms_)
      detail::validate_atom(a);
  }

  const std::vector<WickAtom> &atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }

  /// This move followed by `next`.
  WickMove then(const WickMove &next) const {
    auto all = atoms_;
    all.insert(all.end(), next.atoms_.begin(), next.atoms_.end());
    return WickMove(std::move(all));
  }

private:
  std::vector<WickAtom> atoms_;
};

namespace detail {

inline const char *param_name(Param p) { return p == Param::u ? "u" : "v"; }

inline Param param_from_json(const nlohmann::json &j) {
  const auto s = j.get<std::string>();
  if (s == "u")
    return Param::u;
  if (s == "v")
    return Param::v;
  throw ParseError("parameter must be u or v, got '" + s + "'");
}

} // namespace detail

inline nlohmann::json to_json(const WickAtom &atom) {
  return std::visit(
      [](const auto &a) -> nlohmann::json {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, RotateParam>)
          return {{"atom", "rotate_param"}, {"param", detail::param_name(a.which)}, {"factor", complex_to_json(a.factor)}};
        else if constexpr (std::is_same_v<A, TranslateParam>)
          return {{"atom", "translate_param"}, {"param", detail::param_name(a.which)}, {"offset", complex_to_json(a.offset)}};
        else if constexpr (std::is_same_v<A, PermuteCoords>)
          return {{"atom", "permute_coords"}, {"perm", a.perm}};
        else if constexpr (std::is_same_v<A, Dilate>)
          return {{"atom", "dilate"}, {"alpha", complex_to_json(a.alpha)}};
        else
          return {{"atom", "translate_ambient"}, {"w", cvec_to_json(a.w)}};
      },
      atom);
}

inline nlohmann::json to_json(const WickMove &m) {
  auto out = nlohmann::json::array();
  for (const auto &a : m.atoms())
    out.push_back(to_json(a));
  return out;
}

inline WickMove wick_move_from_json(const nlohmann::json &j) {
  if (!j.is_array())
    throw ParseError("a Wick move is a list of atoms");
  std::vector<WickAtom> atoms;
  try {
    for (const auto &a : j) {
      const auto kind = a.at("atom").get<std::string>();
      if (kind == "rotate_param")
        atoms.emplace_back(RotateParam{detail::param_from_json(a.at("param")), complex_from_json(a.at("factor"))});
      else if (kind == "translate_param")
        atoms.emplace_back(TranslateParam{detail::param_from_json(a.at("param")), complex_from_json(a.at("offset"))});
      else if (kind == "permute_coords")
        atoms.emplace_back(PermuteCoords{a.at("perm").get<std::vector<int>>()});
      else if (kind == "dilate")
        atoms.emplace_back(Dilate{complex_from_json(a.at("alpha"))});
      else if (kind == "translate_ambient")
        atoms.emplace_back(TranslateAmbient{cvec_from_json(a.at("w"))});
      else
        throw ParseError("unknown Wick atom '" + kind + "'");
    }
    return WickMove(std::move(atoms));
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("malformed Wick move: ") + e.what());
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(e.what());
  }
}

/// Rewrites the chart program: parameter atoms substitute into u, v; ambient
/// atoms map the image by a similarity and pull the implicit residuals back.
inline SurfaceChart apply_wick_move(const SurfaceChart &chart, const WickMove &move) {
  const int n = chart.ambient_dim;
  std::vector<Expr> outs;
  for (std::size_t k = 0; k < chart.program.output_count(); ++k)
    outs.push_back(chart.program.output(k));
  std::vector<Expr> residuals = chart.implicit_residuals;

  for (const auto &atom : move.atoms()) {
    if (const auto sim = ambient_similarity(atom, n)) {
      const CMat lin = sim->linear();
      const CVec &w = sim->translation_part();
      std::vector<Expr> image;
      for (int j = 0; j < n; ++j) {
        Expr e = Expr(w(j));
        for (int m = 0; m < n; ++m)
          if (lin(j, m) != 0.0)
            e = e + Expr(lin(j, m)) * outs[static_cast<std::size_t>(m)];
        image.push_back(e);
      }
      outs = std::move(image);
      // z = lin^{-1} (z' - w), with lin^{-1} = rotation^T / dilation
      const CMat inv = sim->linear_rotation().transpose() / sim->dilation_factor();
      std::vector<Expr> back;
      for (int m = 0; m < n; ++m) {
        Expr e = 0.0;
        for (int j = 0; j < n; ++j)
          if (inv(m, j) != 0.0)
            e = e + Expr(inv(m, j)) * (Expr::coord(j + 1) - Expr(w(j)));
        back.push_back(e);
      }
      for (auto &r : residuals)
        r = r.substitute(back);
      continue;
    }
    std::vector<Expr> params{Expr::u(), Expr::v()};
    if (const auto *r = std::get_if<RotateParam>(&atom))
      params[r->which == Param::u ? 0 : 1] = Expr(r->factor) * params[r->which == Param::u ? 0 : 1];
    else if (const auto *t = std::get_if<TranslateParam>(&atom))
      params[t->which == Param::u ? 0 : 1] = params[t->which == Param::u ? 0 : 1] + Expr(t->offset);
    for (auto &o : outs)
      o = o.substitute(params);
  }
  return SurfaceChart(chart.name, Program::chart(std::move(outs)), std::move(residuals));
}

struct TransferReport {
  Property property;
  double source_residual = 0.0;
  double target_residual = 0.0;
  std::size_t source_degenerate = 0;
  std::size_t target_degenerate = 0;
};

/// Checks that a property holding on the source chart still holds after the
/// move, both charts living in flat C^n.
inline TransferReport property_transfer_check(const SurfaceChart &chart, const WickMove &move,
                                              Property property, const GridSpec &source_grid,
                                              const GridSpec &target_grid, double tol = 1e-8,
                                              int jobs = 1) {
  const auto flat = Ambient::flat(chart.ambient_dim);
  TransferReport r;
  r.property = property;
  const auto src = summarize(sweep(chart, flat, source_grid, jobs), property);
  r.source_residual = src.max_residual;
  r.source_degenerate = src.degenerate;
  if (!(src.max_residual < tol) || src.evaluated == 0)
    throw Error(std::string("source chart '") + chart.name + "' is not " + to_string(property) +
                " on its grid (residual " + std::to_string(src.max_residual) + ")");
  const auto moved = apply_wick_move(chart, move);
  const auto dst = summarize(sweep(moved, flat, target_grid, jobs), property);
  r.target_residual = dst.max_residual;
  r.target_degenerate = dst.degenerate;
  if (!(dst.max_residual < tol) || dst.evaluated == 0)
    throw TransferViolation(std::string(to_string(property)) + " lost under Wick move on '" +
                                chart.name + "'",
                            r.source_residual, r.target_residual);
  return r;
}

} // namespace wickforge
