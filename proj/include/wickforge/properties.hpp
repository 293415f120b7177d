#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wickforge/grid.hpp"
#include "wickforge/submanifold.hpp"

namespace wickforge {

enum class Property { minimal, parallel, totally_geodesic, flat };

inline const char *to_string(Property p) {
  switch (p) {
  case Property::minimal:
    return "minimal";
  case Property::parallel:
    return "parallel";
  case Property::totally_geodesic:
    return "totally_geodesic";
  case Property::flat:
    return "flat";
  }
  return "?";
}

inline Property property_from_string(const std::string &s) {
  for (auto p : {Property::minimal, Property::parallel, Property::totally_geodesic, Property::flat})
    if (s == to_string(p))
      return p;
  if (s == "totally-geodesic")
    return Property::totally_geodesic;
  throw ParseError("unknown property '" + s + "'");
}

/// Everything the property checks need at one chart point. In a curved
/// ambient the extrinsic quantities are taken relative to that ambient.
struct PointEvaluation {
  Complex u, v;
  bool degenerate = false;
  std::string note; ///< why the point was skipped
  Complex K;
  double mean_norm = 0.0; ///< |g(H, H)|
  double mean_max = 0.0;  ///< max_k |H_k|
  double h_max = 0.0;     ///< largest component of h
  std::optional<double> nabla_h; ///< sqrt of sum |nabla h_ijk|^2 over ambient components
  double gauss = 0.0;
};

inline PointEvaluation evaluate_point(const SurfaceChart &chart, const Ambient &ambient, Complex u,
                                      Complex v) {
  PointEvaluation e;
  e.u = u;
  e.v = v;
  try {
    const auto geo = LocalGeometry::at(chart, u, v);
    const auto &g0 = geo.metric();
    const auto &ff = geo.forms();
    e.K = geo.sectional_curvature();
    PairPair<CVec> h = ff.second;
    if (ambient.equations.empty()) {
      e.nabla_h = std::sqrt(geo.nabla_h_norm2());
      e.gauss = geo.gauss_residual();
    } else {
      const auto rel = relative_second_form(chart, ambient, u, v);
      h = rel.vectors;
      e.gauss = rel.gauss_residual.value_or(0.0);
    }
    CVec mean = CVec::Zero(geo.ambient_dim());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        mean += 0.5 * ff.first_inverse(i, j) * h[i][j];
        e.h_max = std::max(e.h_max, h[i][j].cwiseAbs().maxCoeff());
      }
    e.mean_norm = std::abs(g0(mean, mean));
    e.mean_max = mean.cwiseAbs().maxCoeff();
  } catch (const DegeneratePoint &ex) {
    e.degenerate = true;
    e.note = ex.what();
  } catch (const SingularEvaluation &ex) {
    e.degenerate = true;
    e.note = ex.what();
  } catch (const NullVectorEncountered &ex) {
    e.degenerate = true;
    e.note = ex.what();
  }
  return e;
}

/// Residual that must vanish for the property to hold at the point.
inline double property_residual(const PointEvaluation &e, Property p) {
  switch (p) {
  case Property::minimal:
    return std::max(e.mean_norm, e.mean_max);
  case Property::parallel:
    if (!e.nabla_h)
      throw Error("parallel is only checked for surfaces of flat space");
    return *e.nabla_h;
  case Property::totally_geodesic:
    return e.h_max;
  case Property::flat:
    return std::abs(e.K);
  }
  return 0.0;
}

inline std::vector<PointEvaluation> sweep(const SurfaceChart &chart, const Ambient &ambient,
                                          const GridSpec &grid, int jobs = 1) {
  grid.validate();
  if (chart.ambient_dim != ambient.dim)
    throw DimensionMismatch("chart and ambient live in different C^n");
  return parallel_map(grid.size(), jobs, [&](std::size_t i) {
    const auto p = grid.at(i);
    return evaluate_point(chart, ambient, p.u, p.v);
  });
}

struct PropertySummary {
  double max_residual = 0.0;
  std::size_t evaluated = 0;
  std::size_t degenerate = 0;
};

inline PropertySummary summarize(const std::vector<PointEvaluation> &points, Property p) {
  PropertySummary s;
  for (const auto &e : points) {
    if (e.degenerate) {
      ++s.degenerate;
      continue;
    }
    ++s.evaluated;
    const double r = property_residual(e, p);
    s.max_residual = std::isnan(r) || std::isnan(s.max_residual) ? std::nan("")
                                                                  : std::max(s.max_residual, r);
  }
  return s;
}

} // namespace wickforge
