#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickforge/catalog.hpp"
#include "wickforge/properties.hpp"

namespace wickforge {

inline constexpr double kDefaultTolerance = 1e-8;
/// A sweep with more degenerate points than this fraction does not count.
inline constexpr double kMaxDegenerateFraction = 0.2;

// Deterministic JSON ---------------------------------------------------------

namespace detail {

inline std::string format_double(double x) {
  if (std::isnan(x))
    return "\"nan\"";
  if (std::isinf(x))
    return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (x == 0.0)
    return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void emit(const nlohmann::json &j, std::string &out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char *nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
  case nlohmann::json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    out += nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ",";
        out += nl;
      }
      first = false;
      out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
      emit(it.value(), out, indent, depth + 1);
    }
    out += nl + close_pad + "}";
    return;
  }
  case nlohmann::json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    // arrays of scalars stay on one line
    const bool flat = std::all_of(j.begin(), j.end(), [](const auto &x) { return x.is_primitive(); });
    out += "[";
    bool first = true;
    for (const auto &x : j) {
      if (!first)
        out += flat ? ", " : ",";
      if (!flat) {
        out += nl;
        out += pad;
      }
      first = false;
      emit(x, out, indent, depth + 1);
    }
    if (!flat)
      out += nl + close_pad;
    out += "]";
    return;
  }
  case nlohmann::json::value_t::number_float:
    out += format_double(j.get<double>());
    return;
  default:
    out += j.dump();
  }
}

} // namespace detail

/// Sorted keys and every float with 17 significant digits, so equal reports are equal bytes.
inline std::string dump_deterministic(const nlohmann::json &j, int indent = 2) {
  std::string out;
  detail::emit(j, out, indent, 0);
  out += '\n';
  return out;
}

// Property verification ------------------------------------------------------

struct VerifyOptions {
  std::vector<Property> properties; ///< empty: check the entry's own annotations
  double tolerance = kDefaultTolerance;
  int jobs = 1;
  std::optional<GridSpec> grid;
};

struct Verdict {
  Property property;
  bool expected = true;
  double max_residual = 0.0;
  bool holds = false;
  bool pass = false;
};

struct CurvatureCheck {
  Complex expected;
  double max_error = 0.0; ///< relative to max(1, |expected|)
  bool pass = false;
};

struct CurvatureReport {
  std::string entry;
  GridSpec grid;
  double tolerance = kDefaultTolerance;
  std::vector<Property> checked;
  std::vector<PointEvaluation> points;
  std::vector<Verdict> verdicts;
  std::optional<CurvatureCheck> curvature;
  std::size_t degenerate_count = 0;
  double max_gauss_residual = 0.0;
  bool too_degenerate = false;
  bool passed = false;
};

inline CurvatureReport verify_entry(const CatalogEntry &entry, const VerifyOptions &opt) {
  if (!entry.chart)
    throw Error("entry '" + entry.id + "' has no chart to verify");
  if (!(opt.tolerance > 0.0))
    throw ParseError("tolerance must be positive");
  CurvatureReport r;
  r.entry = entry.id;
  r.grid = opt.grid.value_or(entry.grid);
  r.tolerance = opt.tolerance;
  r.points = sweep(*entry.chart, entry.ambient_space(), r.grid, opt.jobs);

  std::vector<std::pair<Property, bool>> wanted;
  if (!opt.properties.empty()) {
    for (auto p : opt.properties)
      wanted.emplace_back(p, true);
  } else {
    for (auto p : {Property::minimal, Property::parallel, Property::totally_geodesic, Property::flat})
      if (const auto e = entry.expected.get(p))
        wanted.emplace_back(p, *e);
  }

  for (const auto &e : r.points) {
    if (e.degenerate)
      ++r.degenerate_count;
    else
      r.max_gauss_residual = std::max(r.max_gauss_residual, e.gauss);
  }
  const std::size_t evaluated = r.points.size() - r.degenerate_count;
  r.too_degenerate = evaluated == 0 || static_cast<double>(r.degenerate_count) >
                                           kMaxDegenerateFraction * static_cast<double>(r.points.size());

  bool ok = !r.too_degenerate;
  for (const auto &[p, expected] : wanted) {
    Verdict v;
    v.property = p;
    v.expected = expected;
    v.max_residual = summarize(r.points, p).max_residual;
    v.holds = v.max_residual < r.tolerance && !r.too_degenerate;
    v.pass = v.holds == expected && !r.too_degenerate;
    ok = ok && v.pass;
    r.checked.push_back(p);
    r.verdicts.push_back(v);
  }
  if (opt.properties.empty() && entry.expected.K) {
    CurvatureCheck c;
    c.expected = *entry.expected.K;
    const double scale = std::max(1.0, std::abs(c.expected));
    for (const auto &e : r.points)
      if (!e.degenerate) {
        const double err = std::abs(e.K - c.expected) / scale;
        c.max_error = std::isnan(err) || std::isnan(c.max_error) ? std::nan("") : std::max(c.max_error, err);
      }
    c.pass = c.max_error < r.tolerance && !r.too_degenerate;
    ok = ok && c.pass;
    r.curvature = c;
  }
  r.passed = ok;
  return r;
}

inline nlohmann::json to_json(const CurvatureReport &r) {
  using nlohmann::json;
  json points = json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto &e = r.points[i];
    const auto gp = r.grid.at(i);
    json p{{"index", {gp.iu, gp.iv}}, {"params", {complex_to_json(e.u), complex_to_json(e.v)}}};
    if (e.degenerate) {
      p["degenerate"] = true;
      p["note"] = e.note;
    } else {
      p["K"] = complex_to_json(e.K);
      json res{{"gauss", e.gauss}, {"mean_curvature", e.mean_max}, {"g(H,H)", e.mean_norm}, {"h", e.h_max}};
      if (e.nabla_h)
        res["nabla_h"] = *e.nabla_h;
      p["residuals"] = res;
      json flags = json::object();
      for (auto prop : r.checked)
        flags[to_string(prop)] = property_residual(e, prop) < r.tolerance;
      p["flags"] = flags;
    }
    points.push_back(p);
  }
  json verdicts = json::object();
  for (const auto &v : r.verdicts)
    verdicts[to_string(v.property)] = {
        {"expected", v.expected}, {"holds", v.holds}, {"max_residual", v.max_residual}, {"pass", v.pass}};
  json summary{{"verdicts", verdicts},
               {"degenerate_count", r.degenerate_count},
               {"points", r.points.size()},
               {"max_gauss_residual", r.max_gauss_residual},
               {"too_degenerate", r.too_degenerate},
               {"pass", r.passed}};
  if (r.curvature)
    summary["K"] = {{"expected", complex_to_json(r.curvature->expected)},
                    {"max_error", r.curvature->max_error},
                    {"pass", r.curvature->pass}};
  return {{"entry", r.entry}, {"grid", to_json(r.grid)}, {"tolerance", r.tolerance}, {"points", points}, {"summary", summary}};
}

} // namespace wickforge
