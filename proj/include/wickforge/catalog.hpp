#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickforge/expr.hpp"
#include "wickforge/grid.hpp"
#include "wickforge/properties.hpp"
#include "wickforge/slices.hpp"
#include "wickforge/submanifold.hpp"

namespace wickforge {

inline constexpr int kCatalogSchema = 1;

/// Flat C^dim, or the quadric z1^2 + ... + z_dim^2 = alpha^2 when alpha is set.
struct AmbientSpec {
  int dim = 3;
  std::optional<Complex> alpha;

  Ambient build() const { return alpha ? Ambient::sphere(dim - 1, *alpha) : Ambient::flat(dim); }
  bool flat() const { return !alpha; }
};

struct Expectations {
  std::optional<bool> minimal;
  std::optional<bool> totally_geodesic;
  std::optional<bool> parallel;
  std::optional<bool> flat;
  std::optional<Complex> K;
  std::optional<int> signature;

  std::optional<bool> get(Property p) const {
    switch (p) {
    case Property::minimal:
      return minimal;
    case Property::parallel:
      return parallel;
    case Property::totally_geodesic:
      return totally_geodesic;
    case Property::flat:
      return flat;
    }
    return std::nullopt;
  }
};

struct CatalogEntry {
  std::string id;
  std::string description; ///< defining equations and where the annotations come from
  AmbientSpec ambient;
  std::optional<SurfaceChart> chart;
  std::vector<Expr> implicit; ///< scalar programs in z1..zn vanishing on the surface
  std::optional<SliceSpec> slice;
  GridSpec grid;
  Expectations expected;

  Ambient ambient_space() const { return ambient.build(); }
};

/// Max modulus of the entry's implicit residuals at `point`.
inline double implicit_residual(const CatalogEntry &entry, const CVec &point) {
  if (point.size() != entry.ambient.dim)
    throw DimensionMismatch("point has " + std::to_string(point.size()) + " coordinates, entry '" +
                            entry.id + "' lives in C^" + std::to_string(entry.ambient.dim));
  const std::span<const Complex> in(point.data(), static_cast<std::size_t>(point.size()));
  double worst = 0.0;
  for (const auto &r : entry.implicit)
    worst = std::max(worst, std::abs(r.eval<Complex>(in)));
  return worst;
}

struct StoredMove {
  std::string from;
  std::string to;
  WickMove move;
};

struct CatalogFilter {
  std::optional<bool> flat_ambient;
  std::optional<Property> property; ///< expected to hold
  std::optional<int> signature;     ///< slice signature
  std::optional<bool> has_slice;
};

// JSON -----------------------------------------------------------------------

inline nlohmann::json to_json(const CatalogEntry &e) {
  nlohmann::json j;
  j["schema"] = kCatalogSchema;
  j["id"] = e.id;
  j["description"] = e.description;
  j["ambient"] = e.ambient.alpha ? nlohmann::json{{"kind", "sphere"}, {"n", e.ambient.dim}, {"alpha", complex_to_json(*e.ambient.alpha)}}
                                 : nlohmann::json{{"kind", "flat"}, {"n", e.ambient.dim}};
  if (e.chart)
    j["chart"] = to_json(e.chart->program);
  auto implicit = nlohmann::json::array();
  for (const auto &r : e.implicit)
    implicit.push_back(to_json(r));
  j["implicit"] = implicit;
  if (e.slice)
    j["slice"] = to_json(*e.slice);
  j["grid"] = to_json(e.grid);
  nlohmann::json x = nlohmann::json::object();
  for (auto p : {Property::minimal, Property::parallel, Property::totally_geodesic, Property::flat})
    if (const auto b = e.expected.get(p))
      x[to_string(p)] = *b;
  if (e.expected.K)
    x["K"] = complex_to_json(*e.expected.K);
  if (e.expected.signature)
    x["signature"] = *e.expected.signature;
  j["expected"] = x;
  return j;
}

inline CatalogEntry entry_from_json(const nlohmann::json &j) {
  try {
    if (j.at("schema").get<int>() != kCatalogSchema)
      throw ParseError("unsupported catalog schema " + j.at("schema").dump());
    CatalogEntry e;
    e.id = j.at("id").get<std::string>();
    e.description = j.value("description", "");
    const auto &a = j.at("ambient");
    e.ambient.dim = a.at("n").get<int>();
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "sphere")
      e.ambient.alpha = complex_from_json(a.at("alpha"));
    else if (kind != "flat")
      throw ParseError("unknown ambient kind '" + kind + "'");
    if (j.contains("chart"))
      e.chart = SurfaceChart(e.id, program_from_json(j.at("chart"), VarDomain::parameters, 2));
    for (const auto &r : j.at("implicit"))
      e.implicit.push_back(expr_from_json(r));
    for (const auto &r : e.implicit)
      if (r.uses_domain(VarDomain::parameters) || r.arity() > e.ambient.dim)
        throw ParseError("implicit residual of '" + e.id + "' must use z1..z" + std::to_string(e.ambient.dim));
    if (e.chart) {
      if (e.chart->ambient_dim != e.ambient.dim)
        throw ParseError("chart of '" + e.id + "' has the wrong number of coordinates");
      e.chart->implicit_residuals = e.implicit;
    }
    if (j.contains("slice"))
      e.slice = slice_from_json(j.at("slice"));
    e.grid = grid_from_json(j.at("grid"));
    const auto &x = j.at("expected");
    if (x.contains("minimal"))
      e.expected.minimal = x.at("minimal").get<bool>();
    if (x.contains("parallel"))
      e.expected.parallel = x.at("parallel").get<bool>();
    if (x.contains("totally_geodesic"))
      e.expected.totally_geodesic = x.at("totally_geodesic").get<bool>();
    if (x.contains("flat"))
      e.expected.flat = x.at("flat").get<bool>();
    if (x.contains("K"))
      e.expected.K = complex_from_json(x.at("K"));
    if (x.contains("signature"))
      e.expected.signature = x.at("signature").get<int>();
    return e;
  } catch (const nlohmann::json::exception &ex) {
    throw ParseError(std::string("malformed catalog entry: ") + ex.what());
  }
}

inline nlohmann::json to_json(const StoredMove &m) {
  return {{"from", m.from}, {"to", m.to}, {"move", to_json(m.move)}};
}

inline StoredMove stored_move_from_json(const nlohmann::json &j) {
  try {
    return {j.at("from").get<std::string>(), j.at("to").get<std::string>(), wick_move_from_json(j.at("move"))};
  } catch (const nlohmann::json::exception &ex) {
    throw ParseError(std::string("malformed stored move: ") + ex.what());
  }
}

// Built-in definitions -------------------------------------------------------

/// CS^2(alpha): alpha (cos u cos v, cos u sin v, sin u).
inline SurfaceChart complex_sphere_chart(Complex alpha) {
  const Expr u = Expr::u(), v = Expr::v();
  const Expr z1 = Expr::coord(1), z2 = Expr::coord(2), z3 = Expr::coord(3);
  return SurfaceChart("CS2", Program::chart({alpha * cos(u) * cos(v), alpha * cos(u) * sin(v), alpha * sin(u)}),
                      {pow(z1, 2.0) + pow(z2, 2.0) + pow(z3, 2.0) - Expr(alpha * alpha)});
}

namespace detail {

inline GridSpec box(double u0, double u1, double v0, double v1, double u_im = 0.0, double v_im = 0.0) {
  GridSpec g;
  g.u0 = u0;
  g.u1 = u1;
  g.v0 = v0;
  g.v1 = v1;
  g.u_im = u_im;
  g.v_im = v_im;
  return g;
}

// off the real plane, for entries without a slice
inline GridSpec complex_box(double u0, double u1, double v0, double v1) { return box(u0, u1, v0, v1, 0.15, 0.1); }

} // namespace detail

class Catalog {
public:
  Catalog() = default;
  Catalog(std::vector<CatalogEntry> entries, std::vector<StoredMove> moves)
      : entries_(std::move(entries)), moves_(std::move(moves)) {
    for (std::size_t k = 0; k < entries_.size(); ++k)
      if (!index_.emplace(entries_[k].id, k).second)
        throw ParseError("duplicate catalog id '" + entries_[k].id + "'");
    for (const auto &m : moves_)
      if (!index_.count(m.from) || !index_.count(m.to))
        throw ParseError("stored move " + m.from + " -> " + m.to + " names an unknown entry");
  }

  static Catalog builtin();

  /// Every *.json in `dir` except moves.json is an entry; moves.json holds the move graph.
  static Catalog load(const std::filesystem::path &dir) {
    if (!std::filesystem::is_directory(dir))
      throw ParseError("catalog directory '" + dir.string() + "' does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto &f : std::filesystem::directory_iterator(dir))
      if (f.path().extension() == ".json" && f.path().filename() != "moves.json")
        files.push_back(f.path());
    std::sort(files.begin(), files.end());
    std::vector<CatalogEntry> entries;
    for (const auto &f : files)
      entries.push_back(entry_from_json(read_json(f)));
    std::vector<StoredMove> moves;
    if (std::filesystem::exists(dir / "moves.json")) {
      const auto j = read_json(dir / "moves.json");
      if (j.value("schema", 0) != kCatalogSchema)
        throw ParseError("unsupported schema in moves.json");
      for (const auto &m : j.at("moves"))
        moves.push_back(stored_move_from_json(m));
    }
    return Catalog(std::move(entries), std::move(moves));
  }

  /// $WICKFORGE_DATA/catalog, else the data directory of the source tree, else the built-ins.
  static Catalog load_default() {
    if (const char *env = std::getenv("WICKFORGE_DATA"); env && *env)
      return load(std::filesystem::path(env) / "catalog");
#ifdef WICKFORGE_DEFAULT_DATA_DIR
    const std::filesystem::path dir = std::filesystem::path(WICKFORGE_DEFAULT_DATA_DIR) / "catalog";
    if (std::filesystem::is_directory(dir) && !std::filesystem::is_empty(dir))
      return load(dir);
#endif
    return builtin();
  }

  void save(const std::filesystem::path &dir) const {
    std::filesystem::create_directories(dir);
    for (const auto &e : entries_)
      write_json(dir / (e.id + ".json"), to_json(e));
    auto moves = nlohmann::json::array();
    for (const auto &m : moves_)
      moves.push_back(to_json(m));
    write_json(dir / "moves.json", {{"schema", kCatalogSchema}, {"moves", moves}});
  }

  const CatalogEntry &get(const std::string &id) const {
    const auto it = index_.find(id);
    if (it == index_.end())
      throw UnknownEntry("no catalog entry '" + id + "'");
    return entries_[it->second];
  }

  bool contains(const std::string &id) const { return index_.count(id) != 0; }

  std::vector<const CatalogEntry *> list(const CatalogFilter &f = {}) const {
    std::vector<const CatalogEntry *> out;
    for (const auto &e : entries_) {
      if (f.flat_ambient && *f.flat_ambient != e.ambient.flat())
        continue;
      if (f.property && e.expected.get(*f.property) != std::optional<bool>(true))
        continue;
      if (f.has_slice && *f.has_slice != e.slice.has_value())
        continue;
      if (f.signature && (!e.slice || e.slice->signature() != *f.signature))
        continue;
      out.push_back(&e);
    }
    return out;
  }

  const std::vector<CatalogEntry> &entries() const noexcept { return entries_; }
  const std::vector<StoredMove> &moves() const noexcept { return moves_; }

private:
  static nlohmann::json read_json(const std::filesystem::path &p) {
    std::ifstream in(p);
    if (!in)
      throw ParseError("cannot read '" + p.string() + "'");
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError("'" + p.string() + "': " + e.what());
    }
  }

  static void write_json(const std::filesystem::path &p, const nlohmann::json &j) {
    std::ofstream out(p);
    if (!out)
      throw Error("cannot write '" + p.string() + "'");
    out << j.dump(2) << '\n';
  }

  std::vector<CatalogEntry> entries_;
  std::vector<StoredMove> moves_;
  std::map<std::string, std::size_t> index_;
};

inline Catalog Catalog::builtin() {
  using std::numbers::pi;
  const Expr u = Expr::u(), v = Expr::v();
  const Expr z1 = Expr::coord(1), z2 = Expr::coord(2), z3 = Expr::coord(3), z4 = Expr::coord(4);
  auto sq = [](const Expr &e) { return pow(e, 2.0); };
  const CVec e3_half_pi = (CVec(3) << 0.0, 0.0, kI * pi / 2.0).finished();

  std::vector<CatalogEntry> out;
  auto add = [&](std::string id, std::string description, AmbientSpec ambient, std::vector<Expr> chart,
                 std::vector<Expr> implicit, std::optional<SliceSpec> slice, GridSpec grid, Expectations expected) {
    CatalogEntry e;
    e.id = std::move(id);
    e.description = std::move(description);
    e.ambient = ambient;
    e.implicit = std::move(implicit);
    if (!chart.empty())
      e.chart = SurfaceChart(e.id, Program::chart(std::move(chart)), e.implicit);
    e.slice = std::move(slice);
    e.grid = grid;
    e.expected = expected;
    out.push_back(std::move(e));
  };
  const AmbientSpec c3{3, std::nullopt};
  const AmbientSpec cs3{4, Complex(1.0)};
  const auto R3 = SliceSpec::standard(3, 0);
  const auto R31 = SliceSpec::standard(3, 1);
  const Expectations parallel_surface{false, false, true, std::nullopt, std::nullopt, std::nullopt};
  auto with = [](Expectations x, std::optional<bool> flat, std::optional<Complex> K, std::optional<int> sig) {
    x.flat = flat;
    x.K = K;
    x.signature = sig;
    return x;
  };
  const Expectations planar{true, true, true, true, Complex(0.0), std::nullopt};
  const Expectations minimal{true, false, false, std::nullopt, std::nullopt, std::nullopt};

  // Parallel surfaces of C^3.
  add("plane", "complex plane z3 = 0; totally geodesic", c3, {u, v, 0.0}, {z3}, std::nullopt,
      detail::complex_box(-1, 1, -1, 1), planar);
  {
    auto s = complex_sphere_chart(1.0);
    std::vector<Expr> outs;
    for (std::size_t k = 0; k < 3; ++k)
      outs.push_back(s.program.output(k));
    add("CS2", "complex sphere z1^2+z2^2+z3^2 = 1; parallel, umbilic, curvature 1/alpha^2 with alpha = 1", c3,
        outs, s.implicit_residuals, std::nullopt, detail::complex_box(-1, 1, -pi, pi),
        with(parallel_surface, false, Complex(1.0), std::nullopt));
  }
  add("cylinder", "cylinder CS1 x C, z1^2+z2^2 = 1; parallel and flat", c3, {cos(u), sin(u), v},
      {sq(z1) + sq(z2) - 1.0}, std::nullopt, detail::complex_box(-pi, pi, -1, 1),
      with(parallel_surface, true, Complex(0.0), std::nullopt));
  {
    const Expr w = u + kI * v;
    add("B", "flat minimal parallel surface z3 = (z1+i z2)^2, half of the solution with L_uu = e3, L_uv = i e3, L_vv = -e3",
        c3, {0.5 * (u - pow(w, 3.0) / 6.0), 0.5 * (v - kI * pow(w, 3.0) / 6.0), pow(w, 2.0) / 4.0},
        {z3 - sq(z1 + kI * z2)}, std::nullopt, detail::complex_box(-1, 1, -1, 1),
        Expectations{true, false, true, true, Complex(0.0), std::nullopt});
  }

  // The complex catenoid and its four similar forms.
  add("CC", "complex catenoid z1^2+z2^2 = cosh^2 z3; minimal", c3, {cos(u) * cosh(v), sin(u) * cosh(v), v},
      {sq(z1) + sq(z2) - sq(cosh(z3))}, std::nullopt, detail::complex_box(0, 2 * pi, -1, 1), minimal);
  add("CC-sinh", "z1^2+z2^2 = -sinh^2 z3, CC translated by i pi/2 along z3", c3,
      {kI * cos(u) * sinh(v), kI * sin(u) * sinh(v), v}, {sq(z1) + sq(z2) + sq(sinh(z3))}, std::nullopt,
      detail::complex_box(0, 2 * pi, 0.2, 1.2), minimal);
  add("CC-perm", "z2^2+z3^2 = cosh^2 z1, CC with z1 and z3 exchanged", c3, {v, sin(u) * cosh(v), cos(u) * cosh(v)},
      {sq(z2) + sq(z3) - sq(cosh(z1))}, std::nullopt, detail::complex_box(0, 2 * pi, -1, 1), minimal);
  add("CC-sin", "z1^2+z2^2 = -sin^2 z3, the dilation by i of CC-sinh", c3,
      {kI * cos(u) * sin(v), kI * sin(u) * sin(v), v}, {sq(z1) + sq(z2) + sq(sin(z3))}, std::nullopt,
      detail::complex_box(0, 2 * pi, 0.2, 1.2), minimal);
  add("CC-sin-perm", "z2^2+z3^2 = -sin^2 z1, CC-sin with z1 and z3 exchanged", c3,
      {v, kI * sin(u) * sin(v), kI * cos(u) * sin(v)}, {sq(z2) + sq(z3) + sq(sin(z1))}, std::nullopt,
      detail::complex_box(0, 2 * pi, 0.2, 1.2), minimal);

  // Real slices of the complex catenoid.
  add("catenoid-R3", "catenoid x1^2+x2^2 = cosh^2 x3 in R3", c3, {cos(u) * cosh(v), sin(u) * cosh(v), v},
      {sq(z1) + sq(z2) - sq(cosh(z3))}, R3, detail::box(0, 2 * pi, -1, 1), with(minimal, false, std::nullopt, 0));
  add("catenoid-lorentz-hyp", "Lorentzian hyperbolic catenoid -y1^2+x2^2 = cosh^2 x3 in R3_1", c3,
      {kI * sinh(u) * cosh(v), cosh(u) * cosh(v), v}, {sq(z1) + sq(z2) - sq(cosh(z3))}, R31,
      detail::box(-1, 1, -1, 1), with(minimal, std::nullopt, std::nullopt, 1));
  add("catenoid-lorentz-hyp2", "Lorentzian hyperbolic catenoid of the second kind y1^2-x2^2 = sinh^2 x3 in R3_1", c3,
      {kI * cosh(u) * sinh(v), sinh(u) * sinh(v), v}, {sq(z1) + sq(z2) + sq(sinh(z3))}, R31,
      detail::box(-1, 1, 0.2, 1.5), with(minimal, std::nullopt, std::nullopt, 1));
  add("catenoid-lorentz-elliptic", "Lorentzian elliptic catenoid x2^2+x3^2 = cos^2 y1 in R3_1", c3,
      {kI * v, cos(u) * cos(v), sin(u) * cos(v)}, {sq(z2) + sq(z3) - sq(cosh(z1))}, R31,
      detail::box(0, 2 * pi, -1, 1), with(minimal, std::nullopt, std::nullopt, 1));
  add("catenoid-spacelike-hyp", "spacelike hyperbolic catenoid y1^2-x2^2 = sin^2 x3 in R3_1", c3,
      {kI * cosh(u) * sin(v), sinh(u) * sin(v), v}, {sq(z1) + sq(z2) + sq(sin(z3))}, R31,
      detail::box(-1, 1, 0.2, 1.5), with(minimal, std::nullopt, std::nullopt, 0));
  add("catenoid-spacelike-elliptic", "spacelike elliptic catenoid x2^2+x3^2 = sinh^2 y1 in R3_1", c3,
      {kI * v, cos(u) * sinh(v), sin(u) * sinh(v)}, {sq(z2) + sq(z3) + sq(sin(z1))}, R31,
      detail::box(0, 2 * pi, 0.2, 1.5), with(minimal, std::nullopt, std::nullopt, 0));

  // Totally geodesic surfaces of CS3 and its real slices.
  const Expr cs3_eq = sq(z1) + sq(z2) + sq(z3) + sq(z4) - 1.0;
  add("CS3", "complex 3-sphere z1^2+z2^2+z3^2+z4^2 = 1, curvature 1", cs3, {}, {cs3_eq}, std::nullopt,
      detail::complex_box(-1, 1, -1, 1), {});
  const std::vector<Expr> sphere_in_cs3{cos(u) * cos(v), cos(u) * sin(v), sin(u), 0.0};
  const Expectations tg_sphere{true, true, std::nullopt, false, Complex(1.0), std::nullopt};
  add("CS2-in-CS3", "CS2 = CS3 cut by z4 = 0; totally geodesic in CS3", cs3, sphere_in_cs3, {cs3_eq, z4},
      std::nullopt, detail::complex_box(-1, 1, -pi, pi), tg_sphere);
  add("S2-in-S3", "S2: x1^2+x2^2+x3^2 = 1, x4 = 0 inside S3 = CS3 cut by R4", cs3, sphere_in_cs3, {cs3_eq, z4},
      SliceSpec::standard(4, 0), detail::box(-1.2, 1.2, -pi, pi), with(tg_sphere, false, Complex(1.0), 0));
  const std::vector<Expr> s22{-kI * sinh(u) * cos(v), -kI * sinh(u) * sin(v), 0.0, cosh(u)};
  add("S2_2-in-S3_3", "S2_2: -y1^2-y2^2+x4^2 = 1, z3 = 0 inside S3_3, a real slice of CS3", cs3, s22, {cs3_eq, z3},
      SliceSpec::imaginary(4, {1, 2, 3}), detail::box(0.3, 1.5, -pi, pi), with(tg_sphere, false, Complex(1.0), 2));
  {
    const AmbientSpec h3{4, kI};
    const auto moved = apply_wick_move(out.back().chart.value(), WickMove{Dilate{kI}});
    std::vector<Expr> outs;
    for (std::size_t k = 0; k < 4; ++k)
      outs.push_back(moved.program.output(k));
    add("H2-in-H3", "H2: x1^2+x2^2-y4^2 = -1, z3 = 0 inside H3: x1^2+x2^2+x3^2-y4^2 = -1, the image of S2_2-in-S3_3 under L_i",
        h3, outs, {sq(z1) + sq(z2) + sq(z3) + sq(z4) + 1.0, z3}, SliceSpec::imaginary(4, {4}),
        detail::box(0.3, 1.5, -pi, pi), Expectations{true, true, std::nullopt, false, Complex(-1.0), 0});
  }

  // Parallel surfaces of R3.
  add("plane-R3", "plane x3 = 0 in R3", c3, {u, v, 0.0}, {z3}, R3, detail::box(-1, 1, -1, 1), with(planar, true, Complex(0.0), 0));
  add("sphere-R3", "sphere x1^2+x2^2+x3^2 = 1 in R3", c3, {cos(u) * cos(v), cos(u) * sin(v), sin(u)},
      {sq(z1) + sq(z2) + sq(z3) - 1.0}, R3, detail::box(-1.2, 1.2, -pi, pi), with(parallel_surface, false, Complex(1.0), 0));
  add("cylinder-R3", "flat cylinder x1^2+x2^2 = 1 in R3", c3, {cos(u), sin(u), v}, {sq(z1) + sq(z2) - 1.0}, R3,
      detail::box(-pi, pi, -1, 1), with(parallel_surface, true, Complex(0.0), 0));

  // Parallel surfaces of R3_1 (metric -dy1^2 + dx2^2 + dx3^2).
  add("lorentz-par-1", "Euclidean plane y1 = 0 in R3_1, from z1 = 0", c3, {0.0, u, v}, {z1}, R31,
      detail::box(-1, 1, -1, 1), with(planar, true, Complex(0.0), 0));
  add("lorentz-par-2", "Lorentzian plane x2 = 0 in R3_1, from z2 = 0", c3, {kI * u, 0.0, v}, {z2}, R31,
      detail::box(-1, 1, -1, 1), with(planar, true, Complex(0.0), 1));
  add("lorentz-par-3", "hyperbolic plane H2: y1^2-x2^2-x3^2 = 1, from -z1^2-z2^2-z3^2 = 1", c3,
      {kI * cosh(u), sinh(u) * cos(v), sinh(u) * sin(v)}, {sq(z1) + sq(z2) + sq(z3) + 1.0}, R31,
      detail::box(0.3, 1.5, -pi, pi), with(parallel_surface, false, Complex(-1.0), 0));
  add("lorentz-par-4", "indefinite sphere S2_1: -y1^2+x2^2+x3^2 = 1, from z1^2+z2^2+z3^2 = 1", c3,
      {kI * sinh(u), cosh(u) * cos(v), cosh(u) * sin(v)}, {sq(z1) + sq(z2) + sq(z3) - 1.0}, R31,
      detail::box(-1, 1, -pi, pi), with(parallel_surface, false, Complex(1.0), 1));
  add("lorentz-par-5", "flat cylinder H1 x R1: y1^2-x2^2 = 1, from -z1^2-z2^2 = 1", c3, {kI * cosh(u), sinh(u), v},
      {sq(z1) + sq(z2) + 1.0}, R31, detail::box(-1, 1, -1, 1), with(parallel_surface, true, Complex(0.0), 0));
  add("lorentz-par-6", "flat cylinder S1 x R1_1: x2^2+x3^2 = 1, from z2^2+z3^2 = 1", c3, {kI * v, cos(u), sin(u)},
      {sq(z2) + sq(z3) - 1.0}, R31, detail::box(-pi, pi, -1, 1), with(parallel_surface, true, Complex(0.0), 1));
  add("lorentz-par-7", "flat cylinder S1_1 x R1: -y1^2+x2^2 = 1, from z1^2+z2^2 = 1", c3, {kI * sinh(u), cosh(u), v},
      {sq(z1) + sq(z2) - 1.0}, R31, detail::box(-1, 1, -1, 1), with(parallel_surface, true, Complex(0.0), 1));
  add("lorentz-par-8", "flat minimal Lorentzian surface M2_1: x3 = (y1-x2)^2, from z3 = (z2+i z1)^2", c3,
      {kI * u, v, sq(v - u)}, {z3 - sq(z2 + kI * z1)}, R31, detail::box(-1, 1, -1, 1),
      Expectations{true, false, true, true, Complex(0.0), 1});

  std::vector<StoredMove> moves;
  auto link = [&](std::string from, std::string to, WickMove m) { moves.push_back({std::move(from), std::move(to), std::move(m)}); };
  const WickMove to_hyp{RotateParam{Param::u, kI}, PermuteCoords{{1, 0, 2}}};
  const WickMove to_hyp2 = to_hyp.then(WickMove{TranslateParam{Param::v, kI * pi / 2.0}, TranslateAmbient{-e3_half_pi},
                                                PermuteCoords{{1, 0, 2}}, RotateParam{Param::u, kI}, RotateParam{Param::u, kI}});
  link("catenoid-R3", "catenoid-lorentz-hyp", to_hyp);
  link("catenoid-R3", "catenoid-lorentz-hyp2", to_hyp2);
  link("catenoid-R3", "catenoid-lorentz-elliptic", WickMove{RotateParam{Param::v, kI}, PermuteCoords{{2, 0, 1}}});
  link("catenoid-R3", "catenoid-spacelike-hyp", to_hyp2.then(WickMove{RotateParam{Param::v, -kI}, Dilate{kI}}));
  link("catenoid-R3", "catenoid-spacelike-elliptic",
       WickMove{TranslateParam{Param::v, kI * pi / 2.0}, TranslateAmbient{-e3_half_pi}, Dilate{kI},
                TranslateParam{Param::u, pi}, PermuteCoords{{2, 0, 1}}});
  link("CC", "CC-sinh", WickMove{TranslateAmbient{e3_half_pi}});
  link("CC-sinh", "CC-sin", WickMove{Dilate{kI}});
  link("CC", "CC-perm", WickMove{PermuteCoords{{2, 1, 0}}});
  link("CC-sin", "CC-sin-perm", WickMove{PermuteCoords{{2, 1, 0}}});
  link("S2_2-in-S3_3", "H2-in-H3", WickMove{Dilate{kI}});

  return Catalog(std::move(out), std::move(moves));
}

} // namespace wickforge
