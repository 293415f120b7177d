#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "wickforge/catalog.hpp"
#include "wickforge/linalg.hpp"
#include "wickforge/report.hpp"
#include "wickforge/slices.hpp"

namespace wickforge::cli {
namespace {

using nlohmann::json;

struct Settings {
  std::string target;
  std::vector<std::string> props;
  std::string grid;
  double tol = 0.0;
  int jobs = 1;
  std::string out;
  std::string format;
  std::string slice;
  std::string to;
  std::string move_file;
  std::optional<int> signature;
};

json read_json_file(const std::string &path) {
  std::ifstream in_file;
  std::istream *in = &std::cin;
  if (path != "-") {
    in_file.open(path);
    if (!in_file)
      throw ParseError("cannot read '" + path + "'");
    in = &in_file;
  }
  try {
    return json::parse(*in);
  } catch (const json::exception &e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

CatalogEntry resolve(const Catalog &catalog, const std::string &target) {
  if (catalog.contains(target))
    return catalog.get(target);
  if (std::filesystem::is_regular_file(target))
    return entry_from_json(read_json_file(target));
  throw UnknownEntry("no catalog entry or entry file '" + target + "'");
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot write '" + path + "'");
  f << text;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GridSpec real_grid(GridSpec g) {
  g.u_im = 0.0;
  g.v_im = 0.0;
  return g;
}

std::vector<std::string> coordinate_names(const SliceSpec &s) {
  std::vector<std::string> names;
  for (int j = 0; j < s.ambient_dim(); ++j)
    names.push_back((s.mask()[static_cast<std::size_t>(j)] ? "y" : "x") + std::to_string(j + 1));
  return names;
}

// verify ---------------------------------------------------------------------

int cmd_verify(const Settings &s, const Catalog &catalog, std::ostream &out, std::ostream &err) {
  const auto entry = resolve(catalog, s.target);
  VerifyOptions opt;
  for (const auto &p : s.props)
    opt.properties.push_back(property_from_string(p));
  opt.tolerance = s.tol > 0.0 ? s.tol : kDefaultTolerance;
  opt.jobs = s.jobs;
  if (!s.grid.empty())
    opt.grid = GridSpec::parse(s.grid);
  const auto report = verify_entry(entry, opt);

  if (s.format == "csv") {
    std::ostringstream csv;
    csv << "iu,iv,u_re,u_im,v_re,v_im,degenerate,K_re,K_im,gauss,mean_curvature,h,nabla_h\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
      const auto &e = report.points[i];
      const auto gp = report.grid.at(i);
      csv << gp.iu << ',' << gp.iv << ',' << num(e.u.real()) << ',' << num(e.u.imag()) << ',' << num(e.v.real())
          << ',' << num(e.v.imag()) << ',' << (e.degenerate ? 1 : 0);
      if (e.degenerate)
        csv << ",,,,,,\n";
      else
        csv << ',' << num(e.K.real()) << ',' << num(e.K.imag()) << ',' << num(e.gauss) << ',' << num(e.mean_max)
            << ',' << num(e.h_max) << ',' << (e.nabla_h ? num(*e.nabla_h) : "") << '\n';
    }
    emit(csv.str(), s.out, out);
  } else if (s.format == "json" || s.format.empty()) {
    emit(dump_deterministic(to_json(report)), s.out, out);
  } else {
    throw ParseError("verify writes json or csv");
  }

  err << entry.id << ':';
  for (const auto &v : report.verdicts)
    err << ' ' << to_string(v.property) << (v.holds ? "" : "=no") << (v.pass ? " ok" : " FAILED") << " (" << num(v.max_residual) << ')';
  if (report.curvature)
    err << " K" << (report.curvature->pass ? " ok" : " FAILED");
  if (report.too_degenerate)
    err << " too many degenerate points (" << report.degenerate_count << ')';
  err << '\n';
  return report.passed ? ok : property_failure;
}

// slice ----------------------------------------------------------------------

SliceSpec parse_slice(const std::string &text) {
  if (std::filesystem::is_regular_file(text))
    return slice_from_json(read_json_file(text));
  return SliceSpec::named(text);
}

bool same_slice(const SliceSpec &a, const SliceSpec &b) {
  return a.mask() == b.mask() && a.base() == b.base();
}

int cmd_slice(const Settings &s, const Catalog &catalog, std::ostream &out, std::ostream &err) {
  const auto entry = resolve(catalog, s.target);
  if (!entry.chart)
    throw Error("entry '" + entry.id + "' has no chart");
  std::optional<SliceSpec> slice = entry.slice;
  if (!s.slice.empty())
    slice = parse_slice(s.slice);
  if (!slice)
    throw ParseError("entry '" + entry.id + "' has no stored slice; pass --slice");
  const GridSpec grid = s.grid.empty() ? real_grid(entry.grid) : GridSpec::parse(s.grid);
  const double tol = s.tol > 0.0 ? s.tol : kMembershipTolerance;

  const auto check = verify_in_slice(*entry.chart, *slice, grid, s.jobs);
  json r{{"entry", entry.id},
         {"slice", to_json(*slice)},
         {"grid", to_json(grid)},
         {"tolerance", tol},
         {"in_slice", check.in_slice(tol)},
         {"membership_residual", check.membership_residual},
         {"coordinate_residual", std::vector<double>(check.coordinate_residual.begin(), check.coordinate_residual.end())},
         {"secondary_metric", check.secondary_metric},
         {"failed_points", check.failed_points}};
  bool good = check.in_slice(tol);
  if (good) {
    const auto sig = induced_signature(*entry.chart, *slice, grid, s.jobs, tol);
    r["signature"] = sig.signature ? json(*sig.signature) : json(nullptr);
    r["signature_changes"] = sig.signature_changes;
    r["degenerate_count"] = sig.degenerate_count;
    if (entry.expected.signature && entry.slice && same_slice(*entry.slice, *slice)) {
      r["expected_signature"] = *entry.expected.signature;
      good = sig.signature == entry.expected.signature;
    }
  }
  emit(dump_deterministic(r), s.out, out);
  err << entry.id << ": " << (check.in_slice(tol) ? "in slice" : "not in slice") << " (residual "
      << num(check.membership_residual) << ")\n";
  return good ? ok : property_failure;
}

// classify -------------------------------------------------------------------

int cmd_classify(const Settings &s, std::ostream &out) {
  const auto j = read_json_file(s.target);
  CMat2 a;
  try {
    if (!j.is_array() || j.size() != 2 || j.at(0).size() != 2 || j.at(1).size() != 2)
      throw ParseError("matrix must be [[a, b], [c, d]]");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        a(r, c) = complex_from_json(j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)));
  } catch (const json::exception &e) {
    throw ParseError(std::string("matrix must be [[a, b], [c, d]]: ") + e.what());
  }
  const auto nf = classify_symmetric_2x2(a);
  auto mat = [](const CMat2 &m) {
    return json{{complex_to_json(m(0, 0)), complex_to_json(m(0, 1))}, {complex_to_json(m(1, 0)), complex_to_json(m(1, 1))}};
  };
  const CMat2 f = nf.form();
  json r{{"input", mat(a)},
         {"kind", to_string(nf.kind)},
         {"alpha", complex_to_json(nf.alpha)},
         {"frame", mat(nf.frame)},
         {"form", mat(f)},
         {"reconstruction_residual", (nf.frame * f * nf.frame.transpose() - a).cwiseAbs().maxCoeff()},
         {"orthogonality_residual", (nf.frame.transpose() * nf.frame - CMat2::Identity()).cwiseAbs().maxCoeff()}};
  if (nf.kind == NormalFormKind::diagonal)
    r["beta"] = complex_to_json(nf.beta);
  emit(dump_deterministic(r), s.out, out);
  return ok;
}

// mesh -----------------------------------------------------------------------

int cmd_mesh(const Settings &s, const Catalog &catalog, std::ostream &out) {
  const auto entry = resolve(catalog, s.target);
  if (!entry.chart)
    throw Error("entry '" + entry.id + "' has no chart");
  if (!entry.slice)
    throw ComplexEntry("entry '" + entry.id + "' is a complex surface with no real slice to mesh");
  const GridSpec grid = s.grid.empty() ? real_grid(entry.grid) : GridSpec::parse(s.grid);
  const auto &slice = *entry.slice;
  const auto check = verify_in_slice(*entry.chart, slice, grid, s.jobs);
  if (!check.in_slice())
    throw NotInSlice("entry '" + entry.id + "' leaves its slice by " + num(check.membership_residual));
  const auto format = s.format.empty() ? std::string("obj") : s.format;
  const auto names = coordinate_names(slice);
  if (format == "obj" && names.size() != 3)
    throw ParseError("OBJ export needs a surface in a 3-dimensional slice");

  const auto vertices = parallel_map(grid.size(), s.jobs, [&](std::size_t i) {
    const auto p = grid.at(i);
    return slice.coordinates(entry.chart->point(p.u, p.v));
  });
  std::vector<std::array<std::size_t, 3>> faces;
  const auto id = [&](int iu, int iv) { return static_cast<std::size_t>(iu) * static_cast<std::size_t>(grid.nv) + static_cast<std::size_t>(iv); };
  for (int iu = 0; iu + 1 < grid.nu; ++iu)
    for (int iv = 0; iv + 1 < grid.nv; ++iv) {
      faces.push_back({id(iu, iv), id(iu + 1, iv), id(iu + 1, iv + 1)});
      faces.push_back({id(iu, iv), id(iu + 1, iv + 1), id(iu, iv + 1)});
    }

  std::ostringstream text;
  if (format == "obj") {
    text << "# " << entry.id << " in slice coordinates (" << names[0] << ", " << names[1] << ", " << names[2] << ")\n";
    for (const auto &x : vertices)
      text << "v " << num(x(0)) << ' ' << num(x(1)) << ' ' << num(x(2)) << '\n';
    for (const auto &f : faces)
      text << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  } else if (format == "csv") {
    text << "iu,iv,u,v";
    for (const auto &n : names)
      text << ',' << n;
    text << '\n';
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto p = grid.at(i);
      text << p.iu << ',' << p.iv << ',' << num(p.u.real()) << ',' << num(p.v.real());
      for (Eigen::Index k = 0; k < vertices[i].size(); ++k)
        text << ',' << num(vertices[i](k));
      text << '\n';
    }
  } else if (format == "json") {
    json verts = json::array();
    for (const auto &x : vertices)
      verts.push_back(std::vector<double>(x.begin(), x.end()));
    text << dump_deterministic({{"entry", entry.id}, {"coordinates", names}, {"vertices", verts}, {"faces", faces}}, 0);
  } else {
    throw ParseError("unknown mesh format '" + format + "'");
  }
  emit(text.str(), s.out, out);
  return ok;
}

// wick -----------------------------------------------------------------------

int cmd_wick(const Settings &s, const Catalog &catalog, std::ostream &out, std::ostream &err) {
  const auto from = resolve(catalog, s.target);
  if (!from.chart)
    throw Error("entry '" + from.id + "' has no chart");
  if (s.to.empty() == s.move_file.empty())
    throw ParseError("give exactly one of --to and --move");

  if (!s.move_file.empty()) {
    const auto moved = apply_wick_move(*from.chart, wick_move_from_json(read_json_file(s.move_file)));
    json implicit = json::array();
    for (const auto &r : moved.implicit_residuals)
      implicit.push_back(to_json(r));
    emit(dump_deterministic({{"from", from.id}, {"chart", to_json(moved.program)}, {"implicit", implicit}}), s.out, out);
    return ok;
  }

  const auto &target = catalog.get(s.to);
  const StoredMove *stored = nullptr;
  for (const auto &m : catalog.moves())
    if (m.from == from.id && m.to == target.id)
      stored = &m;
  if (!stored)
    throw ParseError("no stored move from '" + from.id + "' to '" + target.id + "'");

  const auto moved = apply_wick_move(*from.chart, stored->move);
  const GridSpec grid = target.grid;
  double implicit = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.at(i);
    implicit = std::max(implicit, implicit_residual(target, moved.point(p.u, p.v)));
  }
  json r{{"from", from.id}, {"to", target.id}, {"move", to_json(stored->move)}, {"chart", to_json(moved.program)},
         {"implicit_residual", implicit}};
  bool good = implicit < kAmbientMembershipTolerance;
  if (target.chart) {
    double diff = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto p = grid.at(i);
      diff = std::max(diff, (moved.point(p.u, p.v) - target.chart->point(p.u, p.v)).cwiseAbs().maxCoeff());
    }
    r["max_chart_difference"] = diff;
  }
  const double tol = s.tol > 0.0 ? s.tol : kDefaultTolerance;
  json transfers = json::object();
  if (from.ambient.flat() && target.ambient.flat()) {
    for (auto p : {Property::minimal, Property::parallel, Property::totally_geodesic, Property::flat}) {
      if (from.expected.get(p) != std::optional<bool>(true))
        continue;
      try {
        const auto t = property_transfer_check(*from.chart, stored->move, p, from.grid, grid, tol, s.jobs);
        transfers[to_string(p)] = {{"source", t.source_residual}, {"target", t.target_residual}, {"pass", true}};
      } catch (const TransferViolation &v) {
        transfers[to_string(p)] = {{"source", v.source}, {"target", v.target}, {"pass", false}};
        good = false;
      }
    }
  }
  r["transfer"] = transfers;
  r["pass"] = good;
  emit(dump_deterministic(r), s.out, out);
  err << from.id << " -> " << target.id << ": " << (good ? "ok" : "FAILED") << '\n';
  return good ? ok : property_failure;
}

// catalog --------------------------------------------------------------------

int cmd_catalog_list(const Settings &s, const Catalog &catalog, std::ostream &out) {
  CatalogFilter f;
  if (!s.props.empty())
    f.property = property_from_string(s.props.front());
  f.signature = s.signature;
  for (const auto *e : catalog.list(f))
    out << e->id << '\t' << e->description << '\n';
  return ok;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Checks holomorphic Riemannian submanifold geometry on sample grids."};
  app.name(args.empty() ? "wickforge" : std::filesystem::path(args.front()).filename().string());
  app.require_subcommand(1);
  Settings s;

  auto add_grid_options = [&](CLI::App *c) {
    c->add_option("--grid", s.grid, "Parameter grid u0,u1,nu,v0,v1,nv");
    c->add_option("--jobs", s.jobs, "Worker threads for grid sweeps")->check(CLI::PositiveNumber);
    c->add_option("--out", s.out, "Write the report here instead of stdout");
  };

  auto *verify = app.add_subcommand("verify", "Check surface properties over a grid");
  verify->add_option("target", s.target, "Catalog id or entry JSON file")->required();
  verify->add_option("--prop", s.props, "Properties that must hold: minimal, parallel, totally_geodesic, flat")
      ->delimiter(',');
  verify->add_option("--tol", s.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->default_str("json");
  add_grid_options(verify);

  auto *slice = app.add_subcommand("slice", "Check membership in a real slice and the induced signature");
  slice->add_option("target", s.target, "Catalog id or entry JSON file")->required();
  slice->add_option("--slice", s.slice, "Slice name such as R3_1, or a slice JSON file");
  slice->add_option("--tol", s.tol, "Membership tolerance")->check(CLI::PositiveNumber);
  add_grid_options(slice);

  auto *classify = app.add_subcommand("classify", "Normal form of a complex symmetric 2x2 matrix");
  classify->add_option("matrix", s.target, "JSON file [[a, b], [b, d]], or - for stdin")->required();
  classify->add_option("--out", s.out, "Write the result here instead of stdout");

  auto *mesh = app.add_subcommand("mesh", "Export the real slice of an entry as a triangle mesh");
  mesh->add_option("target", s.target, "Catalog id or entry JSON file")->required();
  mesh->add_option("--format", s.format, "obj, csv or json")->check(CLI::IsMember({"obj", "csv", "json"}));
  add_grid_options(mesh);

  auto *wick = app.add_subcommand("wick", "Apply a Wick move to an entry");
  wick->add_option("target", s.target, "Catalog id of the source")->required();
  wick->add_option("--to", s.to, "Target catalog id; uses the stored move");
  wick->add_option("--move", s.move_file, "Wick move JSON file");
  wick->add_option("--tol", s.tol, "Property tolerance")->check(CLI::PositiveNumber);
  wick->add_option("--jobs", s.jobs, "Worker threads")->check(CLI::PositiveNumber);
  wick->add_option("--out", s.out, "Write the report here instead of stdout");

  auto *cat = app.add_subcommand("catalog", "Inspect or export the surface catalog");
  cat->require_subcommand(1);
  auto *cat_list = cat->add_subcommand("list", "List entries");
  cat_list->add_option("--prop", s.props, "Only entries expected to have this property")->expected(1);
  cat_list->add_option("--signature", s.signature, "Only entries whose slice has this signature");
  auto *cat_show = cat->add_subcommand("show", "Print one entry as JSON");
  cat_show->add_option("id", s.target)->required();
  auto *cat_export = cat->add_subcommand("export", "Write the built-in catalog as JSON files");
  cat_export->add_option("dir", s.target)->required();

  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  if (argv.empty())
    argv.push_back("wickforge");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? ok : usage_error;
  }

  try {
    if (classify->parsed())
      return cmd_classify(s, out);
    if (cat_export->parsed()) {
      Catalog::builtin().save(s.target);
      err << "wrote " << Catalog::builtin().entries().size() << " entries to " << s.target << '\n';
      return ok;
    }
    const auto catalog = Catalog::load_default();
    if (verify->parsed())
      return cmd_verify(s, catalog, out, err);
    if (slice->parsed())
      return cmd_slice(s, catalog, out, err);
    if (mesh->parsed())
      return cmd_mesh(s, catalog, out);
    if (wick->parsed())
      return cmd_wick(s, catalog, out, err);
    if (cat_list->parsed())
      return cmd_catalog_list(s, catalog, out);
    if (cat_show->parsed()) {
      out << to_json(catalog.get(s.target)).dump(2) << '\n';
      return ok;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  }
  return usage_error;
}

} // namespace wickforge::cli
