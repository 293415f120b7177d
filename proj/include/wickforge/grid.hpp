#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickforge/errors.hpp"
#include "wickforge/linalg.hpp"

namespace wickforge {

struct GridPoint {
  int iu = 0;
  int iv = 0;
  Complex u;
  Complex v;
};

/// Tensor grid over [u0, u1] x [v0, v1], endpoints included. The optional
/// imaginary offsets move the whole box off the real plane.
struct GridSpec {
  double u0 = 0.0, u1 = 1.0;
  int nu = 21;
  double v0 = 0.0, v1 = 1.0;
  int nv = 21;
  double u_im = 0.0, v_im = 0.0;

  void validate() const {
    if (nu < 2 || nv < 2)
      throw ParseError("grid resolution must be at least 2 per axis");
    for (double x : {u0, u1, v0, v1, u_im, v_im})
      if (!std::isfinite(x))
        throw ParseError("grid bounds must be finite");
  }

  std::size_t size() const { return static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv); }
  bool is_real() const { return u_im == 0.0 && v_im == 0.0; }

  /// Points are numbered row-major in (iu, iv).
  GridPoint at(std::size_t index) const {
    GridPoint p;
    p.iu = static_cast<int>(index / static_cast<std::size_t>(nv));
    p.iv = static_cast<int>(index % static_cast<std::size_t>(nv));
    p.u = Complex(u0 + (u1 - u0) * p.iu / (nu - 1), u_im);
    p.v = Complex(v0 + (v1 - v0) * p.iv / (nv - 1), v_im);
    return p;
  }

  /// "u0,u1,nu,v0,v1,nv"
  static GridSpec parse(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      parts.push_back(item);
    if (parts.size() != 6)
      throw ParseError("grid must be u0,u1,nu,v0,v1,nv");
    GridSpec g;
    try {
      std::size_t used = 0;
      auto real = [&](const std::string &s) {
        const double x = std::stod(s, &used);
        if (used != s.size())
          throw ParseError("bad number '" + s + "' in grid");
        return x;
      };
      auto count = [&](const std::string &s) {
        const int x = std::stoi(s, &used);
        if (used != s.size())
          throw ParseError("bad count '" + s + "' in grid");
        return x;
      };
      g.u0 = real(parts[0]);
      g.u1 = real(parts[1]);
      g.nu = count(parts[2]);
      g.v0 = real(parts[3]);
      g.v1 = real(parts[4]);
      g.nv = count(parts[5]);
    } catch (const std::logic_error &) {
      throw ParseError("grid must be u0,u1,nu,v0,v1,nv");
    }
    g.validate();
    return g;
  }
};

inline nlohmann::json to_json(const GridSpec &g) {
  nlohmann::json j = {{"u", {g.u0, g.u1, g.nu}}, {"v", {g.v0, g.v1, g.nv}}};
  if (!g.is_real())
    j["offset"] = {g.u_im, g.v_im};
  return j;
}

inline GridSpec grid_from_json(const nlohmann::json &j) {
  try {
    GridSpec g;
    const auto &u = j.at("u");
    const auto &v = j.at("v");
    g.u0 = u.at(0).get<double>();
    g.u1 = u.at(1).get<double>();
    g.nu = u.at(2).get<int>();
    g.v0 = v.at(0).get<double>();
    g.v1 = v.at(1).get<double>();
    g.nv = v.at(2).get<int>();
    if (j.contains("offset")) {
      g.u_im = j.at("offset").at(0).get<double>();
      g.v_im = j.at("offset").at(1).get<double>();
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("malformed grid: ") + e.what());
  }
}

/// Evaluates f(0..count-1) on up to `jobs` threads; results come back in index
/// order whatever the thread count. The first exception by index is rethrown.
template <typename F> auto parallel_map(std::size_t count, int jobs, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto workers =
      static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  auto run = [&](std::size_t first) {
    for (std::size_t i = first; i < count; i += workers) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(run, w);
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

} // namespace wickforge
