#pragma once

// Truncated bivariate Taylor arithmetic.
//
// A jet stores c_pq for p + q <= 3 and represents
//   f(u0 + du, v0 + dv) = sum c_pq du^p dv^q + O(|d|^4).
// Every operation truncates at total degree 3, so products and elementary
// functions give the exact Taylor coefficients of the composed holomorphic map.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "wickforge/errors.hpp"

namespace wickforge {

template <typename T> class BasicJet2 {
public:
  static constexpr int kOrder = 3;
  static constexpr int kSize = (kOrder + 1) * (kOrder + 2) / 2;

  static constexpr int index(int p, int q) {
    const int d = p + q;
    return d * (d + 1) / 2 + q;
  }

  constexpr BasicJet2() : c_{} {}
  constexpr BasicJet2(T value) : c_{} { c_[0] = value; } // NOLINT: implicit lift of constants

  static constexpr BasicJet2 constant(T value) { return BasicJet2(value); }
  /// The coordinate function u expanded at u0.
  static constexpr BasicJet2 variable_u(T u0) {
    BasicJet2 j(u0);
    j.c_[index(1, 0)] = T(1);
    return j;
  }
  static constexpr BasicJet2 variable_v(T v0) {
    BasicJet2 j(v0);
    j.c_[index(0, 1)] = T(1);
    return j;
  }

  constexpr const T &coeff(int p, int q) const {
    check(p, q);
    return c_[index(p, q)];
  }
  constexpr T &coeff(int p, int q) {
    check(p, q);
    return c_[index(p, q)];
  }
  constexpr const T &value() const { return c_[0]; }
  constexpr const std::array<T, kSize> &coefficients() const { return c_; }

  constexpr BasicJet2 operator-() const {
    BasicJet2 r;
    for (int k = 0; k < kSize; ++k)
      r.c_[k] = -c_[k];
    return r;
  }

  constexpr BasicJet2 &operator+=(const BasicJet2 &o) {
    for (int k = 0; k < kSize; ++k)
      c_[k] += o.c_[k];
    return *this;
  }
  constexpr BasicJet2 &operator-=(const BasicJet2 &o) {
    for (int k = 0; k < kSize; ++k)
      c_[k] -= o.c_[k];
    return *this;
  }
  constexpr BasicJet2 &operator*=(const T &s) {
    for (auto &x : c_)
      x *= s;
    return *this;
  }

  friend constexpr BasicJet2 operator+(BasicJet2 a, const BasicJet2 &b) { return a += b; }
  friend constexpr BasicJet2 operator-(BasicJet2 a, const BasicJet2 &b) { return a -= b; }
  friend constexpr BasicJet2 operator*(BasicJet2 a, const T &s) { return a *= s; }
  friend constexpr BasicJet2 operator*(const T &s, BasicJet2 a) { return a *= s; }

  friend constexpr BasicJet2 operator*(const BasicJet2 &a, const BasicJet2 &b) {
    BasicJet2 r;
    for (int p1 = 0; p1 <= kOrder; ++p1)
      for (int q1 = 0; p1 + q1 <= kOrder; ++q1) {
        const T &x = a.c_[index(p1, q1)];
        if (x == T(0))
          continue;
        for (int p2 = 0; p1 + q1 + p2 <= kOrder; ++p2)
          for (int q2 = 0; p1 + q1 + p2 + q2 <= kOrder; ++q2)
            r.c_[index(p1 + p2, q1 + q2)] += x * b.c_[index(p2, q2)];
      }
    return r;
  }

  friend BasicJet2 operator/(const BasicJet2 &a, const BasicJet2 &b) { return a * reciprocal(b); }

  friend bool operator==(const BasicJet2 &a, const BasicJet2 &b) { return a.c_ == b.c_; }

private:
  static constexpr void check(int p, int q) {
    if (p < 0 || q < 0 || p + q > kOrder)
      throw Error("jet index (" + std::to_string(p) + "," + std::to_string(q) +
                  ") outside total order 3");
  }

  std::array<T, kSize> c_;
};

using Jet2 = BasicJet2<std::complex<double>>;

/// d^{p+q} f / du^p dv^q at the expansion point, i.e. p! q! c_pq.
template <typename T> T partial(const BasicJet2<T> &jet, int p, int q) {
  if (p < 0 || q < 0 || p + q > BasicJet2<T>::kOrder)
    throw Error("partial derivative order exceeds jet order 3");
  constexpr double fact[] = {1.0, 1.0, 2.0, 6.0};
  return jet.coeff(p, q) * (fact[p] * fact[q]);
}

/// f(x) for a univariate f with derivatives d0..d3 at the constant term of x.
template <typename T>
BasicJet2<T> compose(const BasicJet2<T> &x, const T &d0, const T &d1, const T &d2, const T &d3) {
  BasicJet2<T> dx = x;
  dx.coeff(0, 0) = T(0);
  const BasicJet2<T> dx2 = dx * dx;
  const BasicJet2<T> dx3 = dx2 * dx;
  BasicJet2<T> r = dx * d1 + dx2 * (d2 / 2.0) + dx3 * (d3 / 6.0);
  r.coeff(0, 0) = d0;
  return r;
}

namespace detail {

inline constexpr double kPoleTolerance = 1e-300;
inline constexpr double kBranchGuard = 1e-9;

inline void check_pole(const std::complex<double> &x, const char *op) {
  if (std::abs(x) < kPoleTolerance)
    throw SingularEvaluation(std::string(op) + ": argument is zero", "");
}

/// Principal-branch functions are singular at 0 and on the negative real axis.
inline void check_branch(const std::complex<double> &x, const char *op) {
  check_pole(x, op);
  if (std::abs(std::arg(x)) > std::numbers::pi - kBranchGuard)
    throw SingularEvaluation(std::string(op) + ": argument on the branch cut", "");
}

} // namespace detail

template <typename T> BasicJet2<T> reciprocal(const BasicJet2<T> &x) {
  const T a = x.value();
  detail::check_pole(a, "div");
  const T r = T(1) / a;
  return compose(x, r, -r * r, T(2) * r * r * r, T(-6) * r * r * r * r);
}

template <typename T> BasicJet2<T> exp(const BasicJet2<T> &x) {
  const T e = std::exp(x.value());
  return compose(x, e, e, e, e);
}

template <typename T> BasicJet2<T> log(const BasicJet2<T> &x) {
  const T a = x.value();
  detail::check_branch(a, "log");
  const T r = T(1) / a;
  return compose(x, std::log(a), r, -r * r, T(2) * r * r * r);
}

template <typename T> BasicJet2<T> sqrt(const BasicJet2<T> &x) {
  const T a = x.value();
  detail::check_branch(a, "sqrt");
  const T s = std::sqrt(a);
  const T r = T(1) / a;
  return compose(x, s, s * r / 2.0, -s * r * r / 4.0, T(3) * s * r * r * r / 8.0);
}

template <typename T> BasicJet2<T> sin(const BasicJet2<T> &x) {
  const T s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, s, c, -s, -c);
}

template <typename T> BasicJet2<T> cos(const BasicJet2<T> &x) {
  const T s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, c, -s, -c, s);
}

template <typename T> BasicJet2<T> sinh(const BasicJet2<T> &x) {
  const T s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, s, c, s, c);
}

template <typename T> BasicJet2<T> cosh(const BasicJet2<T> &x) {
  const T s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, c, s, c, s);
}

/// Integer powers by repeated multiplication; no branch involved.
template <typename T> BasicJet2<T> ipow(const BasicJet2<T> &x, int n) {
  if (n < 0)
    return reciprocal(ipow(x, -n));
  BasicJet2<T> result(T(1));
  BasicJet2<T> base = x;
  while (n > 0) {
    if (n & 1)
      result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

/// x^e for a complex exponent on the principal branch.
template <typename T> BasicJet2<T> pow(const BasicJet2<T> &x, const T &e) {
  const T a = x.value();
  detail::check_branch(a, "pow");
  const T p0 = std::pow(a, e);
  const T r = T(1) / a;
  const T p1 = e * p0 * r;
  const T p2 = (e - 1.0) * p1 * r;
  const T p3 = (e - 2.0) * p2 * r;
  return compose(x, p0, p1, p2, p3);
}

} // namespace wickforge
