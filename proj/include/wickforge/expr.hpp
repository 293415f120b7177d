#pragma once

// Holomorphic expression trees ("chart programs").
//
// An Expr is an immutable DAG of constants, variables and holomorphic
// operations. It evaluates on any scalar that supports the elementary
// functions: std::complex<double> for values, Jet2 for derivatives.
// There is deliberately no conj/abs/re/im node, so every program is
// holomorphic in its inputs.
//
// JSON form: {"op": "<name>", "args": [...]} for operations,
// {"const": [re, im]} and {"var": "u" | "v" | "z<k>"} for leaves.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "wickforge/errors.hpp"
#include "wickforge/jet.hpp"
#include "wickforge/linalg.hpp"

namespace wickforge {

enum class Op { constant, variable, add, sub, mul, div, neg, pow, exp, log, sin, cos, sinh, cosh, sqrt };

inline const char *op_name(Op op) {
  switch (op) {
  case Op::constant:
    return "const";
  case Op::variable:
    return "var";
  case Op::add:
    return "add";
  case Op::sub:
    return "sub";
  case Op::mul:
    return "mul";
  case Op::div:
    return "div";
  case Op::neg:
    return "neg";
  case Op::pow:
    return "pow";
  case Op::exp:
    return "exp";
  case Op::log:
    return "log";
  case Op::sin:
    return "sin";
  case Op::cos:
    return "cos";
  case Op::sinh:
    return "sinh";
  case Op::cosh:
    return "cosh";
  case Op::sqrt:
    return "sqrt";
  }
  return "?";
}

inline int op_arity(Op op) {
  switch (op) {
  case Op::constant:
  case Op::variable:
    return 0;
  case Op::add:
  case Op::sub:
  case Op::mul:
  case Op::div:
  case Op::pow:
    return 2;
  default:
    return 1;
  }
}

/// Whether a variable is a chart parameter (u, v) or an ambient coordinate (z1, z2, ...).
enum class VarDomain { parameters, coordinates };

class Expr {
public:
  struct Node {
    Op op = Op::constant;
    Complex value{};
    std::string name; // variables only
    int slot = -1;    // variables only
    std::vector<Expr> args;
  };

  Expr() : Expr(Complex{0.0}) {}
  Expr(Complex c) : node_(make_constant(c)) {} // NOLINT: implicit lift of constants
  Expr(double c) : Expr(Complex{c}) {}         // NOLINT

  static Expr u() { return variable("u"); }
  static Expr v() { return variable("v"); }
  /// Ambient coordinate z_k, 1-based as written in formulas.
  static Expr coord(int k) { return variable("z" + std::to_string(k)); }

  static Expr variable(const std::string &name) {
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->name = name;
    n->slot = slot_of(name);
    return Expr(std::move(n));
  }

  static Expr apply(Op op, std::vector<Expr> args) {
    if (op == Op::constant || op == Op::variable)
      throw Error("apply() builds operation nodes only");
    if (static_cast<int>(args.size()) != op_arity(op))
      throw Error(std::string("operation ") + op_name(op) + " expects " +
                  std::to_string(op_arity(op)) + " argument(s)");
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return Expr(std::move(n));
  }

  const Node &node() const { return *node_; }
  Op op() const { return node_->op; }
  bool is_constant() const { return node_->op == Op::constant; }
  bool is_constant(Complex c) const { return is_constant() && node_->value == c; }
  Complex constant_value() const { return node_->value; }

  /// Identity of the underlying node; shared subtrees compare equal.
  const void *id() const { return node_.get(); }

  /// Largest variable slot used plus one, and whether both domains occur.
  int arity() const {
    int best = 0;
    visit([&](const Node &n) {
      if (n.op == Op::variable)
        best = std::max(best, n.slot + 1);
    });
    return best;
  }

  bool uses_domain(VarDomain d) const {
    bool found = false;
    visit([&](const Node &n) {
      if (n.op == Op::variable && domain_of(n.name) == d)
        found = true;
    });
    return found;
  }

  template <typename T> T eval(std::span<const T> inputs) const {
    std::unordered_map<const Node *, T> memo;
    return eval_node(*node_, inputs, memo);
  }

  /// Replaces variable slot k by replacements[k]; shared subtrees stay shared.
  Expr substitute(std::span<const Expr> replacements) const {
    std::unordered_map<const Node *, Expr> memo;
    return substitute_node(*this, replacements, memo);
  }

  std::string to_string() const {
    const Node &n = *node_;
    switch (n.op) {
    case Op::constant: {
      const Complex c = n.value;
      if (c.imag() == 0.0)
        return format_real(c.real());
      if (c.real() == 0.0)
        return format_real(c.imag()) + "i";
      return "(" + format_real(c.real()) + (c.imag() < 0 ? "-" : "+") +
             format_real(std::abs(c.imag())) + "i)";
    }
    case Op::variable:
      return n.name;
    case Op::add:
      return "(" + n.args[0].to_string() + " + " + n.args[1].to_string() + ")";
    case Op::sub:
      return "(" + n.args[0].to_string() + " - " + n.args[1].to_string() + ")";
    case Op::mul:
      return n.args[0].to_string() + "*" + n.args[1].to_string();
    case Op::div:
      return n.args[0].to_string() + "/" + n.args[1].to_string();
    case Op::neg:
      return "-" + n.args[0].to_string();
    case Op::pow:
      return n.args[0].to_string() + "^" + n.args[1].to_string();
    default:
      return std::string(op_name(n.op)) + "(" + n.args[0].to_string() + ")";
    }
  }

  static VarDomain domain_of(const std::string &name) {
    return (name == "u" || name == "v") ? VarDomain::parameters : VarDomain::coordinates;
  }

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make_constant(Complex c) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = c;
    return n;
  }

  static int slot_of(const std::string &name) {
    if (name == "u")
      return 0;
    if (name == "v")
      return 1;
    if (name.size() >= 2 && name[0] == 'z') {
      std::size_t pos = 0;
      int k = 0;
      try {
        k = std::stoi(name.substr(1), &pos);
      } catch (const std::exception &) {
        pos = 0;
      }
      if (pos == name.size() - 1 && k >= 1)
        return k - 1;
    }
    throw ParseError("unknown variable '" + name + "' (expected u, v or z<k>)");
  }

  static std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }

  template <typename F> void visit(F &&f) const {
    std::vector<const Node *> stack{node_.get()};
    std::unordered_map<const Node *, bool> seen;
    while (!stack.empty()) {
      const Node *n = stack.back();
      stack.pop_back();
      if (seen[n])
        continue;
      seen[n] = true;
      f(*n);
      for (const auto &a : n->args)
        stack.push_back(a.node_.get());
    }
  }

  static const Complex &constant_term(const Complex &x) { return x; }
  static const Complex &constant_term(const Jet2 &x) { return x.value(); }

  template <typename T>
  static T eval_node(const Node &n, std::span<const T> inputs,
                     std::unordered_map<const Node *, T> &memo) {
    if (auto it = memo.find(&n); it != memo.end())
      return it->second;
    T result{};
    switch (n.op) {
    case Op::constant:
      result = T(n.value);
      break;
    case Op::variable:
      if (n.slot < 0 || static_cast<std::size_t>(n.slot) >= inputs.size())
        throw DimensionMismatch("variable " + n.name + " has no input value");
      result = inputs[static_cast<std::size_t>(n.slot)];
      break;
    default: {
      const T a = eval_node(n.args[0].node(), inputs, memo);
      try {
        result = apply_op(n, a, inputs, memo);
      } catch (const SingularEvaluation &e) {
        if (!e.node().empty())
          throw;
        throw SingularEvaluation(e.reason(), Expr(std::shared_ptr<const Node>(
                                                      std::shared_ptr<const Node>{}, &n))
                                                      .to_string());
      }
    }
    }
    memo.emplace(&n, result);
    return result;
  }

  template <typename T>
  static T apply_op(const Node &n, const T &a, std::span<const T> inputs,
                    std::unordered_map<const Node *, T> &memo) {
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    switch (n.op) {
    case Op::neg:
      return -a;
    case Op::exp:
      return exp(a);
    case Op::log:
      detail::check_branch(constant_term(a), "log");
      return log(a);
    case Op::sqrt:
      detail::check_branch(constant_term(a), "sqrt");
      return sqrt(a);
    case Op::sin:
      return sin(a);
    case Op::cos:
      return cos(a);
    case Op::sinh:
      return sinh(a);
    case Op::cosh:
      return cosh(a);
    default:
      break;
    }
    const Expr &rhs = n.args[1];
    if (n.op == Op::pow && rhs.is_constant()) {
      const Complex e = rhs.constant_value();
      if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64) {
        const int k = static_cast<int>(e.real());
        if (k < 0)
          detail::check_pole(constant_term(a), "pow");
        return int_power(a, k);
      }
      detail::check_branch(constant_term(a), "pow");
      return general_power(a, e);
    }
    const T b = eval_node(rhs.node(), inputs, memo);
    switch (n.op) {
    case Op::add:
      return a + b;
    case Op::sub:
      return a - b;
    case Op::mul:
      return a * b;
    case Op::div:
      detail::check_pole(constant_term(b), "div");
      return a / b;
    case Op::pow:
      detail::check_branch(constant_term(a), "pow");
      return exp(b * log(a));
    default:
      throw Error("unhandled operation");
    }
  }

  static Complex int_power(const Complex &a, int k) { return std::pow(a, k); }
  static Jet2 int_power(const Jet2 &a, int k) { return ipow(a, k); }
  static Complex general_power(const Complex &a, Complex e) { return std::pow(a, e); }
  static Jet2 general_power(const Jet2 &a, Complex e) { return pow(a, e); }

  static Expr substitute_node(const Expr &e, std::span<const Expr> repl,
                              std::unordered_map<const Node *, Expr> &memo) {
    const Node &n = e.node();
    if (auto it = memo.find(&n); it != memo.end())
      return it->second;
    Expr out = e;
    if (n.op == Op::variable) {
      if (n.slot >= 0 && static_cast<std::size_t>(n.slot) < repl.size())
        out = repl[static_cast<std::size_t>(n.slot)];
    } else if (n.op != Op::constant) {
      std::vector<Expr> args;
      bool changed = false;
      for (const auto &a : n.args) {
        args.push_back(substitute_node(a, repl, memo));
        changed = changed || args.back().id() != a.id();
      }
      if (changed)
        out = rebuild(n.op, std::move(args));
    }
    memo.emplace(&n, out);
    return out;
  }

  static Expr rebuild(Op op, std::vector<Expr> args);

  std::shared_ptr<const Node> node_;
};

// Builders with light constant folding, so that composing affine maps does
// not accumulate "0*x" and "1*x" terms.

inline Expr operator+(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr(a.constant_value() + b.constant_value());
  if (a.is_constant(0.0))
    return b;
  if (b.is_constant(0.0))
    return a;
  return Expr::apply(Op::add, {a, b});
}

inline Expr operator-(const Expr &a) {
  if (a.is_constant())
    return Expr(-a.constant_value());
  return Expr::apply(Op::neg, {a});
}

inline Expr operator-(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr(a.constant_value() - b.constant_value());
  if (b.is_constant(0.0))
    return a;
  if (a.is_constant(0.0))
    return -b;
  return Expr::apply(Op::sub, {a, b});
}

inline Expr operator*(const Expr &a, const Expr &b) {
  if (a.is_constant() && b.is_constant())
    return Expr(a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0))
    return Expr(0.0);
  if (a.is_constant(1.0))
    return b;
  if (b.is_constant(1.0))
    return a;
  return Expr::apply(Op::mul, {a, b});
}

inline Expr operator/(const Expr &a, const Expr &b) {
  if (b.is_constant(1.0))
    return a;
  return Expr::apply(Op::div, {a, b});
}

inline Expr pow(const Expr &a, const Expr &e) {
  if (e.is_constant(1.0))
    return a;
  return Expr::apply(Op::pow, {a, e});
}
inline Expr exp(const Expr &a) { return Expr::apply(Op::exp, {a}); }
inline Expr log(const Expr &a) { return Expr::apply(Op::log, {a}); }
inline Expr sin(const Expr &a) { return Expr::apply(Op::sin, {a}); }
inline Expr cos(const Expr &a) { return Expr::apply(Op::cos, {a}); }
inline Expr sinh(const Expr &a) { return Expr::apply(Op::sinh, {a}); }
inline Expr cosh(const Expr &a) { return Expr::apply(Op::cosh, {a}); }
inline Expr sqrt(const Expr &a) { return Expr::apply(Op::sqrt, {a}); }

inline Expr Expr::rebuild(Op op, std::vector<Expr> args) {
  switch (op) {
  case Op::add:
    return args[0] + args[1];
  case Op::sub:
    return args[0] - args[1];
  case Op::mul:
    return args[0] * args[1];
  case Op::neg:
    return -args[0];
  default:
    return apply(op, std::move(args));
  }
}

/// A vector-valued holomorphic program: C^arity -> C^outputs.
///
/// Charts use the parameter domain (u, v); implicit residuals and other
/// functions of the ambient point use coordinates z1..zn.
class Program {
public:
  Program() = default;
  Program(VarDomain domain, int arity, std::vector<Expr> outputs)
      : domain_(domain), arity_(arity), outputs_(std::move(outputs)) {
    if (outputs_.empty())
      throw Error("program has no outputs");
    const VarDomain other =
        domain_ == VarDomain::parameters ? VarDomain::coordinates : VarDomain::parameters;
    for (const auto &e : outputs_) {
      if (e.uses_domain(other))
        throw ParseError(domain_ == VarDomain::parameters
                             ? "chart program may only use variables u and v"
                             : "coordinate program may only use variables z1..zn");
      if (e.arity() > arity_)
        throw ParseError("program uses a variable beyond its arity " + std::to_string(arity_));
    }
  }

  /// A chart C^2 -> C^n in the parameters u, v.
  static Program chart(std::vector<Expr> outputs) {
    return Program(VarDomain::parameters, 2, std::move(outputs));
  }
  /// A function of the ambient point z in C^n.
  static Program of_coordinates(int n, std::vector<Expr> outputs) {
    return Program(VarDomain::coordinates, n, std::move(outputs));
  }

  VarDomain domain() const noexcept { return domain_; }
  int arity() const noexcept { return arity_; }
  std::size_t output_count() const noexcept { return outputs_.size(); }
  const std::vector<Expr> &outputs() const noexcept { return outputs_; }
  const Expr &output(std::size_t k) const { return outputs_.at(k); }

  template <typename T> std::vector<T> eval(std::span<const T> inputs) const {
    if (static_cast<int>(inputs.size()) != arity_)
      throw DimensionMismatch("program expects " + std::to_string(arity_) + " inputs, got " +
                              std::to_string(inputs.size()));
    std::vector<T> out;
    out.reserve(outputs_.size());
    for (const auto &e : outputs_)
      out.push_back(e.eval<T>(inputs));
    return out;
  }

  CVec value(std::span<const Complex> inputs) const {
    const auto vals = eval<Complex>(inputs);
    CVec v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k)
      v(static_cast<Eigen::Index>(k)) = vals[k];
    return v;
  }

  CVec value(Complex u, Complex v) const {
    const Complex in[2] = {u, v};
    return value(std::span<const Complex>(in, 2));
  }

private:
  VarDomain domain_ = VarDomain::parameters;
  int arity_ = 2;
  std::vector<Expr> outputs_;
};

using ChartProgram = Program;

/// Jets of every chart output at (u0, v0).
inline std::vector<Jet2> jet_eval(const Program &program, Complex u0, Complex v0) {
  if (program.domain() != VarDomain::parameters || program.arity() != 2)
    throw Error("jet_eval needs a two-parameter chart program");
  const Jet2 in[2] = {Jet2::variable_u(u0), Jet2::variable_v(v0)};
  return program.eval<Jet2>(std::span<const Jet2>(in, 2));
}

// JSON ------------------------------------------------------------------------

inline nlohmann::json complex_to_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const nlohmann::json &j) {
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex number must be [re, im], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json cvec_to_json(const CVec &v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k)
    a.push_back(complex_to_json(v(k)));
  return a;
}

inline CVec cvec_from_json(const nlohmann::json &j) {
  if (!j.is_array())
    throw ParseError("complex vector must be an array");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
  if (!all_finite(v))
    throw ParseError("complex vector has non-finite entries");
  return v;
}

inline nlohmann::json to_json(const Expr &e) {
  const auto &n = e.node();
  if (n.op == Op::constant)
    return {{"const", complex_to_json(n.value)}};
  if (n.op == Op::variable)
    return {{"var", n.name}};
  auto args = nlohmann::json::array();
  for (const auto &a : n.args)
    args.push_back(to_json(a));
  return {{"op", op_name(n.op)}, {"args", std::move(args)}};
}

inline Expr expr_from_json(const nlohmann::json &j) {
  if (!j.is_object())
    throw ParseError("expression node must be an object: " + j.dump());
  if (j.contains("const"))
    return Expr(complex_from_json(j.at("const")));
  if (j.contains("var")) {
    if (!j.at("var").is_string())
      throw ParseError("var must be a string");
    return Expr::variable(j.at("var").get<std::string>());
  }
  if (!j.contains("op") || !j.at("op").is_string())
    throw ParseError("expression node needs 'op', 'const' or 'var': " + j.dump());
  static const std::map<std::string, Op> ops = {
      {"add", Op::add},   {"sub", Op::sub},   {"mul", Op::mul}, {"div", Op::div},
      {"neg", Op::neg},   {"pow", Op::pow},   {"exp", Op::exp}, {"log", Op::log},
      {"sin", Op::sin},   {"cos", Op::cos},   {"sinh", Op::sinh}, {"cosh", Op::cosh},
      {"sqrt", Op::sqrt},
  };
  const auto name = j.at("op").get<std::string>();
  const auto it = ops.find(name);
  if (it == ops.end()) {
    if (name == "conj" || name == "abs" || name == "re" || name == "im" || name == "arg")
      throw ParseError("operation '" + name + "' is not holomorphic");
    throw ParseError("unknown operation '" + name + "'");
  }
  const auto &args = j.contains("args") ? j.at("args") : nlohmann::json::array();
  if (!args.is_array() || static_cast<int>(args.size()) != op_arity(it->second))
    throw ParseError("operation '" + name + "' expects " + std::to_string(op_arity(it->second)) +
                     " argument(s)");
  std::vector<Expr> parsed;
  for (const auto &a : args)
    parsed.push_back(expr_from_json(a));
  return Expr::apply(it->second, std::move(parsed));
}

inline nlohmann::json to_json(const Program &p) {
  auto outs = nlohmann::json::array();
  for (const auto &e : p.outputs())
    outs.push_back(to_json(e));
  return outs;
}

inline Program program_from_json(const nlohmann::json &j, VarDomain domain, int arity) {
  if (!j.is_array())
    throw ParseError("program must be an array of expressions");
  std::vector<Expr> outs;
  for (const auto &e : j)
    outs.push_back(expr_from_json(e));
  return Program(domain, arity, std::move(outs));
}

} // namespace wickforge
