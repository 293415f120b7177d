#pragma once

#include <stdexcept>
#include <string>

namespace wickforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// Gram-Schmidt met a residual with g(r, r) ~ 0.
class NullVectorEncountered : public Error {
public:
  using Error::Error;
};

/// Jet evaluation hit a pole or a branch cut. `node` names the offending expression.
class SingularEvaluation : public Error {
public:
  SingularEvaluation(const std::string &reason, std::string node)
      : Error(node.empty() ? reason : reason + " at node " + node), reason_(reason),
        node_(std::move(node)) {}
  const std::string &reason() const noexcept { return reason_; }
  const std::string &node() const noexcept { return node_; }

private:
  std::string reason_;
  std::string node_;
};

class DegeneratePoint : public Error {
public:
  using Error::Error;
};

class DegeneratePlane : public Error {
public:
  using Error::Error;
};

class PointNotOnAmbient : public Error {
public:
  using Error::Error;
};

class NotInSlice : public Error {
public:
  using Error::Error;
};

class TransferViolation : public Error {
public:
  TransferViolation(const std::string &what, double source_residual, double target_residual)
      : Error(what), source(source_residual), target(target_residual) {}
  double source;
  double target;
};

class UnknownEntry : public Error {
public:
  using Error::Error;
};

/// Mesh export requested for an entry that has no real slice.
class ComplexEntry : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace wickforge
