#pragma once

#include <stdexcept>
#include <string>

namespace nbl {

// Domain construction rejected the input (non-positive lengths, angle out of
// range, width not bounded away from zero, collinear spanning vectors, ...).
class DegenerateDomain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A coefficient matrix failed the positivity certificate at some grid point.
class NotSPD : public std::runtime_error {
 public:
  NotSPD(const std::string& what, double s, double t)
      : std::runtime_error(what), s_(s), t_(t) {}
  double s() const { return s_; }
  double t() const { return t_; }

 private:
  double s_ = 0.0, t_ = 0.0;
};

// An operation that requires constant width was handed a genuine strip.
class NotConstantWidth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The eigenvalue solver could not reach the requested residual tolerance.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No certificate case applies to a normalized parallelogram.  The three
// cases are designed to cover the whole normalized family, so this firing
// means a programming error rather than a data error.
class CoverageGap : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nbl
