#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqtrace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A function could not be evaluated at the requested point (outside its
// domain, or it produced a non-finite value).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Index index)
      : std::runtime_error(what), index_(index) {}

  /// Offending coordinate, or -1 when the failure is not tied to one.
  Index index() const noexcept { return index_; }

 private:
  Index index_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergenceError : public std::runtime_error {
 public:
  NoConvergenceError(const std::string& what, double best_residual, int attempts)
      : std::runtime_error(what), best_residual_(best_residual), attempts_(attempts) {}

  double best_residual() const noexcept { return best_residual_; }
  int attempts() const noexcept { return attempts_; }

 private:
  double best_residual_;
  int attempts_;
};

// Invalid economy or model-file data.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqtrace
