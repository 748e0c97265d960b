#pragma once

#include <stdexcept>
#include <string>

namespace fbe {

/// Field sizes do not match the grid they are used with.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The flattening map stopped being a diffeomorphism (min d3phi below floor,
/// or the surface came too close to the bottom).
class DiffeomorphismBreakdown : public std::runtime_error {
 public:
  DiffeomorphismBreakdown(const std::string& what, double min_jacobian)
      : std::runtime_error(what), min_jacobian_(min_jacobian) {}
  double min_jacobian() const { return min_jacobian_; }

 private:
  double min_jacobian_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class ConstraintResidualTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or argument validation failure. `path` names the offending
/// field (e.g. "grid.nx").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InsufficientHistory : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fbe
