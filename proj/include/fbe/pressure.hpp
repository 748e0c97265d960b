#pragma once

#include <map>
#include <optional>

#include <Eigen/Dense>

#include "fbe/geometry.hpp"
#include "fbe/grid.hpp"

namespace fbe {

/// div^phi grad^phi q = rhs in the interior, d3^phi q = bottom_neumann on
/// the bottom row, q = top_dirichlet on the top row.
struct PressureProblem {
  const FlattenedGeometry* geom = nullptr;
  VolumeField rhs;  // boundary rows ignored
  SurfaceField top_dirichlet;
  SurfaceField bottom_neumann;
  double tol = 1e-10;
  int max_iter = 500;
};

struct PressureResult {
  VolumeField q;
  double residual = 0.0;  // ||b - A q||_2 / ||b||_2
  int iterations = 0;
};

/// Right-preconditioned restarted GMRES with the flat Laplacian, inverted
/// mode by mode, as preconditioner.
class PressureSolver {
 public:
  explicit PressureSolver(const Discretization& disc, int restart = 40);

  PressureResult solve(const PressureProblem& problem, const VolumeField* initial_guess = nullptr) const;

  /// The discrete operator, boundary rows included.
  VolumeField apply(const FlattenedGeometry& geo, const VolumeField& q) const;
  /// Flat operator inverse.
  VolumeField precondition(const VolumeField& r) const;
  /// Right-hand side vector with boundary data written into the boundary rows.
  VolumeField assemble(const PressureProblem& problem) const;

  const Discretization& disc() const { return disc_; }

 private:
  const Discretization& disc_;
  int restart_;
  std::vector<int> mode_key_;  // per half-spectrum mode, index into inverses_
  std::vector<Eigen::MatrixXd> inverses_;
};

}  // namespace fbe
