#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fbe/geometry.hpp"
#include "fbe/grid.hpp"
#include "fbe/pressure.hpp"
#include "fbe/state.hpp"

namespace fbe {

struct PressureOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

/// Discretization, cutoff, parameters and pressure solver bundled for one
/// grid. Not copyable; everything else takes it by reference.
class Model {
 public:
  Model(const Grid& grid, Params params, PressureOptions pressure = {});
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const Discretization& disc() const { return *disc_; }
  const Cutoff& chi() const { return chi_; }
  const Params& params() const { return params_; }
  const PressureSolver& solver() const { return *solver_; }
  const PressureOptions& pressure() const { return pressure_; }
  GeometryOptions geometry_options;

  FlattenedGeometry geometry(const SurfaceField& psi, const SurfaceField& dtpsi) const {
    return build_geometry(*disc_, chi_, psi, dtpsi, geometry_options);
  }

 private:
  std::unique_ptr<Discretization> disc_;
  Cutoff chi_;
  Params params_;
  PressureOptions pressure_;
  std::unique_ptr<PressureSolver> solver_;
};

/// Everything the right-hand side treats as given. For the nonlinear system
/// all of it comes from the state itself; for the linearized (Picard) system
/// it comes from a frozen basic state.
struct Coefficients {
  FlattenedGeometry geo;            // phi with its time derivatives
  std::array<VolumeField, 2> vbar;  // horizontal transport velocity
  VolumeField V;                    // vertical transport speed
  TensorField frak;                 // columns used in (frak_k . grad^phi)
  std::array<SurfaceField, 2> kin_dpsi;  // grad psi of the normal in the kinematic condition
  SurfaceField sigma_H;             // sigma * H of the curvature term
};

/// Kinematic tendency P(v.N) of a state with the given surface gradient.
SurfaceField kinematic_rate(const Discretization& disc, const VectorField& v, const std::array<SurfaceField, 2>& dpsi);

Coefficients nonlinear_coefficients(const Model& model, const State& s);

struct Tendency {
  VectorField dv;
  TensorField dF;
  SurfaceField dpsi;
  double ddissipation = 0.0;
  VolumeField q;
  int pressure_iterations = 0;
  double pressure_residual = 0.0;
  double consistency_residual = 0.0;  // only with EvalOptions::consistency
};

struct EvalOptions {
  bool consistency = false;
  const VolumeField* q_guess = nullptr;
};

/// Right-hand side of the system with the given coefficients.
Tendency evaluate(const Model& model, const State& s, const Coefficients& c, EvalOptions opt = {});

/// Nonlinear right-hand side.
Tendency rhs(const Model& model, const State& s, EvalOptions opt = {});

using CoefficientFn = std::function<Coefficients(const State&)>;

/// Classical RK4 on (v, F, psi, dissipation) with one pressure solve per
/// stage. Keeps the tendency of the state it last returned so the next step
/// starts from it.
class Stepper {
 public:
  explicit Stepper(const Model& model, CoefficientFn coefficients = {});

  State step(const State& s, double dt);
  /// Tendency at `s`, from the cache when `s` is the last returned state.
  const Tendency& tendency_at(const State& s);

 private:
  Tendency eval(const State& s, const VolumeField* guess);
  const Model& model_;
  CoefficientFn coeffs_;
  std::optional<State> cached_state_;
  std::optional<Tendency> cached_;
};

/// Single step without caching.
State step_rk4(const Model& model, const State& s, double dt);

/// safety * min(dx/(max|v| + max_j|F_j|), sqrt(dx^3/(2 pi sigma)), kappa guard).
double cfl_dt(const Model& model, const State& s, double safety);

struct DiagRow {
  double t = 0.0;
  double E0 = 0.0;
  double E4 = 0.0;
  double r_divv = 0.0;
  double r_divF = 0.0;
  double r_FN = 0.0;
  double min_d3phi = 0.0;
  double dt = 0.0;
};

struct RunConfig {
  int nx = 16;
  int ny = 16;
  int nz = 17;
  Params params;
  double T = 0.1;
  double safety = 0.5;
  int cadence = 10;
  std::optional<double> dt;  // fixed step; the last step is shortened to land on T
  PressureOptions pressure;
  InitialData init;
  std::string output_dir;  // empty: no files
  bool snapshots = true;
  unsigned seed = 0;
};

struct RunResult {
  std::vector<DiagRow> rows;
  State final_state;
  State initial_state;
  bool breakdown = false;
  std::string cause;
  double breakdown_time = 0.0;
  int steps = 0;
};

using StepObserver = std::function<void(const State&, const Tendency&)>;

/// Integrates to T or breakdown. The observer sees every accepted state
/// (including the initial one) with its tendency.
RunResult run(const RunConfig& config, const StepObserver& observer = {});
RunResult run(const Model& model, const RunConfig& config, const StepObserver& observer = {});

void write_diag_csv(const std::string& path, const std::vector<DiagRow>& rows);

}  // namespace fbe
