#pragma once

#include <optional>
#include <vector>

#include "herglotz/conditions.hpp"
#include "herglotz/multipliers.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

struct SolveOptions {
  int intervals = 1000;  // raised if needed so tau is a whole number of steps
  double damping = 1.0;
  int max_iters = 25;
  double tol_residual = 1e-5;
  double tol_step = 1e-12;
  double jacobian_fd_step = 1e-7;
};

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;  // sup-norm of the root system
  double step = 0.0;      // sup-norm of the applied update
  double damping = 0.0;
};

struct SolveResult {
  StateTrajectory trajectory;  // with z
  MultiplierSet multipliers;
  ResidualReport report;
  std::vector<IterationRecord> log;
  double root_residual = 0.0;
  bool converged = false;
};

// Damped Newton on node positions.  Without a guess the history is continued by its
// Taylor polynomial at a.  Non-convergence is reported through `converged`, not thrown.
SolveResult solve_extremal(std::shared_ptr<const ProblemSpec> problem, const SolveOptions& opts = {},
                           const std::optional<StateTrajectory>& guess = std::nullopt);

// Root system used by the solver, exposed for tests: per component, phi_n + g_n with
// phi built by integrating phi_{k+1}' = -(phi_k + g_k) back from phi(b) = 0, then
// x^(k)(a) = mu^(k)(a) and x^(k) continuity at breaks for k = 1..n-1.
std::vector<double> root_residual(const StateTrajectory& traj);

}  // namespace herglotz
