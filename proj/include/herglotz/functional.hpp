#pragma once

#include <vector>

#include "herglotz/grid.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

struct SimulationReport {
  StateTrajectory trajectory;
  // sup over nodes of |z' - L| with z' from the segment stencils
  double admissibility_defect = 0.0;
};

// RK4 for z' = L on the trajectory grid, z(a) = gamma.
SimulationReport simulate_z(const StateTrajectory& x);

// psi(t) = exp(integral_t^b dL/dz) on [a, b], and 1 beyond b.
class PsiSeries {
 public:
  PsiSeries() = default;
  explicit PsiSeries(std::vector<double> values) : values_(std::move(values)) {}

  // Grid node index; anything past the last node is the extension value 1.
  double operator[](int i) const { return i < static_cast<int>(values_.size()) ? values_[i] : 1.0; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

PsiSeries compute_psi(const StateTrajectory& traj);

// |psi' + psi dL/dz| per node with psi' from second-order central differences
// (one-sided second order at the ends).  A probe for the adjoint equation whose
// truncation term stays above roundoff at desk-scale steps.
std::vector<double> adjoint_residual(const PsiSeries& psi, const StateTrajectory& traj);

// L and all of its partials at every node, with both limits at break nodes.
struct NodeEvaluation {
  NodeSeries lagrangian;
  std::vector<NodeSeries> partials;  // slot order of the problem layout
};

NodeEvaluation evaluate_at_nodes(const StateTrajectory& traj);

}  // namespace herglotz
