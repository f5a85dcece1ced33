#pragma once

#include <iosfwd>
#include <vector>

#include "herglotz/functional.hpp"
#include "herglotz/grid.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

struct MultiplierSet {
  PsiSeries psi;
  int n = 0;
  int m = 0;
  std::vector<NodeSeries> phi;  // (k - 1) * m + c, k = 1..n

  const NodeSeries& at(int k, int component) const {
    return phi[static_cast<std::size_t>((k - 1) * m + component)];
  }
};

// g_l,c(t) = psi(t) dL/dx_c^(l)(t) + psi(t + tau) dL/dx_tau,c^(l)(t + tau), the second term
// dropped for t > b - tau (and on the right side of b - tau itself).
// Index l * m + c, l = 0..n.
std::vector<NodeSeries> costate_summands(const StateTrajectory& traj, const PsiSeries& psi,
                                         const NodeEvaluation& ev);

MultiplierSet compute_phi(const StateTrajectory& traj, const PsiSeries& psi);
MultiplierSet compute_phi(const StateTrajectory& traj, const PsiSeries& psi, const NodeEvaluation& ev);

// phi_k on [a - tau, a] from the delayed term alone.  Entry [(k-1) m + c][j] belongs to
// time a - tau + j h, j = 0..p.
std::vector<std::vector<double>> compute_phi_history(const StateTrajectory& traj, const PsiSeries& psi,
                                                     const NodeEvaluation& ev);

// t, psi, phi{k}_{j}
void write_multipliers_csv(std::ostream& out, const StateTrajectory& traj, const MultiplierSet& mult);

}  // namespace herglotz
