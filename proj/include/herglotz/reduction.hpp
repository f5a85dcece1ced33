#pragma once

#include <string>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/multipliers.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/spec_file.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

// The delayed problem rewritten on [0, tau] with N stacked copies of the state.
// Stage i holds x^(k)(a + t + (i-1) tau); stage 0 is the history.
struct ReducedProblem {
  double origin = 0.0;  // a of the delayed problem
  double tau = 0.0;
  int N = 1;
  int n = 1;
  int m = 1;
  double gamma = 0.0;
  // stage N lives on [0, cut]; cut == tau unless the interval was padded
  double cut = 0.0;
  bool padded = false;
  std::vector<Expr> lagrangians;        // L_1..L_N over stacked_slots()
  std::vector<std::vector<Expr>> initial;  // [c][k]: x^{k;0}(t) = mu_c^(k)(a + t - tau), k = 0..n

  // t, then x{k}_{i}[_{c}] for i = 0..N, c, k = 0..n, then z1..zN
  std::vector<std::string> stacked_slots() const;
};

// x{k}_{i} for one component, x{k}_{i}_{c} (c 1-based) otherwise.
std::string stacked_name(int k, int stage, int component, int m);
std::string stacked_value_name(int stage);

// Throws ZeroDelay for tau <= 0.
ReducedProblem reduce_delay(const ProblemSpec& p);

// Spec file form: [reduced], [lagrangian] L1..LN, [coupling], [initial].
SpecDocument reduced_document(const ReducedProblem& rp);
ReducedProblem reduced_from_document(const SpecDocument& doc);

// Samples of every stage on the local grid q = 0..p, t = q h.  Stage N past the cut is 0.
struct StackedTrajectory {
  int N = 1, n = 1, m = 1, p = 1;
  double h = 0.0;
  int last_steps = 1;
  std::vector<std::vector<double>> x;  // [(i * m + c) * (n + 1) + k][q], i = 0..N
  std::vector<std::vector<double>> z;  // [j - 1][q], j = 1..N

  const std::vector<double>& state(int stage, int c, int k) const {
    return x[static_cast<std::size_t>((stage * m + c) * (n + 1) + k)];
  }
  std::vector<double>& state(int stage, int c, int k) {
    return x[static_cast<std::size_t>((stage * m + c) * (n + 1) + k)];
  }
  int steps(int stage) const noexcept { return stage == N ? last_steps : p; }
};

// Change of variables applied to a delayed trajectory.  Stage boundaries take the
// one-sided limit that belongs to the stage; z is copied when present.
StackedTrajectory stack_trajectory(const ReducedProblem& rp, const StateTrajectory& traj);

// Inverse map back to node samples x[c * (n + 1) + k][i] and z[i] on the delayed grid.
struct UnstackedSamples {
  std::vector<std::vector<double>> x;
  std::vector<double> z;
};
UnstackedSamples unstack(const StackedTrajectory& st);

struct ReductionReport {
  double objective_defect = 0.0;  // |z_N(cut) - z(b)|
  double coupling_defect = 0.0;   // sup |x^{k;i}(0) - x^{k;i-1}(tau)|, k < n
  StackedTrajectory stacked;      // with z from the stacked simulation
};

// Marches z_1..z_N forward through the coupling conditions and compares with the
// delayed simulation of the same trajectory.
ReductionReport verify_reduction_equivalence(const ProblemSpec& p, const StateTrajectory& traj);

// psi_j on each stage from dL_j/dz_j, chained through psi_j(tau) = psi_{j+1}(0).
std::vector<std::vector<double>> reduced_psi(const ReducedProblem& rp, const StackedTrajectory& st);

struct StackedMultipliers {
  std::vector<std::vector<double>> psi;  // [j - 1][q]
  std::vector<std::vector<double>> phi;  // [((l - 1) * (N + 1) + i) * m + c][q], l = 1..n, i = 0..N
};

// Delayed psi and phi read at t + (i-1) tau; stage 0 uses the costate on [a - tau, a].
StackedMultipliers stack_multipliers(const ReducedProblem& rp, const StateTrajectory& traj,
                                     const MultiplierSet& mult);

struct ReducedHamiltonian {
  std::vector<double> H;
  std::vector<double> explicit_time;  // dH/dt at frozen states: sum_j psi_j dL_j/dt
};

ReducedHamiltonian reduced_hamiltonian(const ReducedProblem& rp, const StackedTrajectory& st,
                                       const StackedMultipliers& mult);

}  // namespace herglotz
