#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "herglotz/functional.hpp"
#include "herglotz/grid.hpp"
#include "herglotz/multipliers.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

// nodes closer than this to a, b or a break use one-sided stencils somewhere in the
// nested differentiation; they are reported but kept out of the sup-norms
constexpr int kFlagRadius = 10;

struct ResidualBlock {
  std::string name;
  int width = 1;
  std::vector<int> nodes;
  std::vector<double> values;  // node-major, `width` entries per node
  std::vector<char> flagged;

  double value(std::size_t row, int col) const { return values[row * static_cast<std::size_t>(width) + col]; }
  double sup() const;      // unflagged nodes
  double sup_all() const;  // every node
  bool empty() const noexcept { return nodes.empty(); }
};

struct ResidualNorms {
  double el1 = 0.0, el2 = 0.0, tc = 0.0, dbr = 0.0;
};

struct ResidualReport {
  Grid grid;
  ResidualBlock el1;  // [a, b - tau], left limit at b - tau
  ResidualBlock el2;  // [b - tau, b], right limit at b - tau; empty when tau = 0
  std::vector<std::vector<double>> tc;  // tc[k-1][c]
  ResidualBlock dbr;
  ResidualNorms norms;     // unflagged sup-norms
  ResidualNorms norms_all;  // including flagged nodes

  double el() const noexcept { return std::max(norms.el1, norms.el2); }
};

// el1 and el2 blocks (tc and dbr left empty).
ResidualReport el_residual(const StateTrajectory& traj, const MultiplierSet& mult);
ResidualReport el_residual(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev);

// -phi_k(b) for k = 1..n, each of dimension m.
std::vector<std::vector<double>> transversality_residual(const StateTrajectory& traj, const MultiplierSet& mult);

// d/dt(sum_k phi_k x^(k) + psi L) - psi dL/dt, per node.
ResidualBlock dbr_residual(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev);

// sum_k phi_k . x^(k) + psi L per node (right limits at breaks).
NodeSeries dbr_inner(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev);

ResidualReport residual_report(const StateTrajectory& traj, const MultiplierSet& mult);
ResidualReport residual_report(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev);

double drift(std::span<const double> values);

// t, block, r1..rm (dbr uses r1) and a trailing '#' summary line.
void write_residual_csv(std::ostream& out, const ResidualReport& report);

}  // namespace herglotz
