#pragma once

#include <iosfwd>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/functional.hpp"
#include "herglotz/grid.hpp"
#include "herglotz/multipliers.hpp"
#include "herglotz/problem.hpp"
#include "herglotz/spec_file.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

// One-parameter family (t, x, z) -> (T^s, X^s, Z^s) in the variables s, t, x1..xm, z.
struct InvarianceFamily {
  int m = 1;
  Expr time_map;
  std::vector<Expr> state_maps;
  Expr value_map;
  double xi = 0.0;

  // s, t, x1..xm, z
  std::vector<std::string> slots() const;
};

// Parses the maps and checks that s = 0 gives the identity (symbolically, then at random
// points to 1e-12).  Throws ValidationError otherwise.
InvarianceFamily make_family(const FamilyContent& content, int m);

// Generators along a trajectory.  X[k * m + c] for k = 0..n-1.
struct LiftedGenerators {
  NodeSeries T;
  std::vector<NodeSeries> X;
  NodeSeries Z;
};

// T, X_0, Z from d/ds at s = 0; X_k = D X_{k-1} - x^(k) D T by the segment stencils.
// Needs z on the trajectory.
LiftedGenerators lift_generators(const InvarianceFamily& fam, const StateTrajectory& traj);

struct InvarianceDefect {
  double time_scaling = 0.0;  // d/ds of the dT^s/dt condition
  double lagrangian = 0.0;    // d/ds of dZ^s/dt = dT^s/dt L(...)
};

// First-order defects of the two invariance conditions, by central difference in s.
// Below a the state is the history, z = gamma and z' = 0.
InvarianceDefect invariance_defect(const ProblemSpec& p, const StateTrajectory& traj, const InvarianceFamily& fam,
                                   double ds = 1e-4);

struct ChargeSeries {
  std::vector<double> values;
  double drift = 0.0;
};

ChargeSeries noether_charge(const StateTrajectory& traj, const MultiplierSet& mult, const InvarianceFamily& fam);
ChargeSeries noether_charge(const StateTrajectory& traj, const MultiplierSet& mult, const LiftedGenerators& gen,
                            const NodeEvaluation& ev);

// t, charge and a trailing "# drift=" line.
void write_charge_csv(std::ostream& out, const Grid& grid, const ChargeSeries& charge);

}  // namespace herglotz
