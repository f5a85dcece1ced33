#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "herglotz/expr.hpp"
#include "herglotz/grid.hpp"
#include "herglotz/problem.hpp"

namespace herglotz {

// Samples of x_c^(k), k = 0..n, on [a, b] plus optionally z.  Below a, delayed lookups go to
// the problem's history.
class StateTrajectory {
 public:
  StateTrajectory(std::shared_ptr<const ProblemSpec> problem, Grid grid);

  const ProblemSpec& problem() const noexcept { return *problem_; }
  std::shared_ptr<const ProblemSpec> problem_ptr() const noexcept { return problem_; }
  const Grid& grid() const noexcept { return grid_; }
  int order() const noexcept { return n_; }
  int dimension() const noexcept { return m_; }

  const NodeSeries& x(int component, int k) const { return x_[index(component, k)]; }
  NodeSeries& x(int component, int k) { return x_[index(component, k)]; }

  bool has_z() const noexcept { return !z_.empty(); }
  const std::vector<double>& z() const noexcept { return z_; }
  void set_z(std::vector<double> z);
  void clear_z() { z_.clear(); }

 private:
  std::size_t index(int c, int k) const { return static_cast<std::size_t>(c * (n_ + 1) + k); }

  std::shared_ptr<const ProblemSpec> problem_;
  Grid grid_;
  int n_;
  int m_;
  std::vector<NodeSeries> x_;
  std::vector<double> z_;
};

// x_c given as expressions in t; derivatives are exact.  Checks continuity with the
// history at a for k < n.
StateTrajectory trajectory_from_expressions(std::shared_ptr<const ProblemSpec> problem, const Grid& grid,
                                            const std::vector<Expr>& x);

// positions[c][i] = x_c(t_i); derivative series rebuilt segment by segment with the stencils.
StateTrajectory trajectory_from_positions(std::shared_ptr<const ProblemSpec> problem, const Grid& grid,
                                          const std::vector<std::vector<double>>& positions);

// x + eps * v with exact derivatives of v added to every series; z is dropped.
StateTrajectory perturb(const StateTrajectory& traj, const std::vector<Expr>& direction, double eps);

double eval_slot(const StateTrajectory& traj, int i, int component, int k, bool delayed,
                 Side side = Side::right);

double interpolate(const StateTrajectory& traj, double t, int component, int k);

// Fills the Lagrangian slot vector at node i (z taken from the trajectory when present).
void node_slots(const StateTrajectory& traj, int i, Side side, std::span<double> slots);
// Same at an arbitrary time inside [a, b]; z slot left untouched.
void interpolated_slots(const StateTrajectory& traj, double t, std::span<double> slots);

[[nodiscard]] double max_history_mismatch(const StateTrajectory& traj);

// CSV: t, x{j}_d{k} for all j,k, z.  17 significant digits.
void write_trajectory_csv(std::ostream& out, const StateTrajectory& traj);

enum class DerivativeSource { rebuild, columns };

// Reads the CSV back against a problem.  With `rebuild`, only the x{j}_d0 columns are used
// and derivatives are recomputed by the stencils, which matches what the solver produces.
StateTrajectory read_trajectory_csv(std::istream& in, std::shared_ptr<const ProblemSpec> problem,
                                    DerivativeSource source = DerivativeSource::rebuild);

}  // namespace herglotz
