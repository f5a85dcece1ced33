#include "herglotz/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "herglotz/csv.hpp"
#include "herglotz/error.hpp"

namespace herglotz {

StateTrajectory::StateTrajectory(std::shared_ptr<const ProblemSpec> problem, Grid grid)
    : problem_(std::move(problem)),
      grid_(std::move(grid)),
      n_(problem_->order()),
      m_(problem_->dimension()),
      x_(static_cast<std::size_t>(m_ * (n_ + 1)), NodeSeries(grid_.nodes())) {}

void StateTrajectory::set_z(std::vector<double> z) {
  if (static_cast<int>(z.size()) != grid_.nodes())
    throw DimensionMismatch("z has " + std::to_string(z.size()) + " samples, grid has " +
                            std::to_string(grid_.nodes()));
  z_ = std::move(z);
}

double max_history_mismatch(const StateTrajectory& traj) {
  const ProblemSpec& p = traj.problem();
  double worst = 0.0;
  for (int c = 0; c < traj.dimension(); ++c)
    for (int k = 0; k < traj.order(); ++k)
      worst = std::max(worst, std::abs(traj.x(c, k).right(0) - history_derivative(p, c, k, p.a)));
  return worst;
}

StateTrajectory trajectory_from_expressions(std::shared_ptr<const ProblemSpec> problem, const Grid& grid,
                                            const std::vector<Expr>& x) {
  const int n = problem->order();
  const int m = problem->dimension();
  if (static_cast<int>(x.size()) != m)
    throw DimensionMismatch("expected " + std::to_string(m) + " candidate components");
  StateTrajectory traj(problem, grid);
  const std::vector<std::string> time_only{"t"};
  for (int c = 0; c < m; ++c) {
    for (const auto& v : free_variables(x[c]))
      if (v != "t") throw ValidationError("candidate x" + std::to_string(c + 1) + " may depend on t only");
    Expr e = x[c];
    for (int k = 0; k <= n; ++k) {
      CompiledExpr f(e, time_only);
      NodeSeries& s = traj.x(c, k);
      for (int i = 0; i < grid.nodes(); ++i) {
        const double t[1] = {grid.node(i)};
        s.set(i, f(t));
      }
      e = differentiate(e, "t");
    }
  }
  const double gap = max_history_mismatch(traj);
  if (!(gap <= 1e-10))
    throw ValidationError("candidate does not match the history at t = a (mismatch " +
                          format_number(gap) + ")");
  return traj;
}

StateTrajectory trajectory_from_positions(std::shared_ptr<const ProblemSpec> problem, const Grid& grid,
                                          const std::vector<std::vector<double>>& positions) {
  const int n = problem->order();
  const int m = problem->dimension();
  if (static_cast<int>(positions.size()) != m)
    throw DimensionMismatch("expected " + std::to_string(m) + " position series");
  StateTrajectory traj(problem, grid);
  for (int c = 0; c < m; ++c) {
    if (static_cast<int>(positions[c].size()) != grid.nodes())
      throw DimensionMismatch("position series length does not match the grid");
    NodeSeries& x0 = traj.x(c, 0);
    for (int i = 0; i < grid.nodes(); ++i) x0.set(i, positions[c][i]);
    for (int k = 1; k <= n; ++k) traj.x(c, k) = differentiate(traj.x(c, k - 1), grid, 1);
  }
  return traj;
}

StateTrajectory perturb(const StateTrajectory& traj, const std::vector<Expr>& direction, double eps) {
  StateTrajectory out = traj;
  out.clear_z();
  const Grid& g = traj.grid();
  const std::vector<std::string> time_only{"t"};
  for (int c = 0; c < traj.dimension(); ++c) {
    Expr e = direction.at(c);
    for (int k = 0; k <= traj.order(); ++k) {
      CompiledExpr f(e, time_only);
      NodeSeries& s = out.x(c, k);
      for (int i = 0; i < g.nodes(); ++i) {
        const double t[1] = {g.node(i)};
        const double dv = eps * f(t);
        s.set(i, Side::left, s.left(i) + dv);
        s.set(i, Side::right, s.right(i) + dv);
      }
      e = differentiate(e, "t");
    }
  }
  return out;
}

double eval_slot(const StateTrajectory& traj, int i, int component, int k, bool delayed, Side side) {
  const Grid& g = traj.grid();
  const int p = g.delay_steps();
  // a and b are one-sided by nature; this matters for the delayed lookup at b
  if (i == 0) side = Side::right;
  if (i == g.intervals()) side = Side::left;
  if (!delayed || p == 0) return traj.x(component, k).at(i, side);
  const int d = i - p;
  if (d < 0) return history_derivative(traj.problem(), component, k, g.a() + d * g.h());
  // arriving at a from the left means the history side of the junction with x
  if (d == 0 && side == Side::left) return history_derivative(traj.problem(), component, k, g.a());
  return traj.x(component, k).at(d, side);
}

double interpolate(const StateTrajectory& traj, double t, int component, int k) {
  const Grid& g = traj.grid();
  const ProblemSpec& p = traj.problem();
  const double tol = 1e-12 * std::max({1.0, std::abs(g.a()), std::abs(g.b())});
  if (t < g.a()) {
    if (t < g.a() - p.tau - tol) throw OutOfRange("interpolation time below a - tau");
    return history_derivative(p, component, k, std::max(t, g.a() - p.tau));
  }
  if (t > g.b() + tol) throw OutOfRange("interpolation time beyond b");

  const int M = g.intervals();
  const double u = (t - g.a()) / g.h();
  int i = std::clamp(static_cast<int>(std::floor(u)), 0, M - 1);
  const double theta = u - i;
  const NodeSeries& f = traj.x(component, k);
  if (theta <= 0.0) return f.right(i);
  if (theta >= 1.0) return f.left(i + 1);

  if (k < traj.order()) {
    const NodeSeries& df = traj.x(component, k + 1);
    const double h = g.h();
    const double th2 = theta * theta, th3 = th2 * theta;
    const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + theta;
    const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
    return h00 * f.right(i) + h10 * h * df.right(i) + h01 * f.left(i + 1) + h11 * h * df.left(i + 1);
  }

  // top derivative: cubic through four nodes of the same segment
  const auto& seg = g.segment_of_interval(i);
  const int s = std::clamp(i - 1, seg.first, seg.last - 3);
  double y[4];
  for (int q = 0; q < 4; ++q) {
    const int node = s + q;
    y[q] = node == seg.first ? f.right(node) : node == seg.last ? f.left(node) : f[node];
  }
  const double x = u - s;  // position in units of h from node s
  double result = 0.0;
  for (int q = 0; q < 4; ++q) {
    double w = 1.0;
    for (int r = 0; r < 4; ++r)
      if (r != q) w *= (x - r) / (q - r);
    result += w * y[q];
  }
  return result;
}

void node_slots(const StateTrajectory& traj, int i, Side side, std::span<double> slots) {
  const SlotLayout& L = traj.problem().layout();
  if (i == traj.grid().intervals()) side = Side::left;
  slots[SlotLayout::time] = traj.grid().node(i);
  slots[SlotLayout::value] = traj.has_z() ? traj.z()[i] : 0.0;
  for (int c = 0; c < traj.dimension(); ++c)
    for (int k = 0; k <= traj.order(); ++k) {
      slots[L.state(c, k)] = traj.x(c, k).at(i, side);
      slots[L.delayed(c, k)] = eval_slot(traj, i, c, k, true, side);
    }
}

void interpolated_slots(const StateTrajectory& traj, double t, std::span<double> slots) {
  const SlotLayout& L = traj.problem().layout();
  const double lag = traj.grid().tau();
  slots[SlotLayout::time] = t;
  for (int c = 0; c < traj.dimension(); ++c)
    for (int k = 0; k <= traj.order(); ++k) {
      const double now = interpolate(traj, t, c, k);
      slots[L.state(c, k)] = now;
      slots[L.delayed(c, k)] = lag == 0.0 ? now : interpolate(traj, t - lag, c, k);
    }
}

// ---- CSV ----

namespace {

std::vector<std::string> trajectory_columns(int n, int m) {
  std::vector<std::string> cols{"t"};
  for (int c = 1; c <= m; ++c)
    for (int k = 0; k <= n; ++k) cols.push_back("x" + std::to_string(c) + "_d" + std::to_string(k));
  cols.push_back("z");
  return cols;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const StateTrajectory& traj) {
  if (!traj.has_z()) throw InputError("trajectory has no z samples to write");
  const int n = traj.order(), m = traj.dimension();
  write_csv_header(out, trajectory_columns(n, m));
  std::vector<double> row;
  for (int i = 0; i < traj.grid().nodes(); ++i) {
    row.clear();
    row.push_back(traj.grid().node(i));
    for (int c = 0; c < m; ++c)
      for (int k = 0; k <= n; ++k) row.push_back(traj.x(c, k)[i]);
    row.push_back(traj.z()[i]);
    write_csv_row(out, row);
  }
}

StateTrajectory read_trajectory_csv(std::istream& in, std::shared_ptr<const ProblemSpec> problem,
                                    DerivativeSource source) {
  const ProblemSpec& p = *problem;
  const int n = p.order(), m = p.dimension();
  CsvTable table = read_csv(in);
  const auto expected = trajectory_columns(n, m);
  if (table.header != expected) {
    std::string want;
    for (const auto& s : expected) want += (want.empty() ? "" : ",") + s;
    throw ValidationError("trajectory csv: header must be " + want);
  }
  if (table.rows.size() < 2) throw ValidationError("trajectory csv: need at least two rows");
  const int M = static_cast<int>(table.rows.size()) - 1;
  Grid grid = Grid::with_intervals(p.a, p.b, p.tau, M);
  for (int i = 0; i <= M; ++i)
    if (std::abs(table.rows[i][0] - grid.node(i)) > 1e-9 * (p.b - p.a))
      throw ValidationError("trajectory csv: row " + std::to_string(i + 1) + " is not on the uniform grid");

  std::vector<double> z(static_cast<std::size_t>(M + 1));
  for (int i = 0; i <= M; ++i) z[i] = table.rows[i].back();
  if (std::abs(z[0] - p.gamma) > 1e-12 * std::max(1.0, std::abs(p.gamma)))
    throw ValidationError("trajectory csv: z(a) = " + format_number(z[0]) + " but gamma = " +
                          format_number(p.gamma));

  auto column = [&](int c, int k) { return static_cast<std::size_t>(1 + c * (n + 1) + k); };
  StateTrajectory traj = [&] {
    if (source == DerivativeSource::rebuild) {
      std::vector<std::vector<double>> pos(static_cast<std::size_t>(m));
      for (int c = 0; c < m; ++c)
        for (const auto& row : table.rows) pos[c].push_back(row[column(c, 0)]);
      return trajectory_from_positions(problem, grid, pos);
    }
    StateTrajectory t(problem, grid);
    for (int c = 0; c < m; ++c)
      for (int k = 0; k <= n; ++k)
        for (int i = 0; i <= M; ++i) t.x(c, k).set(i, table.rows[i][column(c, k)]);
    return t;
  }();
  traj.set_z(std::move(z));
  return traj;
}

}  // namespace herglotz
