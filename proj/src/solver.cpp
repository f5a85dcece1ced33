#include "herglotz/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "herglotz/error.hpp"
#include "herglotz/functional.hpp"

namespace herglotz {

std::vector<double> root_residual(const StateTrajectory& traj) {
  const Grid& g = traj.grid();
  const ProblemSpec& p = traj.problem();
  const int n = traj.order(), m = traj.dimension();
  const SimulationReport sim = simulate_z(traj);
  const StateTrajectory& x = sim.trajectory;
  const PsiSeries psi = compute_psi(x);
  const auto summands = costate_summands(x, psi, evaluate_at_nodes(x));

  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(m * g.intervals()));
  for (int c = 0; c < m; ++c) {
    std::vector<double> phi(static_cast<std::size_t>(g.nodes()), 0.0);
    for (int k = 0; k < n; ++k) {
      const NodeSeries& gk = summands[static_cast<std::size_t>(k * m + c)];
      NodeSeries f(g.nodes());
      for (int i = 0; i < g.nodes(); ++i)
        for (Side side : {Side::left, Side::right}) f.set(i, side, phi[i] + gk.at(i, side));
      phi = integrate_to_end(f, g);
    }
    const NodeSeries& gn = summands[static_cast<std::size_t>(n * m + c)];
    for (const auto& seg : g.segments())
      for (int i = seg.first + 1; i <= seg.last - (n - 1); ++i)
        r.push_back(phi[i] + gn.at(i, i == seg.last ? Side::left : Side::right));
    for (int k = 1; k < n; ++k) r.push_back(x.x(c, k).right(0) - history_derivative(p, c, k, g.a()));
    for (int b : g.breaks())
      if (b > 0 && b < g.intervals())
        for (int k = 1; k < n; ++k) r.push_back(x.x(c, k).left(b) - x.x(c, k).right(b));
  }
  return r;
}

namespace {

class Unknowns {
 public:
  Unknowns(std::shared_ptr<const ProblemSpec> problem, Grid grid)
      : problem_(std::move(problem)), grid_(std::move(grid)), m_(problem_->dimension()) {}

  int size() const { return m_ * grid_.intervals(); }

  StateTrajectory trajectory(const Eigen::VectorXd& U) const {
    const int M = grid_.intervals();
    std::vector<std::vector<double>> pos(static_cast<std::size_t>(m_), std::vector<double>(M + 1));
    for (int c = 0; c < m_; ++c) {
      pos[c][0] = history_derivative(*problem_, c, 0, grid_.a());
      for (int i = 1; i <= M; ++i) pos[c][i] = U[c * M + i - 1];
    }
    return trajectory_from_positions(problem_, grid_, pos);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& U) const {
    const auto r = root_residual(trajectory(U));
    if (static_cast<int>(r.size()) != size()) throw NumericError("root system is not square");
    return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  }

 private:
  std::shared_ptr<const ProblemSpec> problem_;
  Grid grid_;
  int m_;
};

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SolveResult solve_extremal(std::shared_ptr<const ProblemSpec> problem, const SolveOptions& opts,
                           const std::optional<StateTrajectory>& guess) {
  std::vector<std::string> issues;
  if (opts.intervals < 1) issues.push_back("solver: intervals must be at least 1");
  if (!(opts.tol_residual > 0.0)) issues.push_back("solver: tol must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) issues.push_back("solver: damping must lie in (0, 1]");
  if (opts.max_iters < 1) issues.push_back("solver: max_iters must be at least 1");
  if (!(opts.jacobian_fd_step > 0.0)) issues.push_back("solver: jacobian step must be positive");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  const ProblemSpec& p = *problem;
  const int n = p.order(), m = p.dimension();
  const Grid grid = Grid::make(p.a, p.b, p.tau, opts.intervals, n);
  const int M = grid.intervals();
  const Unknowns sys(problem, grid);

  Eigen::VectorXd U(sys.size());
  for (int c = 0; c < m; ++c)
    for (int i = 1; i <= M; ++i) {
      const double t = grid.node(i);
      double v = 0.0;
      if (guess) {
        v = interpolate(*guess, std::min(t, guess->grid().b()), c, 0);
      } else {
        double term = 1.0;
        for (int k = 0; k <= n; ++k) {
          v += history_derivative(p, c, k, p.a) * term;
          term *= (t - p.a) / (k + 1);
        }
      }
      U[c * M + i - 1] = v;
    }

  std::vector<IterationRecord> log;
  Eigen::VectorXd R = sys.residual(U);
  double norm = sup(R);
  log.push_back({0, norm, 0.0, 0.0});
  double lambda = opts.damping;

  // keep going past tol_residual: the differential residual report sees the root error
  // through up to 2n stencil derivatives, so the root system is driven to its noise floor
  for (int it = 1; it <= opts.max_iters; ++it) {
    Eigen::MatrixXd J(sys.size(), sys.size());
    for (int j = 0; j < sys.size(); ++j) {
      const double step = opts.jacobian_fd_step * (1.0 + std::abs(U[j]));
      Eigen::VectorXd Uj = U;
      Uj[j] += step;
      J.col(j) = (sys.residual(Uj) - R) / step;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) throw SingularJacobian(rcond);
    const Eigen::VectorXd delta = lu.solve(R);

    bool accepted = false;
    double applied = 0.0;
    for (int tries = 0; tries < 30; ++tries) {
      const Eigen::VectorXd trial = U - lambda * delta;
      Eigen::VectorXd Rt;
      bool finite = true;
      try {
        Rt = sys.residual(trial);
        finite = Rt.allFinite();
      } catch (const NumericError&) {
        finite = false;
      }
      if (finite && sup(Rt) < norm) {
        applied = lambda * sup(delta);
        U = trial;
        R = Rt;
        norm = sup(R);
        accepted = true;
        log.push_back({it, norm, applied, lambda});
        lambda = opts.damping;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    if (applied <= opts.tol_step * (1.0 + sup(U))) break;
  }

  StateTrajectory x = simulate_z(sys.trajectory(U)).trajectory;
  const NodeEvaluation ev = evaluate_at_nodes(x);
  MultiplierSet mult = compute_phi(x, compute_psi(x), ev);
  ResidualReport report = residual_report(x, mult, ev);
  const bool converged =
      norm <= opts.tol_residual && report.el() <= opts.tol_residual && report.norms.tc <= opts.tol_residual;
  return SolveResult{std::move(x), std::move(mult), std::move(report), std::move(log), norm, converged};
}

}  // namespace herglotz
