#include "herglotz/multipliers.hpp"

#include <ostream>

#include "herglotz/csv.hpp"

namespace herglotz {

std::vector<NodeSeries> costate_summands(const StateTrajectory& traj, const PsiSeries& psi,
                                         const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const SlotLayout& L = traj.problem().layout();
  const int n = traj.order(), m = traj.dimension();
  const int M = g.intervals(), p = g.delay_steps();
  std::vector<NodeSeries> out;
  out.reserve(static_cast<std::size_t>((n + 1) * m));
  for (int l = 0; l <= n; ++l)
    for (int c = 0; c < m; ++c) {
      const NodeSeries& now = ev.partials[L.state(c, l)];
      const NodeSeries& lagged = ev.partials[L.delayed(c, l)];
      NodeSeries s(g.nodes());
      for (int i = 0; i <= M; ++i)
        for (Side side : {Side::left, Side::right}) {
          double v = psi[i] * now.at(i, side);
          if (p == 0) {
            v += psi[i] * lagged.at(i, side);
          } else if (i + p < M || (i + p == M && side == Side::left)) {
            v += psi[i + p] * lagged.at(i + p, side);
          }
          s.set(i, side, v);
        }
      out.push_back(std::move(s));
    }
  return out;
}

MultiplierSet compute_phi(const StateTrajectory& traj, const PsiSeries& psi) {
  return compute_phi(traj, psi, evaluate_at_nodes(traj));
}

MultiplierSet compute_phi(const StateTrajectory& traj, const PsiSeries& psi, const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const int n = traj.order(), m = traj.dimension();
  auto summands = costate_summands(traj, psi, ev);
  MultiplierSet out{psi, n, m, {}};
  for (int k = 1; k <= n; ++k)
    for (int c = 0; c < m; ++c) {
      NodeSeries phi(g.nodes());
      for (int l = 0; l <= n - k; ++l) {
        const NodeSeries& gl = summands[static_cast<std::size_t>((l + k) * m + c)];
        const NodeSeries term = l == 0 ? gl : differentiate(gl, g, l);
        const double sign = (l % 2 == 0) ? -1.0 : 1.0;
        for (int i = 0; i < g.nodes(); ++i)
          for (Side side : {Side::left, Side::right})
            phi.set(i, side, phi.at(i, side) + sign * term.at(i, side));
      }
      out.phi.push_back(std::move(phi));
    }
  return out;
}

std::vector<std::vector<double>> compute_phi_history(const StateTrajectory& traj, const PsiSeries& psi,
                                                     const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const SlotLayout& L = traj.problem().layout();
  const int n = traj.order(), m = traj.dimension(), p = g.delay_steps();
  std::vector<std::vector<double>> out;
  if (p == 0) return out;
  // G_l(t + tau) = psi(t + tau) dL/dx_tau^(l)(t + tau), built on the whole grid so the
  // segment stencils see the same breaks as everywhere else
  std::vector<NodeSeries> G;
  for (int l = 0; l <= n; ++l)
    for (int c = 0; c < m; ++c) {
      const NodeSeries& lagged = ev.partials[L.delayed(c, l)];
      NodeSeries s(g.nodes());
      for (int i = 0; i < g.nodes(); ++i)
        for (Side side : {Side::left, Side::right}) s.set(i, side, psi[i] * lagged.at(i, side));
      G.push_back(std::move(s));
    }
  for (int k = 1; k <= n; ++k)
    for (int c = 0; c < m; ++c) {
      std::vector<double> phi(static_cast<std::size_t>(p + 1), 0.0);
      for (int l = 0; l <= n - k; ++l) {
        const NodeSeries& gl = G[static_cast<std::size_t>((l + k) * m + c)];
        const NodeSeries term = l == 0 ? gl : differentiate(gl, g, l);
        const double sign = (l % 2 == 0) ? -1.0 : 1.0;
        for (int j = 0; j <= p; ++j) phi[j] += sign * term.at(j, j == p ? Side::left : Side::right);
      }
      out.push_back(std::move(phi));
    }
  return out;
}

void write_multipliers_csv(std::ostream& out, const StateTrajectory& traj, const MultiplierSet& mult) {
  std::vector<std::string> cols{"t", "psi"};
  for (int k = 1; k <= mult.n; ++k)
    for (int c = 1; c <= mult.m; ++c) cols.push_back("phi" + std::to_string(k) + "_" + std::to_string(c));
  write_csv_header(out, cols);
  std::vector<double> row;
  for (int i = 0; i < traj.grid().nodes(); ++i) {
    row.assign({traj.grid().node(i), mult.psi[i]});
    for (int k = 1; k <= mult.n; ++k)
      for (int c = 0; c < mult.m; ++c) row.push_back(mult.at(k, c)[i]);
    write_csv_row(out, row);
  }
}

}  // namespace herglotz
