#include "herglotz/functional.hpp"

#include <cmath>

#include "herglotz/error.hpp"

namespace herglotz {

namespace {

double checked(double v, double t) {
  if (!std::isfinite(v)) throw NonFiniteLagrangian(t);
  return v;
}

// limits at node i that differ from the plain sample: only break nodes have two
bool two_sided(const Grid& g, int i) { return g.is_break(i); }

void fill_series(const StateTrajectory& traj, const CompiledExpr& f, const Expr& e, NodeSeries& out,
                 std::vector<double>& slots) {
  const Grid& g = traj.grid();
  if (e.is_constant()) {
    for (int i = 0; i < g.nodes(); ++i) out.set(i, e.value());
    return;
  }
  for (int i = 0; i < g.nodes(); ++i) {
    node_slots(traj, i, Side::right, slots);
    out.set(i, f(slots));
    if (two_sided(g, i)) {
      node_slots(traj, i, Side::left, slots);
      out.set(i, Side::left, f(slots));
    }
  }
}

}  // namespace

SimulationReport simulate_z(const StateTrajectory& x) {
  const ProblemSpec& p = x.problem();
  const CompiledExpr& L = p.lagrangian.compiled_body;
  const Grid& g = x.grid();
  const int M = g.intervals();
  const double h = g.h();
  std::vector<double> s0(p.layout().size()), sm(s0.size()), s1(s0.size());
  std::vector<double> z(static_cast<std::size_t>(M + 1));
  z[0] = p.gamma;

  for (int i = 0; i < M; ++i) {
    const double t0 = g.node(i), th = t0 + 0.5 * h;
    node_slots(x, i, Side::right, s0);
    interpolated_slots(x, th, sm);
    node_slots(x, i + 1, Side::left, s1);

    s0[SlotLayout::value] = z[i];
    const double k1 = checked(L(s0), t0);
    sm[SlotLayout::value] = z[i] + 0.5 * h * k1;
    const double k2 = checked(L(sm), th);
    sm[SlotLayout::value] = z[i] + 0.5 * h * k2;
    const double k3 = checked(L(sm), th);
    s1[SlotLayout::value] = z[i] + h * k3;
    const double k4 = checked(L(s1), g.node(i + 1));
    z[i + 1] = z[i] + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
  }

  SimulationReport report{x, 0.0};
  report.trajectory.set_z(std::move(z));

  // compare z' from the stencils with L on both sides of every node
  const StateTrajectory& traj = report.trajectory;
  NodeSeries zs(g.nodes());
  for (int i = 0; i <= M; ++i) zs.set(i, traj.z()[i]);
  NodeSeries dz = differentiate(zs, g, 1);
  NodeSeries lag(g.nodes());
  fill_series(traj, L, p.lagrangian.body, lag, s0);
  for (int i = 0; i <= M; ++i)
    for (Side sd : {Side::left, Side::right})
      report.admissibility_defect = std::max(report.admissibility_defect, std::abs(dz.at(i, sd) - lag.at(i, sd)));
  return report;
}

PsiSeries compute_psi(const StateTrajectory& traj) {
  if (!traj.has_z()) throw InputError("compute_psi needs a simulated z");
  const ProblemSpec& p = traj.problem();
  const Grid& g = traj.grid();
  const Expr& dz = p.lagrangian.partial(SlotLayout::value);
  if (dz.is_constant(0.0)) return PsiSeries(std::vector<double>(static_cast<std::size_t>(g.nodes()), 1.0));

  NodeSeries f(g.nodes());
  std::vector<double> slots(p.layout().size());
  fill_series(traj, p.lagrangian.compiled_partials[SlotLayout::value], dz, f, slots);
  for (int i = 0; i < g.nodes(); ++i)
    if (!std::isfinite(f.left(i)) || !std::isfinite(f.right(i))) throw NonFiniteLagrangian(g.node(i));
  auto I = integrate_to_end(f, g);
  std::vector<double> psi(I.size());
  for (std::size_t i = 0; i < I.size(); ++i) psi[i] = std::exp(I[i]);
  psi.back() = 1.0;
  return PsiSeries(std::move(psi));
}

std::vector<double> adjoint_residual(const PsiSeries& psi, const StateTrajectory& traj) {
  const ProblemSpec& p = traj.problem();
  const Grid& g = traj.grid();
  const int M = g.intervals();
  const double h = g.h();
  NodeSeries dz(g.nodes());
  std::vector<double> slots(p.layout().size());
  fill_series(traj, p.lagrangian.compiled_partials[SlotLayout::value], p.lagrangian.partial(SlotLayout::value),
              dz, slots);
  std::vector<double> r(static_cast<std::size_t>(M + 1));
  for (int i = 0; i <= M; ++i) {
    double d;
    if (i == 0)
      d = (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * h);
    else if (i == M)
      d = (3.0 * psi[M] - 4.0 * psi[M - 1] + psi[M - 2]) / (2.0 * h);
    else
      d = (psi[i + 1] - psi[i - 1]) / (2.0 * h);
    r[i] = std::abs(d + psi[i] * dz[i]);
  }
  return r;
}

NodeEvaluation evaluate_at_nodes(const StateTrajectory& traj) {
  const ProblemSpec& p = traj.problem();
  const LagrangianSpec& L = p.lagrangian;
  const Grid& g = traj.grid();
  const std::size_t ns = L.layout.size();
  NodeEvaluation ev{NodeSeries(g.nodes()), std::vector<NodeSeries>(ns, NodeSeries(g.nodes()))};
  std::vector<double> slots(ns);
  auto at_node = [&](int i, Side side) {
    node_slots(traj, i, side, slots);
    const double v = L.compiled_body(slots);
    if (!std::isfinite(v)) throw NonFiniteLagrangian(g.node(i));
    ev.lagrangian.set(i, side, v);
    for (std::size_t s = 0; s < ns; ++s) {
      const Expr& e = L.partials[s];
      ev.partials[s].set(i, side, e.is_constant() ? e.value() : L.compiled_partials[s](slots));
    }
  };
  for (int i = 0; i < g.nodes(); ++i) {
    at_node(i, Side::right);
    if (two_sided(g, i)) {
      at_node(i, Side::left);
    } else {
      ev.lagrangian.set(i, Side::left, ev.lagrangian.right(i));
      for (auto& s : ev.partials) s.set(i, Side::left, s.right(i));
    }
  }
  return ev;
}

}  // namespace herglotz
