#include "herglotz/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "herglotz/csv.hpp"

namespace herglotz {

double ResidualBlock::sup() const {
  double s = 0.0;
  for (std::size_t r = 0; r < nodes.size(); ++r)
    if (!flagged[r])
      for (int c = 0; c < width; ++c) s = std::max(s, std::abs(value(r, c)));
  return s;
}

double ResidualBlock::sup_all() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double drift(std::span<const double> values) {
  if (values.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

namespace {

void push_row(ResidualBlock& b, const Grid& g, int i, const std::vector<NodeSeries>& comps, Side side) {
  b.nodes.push_back(i);
  for (const auto& s : comps) b.values.push_back(s.at(i, side));
  b.flagged.push_back(g.distance_to_edge(i) < kFlagRadius);
}

}  // namespace

ResidualReport el_residual(const StateTrajectory& traj, const MultiplierSet& mult) {
  return el_residual(traj, mult, evaluate_at_nodes(traj));
}

ResidualReport el_residual(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const int n = traj.order(), m = traj.dimension();
  const int M = g.intervals(), J = g.junction();
  auto summands = costate_summands(traj, mult.psi, ev);

  std::vector<NodeSeries> el(static_cast<std::size_t>(m), NodeSeries(g.nodes()));
  for (int c = 0; c < m; ++c)
    for (int l = 0; l <= n; ++l) {
      const NodeSeries& gl = summands[static_cast<std::size_t>(l * m + c)];
      const NodeSeries term = l == 0 ? gl : differentiate(gl, g, l);
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      for (int i = 0; i <= M; ++i)
        for (Side side : {Side::left, Side::right})
          el[c].set(i, side, el[c].at(i, side) + sign * term.at(i, side));
    }

  ResidualReport r{g, {"el1", m, {}, {}, {}}, {"el2", m, {}, {}, {}}, {}, {"dbr", 1, {}, {}, {}}, {}, {}};
  for (int i = 0; i <= J; ++i) push_row(r.el1, g, i, el, i == J ? Side::left : Side::right);
  if (g.delay_steps() > 0)
    for (int i = J; i <= M; ++i) push_row(r.el2, g, i, el, i == M ? Side::left : Side::right);
  r.norms.el1 = r.el1.sup();
  r.norms.el2 = r.el2.sup();
  r.norms_all.el1 = r.el1.sup_all();
  r.norms_all.el2 = r.el2.sup_all();
  return r;
}

std::vector<std::vector<double>> transversality_residual(const StateTrajectory& traj, const MultiplierSet& mult) {
  const int M = traj.grid().intervals();
  std::vector<std::vector<double>> tc;
  for (int k = 1; k <= mult.n; ++k) {
    std::vector<double> v;
    for (int c = 0; c < mult.m; ++c) v.push_back(-mult.at(k, c).left(M));
    tc.push_back(std::move(v));
  }
  return tc;
}

NodeSeries dbr_inner(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  NodeSeries inner(g.nodes());
  for (int i = 0; i < g.nodes(); ++i)
    for (Side side : {Side::left, Side::right}) {
      double v = mult.psi[i] * ev.lagrangian.at(i, side);
      for (int k = 1; k <= mult.n; ++k)
        for (int c = 0; c < mult.m; ++c) v += mult.at(k, c).at(i, side) * traj.x(c, k).at(i, side);
      inner.set(i, side, v);
    }
  return inner;
}

ResidualBlock dbr_residual(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const int M = g.intervals();
  NodeSeries d = differentiate(dbr_inner(traj, mult, ev), g, 1);
  const NodeSeries& dt = ev.partials[SlotLayout::time];
  NodeSeries res(g.nodes());
  for (int i = 0; i <= M; ++i)
    for (Side side : {Side::left, Side::right}) res.set(i, side, d.at(i, side) - mult.psi[i] * dt.at(i, side));
  ResidualBlock b{"dbr", 1, {}, {}, {}};
  const std::vector<NodeSeries> one{res};
  for (int i = 0; i <= M; ++i) push_row(b, g, i, one, i == M ? Side::left : Side::right);
  return b;
}

ResidualReport residual_report(const StateTrajectory& traj, const MultiplierSet& mult) {
  return residual_report(traj, mult, evaluate_at_nodes(traj));
}

ResidualReport residual_report(const StateTrajectory& traj, const MultiplierSet& mult, const NodeEvaluation& ev) {
  ResidualReport r = el_residual(traj, mult, ev);
  r.tc = transversality_residual(traj, mult);
  for (const auto& v : r.tc)
    for (double x : v) r.norms.tc = std::max(r.norms.tc, std::abs(x));
  r.norms_all.tc = r.norms.tc;
  r.dbr = dbr_residual(traj, mult, ev);
  r.norms.dbr = r.dbr.sup();
  r.norms_all.dbr = r.dbr.sup_all();
  return r;
}

void write_residual_csv(std::ostream& out, const ResidualReport& report) {
  const int m = report.el1.width;
  std::vector<std::string> cols{"t", "block"};
  for (int c = 1; c <= m; ++c) cols.push_back("r" + std::to_string(c));
  cols.push_back("flagged");
  write_csv_header(out, cols);
  auto block = [&](const ResidualBlock& b) {
    for (std::size_t r = 0; r < b.nodes.size(); ++r) {
      std::string line = format_number(report.grid.node(b.nodes[r])) + "," + b.name;
      for (int c = 0; c < m; ++c) line += "," + (c < b.width ? format_number(b.value(r, c)) : std::string());
      line += b.flagged[r] ? ",1\n" : ",0\n";
      out << line;
    }
  };
  block(report.el1);
  block(report.el2);
  block(report.dbr);
  out << "# sup el1=" << format_number(report.norms.el1) << " el2=" << format_number(report.norms.el2)
      << " tc=" << format_number(report.norms.tc) << " dbr=" << format_number(report.norms.dbr) << '\n';
}

}  // namespace herglotz
