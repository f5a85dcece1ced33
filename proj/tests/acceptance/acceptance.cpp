// Acceptance run: one PASS/FAIL line per criterion.  `acceptance N` runs criterion N,
// no argument runs all of them.  Exit status is 0 iff every selected criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "herglotz/cli.hpp"
#include "herglotz/conditions.hpp"
#include "herglotz/csv.hpp"
#include "herglotz/noether.hpp"
#include "herglotz/reduction.hpp"
#include "herglotz/solver.hpp"
#include "oracles.hpp"
#include "solved.hpp"

using namespace herglotz;

namespace {

// ---- tolerances ----
constexpr double kC1Error = 1e-4;
constexpr double kC1Seconds = 30.0;
constexpr double kC2Psi = 1e-10;
constexpr double kC2Order = 2.0;
constexpr double kC3Tc = 1e-4;
constexpr double kC3Perturbed = 1e-5;
constexpr double kC4Dbr = 1e-3;
constexpr double kC4Drift = 1e-4;
constexpr double kC5Defect = 1e-7;
constexpr double kC5Seconds = 10.0;
constexpr double kC6Defect = 1e-6;
constexpr double kC6Drift = 1e-3;
constexpr double kC6OffDrift = 1e-2;
constexpr double kC7Pointwise = 1e-10;
constexpr double kC8Ratio = 4.0;
constexpr double kC8Slack = 0.25;
constexpr double kC9Relative = 1e-6;

struct Outcome {
  bool pass = true;
  std::string details;

  void check(bool ok, const std::string& what, double value) {
    pass = pass && ok;
    if (!details.empty()) details += "; ";
    details += what + "=" + fmt(value) + (ok ? "" : " (fail)");
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// ---- 1 ----

Outcome closed_form_extremal() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult s = solve_extremal(fixtures::damped_oscillator());
  const double t = seconds_since(t0);
  double e = 0.0;
  for (int i = 0; i < s.trajectory.grid().nodes(); ++i)
    e = std::max(e, std::abs(s.trajectory.x(0, 0)[i] - oracles::DampedOscillator::x(s.trajectory.grid().node(i))));
  o.check(s.converged, "converged", s.converged);
  o.check(s.trajectory.grid().intervals() == 1000, "M", s.trajectory.grid().intervals());
  o.check(e <= kC1Error, "max error", e);
  o.check(t < kC1Seconds, "seconds", t);
  return o;
}

// ---- 2 ----

Outcome psi_contract() {
  Outcome o;
  const auto p = fixtures::problem(0, 1, 0, 1, 1, 2.0, "0.5*xd1^2 - z", {"1"});
  std::vector<double> sups;
  for (int M : {250, 500, 1000}) {
    const Grid g = Grid::with_intervals(0, 1, 0, M);
    const auto x = simulate_z(trajectory_from_expressions(p, g, {parse_expression("1 + t^2 - t^3")})).trajectory;
    const PsiSeries psi = compute_psi(x);
    if (M == 1000) {
      double e = 0.0;
      for (int i = 0; i <= M; ++i) e = std::max(e, std::abs(psi[i] - std::exp(g.node(i) - 1.0)));
      o.check(e <= kC2Psi, "psi error", e);
      o.check(psi[M] == 1.0, "psi(b)", psi[M]);
    }
    // the same physical times on every level: interior nodes of the coarsest grid
    const auto r = adjoint_residual(psi, x);
    const int stride = M / 250;
    double s = 0.0;
    for (int i = 1; i < 250; ++i) s = std::max(s, r[i * stride]);
    sups.push_back(s);
  }
  for (std::size_t k = 0; k + 1 < sups.size(); ++k) {
    const double order = std::log2(sups[k] / sups[k + 1]);
    o.check(order >= kC2Order, "adjoint order", order);
  }
  return o;
}

// ---- 3 ----

Outcome transversality() {
  Outcome o;
  for (const char* name : {"damped", "delayed", "second"}) {
    const SolveResult& s = fixtures::solved(name);
    o.check(s.converged, std::string(name) + " converged", s.converged);
    o.check(s.report.norms.tc <= kC3Tc, std::string(name) + " tc", s.report.norms.tc);
  }
  for (const char* name : {"damped", "delayed"}) {
    const StateTrajectory& x = fixtures::solved(name).trajectory;
    const int M = x.grid().intervals();
    const double eps = 0.1 - x.x(0, 1).left(M);
    const StateTrajectory bent = simulate_z(perturb(x, {parse_expression("t^2 / 2")}, eps)).trajectory;
    const MultiplierSet m = compute_phi(bent, compute_psi(bent));
    const double tc = transversality_residual(bent, m)[0][0];
    o.check(std::abs(tc - 0.1 * m.psi[M]) <= kC3Perturbed, std::string(name) + " perturbed tc", tc);
  }
  return o;
}

// ---- 4 ----

Outcome dubois_reymond() {
  Outcome o;
  for (const char* name : {"damped", "delayed", "second"}) {
    const SolveResult& s = fixtures::solved(name);
    const NodeEvaluation ev = evaluate_at_nodes(s.trajectory);
    const double d = drift(dbr_inner(s.trajectory, s.multipliers, ev).values());
    o.check(s.report.norms.dbr <= kC4Dbr, std::string(name) + " dbr", s.report.norms.dbr);
    o.check(d <= kC4Drift, std::string(name) + " inner drift", d);
  }
  return o;
}

// ---- 5 ----

Outcome reduction_equivalence() {
  Outcome o;
  const std::string L = "0.5*xd1^2 + 0.25*tau_x1^2 + 0.1*sin(tau_xd1)*x1 - z";
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int runs = 0;
  // 8 at (b-a)/4, 8 at (b-a)/3, 4 where (b-a)/tau is not whole
  for (double tau : {0.25, 1.0 / 3.0, 0.3}) {
    const auto p = fixtures::problem(0, 1, tau, 1, 1, 0.5, L, {"1"});
    const Grid g = Grid::make(0, 1, tau, 1000, 1);
    for (int r = 0; r < (tau == 0.3 ? 4 : 8); ++r) {
      std::string x = "1";
      for (int k = 1; k <= 5; ++k) x += " + " + format_number(coef(rng)) + "*t^" + std::to_string(k);
      const auto traj = simulate_z(trajectory_from_expressions(p, g, {parse_expression(x)})).trajectory;
      worst = std::max(worst, verify_reduction_equivalence(*p, traj).objective_defect);
      ++runs;
    }
  }
  const double t = seconds_since(t0);
  o.check(runs == 20, "curves", runs);
  o.check(worst <= kC5Defect, "max |z_N - z(b)|", worst);
  o.check(t < kC5Seconds, "seconds", t);
  return o;
}

// ---- 6 ----

Outcome noether_conservation() {
  Outcome o;
  const SolveResult& s = fixtures::solved("delayed");
  const InvarianceFamily fam = make_family(FamilyContent{"t + s", {"x1"}, "z", 0.0}, 1);
  const InvarianceDefect d = invariance_defect(s.trajectory.problem(), s.trajectory, fam);
  o.check(std::max(d.time_scaling, d.lagrangian) <= kC6Defect, "invariance defect",
          std::max(d.time_scaling, d.lagrangian));
  const double on = noether_charge(s.trajectory, s.multipliers, fam).drift;
  o.check(on <= kC6Drift, "extremal drift", on);
  const StateTrajectory off = simulate_z(perturb(s.trajectory, {parse_expression("t*(1 + t)")}, 1e-2)).trajectory;
  const double offd = noether_charge(off, compute_phi(off, compute_psi(off)), fam).drift;
  o.check(offd >= kC6OffDrift, "perturbed drift", offd);
  return o;
}

// ---- 7: the special cases written out directly ----

// partial `slot` of L at every node, both limits everywhere
NodeSeries partial_series(const StateTrajectory& x, std::size_t slot) {
  const ProblemSpec& p = x.problem();
  const CompiledExpr& f = p.lagrangian.compiled_partials[slot];
  std::vector<double> buf(p.layout().size());
  NodeSeries out(x.grid().nodes());
  for (int i = 0; i < x.grid().nodes(); ++i)
    for (Side side : {Side::left, Side::right}) {
      node_slots(x, i, side, buf);
      out.set(i, side, f(buf));
    }
  return out;
}

NodeSeries lagrangian_series(const StateTrajectory& x) {
  const ProblemSpec& p = x.problem();
  std::vector<double> buf(p.layout().size());
  NodeSeries out(x.grid().nodes());
  for (int i = 0; i < x.grid().nodes(); ++i)
    for (Side side : {Side::left, Side::right}) {
      node_slots(x, i, side, buf);
      out.set(i, side, p.lagrangian.compiled_body(buf));
    }
  return out;
}

NodeSeries scaled(const PsiSeries& psi, const NodeSeries& s) {
  NodeSeries out(s.size());
  for (int i = 0; i < s.size(); ++i)
    for (Side side : {Side::left, Side::right}) out.set(i, side, psi[i] * s.at(i, side));
  return out;
}

// psi(t) dL/dx^(k) + psi(t + tau) dL/dx_tau^(k)(t + tau), the shifted part only while t + tau <= b
NodeSeries first_order_momentum(const StateTrajectory& x, const PsiSeries& psi, int k) {
  const SlotLayout& lay = x.problem().layout();
  const int p = x.grid().delay_steps(), M = x.grid().intervals();
  NodeSeries own = scaled(psi, partial_series(x, lay.state(0, k)));
  if (p == 0) return own;
  const NodeSeries lagged = partial_series(x, lay.delayed(0, k));
  for (int i = 0; i + p <= M; ++i) {
    own.set(i, Side::left, own.left(i) + psi[i + p] * lagged.left(i + p));
    if (i + p < M) own.set(i, Side::right, own.right(i) + psi[i + p] * lagged.right(i + p));
  }
  return own;
}

double block_gap(const ResidualBlock& b, const NodeSeries& direct, int last) {
  double e = 0.0;
  for (std::size_t r = 0; r < b.nodes.size(); ++r) {
    const int i = b.nodes[r];
    const Side side = i == last && r + 1 == b.nodes.size() ? Side::left : Side::right;
    e = std::max(e, std::abs(b.value(r, 0) - direct.at(i, side)));
  }
  return e;
}

Outcome special_cases() {
  Outcome o;

  // no delay, any order: sum_l (-1)^l D^l (psi dL/dx^(l)) and the transversality sums at b
  for (const char* name : {"damped", "second"}) {
    const SolveResult& s = fixtures::solved(name);
    const StateTrajectory& x = s.trajectory;
    const Grid& g = x.grid();
    const int n = x.order(), M = g.intervals();
    std::vector<NodeSeries> terms;
    for (int l = 0; l <= n; ++l) terms.push_back(scaled(s.multipliers.psi, partial_series(x, x.problem().layout().state(0, l))));
    NodeSeries el(g.nodes());
    for (int l = 0; l <= n; ++l) {
      const NodeSeries d = l == 0 ? terms[0] : differentiate(terms[l], g, l);
      for (int i = 0; i <= M; ++i)
        for (Side side : {Side::left, Side::right})
          el.set(i, side, el.at(i, side) + (l % 2 ? -1.0 : 1.0) * d.at(i, side));
    }
    o.check(block_gap(s.report.el1, el, M) <= kC7Pointwise, std::string(name) + " el", block_gap(s.report.el1, el, M));
    double tc = 0.0;
    for (int k = 1; k <= n; ++k) {
      double v = 0.0;
      for (int l = 0; l <= n - k; ++l)
        v += (l % 2 ? -1.0 : 1.0) * (l == 0 ? terms[k].left(M) : differentiate(terms[l + k], g, l).left(M));
      tc = std::max(tc, std::abs(v - s.report.tc[k - 1][0]));
    }
    o.check(tc <= kC7Pointwise, std::string(name) + " tc", tc);
  }

  // first order with delay: the two-term Euler-Lagrange expression, the DuBois-Reymond
  // identity and the conserved quantity for time translation
  const InvarianceFamily fam = make_family(FamilyContent{"t + s", {"x1"}, "z", 0.0}, 1);
  for (const char* name : {"damped", "delayed"}) {
    const SolveResult& s = fixtures::solved(name);
    const StateTrajectory& x = s.trajectory;
    const Grid& g = x.grid();
    const int M = g.intervals(), J = g.junction();
    const PsiSeries& psi = s.multipliers.psi;
    const NodeSeries P0 = first_order_momentum(x, psi, 0);
    const NodeSeries P1 = first_order_momentum(x, psi, 1);
    const NodeSeries dP1 = differentiate(P1, g, 1);
    NodeSeries el(g.nodes());
    for (int i = 0; i <= M; ++i)
      for (Side side : {Side::left, Side::right}) el.set(i, side, P0.at(i, side) - dP1.at(i, side));
    const double e1 = block_gap(s.report.el1, el, J);
    o.check(e1 <= kC7Pointwise, std::string(name) + " el1", e1);
    if (!s.report.el2.empty()) {
      const double e2 = block_gap(s.report.el2, el, M);
      o.check(e2 <= kC7Pointwise, std::string(name) + " el2", e2);
    }

    const NodeSeries L = lagrangian_series(x);
    const NodeSeries Lt = partial_series(x, SlotLayout::time);
    NodeSeries inner(g.nodes());
    for (int i = 0; i <= M; ++i)
      for (Side side : {Side::left, Side::right})
        inner.set(i, side, psi[i] * L.at(i, side) - P1.at(i, side) * x.x(0, 1).at(i, side));
    const NodeSeries dinner = differentiate(inner, g, 1);
    NodeSeries dbr(g.nodes());
    for (int i = 0; i <= M; ++i)
      for (Side side : {Side::left, Side::right}) dbr.set(i, side, dinner.at(i, side) - psi[i] * Lt.at(i, side));
    const double ed = block_gap(s.report.dbr, dbr, M);
    o.check(ed <= kC7Pointwise, std::string(name) + " dbr", ed);

    // P1 X0 + psi Z + (-P1 xdot + psi L) T as printed for first order
    const LiftedGenerators gen = lift_generators(fam, x);
    const ChargeSeries q = noether_charge(x, s.multipliers, fam);
    double gap = 0.0, relation = 0.0;
    for (int i = 0; i <= M; ++i) {
      const Side side = i == M ? Side::left : Side::right;
      const double lit = P1.at(i, side) * gen.X[0].at(i, side) + psi[i] * gen.Z.at(i, side) +
                         (-P1.at(i, side) * x.x(0, 1).at(i, side) + psi[i] * L.at(i, side)) * gen.T.at(i, side);
      gap = std::max(gap, std::abs(lit - q.values[i]));
      relation = std::max(relation, std::abs(lit + q.values[i] - 2.0 * psi[i] * gen.Z.at(i, side)));
    }
    o.check(gap <= kC7Pointwise, std::string(name) + " charge", gap);
    // the printed first-order charge is the general one with the signs of its X and T
    // terms flipped; this holds to roundoff and is reported for diagnosis only
    o.details += "; " + std::string(name) + " |printed + general - 2 psi Z|=" + Outcome::fmt(relation);
  }
  return o;
}

// ---- 8 ----

Outcome stationarity() {
  Outcome o;
  for (const char* name : {"damped", "delayed", "second"}) {
    const SolveResult& s = fixtures::solved(name);
    const StateTrajectory& x = s.trajectory;
    const int n = x.order(), M = x.grid().intervals();
    const Expr v = parse_expression("t^" + std::to_string(n) + "*(1 + t)");  // a = 0
    const double zb = x.z()[M];
    auto dz = [&](double eps) { return simulate_z(perturb(x, {v}, eps)).trajectory.z()[M] - zb; };
    const double ratio = dz(1e-2) / dz(5e-3);
    o.check(std::abs(ratio - kC8Ratio) <= kC8Slack * kC8Ratio, std::string(name) + " ratio", ratio);
  }
  return o;
}

// ---- 9 ----

Outcome derivative_validation() {
  Outcome o;
  int files = 0;
  bool all_ok = true;
  for (const auto& entry : std::filesystem::directory_iterator(HERGLOTZ_DATA_DIR)) {
    if (entry.path().extension() != ".prob" || entry.path().stem() == "missing_lagrangian") continue;
    std::ostringstream out, err;
    const int code = run_cli({"check-derivs", entry.path().string()}, out, err);
    const std::string text = out.str();
    const auto at = text.find("# worst relative error");
    const double worst = at == std::string::npos ? INFINITY : std::stod(text.substr(text.find('=', at) + 1));
    const bool ok = code == exit_ok && worst <= kC9Relative;
    all_ok = all_ok && ok;
    ++files;
    if (!ok) o.check(false, entry.path().filename().string(), worst);
  }
  o.check(all_ok && files > 0, "data files", files);
  for (const auto& p : {fixtures::damped_oscillator(), fixtures::delayed_fixture(), fixtures::second_order_fixture()}) {
    double worst = 0.0;
    for (const auto& row : check_partials(*p, 10, 20240611)) worst = std::max(worst, row.relative_error);
    o.check(worst <= kC9Relative, "fixture worst", worst);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      closed_form_extremal, psi_contract,         transversality, dubois_reymond,        reduction_equivalence,
      noether_conservation, special_cases,          stationarity,   derivative_validation};
  std::vector<int> selected;
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
      return 2;
    }
    selected.push_back(k);
  } else {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details = std::string("threw: ") + e.what();
    }
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.details << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
