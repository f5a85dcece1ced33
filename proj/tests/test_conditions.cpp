#include <doctest.h>

#include <cmath>
#include <sstream>

#include "closed_forms.hpp"
#include "fixtures.hpp"
#include "herglotz/conditions.hpp"

using namespace herglotz;

namespace {

StateTrajectory damped_closed_form(int M) {
  const auto p = fixtures::damped_oscillator();
  const Grid g = Grid::make(0, 1, 0, M, 1);
  return simulate_z(trajectory_from_expressions(p, g, {parse_expression(fixtures::damped_extremal())})).trajectory;
}

}  // namespace

TEST_SUITE("conditions") {
  TEST_CASE("closed-form extremal satisfies every condition") {
    const StateTrajectory x = damped_closed_form(1000);
    const MultiplierSet m = compute_phi(x, compute_psi(x));
    const ResidualReport r = residual_report(x, m);
    CHECK(r.norms.el1 <= 1e-8);
    CHECK(r.el2.empty());
    CHECK(r.norms.tc <= 1e-12);
    CHECK(r.norms.dbr <= 1e-8);
    CHECK(r.norms_all.el1 >= r.norms.el1);
    CHECK(r.el1.nodes.size() == 1001);
    CHECK(r.el1.flagged.front());
    CHECK_FALSE(r.el1.flagged[500]);
  }

  TEST_CASE("transversality measures xd(b)") {
    StateTrajectory x = damped_closed_form(1000);
    const double eps = 0.1 - x.x(0, 1).left(1000);
    x = simulate_z(perturb(x, {parse_expression("t^2 / 2")}, eps)).trajectory;
    const MultiplierSet m = compute_phi(x, compute_psi(x));
    const auto tc = transversality_residual(x, m);
    CHECK(std::abs(tc[0][0] - 0.1) <= 1e-12);
    CHECK(residual_report(x, m).norms.el1 > 1e-3);
  }

  TEST_CASE("delayed blocks split at b - tau") {
    const auto p = fixtures::delayed_fixture();
    const Grid g = Grid::with_intervals(0, 1, 0.5, 400);
    const auto x = simulate_z(trajectory_from_expressions(p, g, {parse_expression("1 + 0.5*t^2")})).trajectory;
    const MultiplierSet m = compute_phi(x, compute_psi(x));
    const ResidualReport r = residual_report(x, m);
    CHECK(r.el1.nodes.front() == 0);
    CHECK(r.el1.nodes.back() == 200);
    CHECK(r.el2.nodes.front() == 200);
    CHECK(r.el2.nodes.back() == 400);
    CHECK(r.el1.flagged.back());
    CHECK(r.el2.flagged.front());
  }

  TEST_CASE("dbr inner is constant for an autonomous extremal") {
    const StateTrajectory x = damped_closed_form(1000);
    const NodeEvaluation ev = evaluate_at_nodes(x);
    const MultiplierSet m = compute_phi(x, compute_psi(x), ev);
    const NodeSeries inner = dbr_inner(x, m, ev);
    CHECK(drift(inner.values()) <= 1e-9);
  }

  TEST_CASE("residual csv layout") {
    const StateTrajectory x = damped_closed_form(100);
    const MultiplierSet m = compute_phi(x, compute_psi(x));
    std::ostringstream out;
    write_residual_csv(out, residual_report(x, m));
    const std::string s = out.str();
    CHECK(s.rfind("t,block,r1,flagged\n", 0) == 0);
    CHECK(s.find(",el1,") != std::string::npos);
    CHECK(s.find(",dbr,") != std::string::npos);
    CHECK(s.find("# sup el1=") != std::string::npos);
  }

  TEST_CASE("drift") {
    const std::vector<double> v{1.0, 3.0, -2.0};
    CHECK(drift(v) == 5.0);
    CHECK(drift(std::vector<double>{}) == 0.0);
  }
}
