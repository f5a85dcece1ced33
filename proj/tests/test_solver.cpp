#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "herglotz/error.hpp"
#include "herglotz/reduction.hpp"
#include "herglotz/solver.hpp"
#include "oracles.hpp"
#include "solved.hpp"

using namespace herglotz;

namespace {

template <class F>
double max_error(const StateTrajectory& x, F exact) {
  double e = 0.0;
  for (int i = 0; i < x.grid().nodes(); ++i) e = std::max(e, std::abs(x.x(0, 0)[i] - exact(x.grid().node(i))));
  return e;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("oracle formulas agree with their frozen values") {
    using D = oracles::DampedOscillator;
    CHECK(D::B() == doctest::Approx(D::frozen_B).epsilon(1e-14));
    CHECK(D::x(0.5) == doctest::Approx(D::frozen_x_half).epsilon(1e-14));
    CHECK(D::x(1.0) == doctest::Approx(D::frozen_x_one).epsilon(1e-14));
    CHECK(std::abs(D::xd(1.0)) <= 1e-14);
    using T = oracles::DelayedFixture;
    CHECK(T::r1() == doctest::Approx(T::frozen_r1).epsilon(1e-14));
    CHECK(T::A() == doctest::Approx(T::frozen_A).epsilon(1e-14));
    CHECK(T::x(0.25) == doctest::Approx(T::frozen_x_quarter).epsilon(1e-14));
    CHECK(T::x(0.5) == doctest::Approx(T::frozen_x_half).epsilon(1e-14));
    using S = oracles::SecondOrderFixture;
    const auto c = S::coefficients();
    for (int j = 0; j < 4; ++j) CHECK(c[j] == doctest::Approx(S::frozen_coeffs[j]).epsilon(1e-13));
    CHECK(S::x(0.5) == doctest::Approx(S::frozen_x_half).epsilon(1e-13));
    CHECK(S::x(1.0) == doctest::Approx(S::frozen_x_one).epsilon(1e-13));
    CHECK(std::abs(S::x(1.0, 2)) <= 1e-12);
    CHECK(std::abs(S::x(1.0, 3)) <= 1e-12);
  }

  TEST_CASE("damped oscillator") {
    const SolveResult& s = fixtures::solved("damped");
    CHECK(s.converged);
    CHECK(s.report.el() <= 1e-5);
    CHECK(s.report.norms.tc <= 1e-5);
    CHECK(max_error(s.trajectory, oracles::DampedOscillator::x) <= 1e-4);
    CHECK(s.root_residual <= 1e-5);
    CHECK_FALSE(s.log.empty());
  }

  TEST_CASE("delayed fixture") {
    const SolveResult& s = fixtures::solved("delayed");
    CHECK(s.converged);
    CHECK(s.report.el() <= 1e-4);
    CHECK(max_error(s.trajectory, oracles::DelayedFixture::x) <= 1e-4);
    const ReductionReport r = verify_reduction_equivalence(s.trajectory.problem(), s.trajectory);
    CHECK(r.objective_defect <= 1e-6);
  }

  TEST_CASE("second order fixture") {
    const SolveResult& s = fixtures::solved("second");
    CHECK(s.converged);
    CHECK(s.report.norms.tc <= 1e-4);
    CHECK(max_error(s.trajectory, [](double t) { return oracles::SecondOrderFixture::x(t); }) <= 1e-4);
  }

  TEST_CASE("pure decay keeps x at the history value") {
    SolveOptions o;
    o.intervals = 200;
    const SolveResult s = solve_extremal(fixtures::problem(0, 1, 0, 1, 1, 2.0, "0.5*xd1^2 - z", {"1"}), o);
    CHECK(s.converged);
    CHECK(max_error(s.trajectory, [](double) { return 1.0; }) <= 1e-8);
  }

  TEST_CASE("mesh independence") {
    SolveOptions o;
    o.intervals = 500;
    const SolveResult coarse = solve_extremal(fixtures::damped_oscillator(), o);
    const SolveResult& fine = fixtures::solved("damped");
    REQUIRE(coarse.converged);
    double e = 0.0;
    for (int i = 0; i <= 500; ++i) e = std::max(e, std::abs(coarse.trajectory.x(0, 0)[i] - fine.trajectory.x(0, 0)[2 * i]));
    CHECK(e <= 1e-6);
  }

  TEST_CASE("a solved guess needs no further work") {
    const SolveResult& s = fixtures::solved("damped");
    const SolveResult again = solve_extremal(fixtures::damped_oscillator(), {}, s.trajectory);
    CHECK(again.converged);
    CHECK(again.log.size() <= 2);
  }

  TEST_CASE("perturbing the extremal raises the root residual") {
    const SolveResult& s = fixtures::solved("damped");
    const StateTrajectory off = simulate_z(perturb(s.trajectory, {parse_expression("t*(1 + t)")}, 1e-3)).trajectory;
    double r = 0.0;
    for (double v : root_residual(off)) r = std::max(r, std::abs(v));
    CHECK(r >= 1e-4);
  }

  TEST_CASE("root system is square") {
    const SolveResult& s = fixtures::solved("delayed");
    CHECK(root_residual(s.trajectory).size() == static_cast<std::size_t>(s.trajectory.grid().intervals()));
    const SolveResult& q = fixtures::solved("second");
    CHECK(root_residual(q.trajectory).size() == static_cast<std::size_t>(q.trajectory.grid().intervals()));
  }

  TEST_CASE("option validation") {
    const auto p = fixtures::damped_oscillator();
    auto bad = [&](auto edit) {
      SolveOptions o;
      edit(o);
      CHECK_THROWS_AS(solve_extremal(p, o), ValidationError);
    };
    bad([](SolveOptions& o) { o.intervals = 0; });
    bad([](SolveOptions& o) { o.damping = 0.0; });
    bad([](SolveOptions& o) { o.damping = 1.5; });
    bad([](SolveOptions& o) { o.max_iters = 0; });
    bad([](SolveOptions& o) { o.tol_residual = -1.0; });
    bad([](SolveOptions& o) { o.jacobian_fd_step = 0.0; });
  }

  TEST_CASE("iteration cap reports non-convergence") {
    SolveOptions o;
    o.intervals = 100;
    o.max_iters = 1;
    const auto p = fixtures::problem(0, 1, 0, 1, 1, 0.0, "0.5*xd1^2 - x1^4 - z", {"1"});
    const SolveResult s = solve_extremal(p, o);
    CHECK_FALSE(s.converged);
    CHECK(s.log.size() == 2);  // the starting point plus one step
  }
}
