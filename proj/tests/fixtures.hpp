#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "herglotz/problem.hpp"
#include "herglotz/spec_file.hpp"

namespace fixtures {

inline std::shared_ptr<const herglotz::ProblemSpec> problem(double a, double b, double tau, int n, int m,
                                                            double gamma, const std::string& L,
                                                            std::vector<std::string> mu) {
  herglotz::ProblemFileContent raw;
  raw.a = a;
  raw.b = b;
  raw.tau = tau;
  raw.n = n;
  raw.m = m;
  raw.gamma = gamma;
  raw.lagrangian = L;
  raw.history = std::move(mu);
  return std::make_shared<const herglotz::ProblemSpec>(herglotz::build_problem(raw));
}

// L = xd^2/2 - x^2/2 - z on [0,1], x(0) = 1: xdd + xd + x = 0 with xd(1) = 0
inline std::shared_ptr<const herglotz::ProblemSpec> damped_oscillator() {
  return problem(0, 1, 0, 1, 1, 0, "0.5*xd1^2 - 0.5*x1^2 - z", {"1"});
}

// L = xd^2/2 + x_tau^2/4 - z, tau = 1/2 on [0,1], mu = 1
inline std::shared_ptr<const herglotz::ProblemSpec> delayed_fixture() {
  return problem(0, 1, 0.5, 1, 1, 0, "0.5*xd1^2 + 0.25*tau_x1^2 - z", {"1"});
}

// L = xdd^2/2 - x^2/2 - z, n = 2, x(0) = 1, xd(0) = 1/2
inline std::shared_ptr<const herglotz::ProblemSpec> second_order_fixture() {
  return problem(0, 1, 0, 2, 1, 0, "0.5*xdd1^2 - 0.5*x1^2 - z", {"1 + 0.5*t"});
}

}  // namespace fixtures
