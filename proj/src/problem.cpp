#include "herglotz/problem.hpp"

#include <cmath>
#include <random>

#include "herglotz/error.hpp"
#include "herglotz/spec_file.hpp"

namespace herglotz {

std::string slot_name(int component, int k, bool delayed) {
  const std::string j = std::to_string(component + 1);
  std::string base;
  switch (k) {
    case 0:
      base = "x" + j;
      break;
    case 1:
      base = "xd" + j;
      break;
    case 2:
      base = "xdd" + j;
      break;
    default:
      base = "x" + j + "_d" + std::to_string(k);
  }
  return delayed ? "tau_" + base : base;
}

SlotLayout::SlotLayout(int order, int dimension) : n_(order), m_(dimension) {
  names_.resize(2 + 2 * static_cast<std::size_t>(m_ * (n_ + 1)));
  names_[time] = "t";
  names_[value] = "z";
  for (int c = 0; c < m_; ++c)
    for (int k = 0; k <= n_; ++k) {
      names_[state(c, k)] = slot_name(c, k, false);
      names_[delayed(c, k)] = slot_name(c, k, true);
    }
}

Expr canonical_slots(const Expr& e, int n, int m) {
  std::map<std::string, Expr, std::less<>> aliases;
  for (int c = 0; c < m; ++c)
    for (int k = 0; k <= std::min(n, 2); ++k)
      for (bool delayed : {false, true}) {
        std::string alias = std::string(delayed ? "tau_" : "") + "x" + std::to_string(c + 1) +
                            "_d" + std::to_string(k);
        aliases.emplace(alias, Expr::variable(slot_name(c, k, delayed)));
      }
  return substitute(e, aliases);
}

LagrangianSpec make_lagrangian(const Expr& body, int n, int m) {
  LagrangianSpec L;
  L.n = n;
  L.m = m;
  L.layout = SlotLayout(n, m);
  L.body = body;
  L.compiled_body = CompiledExpr(body, L.layout.names());
  L.partials.reserve(L.layout.size());
  L.compiled_partials.reserve(L.layout.size());
  for (const auto& name : L.layout.names()) {
    L.partials.push_back(differentiate(body, name));
    L.compiled_partials.emplace_back(L.partials.back(), L.layout.names());
  }
  return L;
}

ProblemSpec assemble_problem(double a, double b, double tau, double gamma, const Expr& lagrangian,
                             const std::vector<Expr>& history, int n, int m) {
  ProblemSpec p;
  p.a = a;
  p.b = b;
  p.tau = tau;
  p.gamma = gamma;
  p.lagrangian = make_lagrangian(canonical_slots(lagrangian, n, m), n, m);
  p.history = history;
  const std::vector<std::string> time_only{"t"};
  for (const auto& mu : history) {
    std::vector<Expr> ders{mu};
    for (int k = 1; k <= n; ++k) ders.push_back(differentiate(ders.back(), "t"));
    std::vector<CompiledExpr> compiled;
    for (const auto& e : ders) compiled.emplace_back(e, time_only);
    p.history_derivatives.push_back(std::move(ders));
    p.compiled_history.push_back(std::move(compiled));
  }
  return p;
}

ProblemSpec build_problem(const ProblemFileContent& raw, bool check_derivatives) {
  std::vector<std::string> issues;
  if (!(raw.b > raw.a)) issues.push_back("interval: need b > a");
  if (!(raw.tau >= 0.0)) issues.push_back("delay: need tau >= 0");
  if (raw.b > raw.a && !(raw.tau < raw.b - raw.a)) issues.push_back("delay: need tau < b - a");
  if (raw.n < 1) issues.push_back("order n must be at least 1");
  if (raw.m < 1) issues.push_back("dimension m must be at least 1");
  if (static_cast<int>(raw.history.size()) != raw.m)
    issues.push_back("history: expected " + std::to_string(raw.m) + " components");

  const SlotLayout layout(std::max(raw.n, 1), std::max(raw.m, 1));
  std::set<std::string> known(layout.names().begin(), layout.names().end());

  Expr body;
  try {
    body = canonical_slots(parse_expression(raw.lagrangian), raw.n, raw.m);
    for (const auto& v : free_variables(body))
      if (!known.count(v))
        issues.push_back("lagrangian.L: unknown variable '" + v + "' for n = " +
                         std::to_string(raw.n) + ", m = " + std::to_string(raw.m));
  } catch (const InputError& e) {
    issues.push_back(std::string("lagrangian.L: ") + e.what());
  }

  std::vector<Expr> history;
  for (std::size_t j = 0; j < raw.history.size(); ++j) {
    const std::string key = "history.mu" + std::to_string(j + 1);
    try {
      Expr mu = parse_expression(raw.history[j]);
      for (const auto& v : free_variables(mu))
        if (v != "t") issues.push_back(key + ": history may depend on t only, found '" + v + "'");
      history.push_back(mu);
    } catch (const InputError& e) {
      issues.push_back(key + ": " + e.what());
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  ProblemSpec p = assemble_problem(raw.a, raw.b, raw.tau, raw.gamma, body, history, raw.n, raw.m);
  if (check_derivatives)
    for (const auto& c : check_partials(p, 10, 20240611u))
      if (!(c.relative_error <= 1e-6))
        issues.push_back("partial dL/d" + c.slot + " disagrees with central differences (rel. error " +
                         std::to_string(c.relative_error) + ")");
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return p;
}

double history_derivative(const ProblemSpec& p, int component, int k, double t) {
  const double tol = 1e-12 * std::max({1.0, std::abs(p.a), std::abs(p.b)});
  if (t < p.a - p.tau - tol || t > p.a + tol) throw OutOfHistoryRange(t);
  const double arg[1] = {t};
  return p.compiled_history[component][k](arg);
}

std::vector<DerivativeCheck> check_partials(const ProblemSpec& p, int points, unsigned seed) {
  const LagrangianSpec& L = p.lagrangian;
  const std::size_t ns = L.layout.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> time(p.a, p.b);
  std::vector<DerivativeCheck> out;
  std::vector<double> s(ns);

  for (int pt = 0; pt < points; ++pt) {
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      s[SlotLayout::time] = time(rng);
      for (std::size_t i = 1; i < ns; ++i) s[i] = unit(rng);
      try {
        ok = std::isfinite(L.compiled_body(s));
        for (std::size_t i = 0; ok && i < ns; ++i) ok = std::isfinite(L.compiled_partials[i](s));
      } catch (const DomainError&) {
        ok = false;
      }
    }
    if (!ok) {
      out.push_back({"(all)", NAN, NAN, INFINITY});
      continue;
    }
    for (std::size_t i = 0; i < ns; ++i) {
      DerivativeCheck c;
      c.slot = L.layout.name(i);
      c.symbolic = L.compiled_partials[i](s);
      const double v = s[i];
      const double step = 1e-5 * std::max(1.0, std::abs(v));
      try {
        s[i] = v + step;
        const double up = L.compiled_body(s);
        s[i] = v - step;
        const double down = L.compiled_body(s);
        c.finite_difference = (up - down) / (2.0 * step);
      } catch (const DomainError&) {
        c.finite_difference = NAN;
      }
      s[i] = v;
      c.relative_error = std::abs(c.symbolic - c.finite_difference) / std::max(1.0, std::abs(c.symbolic));
      if (std::isnan(c.relative_error)) c.relative_error = INFINITY;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace herglotz
