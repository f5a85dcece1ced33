#include "herglotz/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "herglotz/csv.hpp"
#include "herglotz/error.hpp"
#include "herglotz/functional.hpp"

namespace herglotz {

std::string stacked_name(int k, int stage, int component, int m) {
  std::string s = "x" + std::to_string(k) + "_" + std::to_string(stage);
  if (m > 1) s += "_" + std::to_string(component + 1);
  return s;
}

std::string stacked_value_name(int stage) { return "z" + std::to_string(stage); }

std::vector<std::string> ReducedProblem::stacked_slots() const {
  std::vector<std::string> s{"t"};
  for (int i = 0; i <= N; ++i)
    for (int c = 0; c < m; ++c)
      for (int k = 0; k <= n; ++k) s.push_back(stacked_name(k, i, c, m));
  for (int j = 1; j <= N; ++j) s.push_back(stacked_value_name(j));
  return s;
}

namespace {

std::size_t state_slot(const ReducedProblem& rp, int stage, int c, int k) {
  return 1 + static_cast<std::size_t>((stage * rp.m + c) * (rp.n + 1) + k);
}

std::size_t value_slot(const ReducedProblem& rp, int stage) {
  return 1 + static_cast<std::size_t>((rp.N + 1) * rp.m * (rp.n + 1) + stage - 1);
}

Expr shifted_time(double offset) {
  return offset == 0.0 ? Expr::variable("t") : Expr::variable("t") + Expr::constant(offset);
}

}  // namespace

ReducedProblem reduce_delay(const ProblemSpec& p) {
  if (!(p.tau > 0.0)) throw ZeroDelay();
  ReducedProblem rp;
  rp.origin = p.a;
  rp.tau = p.tau;
  rp.n = p.order();
  rp.m = p.dimension();
  rp.gamma = p.gamma;
  const double len = p.b - p.a;
  rp.N = std::max(1, static_cast<int>(std::ceil(len / p.tau - 1e-9)));
  rp.cut = len - (rp.N - 1) * p.tau;
  rp.padded = std::abs(rp.cut - p.tau) > 1e-9 * p.tau;
  if (!rp.padded) rp.cut = p.tau;

  const SlotLayout& layout = p.layout();
  for (int j = 1; j <= rp.N; ++j) {
    std::map<std::string, Expr, std::less<>> sub;
    sub[layout.name(SlotLayout::time)] = shifted_time(p.a + (j - 1) * p.tau);
    sub[layout.name(SlotLayout::value)] = Expr::variable(stacked_value_name(j));
    for (int c = 0; c < rp.m; ++c)
      for (int k = 0; k <= rp.n; ++k) {
        sub[layout.name(layout.state(c, k))] = Expr::variable(stacked_name(k, j, c, rp.m));
        sub[layout.name(layout.delayed(c, k))] = Expr::variable(stacked_name(k, j - 1, c, rp.m));
      }
    rp.lagrangians.push_back(simplify(substitute(p.lagrangian.body, sub)));
  }
  for (int c = 0; c < rp.m; ++c) {
    std::vector<Expr> ders;
    for (int k = 0; k <= rp.n; ++k)
      ders.push_back(simplify(substitute(p.history_derivatives[c][k], {{"t", shifted_time(p.a - p.tau)}})));
    rp.initial.push_back(std::move(ders));
  }
  return rp;
}

// ---- spec file form ----

namespace {

SpecValue number_value(double v) { return SpecValue{false, format_number(v), v, 0}; }
SpecValue text_value(std::string s) { return SpecValue{true, std::move(s), 0.0, 0}; }

}  // namespace

SpecDocument reduced_document(const ReducedProblem& rp) {
  SpecDocument doc;
  SpecSection head{"reduced", 0, {}};
  head.entries = {{"origin", number_value(rp.origin)}, {"tau", number_value(rp.tau)},
                  {"N", number_value(rp.N)},           {"n", number_value(rp.n)},
                  {"m", number_value(rp.m)},           {"gamma", number_value(rp.gamma)},
                  {"cut", number_value(rp.cut)},       {"padded", number_value(rp.padded ? 1 : 0)}};
  SpecSection lag{"lagrangian", 0, {}};
  for (int j = 1; j <= rp.N; ++j) lag.entries.emplace_back("L" + std::to_string(j), text_value(unparse(rp.lagrangians[j - 1])));
  SpecSection coupling{"coupling", 0, {}};
  coupling.entries = {{"x", text_value("x{k}_{i}(0) = x{k}_{i-1}(tau), k = 0..n-1, i = 1..N")},
                      {"z", text_value("z{j}(0) = z{j-1}(tau), j = 2..N")},
                      {"last", text_value("stage N is integrated on [0, cut]")}};
  SpecSection init{"initial", 0, {}};
  for (int c = 0; c < rp.m; ++c)
    for (int k = 0; k <= rp.n; ++k) init.entries.emplace_back(stacked_name(k, 0, c, rp.m), text_value(unparse(rp.initial[c][k])));
  init.entries.emplace_back("z1", number_value(rp.gamma));
  doc.sections = {head, lag, coupling, init};
  return doc;
}

ReducedProblem reduced_from_document(const SpecDocument& doc) {
  std::vector<std::string> issues;
  auto section = [&](const char* name) {
    const SpecSection* s = doc.find(name);
    if (!s) issues.push_back(std::string("missing section [") + name + "]");
    return s;
  };
  const SpecSection* head = section("reduced");
  const SpecSection* lag = section("lagrangian");
  const SpecSection* init = section("initial");
  section("coupling");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  auto number = [&](const char* key) {
    const SpecValue* v = head->find(key);
    if (!v || v->quoted) {
      issues.push_back(std::string("reduced.") + key + ": missing number");
      return 0.0;
    }
    return v->number;
  };
  ReducedProblem rp;
  rp.origin = number("origin");
  rp.tau = number("tau");
  rp.N = static_cast<int>(number("N"));
  rp.n = static_cast<int>(number("n"));
  rp.m = static_cast<int>(number("m"));
  rp.gamma = number("gamma");
  rp.cut = number("cut");
  rp.padded = number("padded") != 0.0;
  if (!issues.empty()) throw ValidationError(std::move(issues));
  if (rp.N < 1 || rp.n < 1 || rp.m < 1 || !(rp.tau > 0.0)) throw ValidationError("reduced: bad sizes");

  const auto slots = rp.stacked_slots();
  const std::set<std::string> known(slots.begin(), slots.end());
  auto expr = [&](const SpecSection* s, const std::string& key) {
    const SpecValue* v = s->find(key);
    if (!v || !v->quoted) {
      issues.push_back(s->name + "." + key + ": missing expression");
      return Expr();
    }
    try {
      Expr e = parse_expression(v->text);
      for (const auto& name : free_variables(e))
        if (!known.count(name)) issues.push_back(s->name + "." + key + ": unknown variable '" + name + "'");
      return e;
    } catch (const InputError& err) {
      issues.push_back(s->name + "." + key + ": " + err.what());
      return Expr();
    }
  };
  for (int j = 1; j <= rp.N; ++j) rp.lagrangians.push_back(expr(lag, "L" + std::to_string(j)));
  for (int c = 0; c < rp.m; ++c) {
    std::vector<Expr> ders;
    for (int k = 0; k <= rp.n; ++k) ders.push_back(expr(init, stacked_name(k, 0, c, rp.m)));
    rp.initial.push_back(std::move(ders));
  }
  if (lag->entries.size() != static_cast<std::size_t>(rp.N)) issues.push_back("lagrangian: expected N entries");
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return rp;
}

// ---- stacked samples ----

StackedTrajectory stack_trajectory(const ReducedProblem& rp, const StateTrajectory& traj) {
  const Grid& g = traj.grid();
  const int p = g.delay_steps(), M = g.intervals();
  if (p == 0) throw ZeroDelay();
  if (traj.order() != rp.n || traj.dimension() != rp.m || std::abs(g.tau() - rp.tau) > 1e-9 * rp.tau)
    throw DimensionMismatch("trajectory does not belong to this reduced problem");
  StackedTrajectory st;
  st.N = rp.N;
  st.n = rp.n;
  st.m = rp.m;
  st.p = p;
  st.h = g.h();
  st.last_steps = M - (rp.N - 1) * p;
  if (st.last_steps < 1 || st.last_steps > p) throw DimensionMismatch("grid does not split into N stages");
  const std::size_t len = static_cast<std::size_t>(p + 1);
  st.x.assign(static_cast<std::size_t>((rp.N + 1) * rp.m * (rp.n + 1)), std::vector<double>(len, 0.0));

  const ProblemSpec& prob = traj.problem();
  for (int c = 0; c < rp.m; ++c)
    for (int k = 0; k <= rp.n; ++k)
      for (int q = 0; q <= p; ++q) st.state(0, c, k)[q] = history_derivative(prob, c, k, g.a() - g.tau() + q * g.h());

  for (int i = 1; i <= rp.N; ++i)
    for (int q = 0; q <= st.steps(i); ++q) {
      const int gi = (i - 1) * p + q;
      const Side side = q == st.steps(i) ? Side::left : Side::right;
      for (int c = 0; c < rp.m; ++c)
        for (int k = 0; k <= rp.n; ++k) st.state(i, c, k)[q] = traj.x(c, k).at(gi, side);
    }
  if (traj.has_z()) {
    st.z.assign(static_cast<std::size_t>(rp.N), std::vector<double>(len, 0.0));
    for (int j = 1; j <= rp.N; ++j)
      for (int q = 0; q <= st.steps(j); ++q) st.z[j - 1][q] = traj.z()[(j - 1) * p + q];
  }
  return st;
}

UnstackedSamples unstack(const StackedTrajectory& st) {
  const int M = (st.N - 1) * st.p + st.last_steps;
  UnstackedSamples out;
  out.x.assign(static_cast<std::size_t>(st.m * (st.n + 1)), std::vector<double>(static_cast<std::size_t>(M + 1)));
  if (!st.z.empty()) out.z.resize(static_cast<std::size_t>(M + 1));
  for (int i = 0; i <= M; ++i) {
    int stage = i / st.p + 1, q = i % st.p;
    if (stage > st.N || i == M) {
      stage = st.N;
      q = st.last_steps;
    }
    for (int c = 0; c < st.m; ++c)
      for (int k = 0; k <= st.n; ++k) out.x[static_cast<std::size_t>(c * (st.n + 1) + k)][i] = st.state(stage, c, k)[q];
    if (!st.z.empty()) out.z[i] = st.z[stage - 1][q];
  }
  return out;
}

// ---- stacked simulation ----

namespace {

class StageEvaluator {
 public:
  StageEvaluator(const ReducedProblem& rp, const StackedTrajectory& st) : rp_(rp), st_(st) {
    const auto slots = rp.stacked_slots();
    for (const auto& L : rp.lagrangians) {
      body_.emplace_back(L, slots);
      dz_.emplace_back(differentiate(L, stacked_value_name(static_cast<int>(body_.size()))), slots);
      dt_.emplace_back(differentiate(L, "t"), slots);
    }
    const std::vector<std::string> time_only{"t"};
    for (const auto& comp : rp.initial) {
      std::vector<CompiledExpr> ders;
      for (const auto& e : comp) ders.emplace_back(e, time_only);
      initial_.push_back(std::move(ders));
    }
    slots_.assign(slots.size(), 0.0);
  }

  // stage j and j - 1 values at node q
  std::vector<double>& at_node(int j, int q, double z) {
    slots_[0] = q * st_.h;
    for (int i : {j - 1, j})
      for (int c = 0; c < rp_.m; ++c)
        for (int k = 0; k <= rp_.n; ++k) slots_[state_slot(rp_, i, c, k)] = st_.state(i, c, k)[q];
    slots_[value_slot(rp_, j)] = z;
    return slots_;
  }

  // stage j and j - 1 values at q + 1/2
  std::vector<double>& at_midpoint(int j, int q, double z) {
    const double t = (q + 0.5) * st_.h;
    slots_[0] = t;
    for (int i : {j - 1, j})
      for (int c = 0; c < rp_.m; ++c)
        for (int k = 0; k <= rp_.n; ++k) {
          double v;
          if (i == 0) {
            const double arg[1] = {t};
            v = initial_[c][k](arg);
          } else {
            v = interpolate(i, c, k, q);
          }
          slots_[state_slot(rp_, i, c, k)] = v;
        }
    slots_[value_slot(rp_, j)] = z;
    return slots_;
  }

  double lagrangian(int j) const { return body_[j - 1](slots_); }
  double dz(int j) const { return dz_[j - 1](slots_); }
  double dt(int j) const { return dt_[j - 1](slots_); }
  std::vector<double>& slots() { return slots_; }

 private:
  double interpolate(int i, int c, int k, int q) const {
    const auto& f = st_.state(i, c, k);
    if (k < rp_.n) {
      const auto& df = st_.state(i, c, k + 1);
      // Hermite at theta = 1/2
      return 0.5 * (f[q] + f[q + 1]) + st_.h / 8.0 * (df[q] - df[q + 1]);
    }
    const int last = st_.steps(i);
    const int s = std::clamp(q - 1, 0, last - 3);
    const double x = q + 0.5 - s;
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (x - b) / (a - b);
      result += w * f[s + a];
    }
    return result;
  }

  const ReducedProblem& rp_;
  const StackedTrajectory& st_;
  std::vector<CompiledExpr> body_, dz_, dt_;
  std::vector<std::vector<CompiledExpr>> initial_;
  std::vector<double> slots_;
};

void simulate_stacked(const ReducedProblem& rp, StackedTrajectory& st) {
  StageEvaluator ev(rp, st);
  st.z.assign(static_cast<std::size_t>(rp.N), std::vector<double>(static_cast<std::size_t>(st.p + 1), 0.0));
  const double h = st.h;
  for (int j = 1; j <= rp.N; ++j) {
    auto& z = st.z[j - 1];
    z[0] = j == 1 ? rp.gamma : st.z[j - 2][st.p];
    for (int q = 0; q < st.steps(j); ++q) {
      const double t0 = q * h;
      auto check = [&](double v, double t) {
        if (!std::isfinite(v)) throw NonFiniteLagrangian(rp.origin + (j - 1) * rp.tau + t);
        return v;
      };
      ev.at_node(j, q, z[q]);
      const double k1 = check(ev.lagrangian(j), t0);
      ev.at_midpoint(j, q, z[q] + 0.5 * h * k1);
      const double k2 = check(ev.lagrangian(j), t0 + 0.5 * h);
      ev.slots()[value_slot(rp, j)] = z[q] + 0.5 * h * k2;
      const double k3 = check(ev.lagrangian(j), t0 + 0.5 * h);
      ev.at_node(j, q + 1, z[q] + h * k3);
      const double k4 = check(ev.lagrangian(j), t0 + h);
      z[q + 1] = z[q] + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    }
  }
}

}  // namespace

ReductionReport verify_reduction_equivalence(const ProblemSpec& p, const StateTrajectory& traj) {
  const ReducedProblem rp = reduce_delay(p);
  ReductionReport report;
  report.stacked = stack_trajectory(rp, traj);
  simulate_stacked(rp, report.stacked);
  const StackedTrajectory& st = report.stacked;

  const double zb = traj.has_z() ? traj.z().back() : simulate_z(traj).trajectory.z().back();
  report.objective_defect = std::abs(st.z[rp.N - 1][st.last_steps] - zb);
  for (int i = 1; i <= rp.N; ++i)
    for (int c = 0; c < rp.m; ++c)
      for (int k = 0; k < rp.n; ++k)
        report.coupling_defect =
            std::max(report.coupling_defect, std::abs(st.state(i, c, k)[0] - st.state(i - 1, c, k)[st.p]));
  return report;
}

std::vector<std::vector<double>> reduced_psi(const ReducedProblem& rp, const StackedTrajectory& st) {
  if (st.z.empty()) throw InputError("reduced_psi needs stacked z samples");
  StageEvaluator ev(rp, st);
  std::vector<std::vector<double>> psi(static_cast<std::size_t>(rp.N),
                                       std::vector<double>(static_cast<std::size_t>(st.p + 1), 1.0));
  double end = 1.0;
  for (int j = rp.N; j >= 1; --j) {
    const int steps = st.steps(j);
    if (steps < 3) throw GridTooSmall(static_cast<std::size_t>(steps + 1), 4);
    std::vector<double> f(static_cast<std::size_t>(steps + 1));
    for (int q = 0; q <= steps; ++q) {
      ev.at_node(j, q, st.z[j - 1][q]);
      f[q] = ev.dz(j);
    }
    const auto I = integrate_to_end(f, st.h);
    for (int q = 0; q <= steps; ++q) psi[j - 1][q] = end * std::exp(I[q]);
    end = psi[j - 1][0];
  }
  return psi;
}

StackedMultipliers stack_multipliers(const ReducedProblem& rp, const StateTrajectory& traj,
                                     const MultiplierSet& mult) {
  const Grid& g = traj.grid();
  const int p = g.delay_steps(), M = g.intervals();
  if (p == 0) throw ZeroDelay();
  const std::size_t len = static_cast<std::size_t>(p + 1);
  StackedMultipliers out;
  out.psi.assign(static_cast<std::size_t>(rp.N), std::vector<double>(len, 1.0));
  out.phi.assign(static_cast<std::size_t>(rp.n * (rp.N + 1) * rp.m), std::vector<double>(len, 0.0));
  const int last = M - (rp.N - 1) * p;
  for (int j = 1; j <= rp.N; ++j)
    for (int q = 0; q <= (j == rp.N ? last : p); ++q) out.psi[j - 1][q] = mult.psi[(j - 1) * p + q];

  const auto history = compute_phi_history(traj, mult.psi, evaluate_at_nodes(traj));
  auto index = [&](int l, int i, int c) { return static_cast<std::size_t>(((l - 1) * (rp.N + 1) + i) * rp.m + c); };
  for (int l = 1; l <= rp.n; ++l)
    for (int c = 0; c < rp.m; ++c) {
      for (int q = 0; q <= p; ++q) out.phi[index(l, 0, c)][q] = history[static_cast<std::size_t>((l - 1) * rp.m + c)][q];
      for (int i = 1; i <= rp.N; ++i) {
        const int steps = i == rp.N ? last : p;
        for (int q = 0; q <= steps; ++q)
          out.phi[index(l, i, c)][q] = mult.at(l, c).at((i - 1) * p + q, q == steps ? Side::left : Side::right);
      }
    }
  return out;
}

ReducedHamiltonian reduced_hamiltonian(const ReducedProblem& rp, const StackedTrajectory& st,
                                       const StackedMultipliers& mult) {
  const std::size_t len = static_cast<std::size_t>(st.p + 1);
  auto sized = [&](const std::vector<std::vector<double>>& v, std::size_t count) {
    if (v.size() != count) return false;
    for (const auto& s : v)
      if (s.size() != len) return false;
    return true;
  };
  if (st.z.empty() || !sized(st.z, static_cast<std::size_t>(rp.N)) || !sized(mult.psi, static_cast<std::size_t>(rp.N)) ||
      !sized(mult.phi, static_cast<std::size_t>(rp.n * (rp.N + 1) * rp.m)))
    throw DimensionMismatch("stacked series do not match the reduced problem");

  StageEvaluator ev(rp, st);
  ReducedHamiltonian out{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
  for (int q = 0; q <= st.p; ++q) {
    double H = 0.0, Ht = 0.0;
    for (int l = 1; l <= rp.n; ++l)
      for (int i = 0; i <= rp.N; ++i)
        for (int c = 0; c < rp.m; ++c)
          H += mult.phi[static_cast<std::size_t>(((l - 1) * (rp.N + 1) + i) * rp.m + c)][q] * st.state(i, c, l)[q];
    for (int j = 1; j <= rp.N; ++j) {
      if (q > st.steps(j)) continue;  // past the cut, L_N is zero
      ev.at_node(j, q, st.z[j - 1][q]);
      H += mult.psi[j - 1][q] * ev.lagrangian(j);
      Ht += mult.psi[j - 1][q] * ev.dt(j);
    }
    out.H[q] = H;
    out.explicit_time[q] = Ht;
  }
  return out;
}

}  // namespace herglotz
