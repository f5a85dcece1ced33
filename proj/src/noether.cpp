#include "herglotz/noether.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "herglotz/conditions.hpp"
#include "herglotz/csv.hpp"
#include "herglotz/error.hpp"

namespace herglotz {

std::vector<std::string> InvarianceFamily::slots() const {
  std::vector<std::string> s{"s", "t"};
  for (int c = 1; c <= m; ++c) s.push_back("x" + std::to_string(c));
  s.push_back("z");
  return s;
}

namespace {

Expr at_zero(const Expr& e) {
  return simplify(substitute(e, {{"s", Expr::constant(0.0)}}));
}

// true when e(s = 0) agrees with `expected` at random points
bool identity_at_zero(const Expr& e, const std::string& expected, const std::vector<std::string>& slots) {
  const Expr e0 = at_zero(e);
  if (e0.kind() == Expr::Kind::variable && e0.name() == expected) return true;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int accepted = 0;
  for (int attempt = 0; attempt < 200 && accepted < 20; ++attempt) {
    VariableBinding b;
    for (const auto& name : slots) b[name] = u(rng);
    b["s"] = 0.0;
    double v;
    try {
      v = evaluate(e0, b);
    } catch (const DomainError&) {
      continue;
    }
    const double want = b[expected];
    if (!(std::abs(v - want) <= 1e-12 * std::max(1.0, std::abs(want)))) return false;
    ++accepted;
  }
  return accepted > 0;
}

// A map and its first partials in t, x_c and z, all compiled over the family slots.
struct MapPartials {
  CompiledExpr f, ft, fz;
  std::vector<CompiledExpr> fx;
};

MapPartials map_partials(const Expr& e, const InvarianceFamily& fam) {
  const auto slots = fam.slots();
  MapPartials mp{CompiledExpr(e, slots), CompiledExpr(differentiate(e, "t"), slots),
                 CompiledExpr(differentiate(e, "z"), slots), {}};
  for (int c = 1; c <= fam.m; ++c) mp.fx.emplace_back(differentiate(e, "x" + std::to_string(c)), slots);
  return mp;
}

// State at one time: values of x_c^(k) and z, z'.
struct Point {
  double t = 0.0;
  std::vector<double> x;   // [c * (n + 1) + k]
  double z = 0.0, zdot = 0.0;
};

struct Transformed {
  double T = 0.0, Tdot = 0.0, Z = 0.0, Zdot = 0.0;
  std::vector<double> X, Xdot;  // per component
};

Transformed transform(const InvarianceFamily& fam, const MapPartials& tm, const std::vector<MapPartials>& xm,
                      const MapPartials& zm, const Point& pt, int n, double s) {
  std::vector<double> slots(static_cast<std::size_t>(fam.m + 3));
  slots[0] = s;
  slots[1] = pt.t;
  for (int c = 0; c < fam.m; ++c) slots[2 + c] = pt.x[static_cast<std::size_t>(c * (n + 1))];
  slots[static_cast<std::size_t>(fam.m + 2)] = pt.z;
  auto total = [&](const MapPartials& mp) {
    double v = mp.ft(slots) + mp.fz(slots) * pt.zdot;
    for (int c = 0; c < fam.m; ++c) v += mp.fx[c](slots) * pt.x[static_cast<std::size_t>(c * (n + 1) + 1)];
    return v;
  };
  Transformed out;
  out.T = tm.f(slots);
  out.Tdot = total(tm);
  out.Z = zm.f(slots);
  out.Zdot = total(zm);
  for (int c = 0; c < fam.m; ++c) {
    out.X.push_back(xm[c].f(slots));
    out.Xdot.push_back(total(xm[c]));
  }
  return out;
}

}  // namespace

InvarianceFamily make_family(const FamilyContent& content, int m) {
  InvarianceFamily fam;
  fam.m = m;
  fam.xi = content.xi;
  std::vector<std::string> issues;
  const auto slots = fam.slots();
  auto parse = [&](const std::string& src, const std::string& key) {
    try {
      Expr e = parse_expression(src);
      for (const auto& v : free_variables(e))
        if (std::find(slots.begin(), slots.end(), v) == slots.end())
          issues.push_back("family." + key + ": unknown variable '" + v + "'");
      return e;
    } catch (const InputError& err) {
      issues.push_back("family." + key + ": " + err.what());
      return Expr();
    }
  };
  fam.time_map = parse(content.time_map, "T");
  if (static_cast<int>(content.state_maps.size()) != m)
    issues.push_back("family: expected " + std::to_string(m) + " state maps, got " +
                     std::to_string(content.state_maps.size()));
  for (std::size_t c = 0; c < content.state_maps.size(); ++c)
    fam.state_maps.push_back(parse(content.state_maps[c], "X" + std::to_string(c + 1)));
  fam.value_map = parse(content.value_map, "Z");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  if (!identity_at_zero(fam.time_map, "t", slots)) issues.push_back("family.T is not t at s = 0");
  for (int c = 0; c < m; ++c)
    if (!identity_at_zero(fam.state_maps[c], "x" + std::to_string(c + 1), slots))
      issues.push_back("family.X" + std::to_string(c + 1) + " is not x" + std::to_string(c + 1) + " at s = 0");
  if (!identity_at_zero(fam.value_map, "z", slots)) issues.push_back("family.Z is not z at s = 0");
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return fam;
}

LiftedGenerators lift_generators(const InvarianceFamily& fam, const StateTrajectory& traj) {
  if (!traj.has_z()) throw InputError("lift_generators needs a simulated z");
  if (fam.m != traj.dimension()) throw DimensionMismatch("family dimension does not match the trajectory");
  const Grid& g = traj.grid();
  const int n = traj.order(), m = traj.dimension();
  const auto slots = fam.slots();
  auto generator = [&](const Expr& map) {
    CompiledExpr f(at_zero(differentiate(map, "s")), slots);
    NodeSeries out(g.nodes());
    std::vector<double> v(slots.size());
    for (int i = 0; i < g.nodes(); ++i) {
      v[0] = 0.0;
      v[1] = g.node(i);
      for (int c = 0; c < m; ++c) v[2 + c] = traj.x(c, 0)[i];
      v.back() = traj.z()[i];
      out.set(i, f(v));
    }
    return out;
  };
  LiftedGenerators gen{generator(fam.time_map), {}, generator(fam.value_map)};
  for (int c = 0; c < m; ++c) gen.X.push_back(generator(fam.state_maps[c]));
  if (n > 1) {
    const NodeSeries dT = differentiate(gen.T, g, 1);
    for (int k = 1; k <= n - 1; ++k)
      for (int c = 0; c < m; ++c) {
        const NodeSeries dX = differentiate(gen.X[static_cast<std::size_t>((k - 1) * m + c)], g, 1);
        const NodeSeries& xk = traj.x(c, k);
        NodeSeries Xk(g.nodes());
        for (int i = 0; i < g.nodes(); ++i)
          for (Side side : {Side::left, Side::right})
            Xk.set(i, side, dX.at(i, side) - xk.at(i, side) * dT.at(i, side));
        gen.X.push_back(std::move(Xk));
      }
  }
  return gen;
}

namespace {

// Transformed quantities on a set of sample points sharing one stencil layout.
struct TransformedSeries {
  std::vector<NodeSeries> Q;  // [k * m + c], k = 0..n: d^k X^s / d(T^s)^k
  NodeSeries T, Tdot, Z, Zdot;
};

}  // namespace

InvarianceDefect invariance_defect(const ProblemSpec& p, const StateTrajectory& traj, const InvarianceFamily& fam,
                                   double ds) {
  if (!(ds > 0.0 && ds <= 1e-2)) throw ValidationError("invariance_defect: ds must lie in (0, 1e-2]");
  if (!traj.has_z()) throw InputError("invariance_defect needs a simulated z");
  if (fam.m != traj.dimension()) throw DimensionMismatch("family dimension does not match the trajectory");
  const Grid& g = traj.grid();
  const int n = traj.order(), m = traj.dimension();
  const int M = g.intervals(), P = g.delay_steps();
  const NodeEvaluation ev = evaluate_at_nodes(traj);

  const MapPartials tm = map_partials(fam.time_map, fam), zm = map_partials(fam.value_map, fam);
  std::vector<MapPartials> xm;
  for (const auto& e : fam.state_maps) xm.push_back(map_partials(e, fam));

  auto point_on_grid = [&](int i, Side side) {
    Point pt;
    pt.t = g.node(i);
    for (int c = 0; c < m; ++c)
      for (int k = 0; k <= n; ++k) pt.x.push_back(traj.x(c, k).at(i, side));
    pt.z = traj.z()[i];
    pt.zdot = ev.lagrangian.at(i, side);
    return pt;
  };
  auto point_in_history = [&](int j) {
    Point pt;
    pt.t = g.a() - g.tau() + j * g.h();
    for (int c = 0; c < m; ++c)
      for (int k = 0; k <= n; ++k) pt.x.push_back(history_derivative(p, c, k, pt.t));
    pt.z = p.gamma;
    return pt;
  };

  // raw quotient series R_k(s); R_1 by the chain rule, higher k by stencils
  auto build_grid = [&](double s) {
    TransformedSeries ts{std::vector<NodeSeries>(static_cast<std::size_t>((n + 1) * m), NodeSeries(g.nodes())),
                         NodeSeries(g.nodes()), NodeSeries(g.nodes()), NodeSeries(g.nodes()), NodeSeries(g.nodes())};
    for (int i = 0; i <= M; ++i)
      for (Side side : {Side::left, Side::right}) {
        const Transformed tr = transform(fam, tm, xm, zm, point_on_grid(i, side), n, s);
        if (std::abs(tr.Tdot) < 1e-14) throw DegenerateFamily(g.node(i), s);
        ts.T.set(i, side, tr.T);
        ts.Tdot.set(i, side, tr.Tdot);
        ts.Z.set(i, side, tr.Z);
        ts.Zdot.set(i, side, tr.Zdot);
        for (int c = 0; c < m; ++c) {
          ts.Q[c].set(i, side, tr.X[c]);
          if (n >= 1) ts.Q[static_cast<std::size_t>(m + c)].set(i, side, tr.Xdot[c] / tr.Tdot);
        }
      }
    for (int k = 2; k <= n; ++k)
      for (int c = 0; c < m; ++c) {
        const NodeSeries d = differentiate(ts.Q[static_cast<std::size_t>((k - 1) * m + c)], g, 1);
        NodeSeries& q = ts.Q[static_cast<std::size_t>(k * m + c)];
        for (int i = 0; i <= M; ++i)
          for (Side side : {Side::left, Side::right}) q.set(i, side, d.at(i, side) / ts.Tdot.at(i, side));
      }
    return ts;
  };
  // history nodes j = 0..P on [a - tau, a]; plain vectors, one segment
  auto build_history = [&](double s) {
    std::vector<std::vector<double>> Q(static_cast<std::size_t>((n + 1) * m),
                                       std::vector<double>(static_cast<std::size_t>(P + 1)));
    std::vector<double> Tdot(static_cast<std::size_t>(P + 1));
    for (int j = 0; j <= P; ++j) {
      const Transformed tr = transform(fam, tm, xm, zm, point_in_history(j), n, s);
      if (std::abs(tr.Tdot) < 1e-14) throw DegenerateFamily(g.a() - g.tau() + j * g.h(), s);
      Tdot[j] = tr.Tdot;
      for (int c = 0; c < m; ++c) {
        Q[c][j] = tr.X[c];
        if (n >= 1) Q[static_cast<std::size_t>(m + c)][j] = tr.Xdot[c] / tr.Tdot;
      }
    }
    for (int k = 2; k <= n; ++k)
      for (int c = 0; c < m; ++c) {
        auto d = differentiate_series(Q[static_cast<std::size_t>((k - 1) * m + c)], g.h(), 1);
        for (int j = 0; j <= P; ++j) Q[static_cast<std::size_t>(k * m + c)][j] = d[j] / Tdot[j];
      }
    return Q;
  };

  const TransformedSeries base = build_grid(0.0);
  std::vector<std::vector<double>> base_hist;
  if (P > 0) base_hist = build_history(0.0);

  const double zb = traj.z()[M] / (g.b() - g.a());
  const CompiledExpr& L = p.lagrangian.compiled_body;
  const SlotLayout& layout = p.layout();

  // condition values at every (node, side) for one s
  auto conditions = [&](double s) {
    const TransformedSeries ts = build_grid(s);
    std::vector<std::vector<double>> hist;
    if (P > 0) hist = build_history(s);
    // Q_k = x^(k) + (R_k(s) - R_k(0)) keeps the stencil error out of the s = 0 term
    auto q_grid = [&](int c, int k, int i, Side side) {
      const std::size_t idx = static_cast<std::size_t>(k * m + c);
      if (k == 0) return ts.Q[idx].at(i, side);
      return traj.x(c, k).at(i, side) + ts.Q[idx].at(i, side) - base.Q[idx].at(i, side);
    };
    auto q_hist = [&](int c, int k, int j) {
      const std::size_t idx = static_cast<std::size_t>(k * m + c);
      if (k == 0) return hist[idx][j];
      const double t = g.a() - g.tau() + j * g.h();
      return history_derivative(p, c, k, t) + hist[idx][j] - base_hist[idx][j];
    };

    std::vector<double> c1, c2;
    std::vector<double> slots(layout.size());
    for (int i = 0; i <= M; ++i) {
      std::vector<Side> sides{Side::right};
      if (i == M) sides = {Side::left};
      else if (i > 0 && g.is_break(i)) sides = {Side::left, Side::right};
      for (Side side : sides) {
        slots[SlotLayout::time] = ts.T.at(i, side);
        slots[SlotLayout::value] = ts.Z.at(i, side);
        for (int c = 0; c < m; ++c)
          for (int k = 0; k <= n; ++k) {
            slots[layout.state(c, k)] = q_grid(c, k, i, side);
            double lag;
            if (P == 0) {
              lag = slots[layout.state(c, k)];
            } else {
              const int d = i - P;
              if (d < 0 || (d == 0 && side == Side::left))
                lag = q_hist(c, k, d + P);
              else
                lag = q_grid(c, k, d, side);
            }
            slots[layout.delayed(c, k)] = lag;
          }
        const double Lv = L(slots);
        if (!std::isfinite(Lv)) throw NonFiniteLagrangian(g.node(i));
        c1.push_back((zb + fam.xi * s) * ts.Tdot.at(i, side) - zb);
        c2.push_back(ts.Zdot.at(i, side) - ts.Tdot.at(i, side) * Lv);
      }
    }
    return std::pair{c1, c2};
  };

  const auto [c1p, c2p] = conditions(ds);
  const auto [c1m, c2m] = conditions(-ds);
  InvarianceDefect out;
  for (std::size_t r = 0; r < c1p.size(); ++r) {
    out.time_scaling = std::max(out.time_scaling, std::abs(c1p[r] - c1m[r]) / (2.0 * ds));
    out.lagrangian = std::max(out.lagrangian, std::abs(c2p[r] - c2m[r]) / (2.0 * ds));
  }
  return out;
}

ChargeSeries noether_charge(const StateTrajectory& traj, const MultiplierSet& mult, const InvarianceFamily& fam) {
  return noether_charge(traj, mult, lift_generators(fam, traj), evaluate_at_nodes(traj));
}

ChargeSeries noether_charge(const StateTrajectory& traj, const MultiplierSet& mult, const LiftedGenerators& gen,
                            const NodeEvaluation& ev) {
  const Grid& g = traj.grid();
  const int n = traj.order(), m = traj.dimension(), M = g.intervals();
  ChargeSeries out;
  for (int i = 0; i <= M; ++i) {
    const Side side = i == M ? Side::left : Side::right;
    double paired = 0.0, energy = mult.psi[i] * ev.lagrangian.at(i, side);
    for (int k = 1; k <= n; ++k)
      for (int c = 0; c < m; ++c) {
        const double phi = mult.at(k, c).at(i, side);
        paired += phi * gen.X[static_cast<std::size_t>((k - 1) * m + c)].at(i, side);
        energy += phi * traj.x(c, k).at(i, side);
      }
    out.values.push_back(paired + mult.psi[i] * gen.Z.at(i, side) - energy * gen.T.at(i, side));
  }
  out.drift = drift(out.values);
  return out;
}

void write_charge_csv(std::ostream& out, const Grid& grid, const ChargeSeries& charge) {
  write_csv_header(out, {"t", "charge"});
  for (std::size_t i = 0; i < charge.values.size(); ++i) {
    const double row[2] = {grid.node(static_cast<int>(i)), charge.values[i]};
    write_csv_row(out, row);
  }
  out << "# drift=" << format_number(charge.drift) << '\n';
}

}  // namespace herglotz
