#include "herglotz/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "herglotz/conditions.hpp"
#include "herglotz/csv.hpp"
#include "herglotz/error.hpp"
#include "herglotz/functional.hpp"
#include "herglotz/multipliers.hpp"
#include "herglotz/noether.hpp"
#include "herglotz/reduction.hpp"
#include "herglotz/solver.hpp"
#include "herglotz/spec_file.hpp"
#include "herglotz/trajectory.hpp"

namespace herglotz {

namespace {

struct Loaded {
  ProblemFileContent content;
  std::shared_ptr<const ProblemSpec> problem;
};

Loaded load(const std::string& path, bool check_derivatives = true) {
  Loaded l;
  l.content = problem_content(read_spec_file(path));
  l.problem = std::make_shared<const ProblemSpec>(build_problem(l.content, check_derivatives));
  return l;
}

int intervals_for(const ProblemSpec& p, double h) {
  if (!(h > 0.0)) throw ValidationError("--h must be positive");
  return std::max(1, static_cast<int>(std::ceil((p.b - p.a) / h - 1e-9)));
}

std::vector<Expr> parse_candidate(const std::vector<std::string>& src) {
  std::vector<Expr> out;
  for (std::size_t c = 0; c < src.size(); ++c) {
    try {
      out.push_back(parse_expression(src[c]));
    } catch (const InputError& e) {
      throw ValidationError("candidate x" + std::to_string(c + 1) + ": " + e.what());
    }
  }
  return out;
}

// CSV destination: a file when a path is given, the primary stream otherwise.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("cannot write '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) return;
  Output o(path, std::cout);
  body(o.stream());
}

std::string norm_line(const ResidualReport& r) {
  return "el1 = " + format_number(r.norms.el1) + "\nel2 = " + format_number(r.norms.el2) +
         "\ntc = " + format_number(r.norms.tc) + "\ndbr = " + format_number(r.norms.dbr) +
         "\nel1_all = " + format_number(r.norms_all.el1) + "\nel2_all = " + format_number(r.norms_all.el2) +
         "\ndbr_all = " + format_number(r.norms_all.dbr) + "\n";
}

struct Common {
  std::string file;
  std::string out_path;
  double h = 1e-3;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order Herglotz problems with time delay", "herglotz"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h

  Common sim_o, solve_o, verify_o, reduce_o, charge_o, check_o;
  std::vector<std::string> sim_x;
  auto* sim = app.add_subcommand("simulate", "integrate z' = L along a candidate x");
  sim->add_option("file", sim_o.file, "problem file")->required();
  sim->add_option("--h", sim_o.h, "grid step");
  sim->add_option("--x", sim_x, "candidate component (repeat per component); default [candidate]");
  sim->add_option("--out", sim_o.out_path, "trajectory csv");

  SolveOptions sopts;
  std::string solve_mult, solve_res;
  auto* solve = app.add_subcommand("solve", "compute an extremal");
  solve->add_option("file", solve_o.file, "problem file")->required();
  solve->add_option("--h", solve_o.h, "grid step");
  solve->add_option("--tol", sopts.tol_residual, "residual tolerance");
  solve->add_option("--max-iters", sopts.max_iters, "Newton iterations");
  solve->add_option("--damping", sopts.damping, "initial damping in (0, 1]");
  solve->add_option("--out", solve_o.out_path, "trajectory csv");
  solve->add_option("--multipliers", solve_mult, "psi/phi csv");
  solve->add_option("--residuals", solve_res, "residual csv");

  std::string verify_traj, verify_res;
  bool verify_columns = false;
  auto* verify = app.add_subcommand("verify", "residuals of a trajectory csv");
  verify->add_option("file", verify_o.file, "problem file")->required();
  verify->add_option("trajectory", verify_traj, "trajectory csv")->required();
  verify->add_flag("--use-columns", verify_columns, "take derivatives from the csv instead of rebuilding them");
  verify->add_option("--residuals", verify_res, "residual csv");

  auto* reduce = app.add_subcommand("reduce", "write the stacked problem without delay");
  reduce->add_option("file", reduce_o.file, "problem file")->required();
  reduce->add_option("--out", reduce_o.out_path, "reduced spec file");

  std::string charge_family, charge_traj;
  double charge_threshold = 1e-6, charge_ds = 1e-4;
  auto* charge = app.add_subcommand("charge", "Noether charge along a trajectory");
  charge->add_option("file", charge_o.file, "problem file")->required();
  charge->add_option("family", charge_family, "family file (default: [family] of the problem file)");
  charge->add_option("--trajectory", charge_traj, "trajectory csv (default: [candidate], else solve)");
  charge->add_option("--h", charge_o.h, "grid step");
  charge->add_option("--threshold", charge_threshold, "largest invariance defect accepted");
  charge->add_option("--ds", charge_ds, "step in s for the invariance check");
  charge->add_option("--out", charge_o.out_path, "charge csv");

  int check_points = 10;
  unsigned check_seed = 20240611u;
  auto* check = app.add_subcommand("check-derivs", "compare symbolic partials with central differences");
  check->add_option("file", check_o.file, "problem file")->required();
  check->add_option("--points", check_points, "random bindings");
  check->add_option("--seed", check_seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*sim) {
      const Loaded l = load(sim_o.file);
      const auto src = sim_x.empty() ? l.content.candidate : sim_x;
      if (src.empty()) throw ValidationError("no candidate: pass --x or add a [candidate] section");
      const Grid g = Grid::make(l.problem->a, l.problem->b, l.problem->tau, intervals_for(*l.problem, sim_o.h),
                                l.problem->order());
      const SimulationReport r = simulate_z(trajectory_from_expressions(l.problem, g, parse_candidate(src)));
      Output csv(sim_o.out_path, out);
      write_trajectory_csv(csv.stream(), r.trajectory);
      std::ostream& summary = sim_o.out_path.empty() ? err : out;
      summary << "z(b) = " << format_number(r.trajectory.z().back()) << "\nadmissibility defect = "
              << format_number(r.admissibility_defect) << '\n';
      return exit_ok;
    }

    if (*solve) {
      const Loaded l = load(solve_o.file);
      sopts.intervals = intervals_for(*l.problem, solve_o.h);
      const SolveResult r = solve_extremal(l.problem, sopts);
      Output csv(solve_o.out_path, out);
      write_trajectory_csv(csv.stream(), r.trajectory);
      write_to(solve_mult, [&](std::ostream& o) { write_multipliers_csv(o, r.trajectory, r.multipliers); });
      write_to(solve_res, [&](std::ostream& o) { write_residual_csv(o, r.report); });
      std::ostream& summary = solve_o.out_path.empty() ? err : out;
      summary << norm_line(r.report) << "root = " << format_number(r.root_residual)
              << "\niterations = " << r.log.size() - 1 << "\nconverged = " << (r.converged ? "yes" : "no") << '\n';
      return r.converged ? exit_ok : exit_not_converged;
    }

    if (*verify) {
      const Loaded l = load(verify_o.file);
      std::ifstream in(verify_traj, std::ios::binary);
      if (!in) throw ValidationError("cannot open '" + verify_traj + "'");
      const StateTrajectory x = read_trajectory_csv(
          in, l.problem, verify_columns ? DerivativeSource::columns : DerivativeSource::rebuild);
      const NodeEvaluation ev = evaluate_at_nodes(x);
      const MultiplierSet mult = compute_phi(x, compute_psi(x), ev);
      const ResidualReport rep = residual_report(x, mult, ev);
      write_to(verify_res, [&](std::ostream& o) { write_residual_csv(o, rep); });
      const SimulationReport resim = simulate_z(x);
      double zgap = 0.0;
      for (std::size_t i = 0; i < x.z().size(); ++i) zgap = std::max(zgap, std::abs(x.z()[i] - resim.trajectory.z()[i]));
      out << norm_line(rep) << "z mismatch = " << format_number(zgap) << '\n';
      return exit_ok;
    }

    if (*reduce) {
      const Loaded l = load(reduce_o.file);
      const ReducedProblem rp = reduce_delay(*l.problem);
      const std::string text = format_spec(reduced_document(rp));
      reduced_from_document(parse_spec_text(text));  // must read back
      Output o(reduce_o.out_path, out);
      o.stream() << "# stacked names: x{k}_{i} is x^(k)(a + t + (i-1) tau), z{j} is z(a + t + (j-1) tau)\n"
                 << text;
      if (!reduce_o.out_path.empty())
        out << "N = " << rp.N << "\npadded = " << (rp.padded ? "yes" : "no") << "\ncut = " << format_number(rp.cut)
            << '\n';
      return exit_ok;
    }

    if (*charge) {
      const Loaded l = load(charge_o.file);
      const FamilyContent fc = charge_family.empty()
                                   ? (l.content.family ? *l.content.family
                                                       : throw ValidationError("missing section [family]"))
                                   : family_content(read_spec_file(charge_family), l.problem->dimension());
      const InvarianceFamily fam = make_family(fc, l.problem->dimension());
      bool solved_ok = true;
      const StateTrajectory x = [&] {
        if (!charge_traj.empty()) {
          std::ifstream in(charge_traj, std::ios::binary);
          if (!in) throw ValidationError("cannot open '" + charge_traj + "'");
          return read_trajectory_csv(in, l.problem);
        }
        if (!l.content.candidate.empty()) {
          const Grid g = Grid::make(l.problem->a, l.problem->b, l.problem->tau,
                                    intervals_for(*l.problem, charge_o.h), l.problem->order());
          return simulate_z(trajectory_from_expressions(l.problem, g, parse_candidate(l.content.candidate))).trajectory;
        }
        SolveOptions o;
        o.intervals = intervals_for(*l.problem, charge_o.h);
        SolveResult r = solve_extremal(l.problem, o);
        solved_ok = r.converged;
        return std::move(r.trajectory);
      }();
      const InvarianceDefect def = invariance_defect(*l.problem, x, fam, charge_ds);
      const MultiplierSet mult = compute_phi(x, compute_psi(x));
      const ChargeSeries q = noether_charge(x, mult, fam);
      Output csv(charge_o.out_path, out);
      write_charge_csv(csv.stream(), x.grid(), q);
      std::ostream& summary = charge_o.out_path.empty() ? err : out;
      const bool invariant = def.time_scaling <= charge_threshold && def.lagrangian <= charge_threshold;
      summary << "invariance defect (time scaling) = " << format_number(def.time_scaling)
              << "\ninvariance defect (lagrangian) = " << format_number(def.lagrangian)
              << "\ncharge drift = " << format_number(q.drift) << '\n';
      if (!invariant) summary << "family is not invariant; drift is not a conservation result\n";
      if (!solved_ok) {
        summary << "solver did not converge\n";
        return exit_not_converged;
      }
      return exit_ok;
    }

    if (*check) {
      const Loaded l = load(check_o.file, false);
      const auto rows = check_partials(*l.problem, check_points, check_seed);
      out << "point,slot,symbolic,finite_difference,relative_error\n";
      double worst = 0.0;
      const std::size_t per_point = l.problem->layout().size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const DerivativeCheck& r = rows[i];
        out << i / per_point + 1 << ',' << r.slot << ',' << format_number(r.symbolic) << ',' << format_number(r.finite_difference) << ','
            << format_number(r.relative_error) << '\n';
        worst = std::max(worst, std::isfinite(r.relative_error) ? r.relative_error : INFINITY);
      }
      out << "# worst relative error = " << format_number(worst) << '\n';
      if (!(worst <= 1e-6)) {
        err << "error: derivative check failed\n";
        return exit_numeric;
      }
      return exit_ok;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_internal;
}

}  // namespace herglotz
