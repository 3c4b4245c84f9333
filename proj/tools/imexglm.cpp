// Command-line harness: order verification, stability scans, convergence
// studies, single integrations, and catalog export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "imexglm/convergence.hpp"
#include "imexglm/series.hpp"
#include "imexglm/stability.hpp"

using namespace imexglm;

namespace {

int run_verify(const std::string& only) {
  std::printf("%-6s %-9s %16s %16s %16s\n", "method", "member", "stage-order-res",
              "order-res", "termination-res");
  bool all_ok = true;
  for (const auto& pair : catalog()) {
    if (!only.empty() && pair.name != only) continue;
    const int p = pair.explicit_method.p;
    const double bound = (p == 2) ? 1e-13 : 1e-9;
    const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, p);
    const auto Wi = weight_vectors(pair.implicit_method.A, pair.implicit_method.c, p);
    const double se = stage_order_residual(pair.explicit_method, We, p, p);
    const double oe = order_residual(pair.explicit_method, We, p);
    const double te = termination_row_residual(pair.termination.beta0,
                                               pair.termination.gamma0,
                                               pair.explicit_method, We, p);
    const double si = stage_order_residual(pair.implicit_method, Wi, p, p);
    const double oi = order_residual(pair.implicit_method, Wi, p);
    const double ti = termination_row_residual(pair.termination.beta0_hat,
                                               pair.termination.gamma0,
                                               pair.implicit_method, Wi, p);
    std::printf("%-6s %-9s %16.3e %16.3e %16.3e\n", pair.name.c_str(), "explicit", se, oe,
                te);
    std::printf("%-6s %-9s %16.3e %16.3e %16.3e\n", pair.name.c_str(), "implicit", si, oi,
                ti);
    all_ok = all_ok && se < bound && oe < bound && te < bound && si < bound &&
             oi < bound && ti < bound && validate(pair).empty();
  }
  std::printf("%s\n", all_ok ? "all residuals within bounds" : "RESIDUALS OUT OF BOUNDS");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX general linear method toolkit"};
  app.require_subcommand(1);

  std::string method, member = "explicit", problem, out_path, format = "csv";
  std::string start_name = "analytic";
  bool pair_scan = false;
  double alpha = 90.0, h0 = 0.025, h = 0.01;
  int levels = 5;
  RegionScan grid;
  ProblemParams params;
  double tf = -1.0;

  auto add_problem_flags = [&](CLI::App* cmd) {
    cmd->add_option("--problem", problem, "problem name")->required();
    cmd->add_option("--eps", params.eps, "van der Pol stiffness");
    cmd->add_option("--mu", params.mu, "Prothero-Robinson stiffness (negative)");
    cmd->add_option("--n", params.n, "advection-diffusion grid points");
    cmd->add_option("--a", params.a, "advection velocity");
    cmd->add_option("--nu", params.nu, "diffusivity");
    cmd->add_option("--xi", params.xi, "explicit linear coefficient");
    cmd->add_option("--xihat", params.xi_hat, "implicit linear coefficient");
    cmd->add_option("--tf", tf, "final time override");
  };

  auto* verify = app.add_subcommand("verify", "order-condition residual table");
  verify->add_option("--method", method, "restrict to one pair");

  auto* scan = app.add_subcommand("scan", "stability-region scan to CSV");
  scan->add_option("--method", method, "pair name")->required();
  scan->add_option("--member", member, "explicit|implicit (single-method scan)");
  scan->add_flag("--pair", pair_scan, "constrained scan over the stiff sector");
  scan->add_option("--alpha", alpha, "sector half-angle in degrees");
  scan->add_option("--out", out_path, "output CSV path")->required();
  scan->add_option("--re-min", grid.re_min);
  scan->add_option("--re-max", grid.re_max);
  scan->add_option("--im-min", grid.im_min);
  scan->add_option("--im-max", grid.im_max);
  scan->add_option("--nx", grid.nx);
  scan->add_option("--ny", grid.ny);

  auto* converge = app.add_subcommand("converge", "convergence study");
  converge->add_option("--method", method, "method name")->required();
  add_problem_flags(converge);
  converge->add_option("--h0", h0, "coarsest step size");
  converge->add_option("--levels", levels, "number of halvings");
  converge->add_option("--start", start_name, "analytic|imexrk");
  converge->add_option("--out", out_path, "report output path");
  converge->add_option("--format", format, "csv|json");

  auto* integ = app.add_subcommand("integrate", "single integration to JSON");
  integ->set_help_flag("--help", "print help");  // frees -h for the step size
  integ->add_option("--method", method, "method name")->required();
  add_problem_flags(integ);
  integ->add_option("--h", h, "step size")->required();
  integ->add_option("--start", start_name, "analytic|imexrk");
  integ->add_option("--out", out_path, "output path (default stdout)");

  auto* cat = app.add_subcommand("catalog", "dump the method catalog as JSON");
  cat->add_option("--out", out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      if (!method.empty()) find_pair(method);  // unknown name -> usage error
      return run_verify(method);
    }

    if (scan->parsed()) {
      const auto& pair = find_pair(method);
      grid.alpha_deg = alpha;
      std::vector<ScanRecord> records;
      if (pair_scan) {
        records = scan_constrained(pair, grid);
      } else if (member == "explicit") {
        records = scan_single(pair.explicit_method, grid);
      } else if (member == "implicit") {
        records = scan_single(pair.implicit_method, grid);
      } else {
        std::cerr << "unknown member '" << member << "'; use explicit or implicit\n";
        return 2;
      }
      write_scan_csv(records, out_path);
      return 0;
    }

    if (converge->parsed()) {
      const MethodRef m = resolve_method(method);
      params.tf = tf;
      const SplitProblem prob = make_problem(problem, params);
      ConvergenceOptions opts;
      if (start_name == "analytic")
        opts.start = StartPolicy::analytic;
      else if (start_name == "imexrk")
        opts.start = StartPolicy::imexrk;
      else {
        std::cerr << "unknown start policy '" << start_name << "'\n";
        return 2;
      }
      const auto report = run_convergence(m, prob, h0, levels, opts);
      std::printf("%-12s %-16s %-10s\n", "h", "error", "order");
      for (const auto& level : report.levels) {
        if (level.failed)
          std::printf("%-12.6g failed: %s\n", level.h, level.message.c_str());
        else if (std::isnan(level.pairwise_order))
          std::printf("%-12.6g %-16.6e %-10s\n", level.h, level.error, "-");
        else
          std::printf("%-12.6g %-16.6e %-10.3f\n", level.h, level.error,
                      level.pairwise_order);
      }
      std::printf("least-squares order: %.4f\n", report.lsq_order);
      if (!out_path.empty()) emit_report(report, format, out_path);
      bool any_failed = false;
      for (const auto& level : report.levels) any_failed = any_failed || level.failed;
      return any_failed ? 1 : 0;
    }

    if (integ->parsed()) {
      const MethodRef m = resolve_method(method);
      params.tf = tf;
      const SplitProblem prob = make_problem(problem, params);
      Vec terminal;
      StepStats stats;
      NewtonConfig cfg;
      if (m.is_rk) {
        terminal = imex_rk_integrate(m.rk, prob, h, cfg, &stats);
      } else {
        const IntegrationState start =
            (start_name == "imexrk") ? start_imex_rk(*m.pair, prob, h, 0.1 * h, cfg)
                                     : start_analytic(*m.pair, prob, h);
        auto res = integrate(*m.pair, prob, h, start, true, cfg);
        terminal = res.point_solution;
        stats = std::move(res.stats);
      }
      std::ostringstream os;
      os << "{\"method\":\"" << m.name << "\",\"problem\":\"" << prob.name
         << "\",\"h\":" << format_double(h) << ",\"tf\":" << format_double(prob.tF)
         << ",\"solution\":[";
      for (size_t i = 0; i < terminal.size(); ++i)
        os << (i ? "," : "") << format_double(terminal[i]);
      os << "],\"stats\":{\"newton_iters\":" << stats.newton_iters
         << ",\"f_evals\":" << stats.f_evals << ",\"g_evals\":" << stats.g_evals << "}}";
      if (out_path.empty()) {
        std::cout << os.str() << "\n";
      } else {
        std::ofstream ofs(out_path);
        if (!ofs) throw std::runtime_error("cannot open output '" + out_path + "'");
        ofs << os.str() << "\n";
      }
      return 0;
    }

    if (cat->parsed()) {
      const std::string text = catalog_to_json();
      if (out_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream ofs(out_path);
        if (!ofs) throw std::runtime_error("cannot open output '" + out_path + "'");
        ofs << text << "\n";
      }
      return 0;
    }
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
