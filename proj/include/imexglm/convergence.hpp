#pragma once

#include <iosfwd>
#include <limits>

#include "imexglm/bootstrap.hpp"
#include "imexglm/problems.hpp"

namespace imexglm {

/// Integrator handle for the convergence driver: either a cataloged
/// IMEX-GLM pair or an IMEX Runge-Kutta comparison method.
struct MethodRef {
  std::string name;
  const ImexGlmPair* pair = nullptr;  // exactly one of pair/rk set
  ImexRkMethod rk;
  bool is_rk = false;
};

/// Resolve "2A"/"2B"/"3A"/"3B"/"dirk232"/"dirk343"; throws std::out_of_range
/// listing the options.
MethodRef resolve_method(const std::string& name);
std::vector<std::string> method_names();

enum class StartPolicy { analytic, imexrk };

struct ConvergenceLevel {
  double h = 0.0;
  double error = 0.0;
  double pairwise_order = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  bool failed = false;
  std::string message;
};

struct ConvergenceReport {
  std::string method;
  std::string problem;
  std::vector<ConvergenceLevel> levels;
  double lsq_order = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares slope of log(error) against log(h) over the non-failed
/// levels.
double least_squares_order(const std::vector<ConvergenceLevel>& levels);

/// Fill pairwise orders log2(e_k / e_{k+1}) and the least-squares slope.
void compute_orders(ConvergenceReport& report);

struct ConvergenceOptions {
  StartPolicy start = StartPolicy::analytic;
  double tau_factor = 0.1;        // tau = tau_factor * h for the RK start
  double h_ref_factor = 1.0 / 64.0;  // h_ref = factor * h_min for references
  std::string cache_dir;          // forwarded to reference_solution
  NewtonConfig newton;
};

/// Integrates at h0 / 2^k, k = 0..levels-1, measuring the terminal error of
/// the terminated solution against the problem's exact solution when
/// available, otherwise against a tiny-step reference. Levels that fail to
/// integrate are recorded with a message and skipped in the fits.
ConvergenceReport run_convergence(const MethodRef& method, const SplitProblem& prob,
                                  double h0, int levels,
                                  const ConvergenceOptions& opts = {});

/// CSV columns `h,error,pairwise_order` (order empty on the first row).
void emit_csv(const ConvergenceReport& report, std::ostream& os);

/// JSON with deterministic field order and 17-significant-digit numbers.
void emit_json(const ConvergenceReport& report, std::ostream& os);
ConvergenceReport report_from_json(const std::string& text);

void emit_report(const ConvergenceReport& report, const std::string& format,
                 const std::string& path);

}  // namespace imexglm
