#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imexglm/tableau.hpp"

namespace imexglm {

using RhsFn = std::function<void(const Vec&, Vec&)>;
using JacFn = std::function<void(const Vec&, Mat&)>;

/// Additively split autonomous system y' = f(y) + g(y); nonautonomous
/// problems append t as a state component with derivative 1 in f.
struct SplitProblem {
  std::string name;
  std::string cache_key;  // problem + parameters, used by reference caching
  int d = 0;
  RhsFn f;
  RhsFn g;
  JacFn jac_g;  // empty -> finite-difference fallback
  double t0 = 0.0, tF = 1.0;
  Vec y0;

  /// Split derivatives at t0: fills xd[k-1] = x^(k), zd[k-1] = z^(k),
  /// k = 1..r, where x' = f(y), z' = g(y) along the solution. Optional;
  /// required by the analytic starting procedure.
  std::function<void(int r, std::vector<Vec>& xd, std::vector<Vec>& zd)> split_derivatives;

  /// Exact solution when available (used as the error reference).
  std::function<Vec(double)> exact;

  /// Error norm against a reference at tF; defaults to the discrete L2 norm
  /// over all components when empty.
  std::function<double(const Vec&, const Vec&)> error_norm;
};

double default_error_norm(const Vec& y, const Vec& ref);
void fd_jacobian(const RhsFn& g, const Vec& y, Mat& J);

/// External-stage block y^[n] plus position on the grid.
struct IntegrationState {
  std::vector<Vec> y_ext;
  double t = 0.0;
  long n = 0;
  double h = 0.0;
};

struct NewtonConfig {
  int max_iters = 50;
  double tol = 1e-12;          // scaled absolute+relative, on the increment
  bool jacobian_reuse = true;  // one factorization per step (diagonal == lambda)
};

/// Evaluation counters plus the data the termination procedure needs from
/// the final step: stage derivatives and the external block that entered it.
struct StepStats {
  long newton_iters = 0;
  long f_evals = 0;
  long g_evals = 0;
  std::vector<Vec> F, G;
  std::vector<Vec> y_ext_prev;
};

/// Solve Y = h*lambda*g(Y) + known by simplified Newton with the fixed
/// matrix I - h*lambda*J, J = jac_g(known) (finite differences when empty).
/// lambda = 0 returns known. Throws std::runtime_error("newton-divergence").
Vec solve_stage(double lambda, double h, const Vec& known, const RhsFn& g,
                const JacFn& jac_g, const NewtonConfig& cfg);

/// One step of a single GLM (type 1 explicit or type 2 via stage solves)
/// with one right-hand side.
IntegrationState glm_step(const GlmTableau& t, const IntegrationState& state,
                          const RhsFn& rhs, const JacFn& jac, const NewtonConfig& cfg,
                          StepStats* stats = nullptr);

/// One IMEX-GLM step: stages i = 1..s in order, one lambda-diagonal Newton
/// solve each; output block combines B and Bhat.
IntegrationState imex_step(const ImexGlmPair& pair, const IntegrationState& state,
                           const SplitProblem& prob, const NewtonConfig& cfg,
                           StepStats* stats = nullptr);

struct IntegrationResult {
  IntegrationState state;
  Vec point_solution;  // filled when terminate was requested
  bool terminated = false;
  StepStats stats;
};

/// Uniform-grid integration from `start` to prob.tF; (tF - t0)/h must be an
/// integer step count (1e-9 relative). With terminate, applies the pair's
/// endpoint-recovery weights to the final step's stage data.
IntegrationResult integrate(const ImexGlmPair& pair, const SplitProblem& prob, double h,
                            const IntegrationState& start, bool terminate,
                            const NewtonConfig& cfg = {}, long step_cap = 10'000'000);

/// One partition of a component-partitioned explicit GLM: a tableau applied
/// to the slice [offset, offset+length) of the state.
struct Partition {
  GlmTableau tableau;
  int offset = 0;
  int length = 0;
};

/// One step of the partitioned method on the full system y' = rhs(y); all
/// partitions must share c, r and s (internal consistency). The external
/// block holds full-dimension vectors; partition m owns its slice of each.
std::vector<Vec> partitioned_glm_step(const std::vector<Partition>& parts,
                                      const std::vector<Vec>& y_ext, double h,
                                      const RhsFn& rhs);

}  // namespace imexglm
