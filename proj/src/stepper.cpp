#include "imexglm/stepper.hpp"

#include "imexglm/bootstrap.hpp"

#include <cmath>

namespace imexglm {

double default_error_norm(const Vec& y, const Vec& ref) {
  double acc = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - ref[i];
    acc += e * e;
  }
  return std::sqrt(acc);
}

void fd_jacobian(const RhsFn& g, const Vec& y, Mat& J) {
  const int d = static_cast<int>(y.size());
  J = Mat(d, d);
  Vec base(d), pert(d);
  g(y, base);
  Vec yp = y;
  const double sqrt_eps = std::sqrt(2.220446049250313e-16);
  for (int j = 0; j < d; ++j) {
    const double delta = sqrt_eps * std::max(1.0, std::abs(y[j]));
    yp[j] = y[j] + delta;
    g(yp, pert);
    yp[j] = y[j];
    for (int i = 0; i < d; ++i) J(i, j) = (pert[i] - base[i]) / delta;
  }
}

namespace {

struct StageSolver {
  LuFactors lu;
  bool ready = false;

  void factor(double lambda, double h, const Vec& at, const RhsFn& g, const JacFn& jac) {
    const int d = static_cast<int>(at.size());
    Mat J;
    if (jac)
      jac(at, J);
    else
      fd_jacobian(g, at, J);
    Mat M = Mat::identity(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) -= h * lambda * J(i, j);
    lu = lu_factor(std::move(M));
    ready = true;
  }
};

// Newton convergence is judged on the increment (the preconditioned
// residual): the plain residual has a rounding floor of ulp * ||I - h l J||
// which is unreachable for strongly stiff g. Accept when the increment is
// below tol, or when it has stopped decreasing at the rounding floor.
Vec newton_iterate(const StageSolver& solver, double lambda, double h, const Vec& known,
                   const RhsFn& g, const NewtonConfig& cfg, long* iters) {
  Vec y = known;
  Vec gy(known.size());
  double prev = -1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    g(y, gy);
    Vec resid = y;
    for (size_t i = 0; i < resid.size(); ++i) resid[i] -= h * lambda * gy[i] + known[i];
    const Vec dy = lu_solve(solver.lu, std::move(resid));
    for (size_t i = 0; i < y.size(); ++i) y[i] -= dy[i];
    if (iters) ++*iters;
    const double nd = norm2(dy);
    const double scale = 1.0 + norm2(y);
    if (nd <= cfg.tol * scale) return y;
    if (prev >= 0.0 && nd >= 0.5 * prev && nd <= 1e-6 * scale) return y;
    prev = nd;
  }
  throw std::runtime_error("newton-divergence");
}

}  // namespace

Vec solve_stage(double lambda, double h, const Vec& known, const RhsFn& g,
                const JacFn& jac_g, const NewtonConfig& cfg) {
  if (lambda == 0.0) return known;
  StageSolver solver;
  try {
    solver.factor(lambda, h, known, g, jac_g);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("newton-divergence: singular iteration matrix");
  }
  long dummy = 0;
  return newton_iterate(solver, lambda, h, known, g, cfg, &dummy);
}

namespace {

// Shared stage loop over the explicit/implicit coefficient pairs; a
// single-method step passes null for the side it does not use.
IntegrationState step_impl(const Mat& Ae, const Mat* Ai, const Mat& U, const Mat& Be,
                           const Mat* Bi, const Mat& V, const IntegrationState& state,
                           const RhsFn* f, const RhsFn* g, const JacFn& jac_g,
                           const NewtonConfig& cfg, StepStats* stats) {
  const int s = Ae.rows;
  const int r = V.rows;
  const int d = static_cast<int>(state.y_ext.front().size());
  const double h = state.h;

  std::vector<Vec> F(f ? s : 0), G(g ? s : 0);
  StageSolver solver;
  for (int i = 0; i < s; ++i) {
    Vec known(d, 0.0);
    for (int j = 0; j < r; ++j)
      if (U(i, j) != 0.0) axpy(U(i, j), state.y_ext[j], known);
    for (int j = 0; j < i; ++j) {
      if (f && Ae(i, j) != 0.0) axpy(h * Ae(i, j), F[j], known);
      if (g && Ai && (*Ai)(i, j) != 0.0) axpy(h * (*Ai)(i, j), G[j], known);
    }
    Vec Y;
    const double diag = (g && Ai) ? (*Ai)(i, i) : 0.0;
    if (diag == 0.0) {
      Y = std::move(known);
    } else {
      if (!solver.ready || !cfg.jacobian_reuse) {
        try {
          solver.factor(diag, h, known, *g, jac_g);
        } catch (const std::runtime_error&) {
          throw std::runtime_error("newton-divergence: singular iteration matrix at stage " +
                                   std::to_string(i + 1));
        }
      }
      long iters = 0;
      try {
        Y = newton_iterate(solver, diag, h, known, *g, cfg, &iters);
      } catch (const std::runtime_error&) {
        // one retry with a fresh Jacobian at this stage's predictor
        solver.factor(diag, h, known, *g, jac_g);
        try {
          Y = newton_iterate(solver, diag, h, known, *g, cfg, &iters);
        } catch (const std::runtime_error&) {
          throw std::runtime_error("newton-divergence at stage " + std::to_string(i + 1));
        }
      }
      if (stats) stats->newton_iters += iters;
    }
    if (f) {
      F[i].resize(d);
      (*f)(Y, F[i]);
      if (stats) ++stats->f_evals;
    }
    if (g) {
      G[i].resize(d);
      (*g)(Y, G[i]);
      if (stats) ++stats->g_evals;
    }
  }

  IntegrationState out;
  out.h = h;
  out.t = state.t + h;
  out.n = state.n + 1;
  out.y_ext.assign(r, Vec(d, 0.0));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j)
      if (V(i, j) != 0.0) axpy(V(i, j), state.y_ext[j], out.y_ext[i]);
    for (int j = 0; j < s; ++j) {
      if (f && Be(i, j) != 0.0) axpy(h * Be(i, j), F[j], out.y_ext[i]);
      if (g && Bi && (*Bi)(i, j) != 0.0) axpy(h * (*Bi)(i, j), G[j], out.y_ext[i]);
    }
  }
  if (stats) {
    stats->F = std::move(F);
    stats->G = std::move(G);
    stats->y_ext_prev = state.y_ext;
  }
  return out;
}

}  // namespace

IntegrationState glm_step(const GlmTableau& t, const IntegrationState& state,
                          const RhsFn& rhs, const JacFn& jac, const NewtonConfig& cfg,
                          StepStats* stats) {
  if (static_cast<int>(state.y_ext.size()) != t.r)
    throw std::invalid_argument("glm_step: external stage count mismatch");
  if (t.kind == TableauKind::explicit_type1) {
    return step_impl(t.A, nullptr, t.U, t.B, nullptr, t.V, state, &rhs, nullptr, jac, cfg,
                     stats);
  }
  return step_impl(t.A, &t.A, t.U, t.B, &t.B, t.V, state, nullptr, &rhs, jac, cfg, stats);
}

IntegrationState imex_step(const ImexGlmPair& pair, const IntegrationState& state,
                           const SplitProblem& prob, const NewtonConfig& cfg,
                           StepStats* stats) {
  const GlmTableau& e = pair.explicit_method;
  const GlmTableau& im = pair.implicit_method;
  if (static_cast<int>(state.y_ext.size()) != e.r)
    throw std::invalid_argument("imex_step: external stage count mismatch");
  return step_impl(e.A, &im.A, e.U, e.B, &im.B, e.V, state, &prob.f, &prob.g, prob.jac_g,
                   cfg, stats);
}

IntegrationResult integrate(const ImexGlmPair& pair, const SplitProblem& prob, double h,
                            const IntegrationState& start, bool terminate,
                            const NewtonConfig& cfg, long step_cap) {
  const double span = prob.tF - prob.t0;
  const double steps_real = span / h;
  const long N = std::lround(steps_real);
  if (N <= 0 || std::abs(steps_real - static_cast<double>(N)) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("integrate: (tF - t0)/h is not an integer step count");
  if (N > step_cap) throw std::runtime_error("step-count-overflow");

  IntegrationResult result;
  IntegrationState state = start;
  state.h = h;
  StepStats last;
  for (long n = 0; n < N; ++n) {
    StepStats step;
    state = imex_step(pair, state, prob, cfg, &step);
    result.stats.newton_iters += step.newton_iters;
    result.stats.f_evals += step.f_evals;
    result.stats.g_evals += step.g_evals;
    last = std::move(step);
  }
  result.state = std::move(state);
  if (terminate) {
    result.point_solution = imexglm::terminate(pair, last, h);
    result.terminated = true;
  }
  result.stats.F = std::move(last.F);
  result.stats.G = std::move(last.G);
  result.stats.y_ext_prev = std::move(last.y_ext_prev);
  return result;
}

std::vector<Vec> partitioned_glm_step(const std::vector<Partition>& parts,
                                      const std::vector<Vec>& y_ext, double h,
                                      const RhsFn& rhs) {
  if (parts.empty()) throw std::invalid_argument("partitioned step: no partitions");
  const int s = parts.front().tableau.s;
  const int r = parts.front().tableau.r;
  for (const auto& part : parts) {
    if (part.tableau.s != s || part.tableau.r != r ||
        part.tableau.c != parts.front().tableau.c)
      throw std::invalid_argument("partitioned step: members not internally consistent");
    if (part.tableau.kind != TableauKind::explicit_type1)
      throw std::invalid_argument("partitioned step: explicit tableaus only");
  }
  const int d = static_cast<int>(y_ext.front().size());

  std::vector<Vec> Fstage;  // full-dimension rhs values at assembled stages
  Fstage.reserve(s);
  for (int i = 0; i < s; ++i) {
    Vec Y(d, 0.0);
    for (const auto& part : parts) {
      const Mat& A = part.tableau.A;
      const Mat& U = part.tableau.U;
      for (int l = part.offset; l < part.offset + part.length; ++l) {
        double acc = 0.0;
        for (int j = 0; j < r; ++j) acc += U(i, j) * y_ext[j][l];
        for (int j = 0; j < i; ++j) acc += h * A(i, j) * Fstage[j][l];
        Y[l] = acc;
      }
    }
    Vec fy(d);
    rhs(Y, fy);
    Fstage.push_back(std::move(fy));
  }

  std::vector<Vec> out(r, Vec(d, 0.0));
  for (const auto& part : parts) {
    const Mat& B = part.tableau.B;
    const Mat& V = part.tableau.V;
    for (int i = 0; i < r; ++i)
      for (int l = part.offset; l < part.offset + part.length; ++l) {
        double acc = 0.0;
        for (int j = 0; j < r; ++j) acc += V(i, j) * y_ext[j][l];
        for (int j = 0; j < s; ++j) acc += h * B(i, j) * Fstage[j][l];
        out[i][l] = acc;
      }
  }
  return out;
}

}  // namespace imexglm
