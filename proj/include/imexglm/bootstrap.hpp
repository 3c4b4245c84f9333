#pragma once

#include "imexglm/stepper.hpp"

namespace imexglm {

/// One-sided finite-difference stencil mapping r derivative samples
/// [u'(t0), ..., u'(t0+(r-1)tau)] to [tau u'(t0), ..., tau^r u^(r)(t0)] / tau.
/// Only r = 2 and r = 3 are provided.
Mat derivative_stencil(int r);

/// Additive Runge-Kutta pair with shared abscissae; first implicit column is
/// zero and the remaining diagonal is constant (diagonally implicit).
struct ImexRkMethod {
  std::string name;
  Vec c;
  Mat a_im, a_ex;
  Vec b_im, b_ex;
  int order = 0;
};

ImexRkMethod dirk232();  // L-stable, two implicit stages, order 2
ImexRkMethod dirk343();  // L-stable, three implicit stages, order 3

Vec imex_rk_step(const ImexRkMethod& m, const Vec& y, double h, const SplitProblem& prob,
                 const NewtonConfig& cfg, StepStats* stats = nullptr);

Vec imex_rk_integrate(const ImexRkMethod& m, const SplitProblem& prob, double h,
                      const NewtonConfig& cfg = {}, StepStats* stats = nullptr);

/// Order-p starting block from analytic split derivatives at t0:
/// y_i^[0] = y0 + sum_{k>=1} (q_{i,k} h^k x^(k) + qhat_{i,k} h^k z^(k)).
/// Requires prob.split_derivatives.
IntegrationState start_analytic(const ImexGlmPair& pair, const SplitProblem& prob,
                                double h);

/// Starting block from r derivative samples taken at spacing tau
/// (f_samples[i] = f at t0 + i*tau, likewise g_samples); samples are mapped
/// through the stencil, rescaled by (h/tau)^k and combined as above.
IntegrationState start_from_samples(const ImexGlmPair& pair, double h, double tau,
                                    const std::vector<Vec>& f_samples,
                                    const std::vector<Vec>& g_samples, const Vec& y0);

/// Derivative estimates tau^k x^(k)(t0), k = 1..r, from the stencil; exposed
/// for accuracy tests of the sampling procedure.
std::vector<Vec> stencil_derivatives(const std::vector<Vec>& samples, double tau);

/// Starting block bootstrapped by r-1 IMEX Runge-Kutta steps of size
/// tau < h (DIRK(2,3,2) pairs with r = 2, DIRK(3,4,3) with r = 3).
IntegrationState start_imex_rk(const ImexGlmPair& pair, const SplitProblem& prob,
                               double h, double tau, const NewtonConfig& cfg = {});

/// Endpoint recovery from the final step's stage data:
/// y(tN) ~ h beta0.F + h beta0_hat.G + gamma0.y_ext_prev.
Vec terminate(const ImexGlmPair& pair, const StepStats& last_step, double h);

}  // namespace imexglm
