#pragma once

#include <complex>

#include "imexglm/stepper.hpp"

namespace imexglm {

/// Van der Pol oscillator as a split system, state (y, z):
///   f = [z, 0],  g = [0, ((1 - y^2) z - y) / eps],
/// initial values y(0) = 2 and the smooth-start series for z(0). Supplies
/// analytic split derivatives through third order at t0.
SplitProblem van_der_pol(double eps);

/// Smooth forcing profile with derivatives, for the Prothero-Robinson
/// problem; defaults to sin(t).
struct SmoothScalar {
  std::function<double(double)> value, d1, d2, d3;
};
SmoothScalar sine_profile();

/// y' = mu (y - phi(t)) + phi'(t), y(0) = phi(0), exact solution phi. The
/// stiff term integrates implicitly; time is appended as a second state
/// component with derivative 1 in the explicit part. Errors are measured on
/// the solution component only.
SplitProblem prothero_robinson(double mu, const SmoothScalar& phi = sine_profile(),
                               double tF = 1.0);

/// y' = xi y + xihat y with complex coefficients in the 2x2 real
/// representation; xi explicit, xihat implicit.
SplitProblem linear_test(std::complex<double> xi, std::complex<double> xi_hat,
                         double tF = 1.0);

/// Periodic 1-D advection-diffusion on [0,1): centered second-order
/// differences, advection explicit, diffusion implicit, u0 = sin(2 pi x).
/// Errors use the spatial L2 norm sqrt(dx sum e_i^2).
SplitProblem advection_diffusion_1d(int n, double a, double nu, double tF = 0.2);

/// The same dynamics with everything assigned to the implicit part
/// (f = 0, g = f + g); used for brute-force reference integrations.
SplitProblem all_implicit(const SplitProblem& prob);

/// Terminal reference solution by tiny-step integration of the unsplit
/// system with the pair's implicit member. Results are cached in cache_dir
/// keyed by (problem, h_ref, tF); empty cache_dir resolves to
/// $IMEXGLM_CACHE_DIR or ".imexglm-cache".
Vec reference_solution(const ImexGlmPair& pair, const SplitProblem& prob, double h_ref,
                       std::string cache_dir = "");

/// Problem registry used by the CLI: vdp, pr, linear, advdiff.
struct ProblemParams {
  double eps = 1e-6;
  double mu = -1e6;
  int n = 64;
  double a = 1.0;
  double nu = 0.01;
  double xi = 1.0;
  double xi_hat = -1.0;
  double tf = -1.0;  // <0 keeps each problem's default
};
SplitProblem make_problem(const std::string& name, const ProblemParams& params);
std::vector<std::string> problem_names();

}  // namespace imexglm
