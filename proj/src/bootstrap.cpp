#include "imexglm/bootstrap.hpp"

#include <cmath>

namespace imexglm {

Mat derivative_stencil(int r) {
  if (r == 2) return Mat{{1.0, 0.0}, {-1.0, 1.0}};
  if (r == 3) return Mat{{1.0, 0.0, 0.0}, {-1.5, 2.0, -0.5}, {1.0, -2.0, 1.0}};
  throw std::invalid_argument("derivative_stencil: r must be 2 or 3");
}

ImexRkMethod dirk232() {
  const double g = (2.0 - std::sqrt(2.0)) / 2.0;
  const double delta = -2.0 * std::sqrt(2.0) / 3.0;
  ImexRkMethod m;
  m.name = "dirk232";
  m.order = 2;
  m.c = {0.0, g, 1.0};
  m.a_im = Mat{{0.0, 0.0, 0.0}, {0.0, g, 0.0}, {0.0, 1.0 - g, g}};
  m.a_ex = Mat{{0.0, 0.0, 0.0}, {g, 0.0, 0.0}, {delta, 1.0 - delta, 0.0}};
  m.b_im = {0.0, 1.0 - g, g};
  m.b_ex = m.b_im;
  return m;
}

ImexRkMethod dirk343() {
  const double g = 0.435866521508459;
  const double b1 = -1.5 * g * g + 4.0 * g - 0.25;
  const double b2 = 1.5 * g * g - 5.0 * g + 1.25;
  ImexRkMethod m;
  m.name = "dirk343";
  m.order = 3;
  m.c = {0.0, g, (1.0 + g) / 2.0, 1.0};
  m.a_im = Mat{{0.0, 0.0, 0.0, 0.0},
               {0.0, g, 0.0, 0.0},
               {0.0, (1.0 - g) / 2.0, g, 0.0},
               {0.0, b1, b2, g}};
  m.a_ex = Mat{{0.0, 0.0, 0.0, 0.0},
               {g, 0.0, 0.0, 0.0},
               {0.3212788860, 0.3966543747, 0.0, 0.0},
               {-0.105858296, 0.5529291479, 0.5529291481, 0.0}};
  m.b_im = {0.0, b1, b2, g};
  m.b_ex = {0.0, b1, b2, g};
  return m;
}

Vec imex_rk_step(const ImexRkMethod& m, const Vec& y, double h, const SplitProblem& prob,
                 const NewtonConfig& cfg, StepStats* stats) {
  const int sigma = static_cast<int>(m.c.size());
  const int d = static_cast<int>(y.size());
  std::vector<Vec> F(sigma, Vec(d)), G(sigma, Vec(d));
  prob.f(y, F[0]);
  prob.g(y, G[0]);
  if (stats) {
    ++stats->f_evals;
    ++stats->g_evals;
  }
  for (int i = 1; i < sigma; ++i) {
    Vec known = y;
    for (int j = 0; j < i; ++j) {
      if (m.a_ex(i, j) != 0.0) axpy(h * m.a_ex(i, j), F[j], known);
      if (m.a_im(i, j) != 0.0) axpy(h * m.a_im(i, j), G[j], known);
    }
    const double lam = m.a_im(i, i);
    const Vec Y = solve_stage(lam, h, known, prob.g, prob.jac_g, cfg);
    prob.f(Y, F[i]);
    prob.g(Y, G[i]);
    if (stats) {
      ++stats->f_evals;
      ++stats->g_evals;
    }
  }
  Vec out = y;
  for (int j = 0; j < sigma; ++j) {
    if (m.b_ex[j] != 0.0) axpy(h * m.b_ex[j], F[j], out);
    if (m.b_im[j] != 0.0) axpy(h * m.b_im[j], G[j], out);
  }
  return out;
}

Vec imex_rk_integrate(const ImexRkMethod& m, const SplitProblem& prob, double h,
                      const NewtonConfig& cfg, StepStats* stats) {
  const double span = prob.tF - prob.t0;
  const double steps_real = span / h;
  const long N = std::lround(steps_real);
  if (N <= 0 || std::abs(steps_real - static_cast<double>(N)) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("imex_rk_integrate: non-integer step count");
  Vec y = prob.y0;
  for (long n = 0; n < N; ++n) y = imex_rk_step(m, y, h, prob, cfg, stats);
  return y;
}

namespace {

IntegrationState assemble_start(const ImexGlmPair& pair, double h, const Vec& y0,
                                const std::vector<Vec>& hx, const std::vector<Vec>& hz) {
  // hx[k-1] = h^k x^(k)(t0), hz likewise.
  const GlmTableau& e = pair.explicit_method;
  const GlmTableau& im = pair.implicit_method;
  const int p = e.p;
  const WeightMatrix We = weight_vectors(e.A, e.c, p);
  const WeightMatrix Wi = weight_vectors(im.A, im.c, p);
  IntegrationState out;
  out.h = h;
  out.t = 0.0;
  out.n = 0;
  out.y_ext.assign(e.r, Vec(y0.size(), 0.0));
  for (int i = 0; i < e.r; ++i) {
    out.y_ext[i] = y0;
    for (int k = 1; k <= p; ++k) {
      axpy(We.W(i, k), hx[k - 1], out.y_ext[i]);
      axpy(Wi.W(i, k), hz[k - 1], out.y_ext[i]);
    }
  }
  return out;
}

}  // namespace

IntegrationState start_analytic(const ImexGlmPair& pair, const SplitProblem& prob,
                                double h) {
  if (!prob.split_derivatives)
    throw std::runtime_error("start_analytic: problem supplies no derivatives");
  const int p = pair.explicit_method.p;
  std::vector<Vec> xd, zd;
  prob.split_derivatives(p, xd, zd);
  if (static_cast<int>(xd.size()) < p || static_cast<int>(zd.size()) < p)
    throw std::runtime_error("start_analytic: missing derivatives");
  std::vector<Vec> hx(p), hz(p);
  double hk = 1.0;
  for (int k = 1; k <= p; ++k) {
    hk *= h;
    hx[k - 1] = xd[k - 1];
    hz[k - 1] = zd[k - 1];
    for (double& v : hx[k - 1]) v *= hk;
    for (double& v : hz[k - 1]) v *= hk;
  }
  IntegrationState out = assemble_start(pair, h, prob.y0, hx, hz);
  out.t = prob.t0;
  return out;
}

std::vector<Vec> stencil_derivatives(const std::vector<Vec>& samples, double tau) {
  const int r = static_cast<int>(samples.size());
  const Mat D = derivative_stencil(r);
  const int d = static_cast<int>(samples.front().size());
  std::vector<Vec> out(r, Vec(d, 0.0));
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < r; ++j)
      if (D(k, j) != 0.0) axpy(tau * D(k, j), samples[j], out[k]);
  return out;
}

IntegrationState start_from_samples(const ImexGlmPair& pair, double h, double tau,
                                    const std::vector<Vec>& f_samples,
                                    const std::vector<Vec>& g_samples, const Vec& y0) {
  const int p = pair.explicit_method.p;
  if (static_cast<int>(f_samples.size()) != p || static_cast<int>(g_samples.size()) != p)
    throw std::invalid_argument("start_from_samples: need r samples of each part");
  std::vector<Vec> hx = stencil_derivatives(f_samples, tau);  // tau^k x^(k)
  std::vector<Vec> hz = stencil_derivatives(g_samples, tau);
  double factor = 1.0;
  for (int k = 1; k <= p; ++k) {
    factor *= h / tau;  // (h/tau)^k
    for (double& v : hx[k - 1]) v *= factor;
    for (double& v : hz[k - 1]) v *= factor;
  }
  return assemble_start(pair, h, y0, hx, hz);
}

IntegrationState start_imex_rk(const ImexGlmPair& pair, const SplitProblem& prob,
                               double h, double tau, const NewtonConfig& cfg) {
  if (!(tau <= h)) throw std::invalid_argument("start_imex_rk: tau must not exceed h");
  const int p = pair.explicit_method.p;
  const ImexRkMethod rk = (p == 2) ? dirk232() : dirk343();
  std::vector<Vec> f_samples, g_samples;
  Vec y = prob.y0;
  Vec fy(prob.d), gy(prob.d);
  for (int i = 0; i < p; ++i) {
    prob.f(y, fy);
    prob.g(y, gy);
    f_samples.push_back(fy);
    g_samples.push_back(gy);
    if (i + 1 < p) y = imex_rk_step(rk, y, tau, prob, cfg);
  }
  IntegrationState out = start_from_samples(pair, h, tau, f_samples, g_samples, prob.y0);
  out.t = prob.t0;
  return out;
}

Vec terminate(const ImexGlmPair& pair, const StepStats& last_step, double h) {
  const auto& tc = pair.termination;
  if (last_step.F.empty() || last_step.G.empty() || last_step.y_ext_prev.empty())
    throw std::invalid_argument("terminate: missing stage data");
  Vec y(last_step.y_ext_prev.front().size(), 0.0);
  for (size_t j = 0; j < tc.gamma0.size(); ++j) axpy(tc.gamma0[j], last_step.y_ext_prev[j], y);
  for (size_t i = 0; i < tc.beta0.size(); ++i) {
    axpy(h * tc.beta0[i], last_step.F[i], y);
    axpy(h * tc.beta0_hat[i], last_step.G[i], y);
  }
  return y;
}

}  // namespace imexglm
