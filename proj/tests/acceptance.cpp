// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Thresholds are fixed here, not calibrated at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "imexglm/bootstrap.hpp"
#include "imexglm/convergence.hpp"
#include "imexglm/problems.hpp"
#include "imexglm/series.hpp"
#include "imexglm/stability.hpp"

using namespace imexglm;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, bool ok, const std::string& what, double seconds, double budget) {
  const bool in_budget = seconds < budget;
  if (!ok || !in_budget) ++g_failures;
  std::printf("%s criterion %2d: %s [%.2fs / budget %.0fs]\n",
              (ok && in_budget) ? "PASS" : "FAIL", id, what.c_str(), seconds, budget);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// 1. order + stage-order residuals for all eight tableaus
void criterion_1() {
  Timer timer;
  bool ok = true;
  double worst2 = 0.0, worst3 = 0.0;
  for (const auto& pair : catalog()) {
    const int p = pair.explicit_method.p;
    for (const GlmTableau* t : {&pair.explicit_method, &pair.implicit_method}) {
      const auto W = weight_vectors(t->A, t->c, p);
      const double so = stage_order_residual(*t, W, p, p);
      const double od = order_residual(*t, W, p);
      const double worst = std::max(so, od);
      (p == 2 ? worst2 : worst3) = std::max(p == 2 ? worst2 : worst3, worst);
    }
  }
  ok = worst2 < 1e-13 && worst3 < 1e-9;
  report(1, ok,
         "order conditions: order-2 residuals " + fmt(worst2) + " < 1e-13, order-3 " +
             fmt(worst3) + " < 1e-9",
         timer.seconds(), 1.0);
}

// 2. B reconstruction for the printed 2B explicit coefficients
void criterion_2() {
  Timer timer;
  const auto& t = find_pair("2B").explicit_method;
  const Mat B = build_b_matrix(t.A, t.V, t.c);
  const double diff = max_abs_diff(B, t.B);
  report(2, diff < 1e-13, "coeB reconstruction of 2B explicit B, max diff " + fmt(diff),
         timer.seconds(), 1.0);
}

// 3. endpoint-recovery rows for 2B (free parameter g = 0), 3A, 3B
void criterion_3() {
  Timer timer;
  double worst = 0.0;
  for (const auto* name : {"2B", "3A", "3B"}) {
    const auto& pair = find_pair(name);
    const int p = pair.explicit_method.p;
    const auto We = weight_vectors(pair.explicit_method.A, pair.explicit_method.c, p);
    const auto Wi = weight_vectors(pair.implicit_method.A, pair.implicit_method.c, p);
    worst = std::max(worst,
                     termination_row_residual(pair.termination.beta0,
                                              pair.termination.gamma0,
                                              pair.explicit_method, We, p));
    worst = std::max(worst,
                     termination_row_residual(pair.termination.beta0_hat,
                                              pair.termination.gamma0,
                                              pair.implicit_method, Wi, p));
  }
  report(3, worst < 1e-9, "termination k=0 rows for 2B/3A/3B, worst residual " + fmt(worst),
         timer.seconds(), 1.0);
}

// 4. one imex step == stability-matrix action, 100 random well-conditioned draws
void criterion_4() {
  Timer timer;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  double worst = 0.0;
  for (const auto& pair : catalog()) {
    const int r = pair.explicit_method.r;
    int done = 0;
    while (done < 25) {
      const Cplx w(unit(rng), unit(rng));
      const Cplx wh(unit(rng), unit(rng));
      double diag_min = 1.0;
      for (int i = 0; i < pair.explicit_method.s; ++i)
        diag_min =
            std::min(diag_min, std::abs(1.0 - wh * pair.implicit_method.A(i, i)));
      if (diag_min < 0.2) continue;
      ComplexMatrix M;
      try {
        M = imex_stability_matrix(pair, w, wh);
      } catch (const std::runtime_error&) {
        continue;
      }
      ++done;
      std::vector<Cplx> ext_c(r);
      for (auto& x : ext_c) x = Cplx(unit(rng), unit(rng));
      SplitProblem prob = linear_test(w, wh);
      IntegrationState state;
      state.h = 1.0;
      state.y_ext.assign(r, Vec(2));
      for (int i = 0; i < r; ++i) state.y_ext[i] = {ext_c[i].real(), ext_c[i].imag()};
      const auto out = imex_step(pair, state, prob, {});
      for (int i = 0; i < r; ++i) {
        Cplx want = 0.0;
        for (int j = 0; j < r; ++j) want += M(i, j) * ext_c[j];
        worst = std::max(worst,
                         std::abs(Cplx(out.y_ext[i][0], out.y_ext[i][1]) - want));
      }
    }
  }
  report(4, worst < 1e-12,
         "imex step vs stability-matrix action, 100 draws, worst |diff| " + fmt(worst),
         timer.seconds(), 1.0);
}

// 5. partitioned-method equivalence on van der Pol at eps = 1
void criterion_5() {
  Timer timer;
  SplitProblem prob = van_der_pol(1.0);
  const RhsFn rhs = [&prob](const Vec& u, Vec& out) {
    Vec tmp(2);
    prob.f(u, tmp);
    prob.g(u, out);
    out[0] += tmp[0];
    out[1] += tmp[1];
  };
  const auto& t = find_pair("2B").explicit_method;
  std::vector<Vec> xd, zd;
  prob.split_derivatives(t.p, xd, zd);
  const double h = 0.01;
  const auto W = weight_vectors(t.A, t.c, t.p);
  std::vector<Vec> ext(t.r, Vec(2));
  for (int i = 0; i < t.r; ++i) {
    ext[i] = prob.y0;
    for (int k = 1; k <= t.p; ++k)
      for (int l = 0; l < 2; ++l)
        ext[i][l] += W.W(i, k) * std::pow(h, k) * (xd[k - 1][l] + zd[k - 1][l]);
  }
  std::vector<Partition> parts{{t, 0, 1}, {t, 1, 1}};
  std::vector<Vec> part_ext = ext;
  IntegrationState mono;
  mono.y_ext = ext;
  mono.h = h;
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    part_ext = partitioned_glm_step(parts, part_ext, h, rhs);
    mono = glm_step(t, mono, rhs, JacFn{}, {});
    for (int i = 0; i < t.r; ++i)
      for (int l = 0; l < 2; ++l)
        worst = std::max(worst, std::abs(part_ext[i][l] - mono.y_ext[i][l]) /
                                    std::max(1.0, std::abs(mono.y_ext[i][l])));
  }
  report(5, worst < 1e-12,
         "two-partition vs monolithic trajectory over 50 steps, worst rel diff " +
             fmt(worst),
         timer.seconds(), 5.0);
}

// 6. van der Pol convergence figure at desk scale
void criterion_6() {
  Timer timer;
  const SplitProblem prob = van_der_pol(1e-6);
  MethodRef m3b = resolve_method("3B");
  MethodRef dirk = resolve_method("dirk343");
  const auto rep_glm = run_convergence(m3b, prob, 1.0 / 40.0, 5);
  const auto rep_rk = run_convergence(dirk, prob, 1.0 / 40.0, 5);
  const double e_glm = rep_glm.levels.back().error;
  const double e_rk = rep_rk.levels.back().error;
  const bool ok_glm = rep_glm.lsq_order >= 2.6 && rep_glm.lsq_order <= 3.4;
  const bool ok_rk = rep_rk.lsq_order <= 2.5;
  const bool ok_err = e_glm < e_rk;
  report(6, ok_glm && ok_rk && ok_err,
         "vdp eps=1e-6: 3B lsq order " + fmt(rep_glm.lsq_order) +
             " in [2.6,3.4]; dirk343 order " + fmt(rep_rk.lsq_order) +
             " <= 2.5; finest errors " + fmt(e_glm) + " < " + fmt(e_rk),
         timer.seconds(), 10.0);
}

// 7. Prothero-Robinson convergence at mu = -1e6
void criterion_7() {
  Timer timer;
  const SplitProblem prob = prothero_robinson(-1e6);
  MethodRef m2b = resolve_method("2B");
  MethodRef m3b = resolve_method("3B");
  const auto rep2 = run_convergence(m2b, prob, 0.1, 5);
  const auto rep3 = run_convergence(m3b, prob, 0.1, 5);
  const bool ok2 = rep2.lsq_order >= 1.7 && rep2.lsq_order <= 2.4;
  const bool ok3 = rep3.lsq_order >= 2.6 && rep3.lsq_order <= 3.4;
  report(7, ok2 && ok3,
         "PR mu=-1e6: 2B lsq order " + fmt(rep2.lsq_order) + " in [1.7,2.4]; 3B " +
             fmt(rep3.lsq_order) + " in [2.6,3.4]",
         timer.seconds(), 5.0);
}

// 8. L-stability limits and A-stability axis probes
void criterion_8() {
  Timer timer;
  const double rho_2a = spectral_radius(limit_matrix(find_pair("2A").implicit_method));
  const double rho_2b = spectral_radius(limit_matrix(find_pair("2B").implicit_method));
  const double rho_3b = spectral_radius(limit_matrix(find_pair("3B").implicit_method));
  const bool ok_l = rho_2a < 1e-8 && rho_2b < 1e-8 && rho_3b < 1e-8;

  const auto& t3a = find_pair("3A").implicit_method;
  double worst_axis = 0.0;
  for (int k = 0; k < 34; ++k) {
    const double mag = std::pow(10.0, -3.0 + 9.0 * k / 33.0);
    for (const Cplx z : {Cplx(0.0, mag), Cplx(0.0, -mag), Cplx(-mag, 0.0)})
      worst_axis = std::max(worst_axis, spectral_radius(stability_matrix(t3a, z)));
  }
  const bool ok_a = worst_axis <= 1.0 + 1e-10;
  report(8, ok_l && ok_a,
         "stiff limits rho = " + fmt(rho_2a) + "/" + fmt(rho_2b) + "/" + fmt(rho_3b) +
             " (< 1e-8 each); 3A axis worst rho - 1 = " + fmt(worst_axis - 1.0),
         timer.seconds(), 1.0);
}

// 9. constrained stability regions, alpha = 90, default grid
void criterion_9() {
  Timer timer;
  bool ok = true;
  std::string detail;
  for (const auto& pair : catalog()) {
    RegionScan grid;  // default 401x401 over [-4,1]x[-4,4]
    grid.alpha_deg = 90.0;
    const auto cons = scan_constrained(pair, grid);
    const auto expl = scan_single(pair.explicit_method, grid);
    long stable = 0;
    bool origin = false;
    bool included = true;
    for (size_t i = 0; i < cons.size(); ++i) {
      if (cons[i].stable) {
        ++stable;
        if (!expl[i].stable) included = false;
      }
      if (std::abs(cons[i].z) < 1e-14) origin = cons[i].stable;
    }
    const double frac = 100.0 * stable / static_cast<double>(cons.size());
    ok = ok && frac >= 1.0 && origin && included;
    detail += pair.name + " " + fmt(frac) + "%" + (included ? "" : " NOT-INCLUDED") +
              (origin ? "" : " ORIGIN-UNSTABLE") + "; ";
  }
  report(9, ok, "constrained regions at alpha=90: stable fractions " + detail,
         timer.seconds(), 30.0);
}

// 10. advection-diffusion surrogate, temporal order of 3B
void criterion_10() {
  Timer timer;
  const SplitProblem prob = advection_diffusion_1d(64, 1.0, 0.01);
  MethodRef m3b = resolve_method("3B");
  const auto rep = run_convergence(m3b, prob, 0.01, 5);
  const bool ok = rep.lsq_order >= 2.6 && rep.lsq_order <= 3.4;
  report(10, ok,
         "advdiff n=64 a=1 nu=0.01: 3B temporal lsq order " + fmt(rep.lsq_order) +
             " in [2.6,3.4]",
         timer.seconds(), 30.0);
}

}  // namespace

int main(int argc, char** argv) {
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10};
  if (argc > 1) {
    const int id = std::atoi(argv[1]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..10]\n");
      return 2;
    }
    criteria[id - 1]();
    return g_failures;
  }
  for (auto* c : criteria) c();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria failed\n", g_failures);
  return g_failures;
}
