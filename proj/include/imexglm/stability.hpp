#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "imexglm/tableau.hpp"

namespace imexglm {

using Cplx = std::complex<double>;

/// Small complex matrix, n <= 4 (external-stage counts of the catalog).
struct ComplexMatrix {
  int n = 0;
  std::array<Cplx, 16> a{};

  ComplexMatrix() = default;
  explicit ComplexMatrix(int n_) : n(n_) {}
  Cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  Cplx operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

/// M(z) = V + z B (I - zA)^{-1} U.
/// Throws std::runtime_error("singular-resolvent") when |det(I - zA)| falls
/// below 1e-14 relative to the row-norm product.
ComplexMatrix stability_matrix(const GlmTableau& t, Cplx z);

/// M(w, w_hat) = V + (w B + w_hat Bhat)(I - w A - w_hat Ahat)^{-1} U.
ComplexMatrix imex_stability_matrix(const ImexGlmPair& pair, Cplx w, Cplx w_hat);

/// Stiff limit V - B A^{-1} U (type 2 only); type 1 throws
/// std::runtime_error("no-stiff-limit").
ComplexMatrix limit_matrix(const GlmTableau& t);

/// Max eigenvalue modulus via characteristic-polynomial roots: closed form
/// through n = 3, companion-polynomial root iteration for n = 4.
double spectral_radius(const ComplexMatrix& m);

/// Roots of a monic polynomial with the given low-order coefficients
/// (poly(x) = x^n + coeff[n-1] x^{n-1} + ... + coeff[0]), n <= 4.
std::vector<Cplx> monic_roots(const std::vector<Cplx>& coeff);

struct RegionScan {
  double re_min = -4.0, re_max = 1.0;
  double im_min = -4.0, im_max = 4.0;
  int nx = 401, ny = 401;
  double alpha_deg = 90.0;
  std::vector<Cplx> hat_samples;  // filled by default_hat_samples when empty
};

/// Stiff-sector probe set: w_hat = -rho_k e^{+-i theta_j}, rho_k log-spaced
/// over [1e-2, 1e6] (25 values), theta_j uniform over [0, alpha] (9 values);
/// the w_hat -> infinity limit is folded in separately by scan_constrained.
std::vector<Cplx> default_hat_samples(double alpha_deg);

struct ScanRecord {
  Cplx z;
  double rho = 0.0;
  bool stable = false;
  bool singular = false;
};

/// rho(M(z)) on the grid, row-major; stable iff rho <= 1 + 1e-12.
/// Singular-resolvent points are recorded unstable with the flag set.
/// workers = 0 picks the hardware thread count.
std::vector<ScanRecord> scan_single(const GlmTableau& t, const RegionScan& scan,
                                    int workers = 0);

/// Worst-case rho(M(w, w_hat)) over the probe set (plus the stiff limit) at
/// each grid w.
std::vector<ScanRecord> scan_constrained(const ImexGlmPair& pair, const RegionScan& scan,
                                         int workers = 0);

/// CSV rows `re,im,rho,stable`, row-major, 17 significant digits.
void write_scan_csv(const std::vector<ScanRecord>& records, const std::string& path);

}  // namespace imexglm
