#include "imexglm/stability.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

namespace imexglm {

namespace {

constexpr double kStableTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// Solve T X = U column-wise for lower-triangular complex T, returning
// X = T^{-1} U. All DIMSIM stage matrices are lower triangular, so the
// resolvent solve is a forward substitution. Throws on a relative-singular
// diagonal.
ComplexMatrix lower_tri_solve(const ComplexMatrix& T, const Mat& U) {
  const int n = T.n;
  // relative singularity test: |det| against the product of row norms
  double scale = 1.0;
  Cplx det = 1.0;
  for (int i = 0; i < n; ++i) {
    double rn = 0.0;
    for (int j = 0; j <= i; ++j) rn += std::abs(T(i, j));
    scale *= std::max(rn, 1e-300);
    det *= T(i, i);
  }
  if (std::abs(det) < 1e-14 * scale) throw std::runtime_error("singular-resolvent");
  ComplexMatrix X(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      Cplx acc = U(i, col);
      for (int j = 0; j < i; ++j) acc -= T(i, j) * X(j, col);
      X(i, col) = acc / T(i, i);
    }
  }
  return X;
}

}  // namespace

ComplexMatrix stability_matrix(const GlmTableau& t, Cplx z) {
  const int s = t.s, r = t.r;
  ComplexMatrix T(s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) T(i, j) = (i == j ? 1.0 : 0.0) - z * t.A(i, j);
  const ComplexMatrix X = lower_tri_solve(T, t.U);  // (I - zA)^{-1} U
  ComplexMatrix M(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Cplx acc = t.V(i, j);
      for (int k = 0; k < s; ++k) acc += z * t.B(i, k) * X(k, j);
      M(i, j) = acc;
    }
  return M;
}

ComplexMatrix imex_stability_matrix(const ImexGlmPair& pair, Cplx w, Cplx w_hat) {
  const GlmTableau& e = pair.explicit_method;
  const GlmTableau& im = pair.implicit_method;
  const int s = e.s, r = e.r;
  ComplexMatrix T(s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      T(i, j) = (i == j ? 1.0 : 0.0) - w * e.A(i, j) - w_hat * im.A(i, j);
  const ComplexMatrix X = lower_tri_solve(T, e.U);
  ComplexMatrix M(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Cplx acc = e.V(i, j);
      for (int k = 0; k < s; ++k) acc += (w * e.B(i, k) + w_hat * im.B(i, k)) * X(k, j);
      M(i, j) = acc;
    }
  return M;
}

ComplexMatrix limit_matrix(const GlmTableau& t) {
  if (t.kind != TableauKind::implicit_type2 || std::abs(t.lambda) < 1e-14)
    throw std::runtime_error("no-stiff-limit");
  const int s = t.s, r = t.r;
  // A^{-1} U by forward substitution (A lower triangular, diagonal lambda)
  Mat X(s, r);
  for (int col = 0; col < r; ++col)
    for (int i = 0; i < s; ++i) {
      double acc = t.U(i, col);
      for (int j = 0; j < i; ++j) acc -= t.A(i, j) * X(j, col);
      X(i, col) = acc / t.A(i, i);
    }
  const Mat M = t.V - t.B * X;
  ComplexMatrix out(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out(i, j) = M(i, j);
  return out;
}

namespace {

Cplx poly_eval_monic(const std::vector<Cplx>& low, Cplx x) {
  Cplx acc = 1.0;
  for (size_t i = low.size(); i-- > 0;) acc = acc * x + low[i];
  return acc;
}

Cplx poly_deriv_monic(const std::vector<Cplx>& low, Cplx x) {
  const int n = static_cast<int>(low.size());
  Cplx acc = static_cast<double>(n);
  for (int i = n - 1; i >= 1; --i) acc = acc * x + low[i] * static_cast<double>(i);
  return acc;
}

Cplx polish(const std::vector<Cplx>& low, Cplx x) {
  for (int it = 0; it < 2; ++it) {
    const Cplx d = poly_deriv_monic(low, x);
    if (std::abs(d) == 0.0) break;
    x -= poly_eval_monic(low, x) / d;
  }
  return x;
}

}  // namespace

std::vector<Cplx> monic_roots(const std::vector<Cplx>& low) {
  const int n = static_cast<int>(low.size());
  switch (n) {
    case 0:
      return {};
    case 1:
      return {-low[0]};
    case 2: {
      // x^2 + bx + c, large root first via the stable branch
      const Cplx b = low[1], c = low[0];
      const Cplx sq = std::sqrt(b * b - 4.0 * c);
      const Cplx q = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
      if (std::abs(q) == 0.0) return {0.0, -b};
      return {q, c / q};
    }
    case 3: {
      // Cardano on the depressed cubic t^3 + pt + q, x = t - a/3
      const Cplx a = low[2], b = low[1], c = low[0];
      const Cplx sh = a / 3.0;
      const Cplx p = b - a * a / 3.0;
      const Cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
      const Cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
      Cplx u = -q / 2.0 + disc;
      if (std::abs(u) < std::abs(-q / 2.0 - disc)) u = -q / 2.0 - disc;
      std::vector<Cplx> roots;
      if (std::abs(u) == 0.0) {
        const Cplx t0 = 0.0;
        roots = {t0, t0, t0};  // p == q == 0: triple root
      } else {
        const Cplx cbrt_u = std::pow(u, 1.0 / 3.0);
        const Cplx omega(-0.5, std::sqrt(3.0) / 2.0);
        for (int k = 0; k < 3; ++k) {
          Cplx uk = cbrt_u;
          if (k == 1) uk *= omega;
          if (k == 2) uk *= std::conj(omega);
          roots.push_back(uk - p / (3.0 * uk));
        }
      }
      for (auto& rt : roots) rt = polish(low, rt - sh);
      return roots;
    }
    case 4: {
      // Durand-Kerner iteration on the companion polynomial
      double bound = 1.0;
      for (const auto& cf : low) bound = std::max(bound, std::abs(cf));
      bound = 1.0 + bound;
      std::vector<Cplx> x(4);
      const Cplx seed(0.4, 0.9);
      Cplx pw = 1.0;
      for (int k = 0; k < 4; ++k) {
        pw *= seed;
        x[k] = bound * pw;
      }
      for (int it = 0; it < 200; ++it) {
        double delta = 0.0;
        for (int k = 0; k < 4; ++k) {
          Cplx denom = 1.0;
          for (int j = 0; j < 4; ++j)
            if (j != k) denom *= x[k] - x[j];
          if (std::abs(denom) == 0.0) denom = 1e-300;
          const Cplx step = poly_eval_monic(low, x[k]) / denom;
          x[k] -= step;
          delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-14 * bound) break;
      }
      for (auto& rt : x) rt = polish(low, rt);
      return x;
    }
    default:
      throw std::invalid_argument("monic_roots: degree > 4 unsupported");
  }
}

double spectral_radius(const ComplexMatrix& m) {
  const int n = m.n;
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(m(0, 0));
  std::vector<Cplx> low;
  if (n == 2) {
    const Cplx tr = m(0, 0) + m(1, 1);
    const Cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    low = {det, -tr};
  } else if (n == 3) {
    const Cplx tr = m(0, 0) + m(1, 1) + m(2, 2);
    Cplx minors = 0.0;
    minors += m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    minors += m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    minors += m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const Cplx det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    low = {-det, minors, -tr};
  } else {
    // Faddeev-LeVerrier for n = 4
    ComplexMatrix Mk = m;
    std::array<Cplx, 5> cpoly{};  // cpoly[k] multiplies x^{4-k}; cpoly[0] = 1
    cpoly[0] = 1.0;
    for (int k = 1; k <= 4; ++k) {
      Cplx tr = 0.0;
      for (int i = 0; i < 4; ++i) tr += Mk(i, i);
      cpoly[k] = -tr / static_cast<double>(k);
      if (k == 4) break;
      ComplexMatrix shifted = Mk;
      for (int i = 0; i < 4; ++i) shifted(i, i) += cpoly[k];
      ComplexMatrix next(4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          Cplx acc = 0.0;
          for (int l = 0; l < 4; ++l) acc += m(i, l) * shifted(l, j);
          next(i, j) = acc;
        }
      Mk = next;
    }
    low = {cpoly[4], cpoly[3], cpoly[2], cpoly[1]};
  }
  double rho = 0.0;
  for (const Cplx& r : monic_roots(low)) rho = std::max(rho, std::abs(r));
  return rho;
}

std::vector<Cplx> default_hat_samples(double alpha_deg) {
  std::vector<Cplx> out;
  const int n_rho = 25, n_theta = 9;
  const double alpha = alpha_deg * kPi / 180.0;
  for (int k = 0; k < n_rho; ++k) {
    const double e = -2.0 + 8.0 * k / (n_rho - 1);  // log10 in [-2, 6]
    const double rho = std::pow(10.0, e);
    for (int j = 0; j < n_theta; ++j) {
      const double theta = alpha * j / (n_theta - 1);
      out.push_back(-rho * std::exp(Cplx(0.0, theta)));
      if (j > 0) out.push_back(-rho * std::exp(Cplx(0.0, -theta)));
    }
  }
  return out;
}

namespace {

void run_partitioned(int total, int workers, const std::function<void(int, int)>& body) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1) {
    body(0, total);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

// ------------------------------------------------------------------------
// Grid-scan fast path. Cataloged methods have U = I and lower-triangular
// stage matrices with a constant diagonal, so the resolvent inverse is a
// closed-form triangular inverse whose diagonal 1 - w a_d - wh ah_d does not
// mix stages. Everything that depends only on the stiff probe (or only on
// the grid point) is precomputed once.

struct ScanMethodData {
  int r = 0;
  double ae[9]{}, ai[9]{}, be[9]{}, bi[9]{}, v[9]{};
  double ae_diag = 0.0, ai_diag = 0.0;
  bool usable = false;  // U = I, lower triangular, constant diagonals
};

ScanMethodData load_scan_data(const GlmTableau& e, const GlmTableau* im) {
  ScanMethodData d;
  const int r = e.r;
  d.r = r;
  if (r < 2 || r > 3 || e.s != r) return d;
  if (max_abs_diff(e.U, Mat::identity(r)) > 0.0) return d;
  auto lower_const_diag = [r](const Mat& A, double& diag) {
    diag = A(0, 0);
    for (int i = 0; i < r; ++i) {
      if (std::abs(A(i, i) - diag) > 0.0) return false;
      for (int j = i + 1; j < r; ++j)
        if (A(i, j) != 0.0) return false;
    }
    return true;
  };
  if (!lower_const_diag(e.A, d.ae_diag)) return d;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      d.ae[i * r + j] = e.A(i, j);
      d.be[i * r + j] = e.B(i, j);
      d.v[i * r + j] = e.V(i, j);
    }
  if (im) {
    if (im->r != r || im->s != r) return d;
    if (max_abs_diff(im->U, Mat::identity(r)) > 0.0) return d;
    if (!lower_const_diag(im->A, d.ai_diag)) return d;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        d.ai[i * r + j] = im->A(i, j);
        d.bi[i * r + j] = im->B(i, j);
      }
  }
  d.usable = true;
  return d;
}

// per-probe precomputation: wh * Ahat (lower part), wh * Bhat, diag term
struct ProbePre {
  Cplx a[3]{};  // a10, a20, a21
  Cplx b[9]{};
  Cplx diag{};         // wh * ai_diag
  double abs_diag = 0.0;
};

ProbePre make_probe_pre(const ScanMethodData& d, Cplx wh) {
  ProbePre p;
  const int r = d.r;
  if (r == 2) {
    p.a[0] = wh * d.ai[2];
  } else {
    p.a[0] = wh * d.ai[3];
    p.a[1] = wh * d.ai[6];
    p.a[2] = wh * d.ai[7];
  }
  for (int k = 0; k < r * r; ++k) p.b[k] = wh * d.bi[k];
  p.diag = wh * d.ai_diag;
  p.abs_diag = std::abs(p.diag);
  return p;
}

// sqrt and cbrt on values far from the over/underflow thresholds (matrix
// entries here are bounded by the probe radii times the coefficients)
Cplx sqrt_midrange(Cplx z) {
  const double x = z.real(), y = z.imag();
  const double r = std::sqrt(x * x + y * y);
  if (r == 0.0) return {0.0, 0.0};
  const double t = std::sqrt(0.5 * (r + std::abs(x)));
  if (x >= 0.0) return {t, y / (2.0 * t)};
  const double im = std::copysign(t, y);
  return {y / (2.0 * im), im};
}

Cplx cbrt_polar(Cplx u) {
  const double m = std::cbrt(std::sqrt(std::norm(u)));
  const double th = std::atan2(u.imag(), u.real()) / 3.0;
  return Cplx(m * std::cos(th), m * std::sin(th));
}

double max_root_modulus_quadratic(Cplx tr, Cplx det) {
  const Cplx sq = sqrt_midrange(tr * tr - 4.0 * det);
  const Cplx q = (std::real(std::conj(tr) * sq) >= 0.0) ? 0.5 * (tr + sq) : 0.5 * (tr - sq);
  const double nq = std::norm(q);
  if (nq == 0.0) return 0.0;
  return std::sqrt(std::max(nq, std::norm(det) / nq));
}

double max_root_modulus_cubic(Cplx a, Cplx b, Cplx c) {
  // roots of x^3 + a x^2 + b x + c by Cardano; a Newton step refines the
  // roots competing for the maximum modulus
  const Cplx sh = a / 3.0;
  const Cplx p = b - a * a / 3.0;
  const Cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const Cplx disc = sqrt_midrange(q * q / 4.0 + p * p * p / 27.0);
  Cplx u = -q / 2.0 + disc;
  const Cplx u2 = -q / 2.0 - disc;
  if (std::norm(u2) > std::norm(u)) u = u2;
  if (std::norm(u) == 0.0) return std::abs(-sh);

  const Cplx cu = cbrt_polar(u);
  const Cplx v = -p / (3.0 * cu);  // second Cardano term; rotates conjugately
  const Cplx omega(-0.5, 0.86602540378443864676);
  Cplx roots[3] = {cu + v - sh, cu * omega + v * std::conj(omega) - sh,
                   cu * std::conj(omega) + v * omega - sh};
  double norms[3];
  double top = 0.0;
  for (int k = 0; k < 3; ++k) {
    norms[k] = std::norm(roots[k]);
    top = std::max(top, norms[k]);
  }
  double worst_sq = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (norms[k] < 0.8 * top) continue;  // cannot reach the max after polish
    Cplx x = roots[k];
    const Cplx fx = ((x + a) * x + b) * x + c;
    const Cplx dfx = (3.0 * x + 2.0 * a) * x + b;
    if (std::norm(dfx) > 0.0) x -= fx / dfx;
    worst_sq = std::max(worst_sq, std::norm(x));
  }
  return std::sqrt(worst_sq);
}

// rho(M(w, wh)) with precomputed probe data; d.r in {2, 3}
double rho_fast(const ScanMethodData& d, const Cplx* w_ae, const Cplx* w_be,
                Cplx w_diag, double abs_w_diag, const ProbePre& p, bool* singular) {
  const Cplx diag = 1.0 - w_diag - p.diag;
  const double diag_scale = 1.0 + abs_w_diag + p.abs_diag;  // relative scale
  if (std::norm(diag) < 1e-28 * diag_scale * diag_scale) {
    *singular = true;
    return std::numeric_limits<double>::infinity();
  }
  const Cplx invd = 1.0 / diag;
  if (d.r == 2) {
    const Cplx t10 = -(w_ae[0] + p.a[0]);
    const Cplx x10 = -t10 * invd * invd;
    const Cplx c00 = w_be[0] + p.b[0], c01 = w_be[1] + p.b[1];
    const Cplx c10 = w_be[2] + p.b[2], c11 = w_be[3] + p.b[3];
    const Cplx m00 = d.v[0] + c00 * invd + c01 * x10;
    const Cplx m01 = d.v[1] + c01 * invd;
    const Cplx m10 = d.v[2] + c10 * invd + c11 * x10;
    const Cplx m11 = d.v[3] + c11 * invd;
    return max_root_modulus_quadratic(m00 + m11, m00 * m11 - m01 * m10);
  }
  const Cplx t10 = -(w_ae[0] + p.a[0]);
  const Cplx t20 = -(w_ae[1] + p.a[1]);
  const Cplx t21 = -(w_ae[2] + p.a[2]);
  const Cplx invd2 = invd * invd;
  const Cplx x10 = -t10 * invd2;
  const Cplx x21 = -t21 * invd2;
  const Cplx x20 = (t10 * t21 * invd - t20) * invd2;
  Cplx m[9];
  for (int i = 0; i < 3; ++i) {
    const Cplx ci0 = w_be[i * 3] + p.b[i * 3];
    const Cplx ci1 = w_be[i * 3 + 1] + p.b[i * 3 + 1];
    const Cplx ci2 = w_be[i * 3 + 2] + p.b[i * 3 + 2];
    m[i * 3] = d.v[i * 3] + ci0 * invd + ci1 * x10 + ci2 * x20;
    m[i * 3 + 1] = d.v[i * 3 + 1] + ci1 * invd + ci2 * x21;
    m[i * 3 + 2] = d.v[i * 3 + 2] + ci2 * invd;
  }
  const Cplx tr = m[0] + m[4] + m[8];
  const Cplx minors = m[0] * m[4] - m[1] * m[3] + m[0] * m[8] - m[2] * m[6] +
                      m[4] * m[8] - m[5] * m[7];
  const Cplx det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                   m[1] * (m[3] * m[8] - m[5] * m[6]) +
                   m[2] * (m[3] * m[7] - m[4] * m[6]);
  return max_root_modulus_cubic(-tr, minors, -det);
}

// grid-point precomputation: w * Ae lower entries, w * Be, w * ae_diag
void point_pre(const ScanMethodData& d, Cplx w, Cplx* w_ae, Cplx* w_be, Cplx& w_diag,
               double& abs_w_diag) {
  if (d.r == 2) {
    w_ae[0] = w * d.ae[2];
  } else {
    w_ae[0] = w * d.ae[3];
    w_ae[1] = w * d.ae[6];
    w_ae[2] = w * d.ae[7];
  }
  for (int k = 0; k < d.r * d.r; ++k) w_be[k] = w * d.be[k];
  w_diag = w * d.ae_diag;
  abs_w_diag = std::abs(w_diag);
}

bool conjugate_closed(const std::vector<Cplx>& probes) {
  for (const Cplx& p : probes) {
    if (p.imag() == 0.0) continue;
    bool found = false;
    for (const Cplx& q : probes)
      if (q == std::conj(p)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Real tableaus give rho(M(conj z)) = rho(M(z)); on an Im-symmetric grid the
// lower half mirrors the upper half point for point.
bool im_symmetric(const RegionScan& scan) { return scan.im_min == -scan.im_max; }

template <typename PointFn>
std::vector<ScanRecord> run_grid(const RegionScan& scan, int workers, bool mirror,
                                 const PointFn& eval_point) {
  std::vector<ScanRecord> records(static_cast<size_t>(scan.nx) * scan.ny);
  const int rows = mirror ? (scan.ny + 1) / 2 : scan.ny;
  run_partitioned(rows, workers, [&](int row_lo, int row_hi) {
    for (int iy = row_lo; iy < row_hi; ++iy) {
      const double im = scan.im_min + (scan.im_max - scan.im_min) * iy / (scan.ny - 1);
      for (int ix = 0; ix < scan.nx; ++ix) {
        const double re = scan.re_min + (scan.re_max - scan.re_min) * ix / (scan.nx - 1);
        ScanRecord rec = eval_point(Cplx(re, im));
        records[static_cast<size_t>(iy) * scan.nx + ix] = rec;
        if (mirror && iy != scan.ny - 1 - iy) {
          rec.z = std::conj(rec.z);
          records[static_cast<size_t>(scan.ny - 1 - iy) * scan.nx + ix] = rec;
        }
      }
    }
  });
  return records;
}

}  // namespace

std::vector<ScanRecord> scan_single(const GlmTableau& t, const RegionScan& scan,
                                    int workers) {
  if (scan.nx < 2 || scan.ny < 2) throw std::invalid_argument("scan grid too small");
  const ScanMethodData data = load_scan_data(t, nullptr);
  const ProbePre zero_probe{};  // wh = 0
  const auto eval_point = [&](Cplx z) {
    ScanRecord rec;
    rec.z = z;
    if (data.usable) {
      Cplx w_ae[3], w_be[9], w_diag;
      double abs_w_diag;
      point_pre(data, z, w_ae, w_be, w_diag, abs_w_diag);
      bool singular = false;
      rec.rho = rho_fast(data, w_ae, w_be, w_diag, abs_w_diag, zero_probe, &singular);
      rec.singular = singular;
      rec.stable = !singular && rec.rho <= 1.0 + kStableTol;
      return rec;
    }
    try {
      rec.rho = spectral_radius(stability_matrix(t, z));
      rec.stable = rec.rho <= 1.0 + kStableTol;
    } catch (const std::runtime_error&) {
      rec.rho = std::numeric_limits<double>::infinity();
      rec.stable = false;
      rec.singular = true;
    }
    return rec;
  };
  return run_grid(scan, workers, im_symmetric(scan), eval_point);
}

std::vector<ScanRecord> scan_constrained(const ImexGlmPair& pair, const RegionScan& scan,
                                         int workers) {
  if (scan.nx < 2 || scan.ny < 2) throw std::invalid_argument("scan grid too small");
  const std::vector<Cplx> probes =
      scan.hat_samples.empty() ? default_hat_samples(scan.alpha_deg) : scan.hat_samples;
  // The w_hat -> infinity limit of M(w, w_hat) is V - Bhat Ahat^{-1} U,
  // independent of w; fold it in as one precomputed probe.
  const double rho_limit = spectral_radius(limit_matrix(pair.implicit_method));
  const ScanMethodData data = load_scan_data(pair.explicit_method, &pair.implicit_method);
  std::vector<ProbePre> pre;
  if (data.usable) {
    pre.reserve(probes.size());
    for (const Cplx& wh : probes) pre.push_back(make_probe_pre(data, wh));
  }
  const bool mirror = im_symmetric(scan) && conjugate_closed(probes);

  const auto eval_point = [&](Cplx w) {
    ScanRecord rec;
    rec.z = w;
    double worst = rho_limit;
    bool singular = false;
    if (data.usable) {
      Cplx w_ae[3], w_be[9], w_diag;
      double abs_w_diag;
      point_pre(data, w, w_ae, w_be, w_diag, abs_w_diag);
      for (const ProbePre& p : pre) {
        const double rho = rho_fast(data, w_ae, w_be, w_diag, abs_w_diag, p, &singular);
        if (!singular) worst = std::max(worst, rho);
      }
    } else {
      for (const Cplx& wh : probes) {
        try {
          worst = std::max(worst, spectral_radius(imex_stability_matrix(pair, w, wh)));
        } catch (const std::runtime_error&) {
          singular = true;
        }
      }
    }
    rec.rho = singular ? std::numeric_limits<double>::infinity() : worst;
    rec.singular = singular;
    rec.stable = !singular && worst <= 1.0 + kStableTol;
    return rec;
  };
  return run_grid(scan, workers, mirror, eval_point);
}

void write_scan_csv(const std::vector<ScanRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open scan output '" + path + "'");
  os << "re,im,rho,stable\n";
  for (const auto& rec : records)
    os << format_double(rec.z.real()) << "," << format_double(rec.z.imag()) << ","
       << format_double(rec.rho) << "," << (rec.stable ? 1 : 0) << "\n";
  if (!os) throw std::runtime_error("write failure on scan output '" + path + "'");
}

}  // namespace imexglm
