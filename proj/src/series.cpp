#include "imexglm/series.hpp"

#include <cmath>

namespace imexglm {

TruncatedSeries exp_series(double c, int K) {
  if (K < 0) throw std::invalid_argument("exp_series: K must be nonnegative");
  TruncatedSeries out{Vec(K + 1)};
  double term = 1.0;
  out.coeffs[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    term *= c / k;
    out.coeffs[k] = term;
  }
  return out;
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.coeffs.size() != b.coeffs.size())
    throw std::invalid_argument("series sum: truncation mismatch");
  TruncatedSeries out = a;
  for (size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += b.coeffs[i];
  return out;
}

TruncatedSeries scale(double s, const TruncatedSeries& a) {
  TruncatedSeries out = a;
  for (double& v : out.coeffs) v *= s;
  return out;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.coeffs.size() != b.coeffs.size())
    throw std::invalid_argument("series product: truncation mismatch");
  const int K = a.truncation();
  TruncatedSeries out{Vec(K + 1, 0.0)};
  for (int i = 0; i <= K; ++i) {
    if (a.coeffs[i] == 0.0) continue;
    for (int j = 0; i + j <= K; ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return out;
}

TruncatedSeries shift_z(const TruncatedSeries& a) {
  TruncatedSeries out{Vec(a.coeffs.size(), 0.0)};
  for (size_t k = 1; k < out.coeffs.size(); ++k) out.coeffs[k] = a.coeffs[k - 1];
  return out;
}

namespace {

// w_i(z) = sum_k W(i,k) z^k padded to truncation K.
std::vector<TruncatedSeries> weight_series(const WeightMatrix& W, int K) {
  std::vector<TruncatedSeries> out;
  out.reserve(W.W.rows);
  for (int i = 0; i < W.W.rows; ++i) {
    TruncatedSeries s{Vec(K + 1, 0.0)};
    for (int k = 0; k < W.W.cols && k <= K; ++k) s.coeffs[k] = W.W(i, k);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TruncatedSeries> stage_exp_series(const Vec& c, int K) {
  std::vector<TruncatedSeries> out;
  out.reserve(c.size());
  for (double ci : c) out.push_back(exp_series(ci, K));
  return out;
}

// rows(i) = z * sum_j M(i,j) e^{c_j z} + sum_j N(i,j) w_j(z)
std::vector<TruncatedSeries> combine(const Mat& M, const Mat& N,
                                     const std::vector<TruncatedSeries>& E,
                                     const std::vector<TruncatedSeries>& w, int K) {
  std::vector<TruncatedSeries> out;
  out.reserve(M.rows);
  for (int i = 0; i < M.rows; ++i) {
    TruncatedSeries acc{Vec(K + 1, 0.0)};
    for (int j = 0; j < M.cols; ++j)
      if (M(i, j) != 0.0) acc = add(acc, scale(M(i, j), E[j]));
    acc = shift_z(acc);
    for (int j = 0; j < N.cols; ++j)
      if (N(i, j) != 0.0) acc = add(acc, scale(N(i, j), w[j]));
    out.push_back(std::move(acc));
  }
  return out;
}

int pick_k(int p, int K) { return K < 0 ? p + 2 : K; }

}  // namespace

double stage_order_residual(const GlmTableau& t, const WeightMatrix& W, int p, int q,
                            int K) {
  if (q != p && q != p - 1)
    throw std::invalid_argument("stage_order_residual: q must be p or p-1");
  const int KK = pick_k(p, K);
  const auto E = stage_exp_series(t.c, KK);
  const auto w = weight_series(W, KK);
  const auto rhs = combine(t.A, t.U, E, w, KK);
  double res = 0.0;
  for (int i = 0; i < t.s; ++i) {
    for (int k = 1; k <= q; ++k) res = std::max(res, std::abs(E[i][k] - rhs[i][k]));
    if (q == p - 1) {
      // prescribed z^p defect: c^p/p! - A c^{p-1}/(p-1)! - U q_p
      double fact = 1.0;  // p!
      for (int m = 2; m <= p; ++m) fact *= m;
      Vec cp1(t.s);
      for (int j = 0; j < t.s; ++j) cp1[j] = std::pow(t.c[j], p - 1);
      const Vec Ac = t.A * cp1;
      double defect = std::pow(t.c[i], p) / fact - Ac[i] * p / fact;
      for (int j = 0; j < t.r; ++j) defect -= t.U(i, j) * W.W(j, p);
      res = std::max(res, std::abs(E[i][p] - rhs[i][p] - defect));
    }
  }
  return res;
}

double order_residual(const GlmTableau& t, const WeightMatrix& W, int p, int K) {
  const int KK = pick_k(p, K);
  const auto E = stage_exp_series(t.c, KK);
  const auto w = weight_series(W, KK);
  const auto ez = exp_series(1.0, KK);
  const auto rhs = combine(t.B, t.V, E, w, KK);
  double res = 0.0;
  for (int i = 0; i < t.r; ++i) {
    const auto lhs = mul(ez, w[i]);
    for (int k = 0; k <= p; ++k) res = std::max(res, std::abs(lhs[k] - rhs[i][k]));
  }
  return res;
}

double termination_residual(const Mat& Btilde, const Mat& Vtilde, const GlmTableau& t,
                            const WeightMatrix& W, int p, int K) {
  if (Btilde.cols != t.s || Vtilde.cols != t.r || Btilde.rows != Vtilde.rows)
    throw std::invalid_argument("termination_residual: dimension mismatch");
  const int KK = pick_k(p, K);
  const auto E = stage_exp_series(t.c, KK);
  const auto w = weight_series(W, KK);
  const auto ez = exp_series(1.0, KK);
  const auto rhs = combine(Btilde, Vtilde, E, w, KK);
  double res = 0.0;
  for (int k_row = 0; k_row < Btilde.rows; ++k_row) {
    // lhs row: z^k e^z
    TruncatedSeries lhs = ez;
    for (int m = 0; m < k_row; ++m) lhs = shift_z(lhs);
    for (int k = 0; k <= p; ++k)
      res = std::max(res, std::abs(lhs[k] - rhs[k_row][k]));
  }
  return res;
}

double termination_row_residual(const Vec& beta, const Vec& gamma, const GlmTableau& t,
                                const WeightMatrix& W, int p, int K) {
  Mat B(1, static_cast<int>(beta.size()));
  Mat V(1, static_cast<int>(gamma.size()));
  for (size_t j = 0; j < beta.size(); ++j) B(0, static_cast<int>(j)) = beta[j];
  for (size_t j = 0; j < gamma.size(); ++j) V(0, static_cast<int>(j)) = gamma[j];
  return termination_residual(B, V, t, W, p, K);
}

}  // namespace imexglm
