#pragma once

#include "imexglm/tableau.hpp"

namespace imexglm {

/// Power series in z truncated at degree K; arithmetic is exact on the kept
/// coefficients, products drop terms beyond K.
struct TruncatedSeries {
  Vec coeffs;  // a_0..a_K

  int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator[](int k) const { return coeffs[static_cast<size_t>(k)]; }
};

TruncatedSeries exp_series(double c, int K);  // coeffs[k] = c^k / k!
TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries scale(double s, const TruncatedSeries& a);
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries shift_z(const TruncatedSeries& a);  // multiply by z

/// Stage-order condition residual: max-abs coefficient mismatch of
///   e^{cz} = z A e^{cz} + U w(z) + O(z^{p+1})
/// over z^1..z^q when q = p, or over z^1..z^p including the prescribed z^p
/// defect term when q = p-1. Zero means the condition holds.
/// K defaults to p+2; any K > p+1 gives the same residual.
double stage_order_residual(const GlmTableau& t, const WeightMatrix& W, int p, int q,
                            int K = -1);

/// Order condition residual: coefficient mismatch of
///   e^z w(z) = z B e^{cz} + V w(z) + O(z^{p+1})   over z^0..z^p.
double order_residual(const GlmTableau& t, const WeightMatrix& W, int p, int K = -1);

/// Dense-output condition residual over rows k = 0..p of
///   [1, z, ..., z^p]^T e^z = z Btilde e^{cz} + Vtilde w(z) + O(z^{p+1}).
double termination_residual(const Mat& Btilde, const Mat& Vtilde, const GlmTableau& t,
                            const WeightMatrix& W, int p, int K = -1);

/// The k = 0 row alone: the endpoint-recovery weights (beta, gamma).
double termination_row_residual(const Vec& beta, const Vec& gamma, const GlmTableau& t,
                                const WeightMatrix& W, int p, int K = -1);

}  // namespace imexglm
