#include "imexglm/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace imexglm {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows_init) {
  rows = static_cast<int>(rows_init.size());
  cols = rows > 0 ? static_cast<int>(rows_init.begin()->size()) : 0;
  a.reserve(static_cast<size_t>(rows) * cols);
  for (const auto& r : rows_init) {
    if (static_cast<int>(r.size()) != cols)
      throw std::invalid_argument("ragged matrix initializer");
    for (double x : r) a.push_back(x);
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Mat::row(int i) const {
  Vec out(cols);
  for (int j = 0; j < cols; ++j) out[j] = (*this)(i, j);
  return out;
}

bool operator==(const Mat& x, const Mat& y) {
  return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
}

Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product dimension mismatch");
  Mat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

Mat operator+(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("matrix sum dimension mismatch");
  Mat out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

Mat operator-(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("matrix difference dimension mismatch");
  Mat out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

Mat operator*(double s, const Mat& x) {
  Mat out = x;
  for (double& v : out.a) v *= s;
  return out;
}

Vec operator*(const Mat& m, const Vec& v) {
  if (m.cols != static_cast<int>(v.size()))
    throw std::invalid_argument("matrix-vector dimension mismatch");
  Vec out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols; ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double max_abs(const Mat& m) {
  double out = 0.0;
  for (double v : m.a) out = std::max(out, std::abs(v));
  return out;
}

double max_abs_diff(const Mat& x, const Mat& y) { return max_abs(x - y); }

double norm2(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double norm_inf(const Vec& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double dot(const Vec& x, const Vec& y) {
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const Vec& x, Vec& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

LuFactors lu_factor(Mat m) {
  if (m.rows != m.cols) throw std::invalid_argument("lu_factor: square matrix required");
  const int n = m.rows;
  LuFactors f;
  f.n = n;
  f.piv.resize(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(m(i, k));
      if (v > best) { best = v; p = i; }
    }
    if (best == 0.0) throw std::runtime_error("lu_factor: singular matrix");
    f.piv[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
    const double inv = 1.0 / m(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double l = m(i, k) * inv;
      m(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  f.lu = std::move(m);
  return f;
}

Vec lu_solve(const LuFactors& f, Vec b) {
  const int n = f.n;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("lu_solve: dimension mismatch");
  for (int k = 0; k < n; ++k) {
    std::swap(b[k], b[f.piv[k]]);
    for (int i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * b[k];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= f.lu(i, j) * b[j];
    b[i] /= f.lu(i, i);
  }
  return b;
}

}  // namespace imexglm
