#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace imexglm {

using Vec = std::vector<double>;

/// Dense row-major matrix. Everything in this library is desk scale
/// (method tableaus are at most 4x4, stage systems a few hundred), so a
/// plain vector-backed type with LU below covers all linear algebra needs.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows_init);

  static Mat identity(int n);

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  Vec row(int i) const;
};

bool operator==(const Mat& x, const Mat& y);

Mat operator*(const Mat& x, const Mat& y);
Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat operator*(double s, const Mat& x);
Vec operator*(const Mat& m, const Vec& v);

double max_abs(const Mat& m);
double max_abs_diff(const Mat& x, const Mat& y);

double norm2(const Vec& v);
double norm_inf(const Vec& v);
double dot(const Vec& x, const Vec& y);
void axpy(double a, const Vec& x, Vec& y);  // y += a*x

/// LU factorization with partial pivoting, kept for repeated solves
/// against the same matrix (one factorization per step in the stage solver).
struct LuFactors {
  Mat lu;
  std::vector<int> piv;
  int n = 0;
};

LuFactors lu_factor(Mat m);  // throws std::runtime_error on singular pivot
Vec lu_solve(const LuFactors& f, Vec b);

}  // namespace imexglm
