#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace roppt {

using Vec = std::vector<double>;

// Dense row-major matrix, double precision. Just enough linear algebra for
// the desk-scale encoder; nothing here is clever.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

  std::span<double> row_span(int i) { return {row(i), static_cast<std::size_t>(cols)}; }
  std::span<const double> row_span(int i) const { return {row(i), static_cast<std::size_t>(cols)}; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// c += a * b
inline void matmul_acc(const Mat& a, const Mat& b, Mat& c) {
  assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      const double* bk = b.row(k);
      for (int j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
    }
  }
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
  matmul_acc(a, b, c);
  return c;
}

// c += a * b^T
inline void matmul_nt_acc(const Mat& a, const Mat& b, Mat& c) {
  assert(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows);
  for (int i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (int j = 0; j < b.rows; ++j) ci[j] += dot(a.row_span(i), b.row_span(j));
  }
}

inline Mat matmul_nt(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.rows);
  matmul_nt_acc(a, b, c);
  return c;
}

// c += a^T * b
inline void matmul_tn_acc(const Mat& a, const Mat& b, Mat& c) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (int i = 0; i < a.cols; ++i) {
      const double aki = ak[i];
      double* ci = c.row(i);
      for (int j = 0; j < b.cols; ++j) ci[j] += aki * bk[j];
    }
  }
}

inline Mat matmul_tn(const Mat& a, const Mat& b) {
  Mat c(a.cols, b.cols);
  matmul_tn_acc(a, b, c);
  return c;
}

inline void add_inplace(Mat& a, const Mat& b) {
  assert(a.rows == b.rows && a.cols == b.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

inline void scale_inplace(Mat& a, double s) {
  for (double& x : a.data) x *= s;
}

// y = a * x
inline Vec matvec(const Mat& a, std::span<const double> x) {
  assert(static_cast<int>(x.size()) == a.cols);
  Vec y(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) y[i] = dot(a.row_span(i), x);
  return y;
}

// y = a^T * x
inline Vec matvec_t(const Mat& a, std::span<const double> x) {
  assert(static_cast<int>(x.size()) == a.rows);
  Vec y(a.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double xi = x[i];
    const double* ai = a.row(i);
    for (int j = 0; j < a.cols; ++j) y[j] += xi * ai[j];
  }
  return y;
}

// m += u * v^T
inline void add_outer(Mat& m, std::span<const double> u, std::span<const double> v) {
  assert(static_cast<int>(u.size()) == m.rows && static_cast<int>(v.size()) == m.cols);
  for (int i = 0; i < m.rows; ++i) {
    const double ui = u[i];
    double* mi = m.row(i);
    for (int j = 0; j < m.cols; ++j) mi[j] += ui * v[j];
  }
}

}  // namespace roppt
