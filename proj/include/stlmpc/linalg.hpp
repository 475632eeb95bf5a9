#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "stlmpc/common.hpp"

namespace stlmpc {

using Vec = std::vector<double>;

/// Dense row-major matrix. Small sizes only; this project never needs BLAS.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rws) {
    rows = static_cast<int>(rws.size());
    cols = rows == 0 ? 0 : static_cast<int>(rws.begin()->size());
    data.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& r : rws) {
      if (static_cast<int>(r.size()) != cols) throw Error("Mat: ragged initializer");
      for (double v : r) data.push_back(v);
    }
  }

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Kronecker product, used for the block-diagonal agent dynamics.
  static Mat kron(const Mat& a, const Mat& b) {
    Mat m(a.rows * b.rows, a.cols * b.cols);
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j)
        for (int k = 0; k < b.rows; ++k)
          for (int l = 0; l < b.cols; ++l) m(i * b.rows + k, j * b.cols + l) = a(i, j) * b(k, l);
    return m;
  }
};

inline Vec matvec(const Mat& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.cols) throw Error("matvec: dimension mismatch");
  Vec y(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < m.cols; ++c) s += m(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::fabs(v));
  return s;
}

inline Vec vec_add(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec vec_sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace stlmpc
