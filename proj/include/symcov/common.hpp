#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symcov {

using Vec = std::vector<double>;

// Tolerance ladder. Geometry (transition inverses, exact identities) is held
// to 1e-12, path/quadrature quantities to 1e-9, finite-difference derivative
// checks to 1e-6.
namespace tol {
inline constexpr double geometry = 1e-12;
inline constexpr double path = 1e-9;       // tau_geo: endpoint agreement
inline constexpr double quadrature = 1e-9;
inline constexpr double fd = 1e-6;
}  // namespace tol

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline Vec vadd(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec vsub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec vscale(double s, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline double vdot(const Vec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double vmaxabs(const Vec& a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

inline double vdist(const Vec& a, const Vec& b) { return vmaxabs(vsub(a, b)); }

// Small dense matrix, row-major; used for coadjoint/automorphism data.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> m;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), m(static_cast<size_t>(r) * c, 0.0) {}
  static Mat identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }
  double& operator()(int i, int j) { return m[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return m[static_cast<size_t>(i) * cols + j]; }

  Vec apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("Mat::apply: size mismatch");
    Vec r(rows, 0.0);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
  }
  Mat mul(const Mat& o) const {
    if (cols != o.rows) throw std::invalid_argument("Mat::mul: size mismatch");
    Mat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k)
        for (int j = 0; j < o.cols; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    return r;
  }
};

}  // namespace symcov
