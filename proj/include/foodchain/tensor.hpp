#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace foodchain {

/// Dense row-major matrix with a gradient slot of identical shape.
/// A column vector is a Tensor with cols == 1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;  // values
  std::vector<double> g;  // accumulated gradient

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c)
      : rows(r), cols(c), v(r * c, 0.0), g(r * c, 0.0) {}

  std::size_t size() const { return v.size(); }

  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  double& grad_at(std::size_t r, std::size_t c) { return g[r * cols + c]; }

  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

  bool values_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("shape mismatch: " + what);
}

/// y = W x + b, W is (out x in), x has length in, y length out.
inline void affine(const Tensor& w, const double* x, const double* b,
                   double* y) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    double s = b ? b[r] : 0.0;
    const double* wr = &w.v[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) s += wr[c] * x[c];
    y[r] = s;
  }
}

/// dx += W^T dy
inline void affine_backward_input(const Tensor& w, const double* dy,
                                  double* dx) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* wr = &w.v[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) dx[c] += wr[c] * dy[r];
  }
}

/// dW += dy x^T
inline void affine_backward_weight(Tensor& w, const double* dy,
                                   const double* x) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    double* gr = &w.g[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) gr[c] += dy[r] * x[c];
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace foodchain
