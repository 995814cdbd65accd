#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/rng.hpp"

namespace relforge {

// Dense row-major double tensor. Rank 1 or 2 is all this pipeline needs.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;

  Tensor() = default;

  static Tensor vector(std::size_t n) {
    Tensor t;
    t.shape = {n};
    t.v.assign(n, 0.0);
    return t;
  }

  static Tensor matrix(std::size_t rows, std::size_t cols) {
    Tensor t;
    t.shape = {rows, cols};
    t.v.assign(rows * cols, 0.0);
    return t;
  }

  std::size_t size() const { return v.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(std::size_t r, std::size_t c) { return v[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols() + c]; }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

// Named handle into a parameter set; declared order is the serialization and
// optimizer order.
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
};

inline void init_uniform(Tensor& t, Rng& rng, double lo = -0.1, double hi = 0.1) {
  for (double& x : t.v) x = rng.real(lo, hi);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = W x for row-major W.
inline std::vector<double> matvec(const Tensor& w, const std::vector<double>& x) {
  if (w.cols() != x.size())
    throw model_error("matvec dimension mismatch: " + std::to_string(w.cols()) +
                      " vs " + std::to_string(x.size()));
  std::vector<double> y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* row = w.v.data() + r * w.cols();
    double s = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

}  // namespace relforge
