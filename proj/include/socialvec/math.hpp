#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace socialvec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

// Stable sigmoid. Both signs share the same exp(-|x|), so
// logistic(x) + logistic(-x) reconstructs 1 to within a couple of ulps.
inline double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow; softplus(0) = ln 2 exactly as rounded.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// log sigma(x), computed in log space so large negative x stays finite.
inline double log_logistic(double x) { return -softplus(-x); }

// In-place max-subtracted softmax.
inline void softmax_inplace(std::vector<double>& logits) {
  double max = logits[0];
  for (double v : logits)
    if (v > max) max = v;
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max);
    total += v;
  }
  for (double& v : logits) v /= total;
}

// Dense row-major table of `rows` vectors, each `width` wide. Used for
// embedding tables (width K) and stacks of relation matrices (width K*K).
class VecTable {
 public:
  VecTable() = default;
  VecTable(std::size_t rows, std::size_t width)
      : width_(width), data_(rows * width, 0.0) {}

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * width_, width_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * width_, width_};
  }

  std::size_t rows() const { return width_ == 0 ? 0 : data_.size() / width_; }
  std::size_t width() const { return width_; }
  bool empty() const { return data_.empty(); }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const VecTable& a, const VecTable& b) = default;

 private:
  std::size_t width_ = 0;
  std::vector<double> data_;
};

}  // namespace socialvec
