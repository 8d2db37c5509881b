#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fakery/matrix.hpp"

namespace fakery {

inline constexpr double kSigmaFloor = 1e-12;

// Per-column z-scoring with population standard deviation.
struct Standardizer {
  std::vector<double> mu;
  std::vector<double> sigma;

  std::size_t dimension() const noexcept { return mu.size(); }

  double apply(std::size_t col, double x) const noexcept { return (x - mu[col]) / sigma[col]; }

  template <class T>
  Matrix apply(const BasicMatrix<T>& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = apply(c, static_cast<double>(x(r, c)));
    return out;
  }

  static Standardizer identity(std::size_t d) {
    return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  }
};

// Two-pass mean and variance per column.
template <class T>
Standardizer fit_standardizer(const BasicMatrix<T>& x) {
  const std::size_t n = x.rows(), d = x.cols();
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.mu[c] += static_cast<double>(x(r, c));
  for (auto& m : s.mu) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = static_cast<double>(x(r, c)) - s.mu[c];
      s.sigma[c] += dev * dev;
    }
  for (auto& v : s.sigma) v = std::max(std::sqrt(v / static_cast<double>(n)), kSigmaFloor);
  return s;
}

}  // namespace fakery
