#pragma once

// L2-regularized logistic regression on standardized features, minimized
// with L-BFGS.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <vector>

#include "fakery/matrix.hpp"
#include "fakery/models/common.hpp"
#include "fakery/models/standardizer.hpp"

namespace fakery {

struct LogisticParams {
  double l2 = 1e-4;
  int max_iter = 500;
  double tol = 1e-6;
  std::uint64_t seed = 42;  // the solver is deterministic; kept for a uniform interface
  int history = 10;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  Standardizer standardizer;
  LogisticParams params;
  int iterations = 0;

  std::size_t dimension() const noexcept { return weights.size(); }

  template <class T>
  double decision(std::span<const T> x) const {
    double z = bias;
    for (std::size_t c = 0; c < weights.size(); ++c)
      z += weights[c] * standardizer.apply(c, static_cast<double>(x[c]));
    return z;
  }

  template <class T>
  std::vector<double> predict_proba(const BasicMatrix<T>& x) const {
    require_dimension(x.cols(), dimension(), "logreg");
    std::vector<double> p(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) p[r] = sigmoid(decision(x.row(r)));
    return p;
  }
};

// (1/n) sum log(1 + exp(-(2y-1)(w.z + b))) + (l2/2)|w|^2, with z the
// standardized row. Parameters are packed as [w_0 .. w_{d-1}, b].
template <class T>
class LogisticObjective {
 public:
  LogisticObjective(const BasicMatrix<T>& x, std::span<const Label> y, const Standardizer& s,
                    double l2)
      : x_(x), y_(y), s_(s), l2_(l2) {}

  std::size_t size() const noexcept { return x_.cols() + 1; }

  double operator()(std::span<const double> params, std::span<double> grad) const {
    const std::size_t n = x_.rows(), d = x_.cols();
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    std::vector<double> z(d);
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = x_.row(r);
      double m = params[d];
      for (std::size_t c = 0; c < d; ++c) {
        z[c] = s_.apply(c, static_cast<double>(row[c]));
        m += params[c] * z[c];
      }
      const double sign = y_[r] ? 1.0 : -1.0;
      loss += softplus_neg(sign * m);
      const double residual = sigmoid(m) - (y_[r] ? 1.0 : 0.0);
      for (std::size_t c = 0; c < d; ++c) grad[c] += residual * z[c];
      grad[d] += residual;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    for (auto& g : grad) g *= inv_n;
    double wsq = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      wsq += params[c] * params[c];
      grad[c] += l2_ * params[c];
    }
    return loss + 0.5 * l2_ * wsq;
  }

 private:
  const BasicMatrix<T>& x_;
  std::span<const Label> y_;
  const Standardizer& s_;
  double l2_;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

// Minimizes a smooth objective `f(params, grad) -> value` from `x0`. Stops
// when the gradient max-norm drops below tol or after max_iter iterations.
// Returns the number of iterations taken.
template <class Objective>
int minimize_lbfgs(const Objective& f, std::vector<double>& x, int max_iter, double tol,
                   int history) {
  const std::size_t n = x.size();
  std::vector<double> g(n), x_new(n), g_new(n), dir(n), alpha(static_cast<std::size_t>(history));
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  double fx = f(x, g);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (detail::max_abs(g) < tol) break;
    // Two-loop recursion.
    dir = g;
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * detail::dot(s_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    if (!s_hist.empty()) {
      const double gamma = detail::dot(s_hist.back(), y_hist.back()) /
                           detail::dot(y_hist.back(), y_hist.back());
      for (auto& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * detail::dot(y_hist[k], dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (auto& v : dir) v = -v;
    double slope = detail::dot(g, dir);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = -detail::dot(g, g);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    // Backtracking Armijo line search.
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::sqrt(-slope)) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = f(x_new, g_new);
      if (f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<double> s(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(s, yv);
    if (sy > 1e-12) {
      if (s_hist.size() == static_cast<std::size_t>(history)) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  }
  return iter;
}

template <class T>
LinearModel logreg_fit(const BasicMatrix<T>& x, std::span<const Label> y,
                       const LogisticParams& params = {}) {
  if (x.rows() != y.size()) throw LengthMismatchError("logreg: rows and labels differ");
  if (x.rows() < 2) throw SingleClassError("logreg: need at least 2 samples");
  require_both_classes(y, "logreg");
  LinearModel model;
  model.params = params;
  model.standardizer = fit_standardizer(x);
  const LogisticObjective<T> objective(x, y, model.standardizer, params.l2);
  std::vector<double> theta(objective.size(), 0.0);
  model.iterations = minimize_lbfgs(objective, theta, params.max_iter, params.tol, params.history);
  model.bias = theta.back();
  theta.pop_back();
  model.weights = std::move(theta);
  return model;
}

}  // namespace fakery
