#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nfr/autodiff.hpp"

namespace nfr {

// Compares reverse-mode gradients against 64-bit central finite differences
// (f(x+eps) - f(x-eps)) / (2 eps), coordinate by coordinate.
//
// `f` maps a Tensor<double> of x0's shape to a scalar Tensor<double> and is
// re-invoked on perturbed constants, so it must be a pure function of its
// argument. Returns the max relative error over the checked coordinates
// (all of them by default).
template <typename F>
double grad_check(F&& f, const Mat<double>& x0, double eps = 1e-5,
                  const std::vector<Eigen::Index>& coords = {}) {
  Tensor<double> x = Tensor<double>::parameter(x0, "grad_check_x");
  Tensor<double> loss = f(x);
  backward(loss);
  Mat<double> analytic = x.grad();

  std::vector<Eigen::Index> idx = coords;
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(x0.size()));
    for (Eigen::Index i = 0; i < x0.size(); ++i) idx[i] = i;
  }

  auto eval = [&](const Mat<double>& pt) {
    Tensor<double> c = Tensor<double>::constant(pt);
    return f(c).value()(0, 0);
  };

  double max_err = 0.0;
  Mat<double> pt = x0;
  for (Eigen::Index i : idx) {
    double saved = pt(i);
    pt(i) = saved + eps;
    double hi = eval(pt);
    pt(i) = saved - eps;
    double lo = eval(pt);
    pt(i) = saved;
    double numeric = (hi - lo) / (2.0 * eps);
    double a = analytic(i);
    double denom = std::max(std::abs(a), std::abs(numeric));
    double err = (denom < 1e-10) ? std::abs(a - numeric)
                                 : std::abs(a - numeric) / denom;
    max_err = std::max(max_err, err);
  }
  return max_err;
}

}  // namespace nfr
