#pragma once

#include <Eigen/Dense>

#include "lapspec/scalar.hpp"

namespace lapspec {

/// exp(A) by scaling and squaring: halve until ||A||_1 <= 1/2, sum the Taylor
/// series to working precision, then square back up.
template <typename S>
Mat<S> matrix_exp(const Mat<S>& a) {
  using std::abs;
  const Eigen::Index d = a.rows();
  const S norm1 = d == 0 ? S(0) : a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  S scale(1);
  while (norm1 * scale > S(0.5)) {
    scale /= S(2);
    ++squarings;
  }
  const Mat<S> x = a * scale;
  Mat<S> sum = Mat<S>::Identity(d, d);
  Mat<S> term = Mat<S>::Identity(d, d);
  // ||x|| <= 1/2 so terms shrink by at least 2x per step.
  for (int k = 1; k < 200; ++k) {
    term = (term * x).eval() / S(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= epsilon<S>() * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

}  // namespace lapspec
