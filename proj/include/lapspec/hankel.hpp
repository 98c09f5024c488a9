#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lapspec/error.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

/// k x k matrix with entry (i, j) = y[i + j].
template <typename S>
struct HankelMatrix {
  Mat<S> entries;

  Eigen::Index size() const { return entries.rows(); }
};

template <typename S>
HankelMatrix<S> build_hankel(std::span<const S> y, std::size_t k) {
  if (k == 0 || y.size() + 1 < 2 * k) {
    throw Error(ErrorKind::InsufficientData, "a " + std::to_string(k) + "x" + std::to_string(k) + " Hankel needs " +
                                                 std::to_string(2 * k - 1) + " values, have " +
                                                 std::to_string(y.size()));
  }
  const auto n = static_cast<Eigen::Index>(k);
  HankelMatrix<S> h{Mat<S>(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h.entries(i, j) = y[static_cast<std::size_t>(i + j)];
  }
  return h;
}

template <typename S>
HankelMatrix<S> build_hankel(const std::vector<S>& y, std::size_t k) {
  return build_hankel(std::span<const S>(y), k);
}

template <typename S>
struct RankResult {
  int rank = 0;
  std::vector<S> singular_values;  // descending
};

template <typename S>
std::vector<S> to_std(const Vec<S>& v) {
  return std::vector<S>(v.data(), v.data() + v.size());
}

/// Number of singular values above rel_tol * sigma_1 (0 when sigma_1 == 0).
template <typename S>
RankResult<S> numerical_rank(const HankelMatrix<S>& h, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "rank tolerance must lie in (0, 1)");
  }
  Eigen::JacobiSVD<Mat<S>> svd(h.entries);
  RankResult<S> out;
  out.singular_values = to_std<S>(svd.singularValues());
  if (out.singular_values.empty() || out.singular_values.front() == S(0)) return out;
  const S cut = S(rel_tol) * out.singular_values.front();
  for (const S& s : out.singular_values) out.rank += (s > cut) ? 1 : 0;
  return out;
}

}  // namespace lapspec
