#pragma once

// Laplacian system matrices and their reference eigendecomposition, the
// ground truth every recovery is checked against.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lapspec/error.hpp"
#include "lapspec/graph.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

/// Combinatorial is L = D - G. NormalizedRandomWalk is D^-1 G, the random-walk
/// matrix (row-stochastic), not the symmetric I - D^-1/2 G D^-1/2.
enum class LaplacianKind { Combinatorial, NormalizedRandomWalk };

inline std::string_view kind_name(LaplacianKind k) {
  return k == LaplacianKind::Combinatorial ? "combinatorial" : "normalized";
}

inline LaplacianKind parse_kind(std::string_view s) {
  if (s == "combinatorial") return LaplacianKind::Combinatorial;
  if (s == "normalized" || s == "normalized-random-walk") return LaplacianKind::NormalizedRandomWalk;
  throw Error(ErrorKind::InvalidConfig, "unknown laplacian kind '" + std::string(s) + "'");
}

template <typename S>
struct SystemMatrix {
  Mat<S> entries;
  LaplacianKind kind = LaplacianKind::Combinatorial;

  Eigen::Index size() const { return entries.rows(); }
};

template <typename S = double>
SystemMatrix<S> laplacian(const Graph& g, LaplacianKind kind) {
  const int n = g.node_count();
  const auto deg = g.degrees();
  SystemMatrix<S> m{Mat<S>::Zero(n, n), kind};
  if (kind == LaplacianKind::Combinatorial) {
    for (const auto& e : g.edges()) {
      m.entries(e.i - 1, e.j - 1) = S(-1);
      m.entries(e.j - 1, e.i - 1) = S(-1);
    }
    for (int v = 0; v < n; ++v) m.entries(v, v) = S(deg[static_cast<std::size_t>(v)]);
    return m;
  }
  for (int v = 0; v < n; ++v) {
    if (deg[static_cast<std::size_t>(v)] == 0) {
      throw Error(ErrorKind::IsolatedNode, "node " + std::to_string(v + 1) + " has degree 0");
    }
  }
  for (const auto& e : g.edges()) {
    m.entries(e.i - 1, e.j - 1) = S(1) / S(deg[static_cast<std::size_t>(e.i - 1)]);
    m.entries(e.j - 1, e.i - 1) = S(1) / S(deg[static_cast<std::size_t>(e.j - 1)]);
  }
  return m;
}

/// M = U diag(eigenvalues) W with W = U^-1. Column i of U is the right
/// eigenvector u_i, row i of W the left eigenvector w_i^T.
template <typename S>
struct SpectrumDecomposition {
  Vec<S> eigenvalues;  // ascending
  Mat<S> right;        // U
  Mat<S> left;         // W
};

namespace detail {

// Flip each eigenpair so the first entry of u_i that is not negligible is
// positive, then order by eigenvalue with ties broken lexicographically on u_i.
template <typename S>
void canonicalize(SpectrumDecomposition<S>& dec) {
  using std::abs;
  const Eigen::Index n = dec.eigenvalues.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const S scale = dec.right.col(i).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < n; ++r) {
      if (abs(dec.right(r, i)) > S(1e-12) * scale) {
        if (dec.right(r, i) < S(0)) {
          dec.right.col(i) *= S(-1);
          dec.left.row(i) *= S(-1);
        }
        break;
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (dec.eigenvalues(a) != dec.eigenvalues(b)) return dec.eigenvalues(a) < dec.eigenvalues(b);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (dec.right(r, a) != dec.right(r, b)) return dec.right(r, a) > dec.right(r, b);
    }
    return false;
  });
  SpectrumDecomposition<S> out{Vec<S>(n), Mat<S>(n, n), Mat<S>(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = dec.eigenvalues(src);
    out.right.col(k) = dec.right.col(src);
    out.left.row(k) = dec.left.row(src);
  }
  dec = std::move(out);
}

}  // namespace detail

/// Reference eigendecomposition. The random-walk matrix is diagonalized
/// through its symmetric similarity D^-1/2 G D^-1/2 so the spectrum is real
/// by construction. Throws NumericalFailure if the residual bounds
/// ||M u_i - lambda_i u_i|| <= 1e-10 ||M|| ||u_i|| or ||W U - I|| <= 1e-10 fail.
template <typename S>
SpectrumDecomposition<S> eig_reference(const SystemMatrix<S>& m) {
  using std::sqrt;
  const Eigen::Index n = m.size();
  if (m.entries.cols() != n || n == 0) {
    throw Error(ErrorKind::DimensionMismatch, "system matrix must be square and nonempty");
  }
  SpectrumDecomposition<S> dec;
  if (m.kind == LaplacianKind::Combinatorial) {
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(m.entries);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
    dec.eigenvalues = es.eigenvalues();
    dec.right = es.eigenvectors();
    dec.left = es.eigenvectors().transpose();
  } else {
    // Row v of D^-1 G has deg(v) entries equal to 1/deg(v).
    Vec<S> sqrt_deg(n);
    for (Eigen::Index v = 0; v < n; ++v) {
      Eigen::Index nnz = 0;
      for (Eigen::Index c = 0; c < n; ++c) nnz += (m.entries(v, c) != S(0)) ? 1 : 0;
      if (nnz == 0) throw Error(ErrorKind::IsolatedNode, "row " + std::to_string(v + 1) + " is zero");
      sqrt_deg(v) = sqrt(S(nnz));
    }
    // D^1/2 (D^-1 G) D^-1/2
    Mat<S> sym = sqrt_deg.asDiagonal() * m.entries * sqrt_deg.cwiseInverse().asDiagonal();
    sym = (sym + sym.transpose()).eval() / S(2);
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(sym);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
    dec.eigenvalues = es.eigenvalues();
    dec.right = sqrt_deg.cwiseInverse().asDiagonal() * es.eigenvectors();
    dec.left = es.eigenvectors().transpose() * sqrt_deg.asDiagonal();
  }
  detail::canonicalize(dec);

  const S mnorm = m.entries.norm();
  const S tol = S(1e-10);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S resid = (m.entries * dec.right.col(i) - dec.eigenvalues(i) * dec.right.col(i)).norm();
    if (resid > tol * mnorm * dec.right.col(i).norm()) {
      throw Error(ErrorKind::NumericalFailure, "eigenpair residual too large for index " + std::to_string(i));
    }
  }
  if ((dec.left * dec.right - Mat<S>::Identity(n, n)).norm() > tol) {
    throw Error(ErrorKind::NumericalFailure, "left/right eigenvectors are not inverse to each other");
  }
  return dec;
}

/// Distinct values of a sorted spectrum, merging neighbours closer than
/// tol * max(1, |lambda|).
template <typename S>
std::vector<S> distinct_values(const Vec<S>& sorted, double tol = 1e-9) {
  using std::abs;
  std::vector<S> out;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    const S v = sorted(i);
    if (!out.empty() && abs(v - out.back()) <= S(tol) * std::max(S(1), abs(v))) continue;
    out.push_back(v);
  }
  return out;
}

}  // namespace lapspec
