#pragma once

// The estimator. From a scalar output sequence alone it reads the number of
// visible modes off the Hankel rank, solves the Hankel system for the monic
// polynomial that annihilates the sequence, and roots it. Identical-agent
// networks are first unmixed back to spectral moments; continuous-time roots
// are mapped through -log(z)/tau.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lapspec/dynamics.hpp"
#include "lapspec/error.hpp"
#include "lapspec/hankel.hpp"
#include "lapspec/matrix_exp.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

struct RecoveryOptions {
  std::optional<double> rank_rel_tol;  // unset: default_rank_rel_tol<S>()
  double imag_tol = 1e-6;
  double root_cluster_tol = 1e-8;
  double positive_tol = 1e-12;
  double unmix_tol = 1e-12;
  /// Skip the early-stopping rule and read the rank from the largest
  /// Hankel the data allows.
  bool force_full = false;

  template <typename S>
  double rank_tol() const {
    return rank_rel_tol.value_or(default_rank_rel_tol<S>());
  }
};

template <typename S>
struct SpectralEstimate {
  int rank = 0;
  std::vector<S> alpha;        // alpha_0 .. alpha_{r-1} of x^r + ... + alpha_0
  std::vector<S> roots;        // ascending, clustered
  std::vector<S> eigenvalues;  // roots for DT, -log(root)/tau for CT; ascending
  S residual = S(0);           // max |p(root)|
  std::vector<S> singular_values;       // of the r x r Prony system
  std::vector<S> rank_singular_values;  // of the Hankel that fixed r
  std::size_t samples_consumed = 0;
  bool continuous = false;

  bool empty() const { return rank == 0; }
};

// ---------------------------------------------------------------- Prony solve

template <typename S>
struct PronySolution {
  std::vector<S> alpha;
  std::vector<S> singular_values;
};

/// Solves H_r alpha = -(y[r], ..., y[2r-1]) with H_r(i, j) = y[i + j] through
/// an SVD pseudo-inverse cut at rel_tol * sigma_1. Throws RankDeficientSystem
/// when fewer than r singular values survive the cut.
template <typename S>
PronySolution<S> prony_coefficients(std::span<const S> y, int r, double rel_tol) {
  if (r < 1) throw Error(ErrorKind::InvalidInput, "Prony order must be >= 1");
  const auto ru = static_cast<std::size_t>(r);
  if (y.size() < 2 * ru) {
    throw Error(ErrorKind::InsufficientData,
                "order " + std::to_string(r) + " needs " + std::to_string(2 * ru) + " values, have " + std::to_string(y.size()));
  }
  const auto h = build_hankel(y.first(2 * ru - 1), ru);
  Vec<S> rhs(r);
  for (int i = 0; i < r; ++i) rhs(i) = -y[ru + static_cast<std::size_t>(i)];

  Eigen::JacobiSVD<Mat<S>> svd(h.entries, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec<S>& sv = svd.singularValues();
  PronySolution<S> out;
  out.singular_values = to_std<S>(sv);
  const S cut = S(rel_tol) * sv(0);
  int effective = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) effective += (sv(i) > cut && sv(i) > S(0)) ? 1 : 0;
  if (effective < r) {
    throw Error(ErrorKind::RankDeficientSystem,
                "Hankel system of order " + std::to_string(r) + " has effective rank " + std::to_string(effective));
  }
  const Vec<S> coeffs = svd.matrixV() * (sv.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * rhs));
  out.alpha = to_std<S>(coeffs);
  return out;
}

template <typename S>
PronySolution<S> prony_coefficients(const std::vector<S>& y, int r, double rel_tol) {
  return prony_coefficients(std::span<const S>(y), r, rel_tol);
}

// ----------------------------------------------------------- polynomial roots

namespace detail {

// Diagonal similarity scaling by powers of two so row and column norms of the
// companion matrix are comparable (Parlett-Reinsch).
template <typename S>
void balance(Mat<S>& a) {
  using std::abs;
  const Eigen::Index n = a.rows();
  const S radix(2);
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      S c(0);
      S r(0);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs(a(j, i));
        r += abs(a(i, j));
      }
      if (c == S(0) || r == S(0)) continue;
      const S total = c + r;
      S f(1);
      S g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < S(0.95) * total) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

template <typename S>
S eval_monic(const std::vector<S>& alpha, const S& x) {
  S acc(1);
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace detail

/// Real roots of x^r + alpha_{r-1} x^{r-1} + ... + alpha_0 as eigenvalues of
/// the companion matrix, ascending. Roots with |Im| <= imag_tol * max(1, |Re|)
/// are projected onto the real axis; anything larger throws ComplexRoots.
template <typename S>
std::vector<S> polynomial_roots(const std::vector<S>& alpha, double imag_tol = 1e-6) {
  using std::abs;
  const auto r = static_cast<Eigen::Index>(alpha.size());
  if (r < 1) throw Error(ErrorKind::InvalidInput, "polynomial degree must be >= 1");
  if (r == 1) return {-alpha[0]};
  Mat<S> comp = Mat<S>::Zero(r, r);
  for (Eigen::Index i = 1; i < r; ++i) comp(i, i - 1) = S(1);
  for (Eigen::Index i = 0; i < r; ++i) comp(i, r - 1) = -alpha[static_cast<std::size_t>(i)];
  detail::balance(comp);
  Eigen::EigenSolver<Mat<S>> es(comp, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "companion eigensolver did not converge");
  std::vector<S> roots;
  std::string offending;
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto z = es.eigenvalues()(i);
    const S re = z.real();
    const S im = z.imag();
    if (abs(im) > S(imag_tol) * std::max(S(1), abs(re))) {
      offending += " " + format_scalar(re) + (im < S(0) ? "-" : "+") + format_scalar(abs(im)) + "i";
    }
    roots.push_back(re);
  }
  if (!offending.empty()) throw Error(ErrorKind::ComplexRoots, "roots with imaginary parts:" + offending);
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Merges ascending values closer than tol * max(1, |v|) into their mean.
template <typename S>
std::vector<S> cluster_sorted(const std::vector<S>& sorted, double tol) {
  using std::abs;
  std::vector<S> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    S sum = sorted[i];
    std::size_t j = i + 1;
    while (j < sorted.size() && abs(sorted[j] - sorted[j - 1]) <= S(tol) * std::max(S(1), abs(sorted[j]))) {
      sum += sorted[j];
      ++j;
    }
    out.push_back(sum / S(static_cast<double>(j - i)));
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------- pipelines

/// Rank determination, Prony solve, and rooting on a moment sequence. This is
/// the discrete-time pipeline; it never sees the network size.
template <typename S>
SpectralEstimate<S> recover_from_moments(std::span<const S> y, const RecoveryOptions& opts = {}) {
  const double tol = opts.rank_tol<S>();
  const std::size_t len = y.size();
  if (len == 0) throw Error(ErrorKind::InsufficientData, "empty series");

  SpectralEstimate<S> est;
  int rank = 0;
  std::size_t consumed = 0;
  if (opts.force_full) {
    const std::size_t k = (len + 1) / 2;
    auto rr = numerical_rank(build_hankel(y, k), tol);
    rank = rr.rank;
    est.rank_singular_values = std::move(rr.singular_values);
    consumed = len;
  } else {
    // Grow k until the k x k Hankel rank stops increasing. A plateau at rank 0
    // (leading samples exactly zero) does not count as saturation.
    int prev = 0;
    std::size_t k = 1;
    consumed = 0;
    while (2 * k - 1 <= len) {
      auto rr = numerical_rank(build_hankel(y, k), tol);
      consumed = 2 * k - 1;
      if (rr.rank <= prev && prev > 0) break;
      if (rr.rank > prev) est.rank_singular_values = rr.singular_values;
      prev = std::max(prev, rr.rank);
      ++k;
    }
    rank = prev;
  }
  if (rank == 0) {
    est.samples_consumed = consumed;
    throw Error(ErrorKind::EmptySupport, "Hankel rank is 0; no mode is visible in the series");
  }
  // Prony needs 2r values.
  rank = std::min<int>(rank, static_cast<int>(len / 2));

  std::optional<PronySolution<S>> sol;
  while (rank >= 1) {
    try {
      sol = prony_coefficients(y, rank, tol);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankDeficientSystem) throw;
      --rank;
    }
  }
  if (!sol) throw Error(ErrorKind::RankDeficientSystem, "no Prony order >= 1 gives a full-rank system");

  est.rank = rank;
  est.alpha = std::move(sol->alpha);
  est.singular_values = std::move(sol->singular_values);
  est.samples_consumed = std::max(consumed, 2 * static_cast<std::size_t>(rank));
  est.roots = cluster_sorted(polynomial_roots(est.alpha, opts.imag_tol), opts.root_cluster_tol);
  using std::abs;
  for (const S& z : est.roots) est.residual = std::max(est.residual, abs(detail::eval_monic(est.alpha, z)));
  est.eigenvalues = est.roots;
  return est;
}

template <typename S>
SpectralEstimate<S> recover_from_moments(const std::vector<S>& y, const RecoveryOptions& opts = {}) {
  return recover_from_moments(std::span<const S>(y), opts);
}

template <typename S>
SpectralEstimate<S> recover_dt_spectrum(const MeasurementSeries<S>& series, const RecoveryOptions& opts = {}) {
  if (series.is_continuous()) throw Error(ErrorKind::InvalidInput, "recover_dt_spectrum needs a discrete-time series");
  return recover_from_moments<S>(series.values, opts);
}

/// lambda_i = -log(z_i) / tau. Roots at or below positive_tol throw
/// NonpositiveRoot.
template <typename S>
std::vector<S> ct_log_transform(const std::vector<S>& roots, const S& tau, double positive_tol = 1e-12) {
  using std::log;
  if (!(tau > S(0))) throw Error(ErrorKind::InvalidInput, "sampling period must be > 0");
  std::vector<S> out;
  out.reserve(roots.size());
  for (const S& z : roots) {
    if (!(z > S(positive_tol))) {
      throw Error(ErrorKind::NonpositiveRoot, "recovered root " + format_scalar(z) + " is not positive");
    }
    out.push_back(-log(z) / tau);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename S>
SpectralEstimate<S> recover_ct_spectrum(const MeasurementSeries<S>& series, const RecoveryOptions& opts = {}) {
  const S tau = series.tau();
  auto est = recover_from_moments<S>(series.values, opts);
  est.eigenvalues = ct_log_transform(est.roots, tau, opts.positive_tol);
  est.continuous = true;
  return est;
}

// ------------------------------------------------------- identical agents

/// Entry (k, s) = C(k, s) * nu[k - s] for s <= k. Binomials come from the
/// additive Pascal recurrence in floating point (exact through k = 55 for
/// double).
template <typename S>
Mat<S> binomial_lower_triangular(const std::vector<S>& nu, std::size_t k_len) {
  if (k_len < 1 || nu.size() < k_len) {
    throw Error(ErrorKind::DimensionMismatch, "need at least K nu values");
  }
  const auto n = static_cast<Eigen::Index>(k_len);
  Mat<S> b = Mat<S>::Zero(n, n);
  std::vector<S> row{S(1)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index s = 0; s <= k; ++s) b(k, s) = row[static_cast<std::size_t>(s)] * nu[static_cast<std::size_t>(k - s)];
    std::vector<S> next(row.size() + 1, S(1));
    for (std::size_t s = 1; s < row.size(); ++s) next[s] = row[s - 1] + row[s];
    row = std::move(next);
  }
  return b;
}

/// Forward substitution through the binomial system:
/// m_k = (y_k - sum_{s<k} C(k,s) nu_{k-s} m_s) / nu_0.
template <typename S>
std::vector<S> unmix_moments(const std::vector<S>& y, const std::vector<S>& nu, double unmix_tol = 1e-12) {
  using std::abs;
  if (y.size() != nu.size() || y.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "series and nu sequence must have equal nonzero length");
  }
  if (abs(nu[0]) <= S(unmix_tol)) {
    throw Error(ErrorKind::UnmixingSingular, "gamma^T beta = " + format_scalar(nu[0]) + " is numerically zero");
  }
  std::vector<S> m(y.size());
  std::vector<S> row{S(1)};
  for (std::size_t k = 0; k < y.size(); ++k) {
    S acc = y[k];
    for (std::size_t s = 0; s < k; ++s) acc -= row[s] * nu[k - s] * m[s];
    m[k] = acc / nu[0];
    std::vector<S> next(row.size() + 1, S(1));
    for (std::size_t s = 1; s < row.size(); ++s) next[s] = row[s - 1] + row[s];
    row = std::move(next);
  }
  return m;
}

/// nu_j = gamma^T A^j beta.
template <typename S>
std::vector<S> nu_sequence_dt(const AgentModel<S>& agent, std::size_t k_len) {
  agent.validate();
  std::vector<S> nu;
  nu.reserve(k_len);
  Vec<S> v = agent.beta;
  for (std::size_t j = 0; j < k_len; ++j) {
    nu.push_back(agent.gamma.dot(v));
    v = (agent.a * v).eval();
  }
  return nu;
}

/// nu_k = gamma^T exp(A tau)^k beta.
template <typename S>
std::vector<S> nu_sequence_ct(const AgentModel<S>& agent, const S& tau, std::size_t k_len) {
  agent.validate();
  if (!(tau > S(0))) throw Error(ErrorKind::InvalidInput, "sampling period must be > 0");
  const Mat<S> step = matrix_exp<S>(agent.a * tau);
  std::vector<S> nu;
  nu.reserve(k_len);
  Vec<S> v = agent.beta;
  for (std::size_t k = 0; k < k_len; ++k) {
    nu.push_back(agent.gamma.dot(v));
    v = (step * v).eval();
  }
  return nu;
}

/// Identical-agent networks with a known agent model. Discrete time inverts
/// the binomial mixing; continuous time divides out nu_k sample by sample.
template <typename S>
SpectralEstimate<S> recover_network_spectrum(const MeasurementSeries<S>& series, const AgentModel<S>& agent,
                                             const RecoveryOptions& opts = {}) {
  using std::abs;
  const std::size_t len = series.size();
  if (abs(agent.nu0()) <= S(opts.unmix_tol)) {
    throw Error(ErrorKind::UnmixingSingular, "gamma^T beta = " + format_scalar(agent.nu0()) + " is numerically zero");
  }
  if (!series.is_continuous()) {
    const auto moments = unmix_moments(series.values, nu_sequence_dt(agent, len), opts.unmix_tol);
    return recover_from_moments<S>(moments, opts);
  }
  const S tau = series.tau();
  const auto nu = nu_sequence_ct(agent, tau, len);
  std::vector<S> moments(len);
  for (std::size_t k = 0; k < len; ++k) {
    if (abs(nu[k]) <= S(opts.unmix_tol)) {
      throw Error(ErrorKind::NuVanishes, "nu_" + std::to_string(k) + " = " + format_scalar(nu[k]));
    }
    moments[k] = series.values[k] / nu[k];
  }
  auto est = recover_from_moments<S>(moments, opts);
  est.eigenvalues = ct_log_transform(est.roots, tau, opts.positive_tol);
  est.continuous = true;
  return est;
}

}  // namespace lapspec
