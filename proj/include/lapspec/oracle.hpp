#pragma once

// Ground truth for an observed network: the signed spectral measure of the
// output, its support (the set an estimator can possibly recover), and the
// comparison of an estimate against it.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lapspec/dynamics.hpp"
#include "lapspec/error.hpp"
#include "lapspec/laplacian.hpp"
#include "lapspec/recovery.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

template <typename S>
struct Atom {
  S eigenvalue;
  S weight;
};

/// y[k] = sum_i weight_i * eigenvalue_i^k. Grouped atoms merge repeated
/// eigenvalues and add their weights.
template <typename S>
struct SpectralMeasure {
  std::vector<Atom<S>> atoms;
  std::vector<Atom<S>> grouped;

  S total_weight() const {
    S t(0);
    for (const auto& a : atoms) t += a.weight;
    return t;
  }

  /// sum_i w_i lambda_i^k for k < count.
  std::vector<S> moments(std::size_t count) const {
    std::vector<S> m(count, S(0));
    for (const auto& a : atoms) {
      S p(1);
      for (std::size_t k = 0; k < count; ++k) {
        m[k] += a.weight * p;
        p *= a.eigenvalue;
      }
    }
    return m;
  }
};

/// Groups eigenvalues within cluster_tol * max(1, |lambda|) of their
/// neighbour; the group sits at the mean of its members.
template <typename S>
std::vector<Atom<S>> group_atoms(std::vector<Atom<S>> atoms, double cluster_tol) {
  using std::abs;
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom<S>& a, const Atom<S>& b) { return a.eigenvalue < b.eigenvalue; });
  std::vector<Atom<S>> out;
  std::size_t i = 0;
  while (i < atoms.size()) {
    S lam_sum = atoms[i].eigenvalue;
    S w_sum = atoms[i].weight;
    std::size_t j = i + 1;
    while (j < atoms.size() &&
           abs(atoms[j].eigenvalue - atoms[j - 1].eigenvalue) <= S(cluster_tol) * std::max(S(1), abs(atoms[j].eigenvalue))) {
      lam_sum += atoms[j].eigenvalue;
      w_sum += atoms[j].weight;
      ++j;
    }
    out.push_back({lam_sum / S(static_cast<double>(j - i)), w_sum});
    i = j;
  }
  return out;
}

/// omega_i = [c^T U]_i [W x0]_i, then grouped by eigenvalue.
template <typename S>
SpectralMeasure<S> spectral_weights(const SpectrumDecomposition<S>& dec, const ObservationSpec<S>& obs,
                                    double cluster_tol = 1e-9) {
  const Eigen::Index n = dec.eigenvalues.size();
  if (obs.c.size() != n || obs.x0.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "observation does not match the decomposition size");
  }
  const Vec<S> cu = dec.right.transpose() * obs.c;
  const Vec<S> wx = dec.left * obs.x0;
  SpectralMeasure<S> mu;
  for (Eigen::Index i = 0; i < n; ++i) mu.atoms.push_back({dec.eigenvalues(i), cu(i) * wx(i)});
  mu.grouped = group_atoms(mu.atoms, cluster_tol);
  return mu;
}

/// The same measure after the continuous-time map lambda -> exp(-lambda tau).
template <typename S>
SpectralMeasure<S> sampled_measure(const SpectralMeasure<S>& mu, const S& tau, double cluster_tol = 1e-9) {
  using std::exp;
  SpectralMeasure<S> out;
  for (const auto& a : mu.atoms) out.atoms.push_back({exp(-a.eigenvalue * tau), a.weight});
  out.grouped = group_atoms(out.atoms, cluster_tol);
  return out;
}

template <typename S>
struct SupportSet {
  std::vector<S> values;  // ascending

  std::size_t size() const { return values.size(); }
};

/// Grouped eigenvalues whose aggregate weight exceeds
/// weight_tol * max |aggregate weight|.
template <typename S>
SupportSet<S> support_set(const SpectralMeasure<S>& mu, double weight_tol = 1e-9) {
  using std::abs;
  if (!(weight_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "weight tolerance must be > 0");
  S biggest(0);
  for (const auto& g : mu.grouped) biggest = std::max(biggest, abs(g.weight));
  SupportSet<S> s;
  if (biggest == S(0)) return s;
  for (const auto& g : mu.grouped) {
    if (abs(g.weight) > S(weight_tol) * biggest) s.values.push_back(g.eigenvalue);
  }
  return s;
}

/// Eigenvalues of M (grouped) whose eigenspace is not orthogonal to c: the
/// modes that pass the PBH observability test. Computed from the
/// eigenvectors of the reference decomposition.
template <typename S>
std::vector<S> pbh_observable_modes(const SpectrumDecomposition<S>& dec, const Vec<S>& c, double cluster_tol = 1e-9,
                                    double tol = 1e-9) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = dec.eigenvalues.size();
  if (c.size() != n) throw Error(ErrorKind::DimensionMismatch, "c does not match the decomposition size");
  const Vec<S> cu = dec.right.transpose() * c;
  // Normalize per eigenvector so the test is scale-free in U.
  std::vector<Atom<S>> atoms;
  S biggest(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S proj = cu(i) / dec.right.col(i).norm();
    atoms.push_back({dec.eigenvalues(i), proj * proj});
    biggest = std::max(biggest, proj * proj);
  }
  std::vector<S> out;
  if (biggest == S(0)) return out;
  for (const auto& g : group_atoms(atoms, cluster_tol)) {
    if (sqrt(g.weight / biggest) > S(tol)) out.push_back(g.eigenvalue);
  }
  return out;
}

/// PBH rank test: lambda is observable through c iff [lambda I - M; c^T] has
/// full column rank n.
template <typename S>
bool pbh_rank_observable(const SystemMatrix<S>& m, const Vec<S>& c, const S& lambda, double rel_tol = 1e-9) {
  const Eigen::Index n = m.size();
  if (c.size() != n) throw Error(ErrorKind::DimensionMismatch, "c does not match the system size");
  Mat<S> stacked(n + 1, n);
  stacked.topRows(n) = lambda * Mat<S>::Identity(n, n) - m.entries;
  stacked.row(n) = c.transpose();
  Eigen::JacobiSVD<Mat<S>> svd(stacked);
  const auto& sv = svd.singularValues();
  const S scale = std::max(sv(0), S(1));
  return sv(n - 1) > S(rel_tol) * scale;
}

// -------------------------------------------------------------- matching

struct MatchedPair {
  double truth;
  double estimate;
  double error;
};

struct MatchReport {
  std::vector<MatchedPair> pairs;
  std::vector<double> unmatched_true;
  std::vector<double> unmatched_estimated;
  double max_error = 0.0;

  double mean_error() const {
    if (pairs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : pairs) s += p.error;
    return s / static_cast<double>(pairs.size());
  }

  /// Every true value matched and nothing left over.
  bool exact() const { return unmatched_true.empty() && unmatched_estimated.empty(); }
};

/// Greedy two-pointer matching of two ascending lists: the current pair is
/// matched when within match_tol, otherwise the smaller value is left
/// unmatched.
template <typename S>
MatchReport match_spectra(std::vector<S> truth, std::vector<S> est, double match_tol) {
  using std::abs;
  if (!(match_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "match tolerance must be > 0");
  std::sort(truth.begin(), truth.end());
  std::sort(est.begin(), est.end());
  MatchReport rep;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < truth.size() && j < est.size()) {
    const S err = abs(truth[i] - est[j]);
    if (err <= S(match_tol)) {
      rep.pairs.push_back({to_double(truth[i]), to_double(est[j]), to_double(err)});
      rep.max_error = std::max(rep.max_error, to_double(err));
      ++i;
      ++j;
    } else if (truth[i] < est[j]) {
      rep.unmatched_true.push_back(to_double(truth[i++]));
    } else {
      rep.unmatched_estimated.push_back(to_double(est[j++]));
    }
  }
  for (; i < truth.size(); ++i) rep.unmatched_true.push_back(to_double(truth[i]));
  for (; j < est.size(); ++j) rep.unmatched_estimated.push_back(to_double(est[j]));
  return rep;
}

template <typename S>
MatchReport match_spectra(const SupportSet<S>& truth, const SpectralEstimate<S>& est, double match_tol) {
  return match_spectra<S>(truth.values, est.eigenvalues, match_tol);
}

}  // namespace lapspec
