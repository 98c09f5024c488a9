#pragma once

// Black-box output generators for the four network classes: discrete or
// continuous time, single integrators or identical LTI agents.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lapspec/error.hpp"
#include "lapspec/laplacian.hpp"
#include "lapspec/matrix_exp.hpp"
#include "lapspec/random.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

/// Output functional c and initial condition x0, both n-vectors.
template <typename S>
struct ObservationSpec {
  Vec<S> c;
  Vec<S> x0;
};

/// Per-agent dynamics: state matrix A (d x d), initial direction beta and
/// output direction gamma.
template <typename S>
struct AgentModel {
  Mat<S> a;
  Vec<S> beta;
  Vec<S> gamma;

  Eigen::Index dim() const { return a.rows(); }

  void validate() const {
    using std::isfinite;
    const Eigen::Index d = a.rows();
    if (d < 1 || a.cols() != d || beta.size() != d || gamma.size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "agent model needs square A (d >= 1) and d-vectors beta, gamma");
    }
    auto finite = [](const auto& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!isfinite(m.data()[i])) return false;
      }
      return true;
    };
    if (!finite(a) || !finite(beta) || !finite(gamma)) {
      throw Error(ErrorKind::InvalidInput, "agent model has non-finite entries");
    }
  }

  /// gamma^T beta, the leading unmixing coefficient.
  S nu0() const { return gamma.dot(beta); }
};

struct Discrete {};

template <typename S>
struct Continuous {
  S tau;
};

template <typename S>
using Domain = std::variant<Discrete, Continuous<S>>;

/// Provenance carried with a series. The estimator never reads it.
struct SeriesMeta {
  std::optional<int> nodes;
  std::optional<std::uint64_t> seed;
  std::string generator;
  bool unmixing_singular = false;
};

template <typename S>
struct MeasurementSeries {
  std::vector<S> values;
  Domain<S> domain = Discrete{};
  SeriesMeta meta;

  std::size_t size() const { return values.size(); }
  bool is_continuous() const { return std::holds_alternative<Continuous<S>>(domain); }
  S tau() const {
    if (!is_continuous()) throw Error(ErrorKind::InvalidInput, "discrete-time series has no sampling period");
    return std::get<Continuous<S>>(domain).tau;
  }
};

namespace detail {

template <typename S>
void check_observation(const SystemMatrix<S>& m, const Vec<S>& c, const Vec<S>& x0) {
  if (m.entries.cols() != m.size() || c.size() != m.size() || x0.size() != m.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "system is " + std::to_string(m.size()) + "x" + std::to_string(m.entries.cols()) + ", c has " +
                    std::to_string(c.size()) + " entries, x0 has " + std::to_string(x0.size()));
  }
}

inline void check_length(std::size_t k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "series length must be >= 1");
}

template <typename S>
void check_tau(const S& tau) {
  if (!(tau > S(0))) throw Error(ErrorKind::InvalidInput, "sampling period must be > 0");
}

template <typename S>
void check_combinatorial(const SystemMatrix<S>& m) {
  if (m.kind != LaplacianKind::Combinatorial) {
    throw Error(ErrorKind::InvalidInput, "continuous-time dynamics use the combinatorial Laplacian L = D - G");
  }
}

}  // namespace detail

/// y[k] = c^T M^k x0 by repeated matrix-vector products.
template <typename S>
MeasurementSeries<S> simulate_dt_integrator(const SystemMatrix<S>& m, const ObservationSpec<S>& obs,
                                            std::size_t k_len) {
  detail::check_observation(m, obs.c, obs.x0);
  detail::check_length(k_len);
  MeasurementSeries<S> out;
  out.values.reserve(k_len);
  out.meta.nodes = static_cast<int>(m.size());
  out.meta.generator = "dt-integrator";
  Vec<S> x = obs.x0;
  for (std::size_t k = 0; k < k_len; ++k) {
    out.values.push_back(obs.c.dot(x));
    if (k + 1 < k_len) x = (m.entries * x).eval();
  }
  return out;
}

/// Identical agents coupled through M:
/// x[k+1] = (I_n (x) A + M (x) I_d) x[k], x[0] = x0 (x) beta,
/// y[k] = (c (x) gamma)^T x[k].
template <typename S>
MeasurementSeries<S> simulate_dt_network(const SystemMatrix<S>& m, const AgentModel<S>& agent,
                                         const Vec<S>& c, const Vec<S>& x0, std::size_t k_len) {
  detail::check_observation(m, c, x0);
  detail::check_length(k_len);
  agent.validate();
  const Eigen::Index n = m.size();
  const Eigen::Index d = agent.dim();
  Mat<S> sys = Mat<S>::Zero(n * d, n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.block(i * d, i * d, d, d) += agent.a;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (m.entries(i, j) != S(0)) {
        sys.block(i * d, j * d, d, d).diagonal().array() += m.entries(i, j);
      }
    }
  }
  Vec<S> x(n * d);
  Vec<S> out_vec(n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.segment(i * d, d) = x0(i) * agent.beta;
    out_vec.segment(i * d, d) = c(i) * agent.gamma;
  }
  MeasurementSeries<S> out;
  out.values.reserve(k_len);
  out.meta.nodes = static_cast<int>(n);
  out.meta.generator = "dt-network";
  using std::abs;
  out.meta.unmixing_singular = abs(agent.nu0()) <= S(1e-12);
  for (std::size_t k = 0; k < k_len; ++k) {
    out.values.push_back(out_vec.dot(x));
    if (k + 1 < k_len) x = (sys * x).eval();
  }
  return out;
}

namespace detail {

// c^T U exp(-Lambda t) W x0 for t = k * tau, k < k_len.
template <typename S>
std::vector<S> ct_modal_series(const SystemMatrix<S>& m, const Vec<S>& c, const Vec<S>& x0, const S& tau,
                               std::size_t k_len) {
  using std::exp;
  const auto dec = eig_reference(m);
  const Vec<S> cu = dec.right.transpose() * c;
  const Vec<S> wx = dec.left * x0;
  std::vector<S> values;
  values.reserve(k_len);
  for (std::size_t k = 0; k < k_len; ++k) {
    const S t = S(static_cast<double>(k)) * tau;
    S y(0);
    for (Eigen::Index i = 0; i < cu.size(); ++i) y += cu(i) * exp(-dec.eigenvalues(i) * t) * wx(i);
    values.push_back(y);
  }
  return values;
}

}  // namespace detail

/// Samples y(k tau) of x' = -L x, y = c^T x, through the eigendecomposition of L.
template <typename S>
MeasurementSeries<S> simulate_ct_integrator(const SystemMatrix<S>& m, const ObservationSpec<S>& obs, const S& tau,
                                            std::size_t k_len) {
  detail::check_observation(m, obs.c, obs.x0);
  detail::check_combinatorial(m);
  detail::check_tau(tau);
  detail::check_length(k_len);
  MeasurementSeries<S> out;
  out.values = detail::ct_modal_series(m, obs.c, obs.x0, tau, k_len);
  out.domain = Continuous<S>{tau};
  out.meta.nodes = static_cast<int>(m.size());
  out.meta.generator = "ct-integrator";
  return out;
}

/// Samples of x' = (I_n (x) A - L (x) I_d) x, which factor as
/// y_k = (c^T U e^{-Lambda k tau} W x0) * (gamma^T e^{A k tau} beta).
template <typename S>
MeasurementSeries<S> simulate_ct_network(const SystemMatrix<S>& m, const AgentModel<S>& agent, const Vec<S>& c,
                                         const Vec<S>& x0, const S& tau, std::size_t k_len) {
  detail::check_observation(m, c, x0);
  detail::check_combinatorial(m);
  detail::check_tau(tau);
  detail::check_length(k_len);
  agent.validate();
  MeasurementSeries<S> out;
  out.values = detail::ct_modal_series(m, c, x0, tau, k_len);
  const Mat<S> step = matrix_exp<S>(agent.a * tau);
  Vec<S> v = agent.beta;
  for (std::size_t k = 0; k < k_len; ++k) {
    out.values[k] *= agent.gamma.dot(v);
    v = (step * v).eval();
  }
  out.domain = Continuous<S>{tau};
  out.meta.nodes = static_cast<int>(m.size());
  out.meta.generator = "ct-network";
  using std::abs;
  out.meta.unmixing_singular = abs(agent.nu0()) <= S(1e-12);
  return out;
}

/// Observe one agent (c = e_i) or a weighted subset (c = sum w_j e_j).
/// Agent indices are 1-based.
struct ObservationMode {
  std::vector<int> agents;
  std::vector<double> weights;  // empty means all ones

  static ObservationMode single(int agent) { return {{agent}, {}}; }
  static ObservationMode subset(std::vector<int> agents, std::vector<double> weights = {}) {
    return {std::move(agents), std::move(weights)};
  }
};

/// x0 ~ Uniform[0,1]^n from the seed; c built from the mode.
template <typename S = double>
ObservationSpec<S> random_observation(int n, std::uint64_t seed, const ObservationMode& mode) {
  if (n < 1) throw Error(ErrorKind::BadParameters, "node count must be >= 1");
  if (!mode.weights.empty() && mode.weights.size() != mode.agents.size()) {
    throw Error(ErrorKind::DimensionMismatch, "observation weights and agents differ in length");
  }
  ObservationSpec<S> obs{Vec<S>::Zero(n), Vec<S>(n)};
  for (std::size_t j = 0; j < mode.agents.size(); ++j) {
    const int a = mode.agents[j];
    if (a < 1 || a > n) {
      throw Error(ErrorKind::IndexOutOfRange, "observed agent " + std::to_string(a) + " outside [1," + std::to_string(n) + "]");
    }
    obs.c(a - 1) += mode.weights.empty() ? S(1) : S(mode.weights[j]);
  }
  Rng rng(seed);
  for (int i = 0; i < n; ++i) obs.x0(i) = S(rng.uniform());
  return obs;
}

}  // namespace lapspec
