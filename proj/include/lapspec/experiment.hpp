#pragma once

// End-to-end experiments: generate a network, simulate its output, recover the
// spectrum, and compare with the oracle. Configs are JSON; every seed and
// tolerance is part of the resolved snapshot so a run can be replayed.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lapspec/dynamics.hpp"
#include "lapspec/error.hpp"
#include "lapspec/graph.hpp"
#include "lapspec/io.hpp"
#include "lapspec/laplacian.hpp"
#include "lapspec/oracle.hpp"
#include "lapspec/recovery.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

enum class Dynamics { DtIntegrator, DtNetwork, CtIntegrator, CtNetwork };

inline std::string_view dynamics_name(Dynamics d) {
  switch (d) {
    case Dynamics::DtIntegrator: return "dt-integrator";
    case Dynamics::DtNetwork: return "dt-network";
    case Dynamics::CtIntegrator: return "ct-integrator";
    case Dynamics::CtNetwork: return "ct-network";
  }
  return "";
}

inline Dynamics parse_dynamics(std::string_view s) {
  for (auto d : {Dynamics::DtIntegrator, Dynamics::DtNetwork, Dynamics::CtIntegrator, Dynamics::CtNetwork}) {
    if (s == dynamics_name(d)) return d;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown dynamics '" + std::string(s) + "'");
}

inline bool is_continuous(Dynamics d) { return d == Dynamics::CtIntegrator || d == Dynamics::CtNetwork; }
inline bool is_network(Dynamics d) { return d == Dynamics::DtNetwork || d == Dynamics::CtNetwork; }

inline Precision parse_precision(std::string_view s) {
  if (s == "double") return Precision::Double;
  if (s == "quad") return Precision::Quad;
  throw Error(ErrorKind::InvalidConfig, "unknown precision '" + std::string(s) + "'");
}

struct TopologyConfig {
  std::string generator = "ring";  // ring | preferential_attachment | file
  int n = 12;
  int m = 1;
  std::uint64_t seed = 0;
  std::string path;
};

struct AgentConfig {
  std::vector<std::vector<double>> a;
  std::vector<double> beta;
  std::vector<double> gamma;

  template <typename S>
  AgentModel<S> model() const {
    const auto d = static_cast<Eigen::Index>(a.size());
    AgentModel<S> m{Mat<S>(d, d), Vec<S>(static_cast<Eigen::Index>(beta.size())),
                    Vec<S>(static_cast<Eigen::Index>(gamma.size()))};
    for (Eigen::Index i = 0; i < d; ++i) {
      if (static_cast<Eigen::Index>(a[static_cast<std::size_t>(i)].size()) != d) {
        throw Error(ErrorKind::InvalidConfig, "agent A must be square");
      }
      for (Eigen::Index j = 0; j < d; ++j) m.a(i, j) = S(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    for (std::size_t i = 0; i < beta.size(); ++i) m.beta(static_cast<Eigen::Index>(i)) = S(beta[i]);
    for (std::size_t i = 0; i < gamma.size(); ++i) m.gamma(static_cast<Eigen::Index>(i)) = S(gamma[i]);
    return m;
  }
};

struct ObservationConfig {
  std::string mode = "single";  // single | subset
  std::vector<int> agents{1};
  std::vector<double> weights;
  std::uint64_t seed = 0;

  ObservationMode to_mode() const {
    if (mode == "single") {
      if (agents.size() != 1) throw Error(ErrorKind::InvalidConfig, "single-agent observation needs exactly one agent");
      return ObservationMode::single(agents.front());
    }
    if (mode == "subset") return ObservationMode::subset(agents, weights);
    throw Error(ErrorKind::InvalidConfig, "unknown observation mode '" + mode + "'");
  }
};

struct ToleranceConfig {
  std::optional<double> rank_rel_tol;
  double match_tol = 1e-6;
  double imag_tol = 1e-6;
  double root_cluster_tol = 1e-8;
  double positive_tol = 1e-12;
  double unmix_tol = 1e-12;
  double eig_cluster_tol = 1e-9;
  double weight_tol = 1e-9;
};

struct ExperimentConfig {
  TopologyConfig topology;
  Dynamics dynamics = Dynamics::DtIntegrator;
  std::optional<LaplacianKind> kind;
  std::optional<AgentConfig> agent;
  ObservationConfig observation;
  std::optional<double> tau;
  std::optional<std::size_t> samples;
  bool force_full = false;
  Precision precision = Precision::Double;
  ToleranceConfig tolerances;
  std::string output;

  LaplacianKind laplacian_kind() const {
    if (kind) return *kind;
    return is_continuous(dynamics) ? LaplacianKind::Combinatorial : LaplacianKind::NormalizedRandomWalk;
  }

  RecoveryOptions recovery_options() const {
    RecoveryOptions o;
    o.rank_rel_tol = tolerances.rank_rel_tol;
    o.imag_tol = tolerances.imag_tol;
    o.root_cluster_tol = tolerances.root_cluster_tol;
    o.positive_tol = tolerances.positive_tol;
    o.unmix_tol = tolerances.unmix_tol;
    o.force_full = force_full;
    return o;
  }
};

// ------------------------------------------------------------- JSON mapping

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  json topo;
  topo["generator"] = c.topology.generator;
  if (c.topology.generator == "file") {
    topo["path"] = c.topology.path;
  } else {
    topo["n"] = c.topology.n;
    if (c.topology.generator == "preferential_attachment") {
      topo["m"] = c.topology.m;
      topo["seed"] = c.topology.seed;
    }
  }
  j["topology"] = topo;
  j["dynamics"] = dynamics_name(c.dynamics);
  j["laplacian"] = kind_name(c.laplacian_kind());
  if (c.agent) j["agent"] = {{"A", c.agent->a}, {"beta", c.agent->beta}, {"gamma", c.agent->gamma}};
  j["observation"] = {{"mode", c.observation.mode}, {"agents", c.observation.agents}, {"seed", c.observation.seed}};
  if (!c.observation.weights.empty()) j["observation"]["weights"] = c.observation.weights;
  if (c.tau) j["tau"] = *c.tau;
  j["samples"] = c.samples ? json(*c.samples) : json(nullptr);
  j["force_full"] = c.force_full;
  j["precision"] = precision_name(c.precision);
  const auto& t = c.tolerances;
  j["tolerances"] = {{"rank_rel_tol", t.rank_rel_tol ? json(*t.rank_rel_tol) : json(nullptr)},
                     {"match_tol", t.match_tol},
                     {"imag_tol", t.imag_tol},
                     {"root_cluster_tol", t.root_cluster_tol},
                     {"positive_tol", t.positive_tol},
                     {"unmix_tol", t.unmix_tol},
                     {"eig_cluster_tol", t.eig_cluster_tol},
                     {"weight_tol", t.weight_tol}};
  j["output"] = c.output;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("topology")) {
      const auto& t = j["topology"];
      c.topology.generator = t.value("generator", c.topology.generator);
      if (c.topology.generator == "pa") c.topology.generator = "preferential_attachment";
      if (t.contains("path")) {
        c.topology.path = t["path"].get<std::string>();
        if (!t.contains("generator")) c.topology.generator = "file";
      }
      c.topology.n = t.value("n", c.topology.n);
      c.topology.m = t.value("m", c.topology.m);
      c.topology.seed = t.value("seed", c.topology.seed);
    }
    if (j.contains("dynamics")) c.dynamics = parse_dynamics(j["dynamics"].get<std::string>());
    if (j.contains("laplacian")) c.kind = parse_kind(j["laplacian"].get<std::string>());
    if (j.contains("agent") && !j["agent"].is_null()) {
      const auto& a = j["agent"];
      c.agent = AgentConfig{a.at("A").get<std::vector<std::vector<double>>>(), a.at("beta").get<std::vector<double>>(),
                            a.at("gamma").get<std::vector<double>>()};
    }
    if (j.contains("observation")) {
      const auto& o = j["observation"];
      c.observation.mode = o.value("mode", c.observation.mode);
      if (o.contains("agents")) c.observation.agents = o["agents"].get<std::vector<int>>();
      if (o.contains("agent")) c.observation.agents = {o["agent"].get<int>()};
      if (o.contains("weights")) c.observation.weights = o["weights"].get<std::vector<double>>();
      c.observation.seed = o.value("seed", c.observation.seed);
    }
    if (j.contains("tau") && !j["tau"].is_null()) c.tau = j["tau"].get<double>();
    if (j.contains("samples") && !j["samples"].is_null()) c.samples = j["samples"].get<std::size_t>();
    c.force_full = j.value("force_full", false);
    if (j.contains("precision")) c.precision = parse_precision(j["precision"].get<std::string>());
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      auto& d = c.tolerances;
      if (t.contains("rank_rel_tol") && !t["rank_rel_tol"].is_null()) d.rank_rel_tol = t["rank_rel_tol"].get<double>();
      d.match_tol = t.value("match_tol", d.match_tol);
      d.imag_tol = t.value("imag_tol", d.imag_tol);
      d.root_cluster_tol = t.value("root_cluster_tol", d.root_cluster_tol);
      d.positive_tol = t.value("positive_tol", d.positive_tol);
      d.unmix_tol = t.value("unmix_tol", d.unmix_tol);
      d.eig_cluster_tol = t.value("eig_cluster_tol", d.eig_cluster_tol);
      d.weight_tol = t.value("weight_tol", d.weight_tol);
    }
    c.output = j.value("output", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  return c;
}

inline Graph build_topology(const TopologyConfig& t) {
  if (t.generator == "ring") return generate_ring(t.n);
  if (t.generator == "preferential_attachment") return generate_preferential_attachment(t.n, t.m, t.seed);
  if (t.generator == "file") return read_graph_file(t.path);
  throw Error(ErrorKind::InvalidConfig, "unknown topology generator '" + t.generator + "'");
}

/// Checks the cross-field rules and fills every default, including the rank
/// tolerance for the chosen precision and samples = 2n.
inline ExperimentConfig resolve_config(ExperimentConfig c, int node_count) {
  if (is_continuous(c.dynamics) && !c.tau) throw Error(ErrorKind::InvalidConfig, "continuous-time dynamics need tau");
  if (c.tau && !(*c.tau > 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be > 0");
  if (is_network(c.dynamics)) {
    if (!c.agent) throw Error(ErrorKind::InvalidConfig, "network dynamics need an agent model");
    const auto m = c.agent->model<double>();
    m.validate();
    if (std::abs(m.nu0()) <= c.tolerances.unmix_tol) {
      throw Error(ErrorKind::UnmixingSingular, "agent has gamma^T beta = 0");
    }
  }
  c.kind = c.laplacian_kind();
  if (is_continuous(c.dynamics) && *c.kind != LaplacianKind::Combinatorial) {
    throw Error(ErrorKind::InvalidConfig, "continuous-time dynamics use the combinatorial Laplacian");
  }
  if (c.precision == Precision::Quad && !quad_available()) {
    throw Error(ErrorKind::InvalidConfig, "this build has no quad precision support");
  }
  if (!c.tolerances.rank_rel_tol) {
#if defined(LAPSPEC_HAS_QUAD)
    c.tolerances.rank_rel_tol =
        c.precision == Precision::Quad ? default_rank_rel_tol<quad>() : default_rank_rel_tol<double>();
#else
    c.tolerances.rank_rel_tol = default_rank_rel_tol<double>();
#endif
  }
  if (!c.samples) c.samples = 2 * static_cast<std::size_t>(node_count);
  if (*c.samples < 1) throw Error(ErrorKind::InvalidConfig, "samples must be >= 1");
  return c;
}

// ------------------------------------------------------------------- runs

struct StageTiming {
  double generate = 0, simulate = 0, recover = 0, compare = 0;
  double total() const { return generate + simulate + recover + compare; }
};

template <typename S>
struct RunRecord {
  ExperimentConfig config;  // resolved
  Graph graph;
  MeasurementSeries<S> series;
  SpectralEstimate<S> estimate;
  std::string status = "ok";  // ok | empty_support
  SpectralMeasure<S> measure;
  SupportSet<S> truth;
  MatchReport match;
  StageTiming timing;
};

namespace detail {

template <typename F>
auto in_stage(const char* stage, double& seconds, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto r = f();
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + stage + "': " + e.what());
  }
}

}  // namespace detail

template <typename S>
MeasurementSeries<S> simulate_config(const ExperimentConfig& cfg, const SystemMatrix<S>& m, const ObservationSpec<S>& obs) {
  const std::size_t k = *cfg.samples;
  MeasurementSeries<S> s;
  switch (cfg.dynamics) {
    case Dynamics::DtIntegrator: s = simulate_dt_integrator(m, obs, k); break;
    case Dynamics::DtNetwork: s = simulate_dt_network(m, cfg.agent->model<S>(), obs.c, obs.x0, k); break;
    case Dynamics::CtIntegrator: s = simulate_ct_integrator(m, obs, S(*cfg.tau), k); break;
    case Dynamics::CtNetwork: s = simulate_ct_network(m, cfg.agent->model<S>(), obs.c, obs.x0, S(*cfg.tau), k); break;
  }
  s.meta.seed = cfg.observation.seed;
  return s;
}

/// Recovery as the estimator sees it: series values, domain, and (for
/// networks) the agent model. EmptySupport is reported through the returned
/// status rather than thrown.
template <typename S>
std::pair<SpectralEstimate<S>, std::string> estimate_series(const MeasurementSeries<S>& series,
                                                            const std::optional<AgentModel<S>>& agent,
                                                            const RecoveryOptions& opts) {
  try {
    if (agent) return {recover_network_spectrum(series, *agent, opts), "ok"};
    if (series.is_continuous()) return {recover_ct_spectrum(series, opts), "ok"};
    return {recover_dt_spectrum(series, opts), "ok"};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptySupport) throw;
    SpectralEstimate<S> empty;
    empty.samples_consumed = series.size();
    empty.continuous = series.is_continuous();
    return {empty, "empty_support"};
  }
}

template <typename S>
SupportSet<S> truth_support(const ExperimentConfig& cfg, const SystemMatrix<S>& m, const ObservationSpec<S>& obs,
                            SpectralMeasure<S>* measure_out = nullptr) {
  auto measure = spectral_weights(eig_reference(m), obs, cfg.tolerances.eig_cluster_tol);
  auto sup = support_set(measure, cfg.tolerances.weight_tol);
  if (measure_out) *measure_out = std::move(measure);
  return sup;
}

/// generate -> simulate -> recover -> compare. Errors carry the stage name.
template <typename S>
RunRecord<S> run_experiment(const ExperimentConfig& raw) {
  RunRecord<S> rec;
  rec.graph = detail::in_stage("generate", rec.timing.generate, [&] { return build_topology(raw.topology); });
  rec.config = detail::in_stage("generate", rec.timing.generate,
                                [&] { return resolve_config(raw, rec.graph.node_count()); });
  const auto& cfg = rec.config;
  SystemMatrix<S> m;
  ObservationSpec<S> obs;
  rec.series = detail::in_stage("simulate", rec.timing.simulate, [&] {
    m = laplacian<S>(rec.graph, *cfg.kind);
    obs = random_observation<S>(rec.graph.node_count(), cfg.observation.seed, cfg.observation.to_mode());
    return simulate_config(cfg, m, obs);
  });
  std::optional<AgentModel<S>> agent;
  if (is_network(cfg.dynamics)) agent = cfg.agent->template model<S>();
  auto [est, status] = detail::in_stage("recover", rec.timing.recover,
                                        [&] { return estimate_series(rec.series, agent, cfg.recovery_options()); });
  rec.estimate = std::move(est);
  rec.status = status;
  rec.truth = detail::in_stage("compare", rec.timing.compare, [&] {
    auto sup = truth_support(cfg, m, obs, &rec.measure);
    rec.match = match_spectra(sup, rec.estimate, cfg.tolerances.match_tol);
    return sup;
  });
  return rec;
}

// ---------------------------------------------------------------- outputs

/// `output_trace.csv` (k, y) and `eigencompare.csv` (index, true, estimated).
template <typename S>
void emit_plot_data(const RunRecord<S>& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out((dir / "output_trace.csv").string());
    write_series_csv(out, rec.series);
  }
  auto out = open_out((dir / "eigencompare.csv").string());
  out << "index,true,estimated\n";
  int idx = 0;
  std::size_t p = 0;
  // Walk the truth column in order; matched estimates sit beside their truth.
  for (const S& t : rec.truth.values) {
    out << idx++ << ',' << format_double(to_double(t)) << ',';
    if (p < rec.match.pairs.size() && rec.match.pairs[p].truth == to_double(t)) {
      out << format_double(rec.match.pairs[p].estimate);
      ++p;
    }
    out << '\n';
  }
  for (double e : rec.match.unmatched_estimated) out << idx++ << ",," << format_double(e) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed in " + dir.string());
}

template <typename S>
json truth_to_json(const RunRecord<S>& rec) {
  json atoms = json::array();
  for (const auto& a : rec.measure.grouped) atoms.push_back({{"eigenvalue", to_double(a.eigenvalue)}, {"weight", to_double(a.weight)}});
  return {{"support", to_doubles(rec.truth.values)}, {"grouped_atoms", atoms}};
}

template <typename S>
json run_summary_json(const RunRecord<S>& rec) {
  json j;
  j["status"] = rec.status;
  j["rank"] = rec.estimate.rank;
  j["support_size"] = rec.truth.size();
  j["matched"] = rec.match.pairs.size();
  j["max_error"] = rec.match.max_error;
  j["exact"] = rec.match.exact();
  j["timing_seconds"] = {{"generate", rec.timing.generate},
                         {"simulate", rec.timing.simulate},
                         {"recover", rec.timing.recover},
                         {"compare", rec.timing.compare},
                         {"total", rec.timing.total()}};
  return j;
}

/// Everything a run produced, one file per artifact.
template <typename S>
void write_run_artifacts(const RunRecord<S>& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json_file((dir / "config.json").string(), config_to_json(rec.config));
  {
    auto out = open_out((dir / "graph.txt").string());
    write_graph(out, rec.graph);
  }
  write_series((dir / "series.csv").string(), rec.series, rec.config.precision,
               json{{"topology", config_to_json(rec.config)["topology"]},
                    {"dynamics", dynamics_name(rec.config.dynamics)}});
  write_json_file((dir / "estimate.json").string(), estimate_to_json(rec.estimate));
  write_json_file((dir / "truth.json").string(), truth_to_json(rec));
  write_json_file((dir / "match.json").string(), match_to_json(rec.match));
  {
    auto out = open_out((dir / "match.csv").string());
    write_match_csv(out, rec.match);
  }
  emit_plot_data(rec, dir);
  write_json_file((dir / "run.json").string(), run_summary_json(rec));
}

// ------------------------------------------------------------------ batch

struct TrialSummary {
  std::uint64_t seed = 0;
  std::string status;  // ok | empty_support | error kind name
  std::string message;
  int rank = 0;
  std::size_t support_size = 0;
  std::size_t matched = 0;
  std::size_t unmatched_true = 0;
  std::size_t unmatched_estimated = 0;
  double max_error = 0;
  double mean_error = 0;
  bool success = false;
};

struct BatchSummary {
  std::vector<TrialSummary> trials;

  std::size_t successes() const {
    std::size_t s = 0;
    for (const auto& t : trials) s += t.success ? 1 : 0;
    return s;
  }
  std::size_t errors() const {
    std::size_t s = 0;
    for (const auto& t : trials) s += (t.status != "ok" && t.status != "empty_support") ? 1 : 0;
    return s;
  }
  double worst_error() const {
    double w = 0;
    for (const auto& t : trials) w = std::max(w, t.max_error);
    return w;
  }
  double mean_max_error() const {
    if (trials.empty()) return 0;
    double s = 0;
    for (const auto& t : trials) s += t.max_error;
    return s / static_cast<double>(trials.size());
  }
};

/// The config a batch trial runs: the trial seed drives both the observation
/// and, for random generators, the topology.
inline ExperimentConfig trial_config(ExperimentConfig cfg, std::uint64_t seed) {
  cfg.observation.seed = seed;
  if (cfg.topology.generator == "preferential_attachment") cfg.topology.seed = seed;
  cfg.output.clear();
  return cfg;
}

template <typename S>
TrialSummary run_trial(const ExperimentConfig& tmpl, std::uint64_t seed) {
  TrialSummary t;
  t.seed = seed;
  try {
    const auto rec = run_experiment<S>(trial_config(tmpl, seed));
    t.status = rec.status;
    t.rank = rec.estimate.rank;
    t.support_size = rec.truth.size();
    t.matched = rec.match.pairs.size();
    t.unmatched_true = rec.match.unmatched_true.size();
    t.unmatched_estimated = rec.match.unmatched_estimated.size();
    t.max_error = rec.match.max_error;
    t.mean_error = rec.match.mean_error();
    t.success = rec.match.exact();
  } catch (const Error& e) {
    t.status = std::string(error_kind_name(e.kind()));
    t.message = e.what();
  }
  return t;
}

/// Independent trials over the seeds, spread across threads. Per-trial
/// errors are recorded and the batch continues.
template <typename S>
BatchSummary run_batch(const ExperimentConfig& tmpl, const std::vector<std::uint64_t>& seeds, unsigned threads = 0) {
  if (seeds.empty()) throw Error(ErrorKind::InvalidConfig, "batch needs at least one seed");
  BatchSummary out;
  out.trials.resize(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) out.trials[i] = run_trial<S>(tmpl, seeds[i]);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return out;
}

inline void write_batch_csv(std::ostream& out, const BatchSummary& b) {
  out << "seed,status,rank,support_size,matched,unmatched_true,unmatched_estimated,max_error,mean_error,success\n";
  for (const auto& t : b.trials) {
    out << t.seed << ',' << t.status << ',' << t.rank << ',' << t.support_size << ',' << t.matched << ','
        << t.unmatched_true << ',' << t.unmatched_estimated << ',' << format_double(t.max_error) << ','
        << format_double(t.mean_error) << ',' << (t.success ? 1 : 0) << '\n';
  }
}

inline json batch_to_json(const BatchSummary& b) {
  return {{"trials", b.trials.size()},
          {"successes", b.successes()},
          {"errors", b.errors()},
          {"worst_error", b.worst_error()},
          {"mean_max_error", b.mean_max_error()}};
}

/// Calls f(S{}) with S the scalar type named by the precision.
template <typename F>
decltype(auto) with_precision(Precision p, F&& f) {
#if defined(LAPSPEC_HAS_QUAD)
  if (p == Precision::Quad) return f(quad{});
#else
  if (p == Precision::Quad) throw Error(ErrorKind::InvalidConfig, "this build has no quad precision support");
#endif
  return f(double{});
}

}  // namespace lapspec
