// lapspec: command-line front end for the spectral recovery pipeline.
//
//   lapspec generate  --generator ring --n 12 -o graph.txt
//   lapspec simulate  --config cfg.json -o series.csv
//   lapspec estimate  series.csv -o estimate.json
//   lapspec compare   --config cfg.json --estimate estimate.json -o match.json
//   lapspec run       --config cfg.json --output out/
//   lapspec batch     --config cfg.json --trials 100 --output out/
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 IO.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lapspec/lapspec.hpp"

namespace {

using namespace lapspec;

struct Overrides {
  std::string config_path;
  std::optional<std::string> generator;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<std::uint64_t> topology_seed;
  std::optional<std::string> graph_path;
  std::optional<std::string> dynamics;
  std::optional<std::string> laplacian;
  std::optional<std::string> agent_path;
  std::optional<std::string> observe_mode;
  std::vector<int> agents;
  std::vector<double> weights;
  std::optional<std::uint64_t> obs_seed;
  std::optional<double> tau;
  std::optional<std::size_t> samples;
  bool force_full = false;
  std::optional<std::string> precision;
  std::optional<double> rank_rel_tol, match_tol, imag_tol, root_cluster_tol, positive_tol, unmix_tol,
      eig_cluster_tol, weight_tol;
  std::optional<std::string> output;
  bool print_config = false;
};

void add_topology_flags(CLI::App* app, Overrides& o) {
  app->add_option("--generator", o.generator, "ring | preferential_attachment | file");
  app->add_option("--n", o.n, "node count");
  app->add_option("--m", o.m, "edges per new node (preferential attachment)");
  app->add_option("--topology-seed", o.topology_seed, "generator seed");
  app->add_option("--graph", o.graph_path, "read the graph from an edge-list file");
}

void add_config_flags(CLI::App* app, Overrides& o, bool with_output = true) {
  app->add_option("-c,--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  add_topology_flags(app, o);
  app->add_option("--dynamics", o.dynamics, "dt-integrator | dt-network | ct-integrator | ct-network");
  app->add_option("--laplacian", o.laplacian, "combinatorial | normalized");
  app->add_option("--agent", o.agent_path, "JSON agent model {A, beta, gamma}")->check(CLI::ExistingFile);
  app->add_option("--observe-mode", o.observe_mode, "single | subset");
  app->add_option("--observe", o.agents, "observed agents (1-based)")->delimiter(',');
  app->add_option("--weights", o.weights, "observation weights")->delimiter(',');
  app->add_option("--obs-seed", o.obs_seed, "seed for x0");
  app->add_option("--tau", o.tau, "sampling period (continuous time)");
  app->add_option("--samples", o.samples, "series length (default 2n)");
  app->add_flag("--force-full", o.force_full, "read the rank from the largest Hankel instead of stopping early");
  app->add_option("--precision", o.precision, "double | quad");
  app->add_option("--rank-rel-tol", o.rank_rel_tol, "Hankel singular-value cutoff relative to the largest");
  app->add_option("--match-tol", o.match_tol, "absolute tolerance for pairing eigenvalues");
  app->add_option("--imag-tol", o.imag_tol, "largest imaginary part accepted for a root");
  app->add_option("--root-cluster-tol", o.root_cluster_tol, "merge roots closer than this");
  app->add_option("--positive-tol", o.positive_tol, "smallest root accepted in continuous time");
  app->add_option("--unmix-tol", o.unmix_tol, "smallest |gamma^T beta| accepted for network dynamics");
  app->add_option("--eig-cluster-tol", o.eig_cluster_tol, "group reference eigenvalues closer than this");
  app->add_option("--weight-tol", o.weight_tol, "support cutoff relative to the largest spectral weight");
  if (with_output) app->add_option("-o,--output", o.output, "output path");
  app->add_flag("--print-config", o.print_config, "print the resolved config and exit");
}

AgentConfig load_agent(const std::string& path) {
  const auto j = read_json_file(path);
  json wrapped{{"agent", j.contains("agent") ? j["agent"] : j}};
  return *config_from_json(wrapped).agent;
}

ExperimentConfig load_config(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : config_from_json(read_json_file(o.config_path));
  if (o.generator) c.topology.generator = *o.generator;
  if (o.n) c.topology.n = *o.n;
  if (o.m) c.topology.m = *o.m;
  if (o.topology_seed) c.topology.seed = *o.topology_seed;
  if (o.graph_path) {
    c.topology.generator = "file";
    c.topology.path = *o.graph_path;
  }
  if (o.dynamics) c.dynamics = parse_dynamics(*o.dynamics);
  if (o.laplacian) c.kind = parse_kind(*o.laplacian);
  if (o.agent_path) c.agent = load_agent(*o.agent_path);
  if (o.observe_mode) c.observation.mode = *o.observe_mode;
  if (!o.agents.empty()) {
    c.observation.agents = o.agents;
    if (!o.observe_mode) c.observation.mode = o.agents.size() == 1 ? "single" : "subset";
  }
  if (!o.weights.empty()) c.observation.weights = o.weights;
  if (o.obs_seed) c.observation.seed = *o.obs_seed;
  if (o.tau) c.tau = *o.tau;
  if (o.samples) c.samples = *o.samples;
  if (o.force_full) c.force_full = true;
  if (o.precision) c.precision = parse_precision(*o.precision);
  auto& t = c.tolerances;
  if (o.rank_rel_tol) t.rank_rel_tol = *o.rank_rel_tol;
  if (o.match_tol) t.match_tol = *o.match_tol;
  if (o.imag_tol) t.imag_tol = *o.imag_tol;
  if (o.root_cluster_tol) t.root_cluster_tol = *o.root_cluster_tol;
  if (o.positive_tol) t.positive_tol = *o.positive_tol;
  if (o.unmix_tol) t.unmix_tol = *o.unmix_tol;
  if (o.eig_cluster_tol) t.eig_cluster_tol = *o.eig_cluster_tol;
  if (o.weight_tol) t.weight_tol = *o.weight_tol;
  if (o.output) c.output = *o.output;
  return c;
}

/// Config plus the graph it names, with every default filled in.
std::pair<ExperimentConfig, Graph> resolved(const Overrides& o) {
  const auto raw = load_config(o);
  auto g = build_topology(raw.topology);
  return {resolve_config(raw, g.node_count()), std::move(g)};
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_generate(const Overrides& o) {
  auto raw = load_config(o);
  const auto g = build_topology(raw.topology);
  if (o.output) {
    write_graph_file(*o.output, g);
  } else {
    write_graph(std::cout, g);
  }
  return 0;
}

int cmd_simulate(const Overrides& o) {
  const auto [cfg, g] = resolved(o);
  if (o.print_config) {
    print_json(config_to_json(cfg));
    return 0;
  }
  if (!o.output) throw Error(ErrorKind::InvalidConfig, "simulate needs -o <series.csv>");
  with_precision(cfg.precision, [&](auto tag) {
    using S = decltype(tag);
    const auto m = laplacian<S>(g, *cfg.kind);
    const auto obs = random_observation<S>(g.node_count(), cfg.observation.seed, cfg.observation.to_mode());
    const auto series = simulate_config(cfg, m, obs);
    write_series(*o.output, series, cfg.precision,
                 json{{"topology", config_to_json(cfg)["topology"]}, {"dynamics", dynamics_name(cfg.dynamics)}});
  });
  return 0;
}

int cmd_estimate(const Overrides& o, const std::string& series_path, const std::string& sidecar) {
  auto cfg = load_config(o);
  const auto side = read_json_file(sidecar.empty() ? sidecar_path(series_path) : sidecar);
  const Precision precision = o.precision ? cfg.precision : sidecar_precision(side);
  if (!cfg.tolerances.rank_rel_tol) {
    cfg.tolerances.rank_rel_tol =
        with_precision(precision, [](auto tag) { return default_rank_rel_tol<decltype(tag)>(); });
  }
  const std::string generator = side.value("generator", std::string());
  const bool network = generator.ends_with("-network") || (o.config_path.size() && is_network(cfg.dynamics));
  if (network && !cfg.agent) throw Error(ErrorKind::InvalidConfig, "a network series needs --agent or a config agent");
  const json out = with_precision(precision, [&](auto tag) {
    using S = decltype(tag);
    const auto series = read_series<S>(series_path, side);
    std::optional<AgentModel<S>> agent;
    if (network) agent = cfg.agent->template model<S>();
    auto [est, status] = estimate_series(series, agent, cfg.recovery_options());
    json j = estimate_to_json(est);
    j["status"] = status;
    return j;
  });
  if (o.output) {
    write_json_file(*o.output, out);
  } else {
    print_json(out);
  }
  return 0;
}

int cmd_compare(const Overrides& o, const std::string& estimate_path) {
  const auto [cfg, g] = resolved(o);
  const auto est = estimate_from_json(read_json_file(estimate_path));
  const auto m = laplacian<double>(g, *cfg.kind);
  const auto obs = random_observation<double>(g.node_count(), cfg.observation.seed, cfg.observation.to_mode());
  const auto truth = truth_support(cfg, m, obs);
  const auto rep = match_spectra(truth, est, cfg.tolerances.match_tol);
  if (o.output) {
    const std::filesystem::path p(*o.output);
    if (p.extension() == ".csv") {
      auto out = open_out(p.string());
      write_match_csv(out, rep);
    } else {
      write_json_file(p.string(), match_to_json(rep));
    }
  } else {
    print_json(match_to_json(rep));
  }
  return 0;
}

int cmd_run(const Overrides& o) {
  const auto raw = load_config(o);
  if (o.print_config) {
    const auto g = build_topology(raw.topology);
    print_json(config_to_json(resolve_config(raw, g.node_count())));
    return 0;
  }
  const Precision p = raw.precision;
  const json summary = with_precision(p, [&](auto tag) {
    using S = decltype(tag);
    const auto rec = run_experiment<S>(raw);
    if (!rec.config.output.empty()) write_run_artifacts(rec, rec.config.output);
    json j = run_summary_json(rec);
    j["estimated"] = to_doubles(rec.estimate.eigenvalues);
    j["true"] = to_doubles(rec.truth.values);
    return j;
  });
  print_json(summary);
  return 0;
}

int cmd_batch(const Overrides& o, std::vector<std::uint64_t> seeds, std::uint64_t first, std::size_t trials,
              unsigned threads) {
  const auto raw = load_config(o);
  if (o.print_config) {
    const auto g = build_topology(raw.topology);
    print_json(config_to_json(resolve_config(raw, g.node_count())));
    return 0;
  }
  if (seeds.empty()) {
    for (std::size_t i = 0; i < trials; ++i) seeds.push_back(first + i);
  }
  const auto summary =
      with_precision(raw.precision, [&](auto tag) { return run_batch<decltype(tag)>(raw, seeds, threads); });
  if (!raw.output.empty()) {
    std::filesystem::create_directories(raw.output);
    auto out = open_out((std::filesystem::path(raw.output) / "summary.csv").string());
    write_batch_csv(out, summary);
    write_json_file((std::filesystem::path(raw.output) / "summary.json").string(), batch_to_json(summary));
  } else {
    write_batch_csv(std::cout, summary);
  }
  print_json(batch_to_json(summary));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover observable Laplacian eigenvalues from a scalar output series"};
  app.require_subcommand(1);

  Overrides o;
  std::string series_path, sidecar, estimate_path;
  std::vector<std::uint64_t> seeds;
  std::uint64_t first_seed = 1;
  std::size_t trials = 100;
  unsigned threads = 0;

  auto* gen = app.add_subcommand("generate", "write a graph edge list");
  add_topology_flags(gen, o);
  gen->add_option("-c,--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  gen->add_option("-o,--output", o.output, "edge-list path (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "simulate an output series (CSV + JSON sidecar)");
  add_config_flags(sim, o);

  auto* est = app.add_subcommand("estimate", "recover eigenvalues from a series");
  est->add_option("series", series_path, "measurement CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--sidecar", sidecar, "sidecar JSON (default: <series>.json)");
  add_config_flags(est, o);

  auto* cmp = app.add_subcommand("compare", "match an estimate against the true support");
  cmp->add_option("--estimate", estimate_path, "estimate JSON")->required()->check(CLI::ExistingFile);
  add_config_flags(cmp, o);

  auto* run = app.add_subcommand("run", "generate, simulate, recover and compare");
  add_config_flags(run, o);

  auto* bat = app.add_subcommand("batch", "independent trials over many seeds");
  add_config_flags(bat, o);
  bat->add_option("--seeds", seeds, "explicit seed list")->delimiter(',');
  bat->add_option("--first-seed", first_seed, "first seed when --seeds is absent");
  bat->add_option("--trials", trials, "number of consecutive seeds when --seeds is absent");
  bat->add_option("--threads", threads, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*sim) return cmd_simulate(o);
    if (*est) return cmd_estimate(o, series_path, sidecar);
    if (*cmp) return cmd_compare(o, estimate_path);
    if (*run) return cmd_run(o);
    if (*bat) return cmd_batch(o, seeds, first_seed, trials, threads);
  } catch (const Error& e) {
    std::cerr << "lapspec: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lapspec: Io: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "lapspec: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
