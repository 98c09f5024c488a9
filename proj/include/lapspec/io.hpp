#pragma once

// File formats: measurement CSV (`k,y`) with a JSON sidecar, estimate JSON,
// and match reports as JSON or CSV.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lapspec/dynamics.hpp"
#include "lapspec/error.hpp"
#include "lapspec/oracle.hpp"
#include "lapspec/recovery.hpp"
#include "lapspec/scalar.hpp"

namespace lapspec {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

/// `<stem>.json` next to a `<stem>.csv` measurement file.
inline std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

// ------------------------------------------------------------ measurements

template <typename S>
void write_series_csv(std::ostream& out, const MeasurementSeries<S>& series) {
  out << "k,y\n";
  for (std::size_t k = 0; k < series.size(); ++k) out << k << ',' << format_scalar(series.values[k]) << '\n';
}

template <typename S>
std::vector<S> read_series_csv(std::istream& in) {
  std::string line;
  std::vector<S> values;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "k,y") throw Error(ErrorKind::Io, "measurement CSV must start with header 'k,y'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Io, "CSV line " + std::to_string(lineno) + " has no comma");
    try {
      const auto k = std::stoul(line.substr(0, comma));
      if (k != values.size()) {
        throw Error(ErrorKind::Io, "CSV line " + std::to_string(lineno) + ": expected k = " + std::to_string(values.size()));
      }
      values.push_back(parse_scalar<S>(line.substr(comma + 1)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "CSV line " + std::to_string(lineno) + ": '" + line + "'");
    }
  }
  if (!header) throw Error(ErrorKind::Io, "empty measurement CSV");
  return values;
}

/// Domain, sampling period, seed and generator provenance.
template <typename S>
json series_sidecar(const MeasurementSeries<S>& series, Precision precision, const json& provenance = json::object()) {
  json j;
  j["domain"] = series.is_continuous() ? "ct" : "dt";
  if (series.is_continuous()) j["tau"] = format_scalar(series.tau());
  j["samples"] = series.size();
  j["precision"] = precision_name(precision);
  if (series.meta.seed) j["seed"] = *series.meta.seed;
  j["generator"] = series.meta.generator;
  if (series.meta.nodes) j["nodes"] = *series.meta.nodes;
  j["unmixing_singular"] = series.meta.unmixing_singular;
  j["provenance"] = provenance;
  return j;
}

template <typename S>
void write_series(const std::string& csv_path, const MeasurementSeries<S>& series, Precision precision,
                  const json& provenance = json::object()) {
  {
    auto out = open_out(csv_path);
    write_series_csv(out, series);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + csv_path);
  }
  write_json_file(sidecar_path(csv_path), series_sidecar(series, precision, provenance));
}

inline Precision sidecar_precision(const json& side) {
  const auto p = side.value("precision", std::string("double"));
  if (p == "double") return Precision::Double;
  if (p == "quad") return Precision::Quad;
  throw Error(ErrorKind::Io, "unknown precision '" + p + "' in sidecar");
}

/// Reads values and domain. Node count and other provenance stay in meta and
/// are not used by the estimator.
template <typename S>
MeasurementSeries<S> read_series(const std::string& csv_path, const json& side) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + csv_path);
  MeasurementSeries<S> series;
  series.values = read_series_csv<S>(in);
  const auto domain = side.value("domain", std::string("dt"));
  if (domain == "ct") {
    if (!side.contains("tau")) throw Error(ErrorKind::Io, "continuous-time sidecar lacks tau");
    const auto& t = side["tau"];
    series.domain = Continuous<S>{t.is_string() ? parse_scalar<S>(t.get<std::string>()) : S(t.get<double>())};
  } else if (domain != "dt") {
    throw Error(ErrorKind::Io, "unknown domain '" + domain + "'");
  }
  series.meta.generator = side.value("generator", std::string());
  if (side.contains("seed")) series.meta.seed = side["seed"].get<std::uint64_t>();
  if (side.contains("nodes")) series.meta.nodes = side["nodes"].get<int>();
  series.meta.unmixing_singular = side.value("unmixing_singular", false);
  return series;
}

// --------------------------------------------------------------- estimates

template <typename S>
json to_doubles(const std::vector<S>& v) {
  json a = json::array();
  for (const S& x : v) a.push_back(to_double(x));
  return a;
}

template <typename S>
json estimate_to_json(const SpectralEstimate<S>& est) {
  json j;
  j["rank"] = est.rank;
  j["alpha"] = to_doubles(est.alpha);
  j["roots"] = to_doubles(est.roots);
  j["eigenvalues"] = to_doubles(est.eigenvalues);
  j["residual"] = to_double(est.residual);
  j["singular_values"] = to_doubles(est.singular_values);
  j["samples_consumed"] = est.samples_consumed;
  j["domain"] = est.continuous ? "ct" : "dt";
  return j;
}

inline SpectralEstimate<double> estimate_from_json(const json& j) {
  try {
    SpectralEstimate<double> est;
    est.rank = j.at("rank").get<int>();
    est.alpha = j.at("alpha").get<std::vector<double>>();
    est.roots = j.at("roots").get<std::vector<double>>();
    est.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    est.residual = j.at("residual").get<double>();
    est.singular_values = j.at("singular_values").get<std::vector<double>>();
    est.samples_consumed = j.at("samples_consumed").get<std::size_t>();
    est.continuous = j.value("domain", std::string("dt")) == "ct";
    return est;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed estimate JSON: ") + e.what());
  }
}

// ----------------------------------------------------------- match reports

inline json match_to_json(const MatchReport& rep) {
  json j;
  json pairs = json::array();
  for (const auto& p : rep.pairs) pairs.push_back({{"true", p.truth}, {"estimated", p.estimate}, {"error", p.error}});
  j["pairs"] = pairs;
  j["unmatched_true"] = rep.unmatched_true;
  j["unmatched_estimated"] = rep.unmatched_estimated;
  j["summary"] = {{"matched", rep.pairs.size()},
                  {"unmatched_true", rep.unmatched_true.size()},
                  {"unmatched_estimated", rep.unmatched_estimated.size()},
                  {"max_error", rep.max_error},
                  {"mean_error", rep.mean_error()},
                  {"exact", rep.exact()}};
  return j;
}

/// (true, estimated, error) triples; unmatched values leave the other
/// columns empty.
inline void write_match_csv(std::ostream& out, const MatchReport& rep) {
  out << "true,estimated,error\n";
  for (const auto& p : rep.pairs) out << format_double(p.truth) << ',' << format_double(p.estimate) << ',' << format_double(p.error) << '\n';
  for (double t : rep.unmatched_true) out << format_double(t) << ",,\n";
  for (double e : rep.unmatched_estimated) out << ',' << format_double(e) << ",\n";
}

}  // namespace lapspec
