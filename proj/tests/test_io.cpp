#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "lapspec/lapspec.hpp"

using namespace lapspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lapspec_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(SeriesCsv, RoundTripIsExact) {
  MeasurementSeries<double> s{{1.0, -0.1, 1.0 / 3.0, 6.02e23, 0.0}, Continuous<double>{0.25}, {}};
  s.meta.seed = 17;
  s.meta.generator = "ct-integrator";
  s.meta.nodes = 5;
  const auto dir = scratch("roundtrip");
  const auto csv = (dir / "series.csv").string();
  write_series(csv, s, Precision::Double, json{{"note", "x"}});
  const auto side = read_json_file(sidecar_path(csv));
  EXPECT_EQ(side["domain"], "ct");
  EXPECT_EQ(side["seed"], 17);
  EXPECT_EQ(side["samples"], 5);
  EXPECT_EQ(side["precision"], "double");
  const auto back = read_series<double>(csv, side);
  EXPECT_EQ(back.values, s.values);
  EXPECT_TRUE(back.is_continuous());
  EXPECT_EQ(back.tau(), 0.25);
  EXPECT_EQ(back.meta.generator, "ct-integrator");
}

TEST(SeriesCsv, HeaderAndIndexChecks) {
  std::istringstream bad_header("x,y\n0,1\n");
  EXPECT_THROW(read_series_csv<double>(bad_header), Error);
  std::istringstream gap("k,y\n0,1\n2,3\n");
  EXPECT_THROW(read_series_csv<double>(gap), Error);
  std::istringstream junk("k,y\n0,abc\n");
  EXPECT_THROW(read_series_csv<double>(junk), Error);
  std::istringstream crlf("k,y\r\n0,1.5\r\n1,2\r\n");
  EXPECT_EQ(read_series_csv<double>(crlf), (std::vector<double>{1.5, 2}));
  std::ostringstream out;
  write_series_csv(out, MeasurementSeries<double>{{1, 0.5}, Discrete{}, {}});
  EXPECT_EQ(out.str(), "k,y\n0,1\n1,0.5\n");
}

TEST(SeriesCsv, MissingFileIsIoError) {
  try {
    read_series<double>("/nonexistent/series.csv", json::object());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_EQ(exit_code(e.kind()), 4);
  }
}

#if defined(LAPSPEC_HAS_QUAD)
TEST(SeriesCsv, QuadValuesKeepAllDigits) {
  MeasurementSeries<quad> s{{quad(1) / quad(3), quad(2) / quad(7)}, Discrete{}, {}};
  std::ostringstream out;
  write_series_csv(out, s);
  std::istringstream in(out.str());
  EXPECT_EQ(read_series_csv<quad>(in), s.values);
}
#endif

TEST(EstimateJson, RoundTrip) {
  const auto est = recover_dt_spectrum(MeasurementSeries<double>{{1, 0, 1, 0}, Discrete{}, {}});
  const auto j = estimate_to_json(est);
  for (const char* key : {"rank", "alpha", "roots", "eigenvalues", "residual", "singular_values", "samples_consumed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto back = estimate_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.rank, est.rank);
  EXPECT_EQ(back.roots, est.roots);
  EXPECT_EQ(back.eigenvalues, est.eigenvalues);
  EXPECT_EQ(back.alpha, est.alpha);
  EXPECT_THROW(estimate_from_json(json{{"rank", 1}}), Error);
}

TEST(MatchReport, JsonAndCsv) {
  const auto rep = match_spectra<double>({0, 1, 2}, {0, 2, 5}, 1e-6);
  const auto j = match_to_json(rep);
  EXPECT_EQ(j["summary"]["matched"], 2);
  EXPECT_EQ(j["summary"]["exact"], false);
  EXPECT_EQ(j["unmatched_true"].size(), 1u);
  std::ostringstream out;
  write_match_csv(out, rep);
  EXPECT_EQ(out.str(), "true,estimated,error\n0,0,0\n2,2,0\n1,,\n,5,\n");
}

TEST(Json, MalformedFileIsIoError) {
  const auto dir = scratch("badjson");
  {
    auto out = open_out((dir / "x.json").string());
    out << "{ not json";
  }
  try {
    read_json_file((dir / "x.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
