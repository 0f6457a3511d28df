#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include <mam/csv.hpp>
#include <mam/model_io.hpp>
#include <mam/rng.hpp>
#include <mam/sim.hpp>

using namespace mam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mam_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

AdditiveFit small_fit(std::shared_ptr<const Geometry> geometry) {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 60;
  cfg.m = 2;
  cfg.seed = 77;
  cfg.metric = geometry->metric();
  GeneratedData data = generate(cfg, 0.2, 1);
  KernelSpec kernel{KernelFamily::Epanechnikov, {0.25, 0.25}};
  return fit(data.train, geometry, kernel, GridSpec{41});
}

}  // namespace

TEST_CASE("model json round-trip preserves predictions") {
  for (Metric metric : {Metric::LogCholesky, Metric::LogEuclidean}) {
    auto geometry = std::shared_ptr<const Geometry>(make_geometry(metric));
    AdditiveFit model = small_fit(geometry);

    nlohmann::json doc = fit_to_json(model, std::nullopt);
    CHECK(doc.at("format_version").get<int>() == kModelFormatVersion);
    CHECK(doc.at("metric").get<std::string>() == metric_name(metric));

    LoadedModel loaded = fit_from_json(doc);
    CHECK_FALSE(loaded.rescale.has_value());
    SplitMix64 rng(60);
    for (int i = 0; i < 25; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(), rng.uniform();
      const double d =
          geometry->distance(predict(model, x), predict(loaded.fit, x));
      CHECK(d < 1e-12);
    }
  }
}

TEST_CASE("model json carries the rescale map") {
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  AdditiveFit model = small_fit(geometry);
  RescaleMap map{{-2.0, 10.0}, {3.0, 20.0}};
  nlohmann::json doc = fit_to_json(model, map);
  LoadedModel loaded = fit_from_json(doc);
  REQUIRE(loaded.rescale.has_value());
  CHECK(loaded.rescale->apply(0, -2.0) == doctest::Approx(0.0));
  CHECK(loaded.rescale->apply(0, 3.0) == doctest::Approx(1.0));
  CHECK(loaded.rescale->apply(1, 15.0) == doctest::Approx(0.5));
}

TEST_CASE("fit_from_json rejects other format versions") {
  auto geometry = std::shared_ptr<const Geometry>(
      make_geometry(Metric::LogCholesky));
  nlohmann::json doc = fit_to_json(small_fit(geometry), std::nullopt);
  doc["format_version"] = kModelFormatVersion + 1;
  CHECK_THROWS(fit_from_json(doc));
}

TEST_CASE("report json is deterministic and maps failed reps to null") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 60;
  cfg.m = 2;
  cfg.reps = 2;
  cfg.seed = 5;
  cfg.bandwidth_c = 0.5;
  cfg.calibration_draws = 2000;
  SimReport report = run_benchmark(cfg);
  report.wall_seconds = 123.0;  // must not leak into the document

  nlohmann::json doc = report_to_json(report);
  CHECK_FALSE(doc.contains("wall_seconds"));
  CHECK(doc.at("config").at("seed").get<std::uint64_t>() == 5);

  SimReport again = run_benchmark(cfg);
  again.wall_seconds = 456.0;
  CHECK(doc.dump() == report_to_json(again).dump());

  report.rmse[1] = std::numeric_limits<double>::quiet_NaN();
  report.failed_reps = 1;
  nlohmann::json with_nan = report_to_json(report);
  CHECK(with_nan.at("rmse_per_rep")[1].is_null());
  CHECK(with_nan.at("failed_reps").get<int>() == 1);
}

TEST_CASE("atomic write and read round-trip") {
  TempDir dir;
  const std::string path = dir.file("out.txt");
  write_file_atomic(path, "hello\nworld\n");
  CHECK(read_file(path) == "hello\nworld\n");
  write_file_atomic(path, "replaced");
  CHECK(read_file(path) == "replaced");
  CHECK_THROWS(read_file(dir.file("missing.txt")));
}

TEST_CASE("csv record splitting honors quotes") {
  CHECK(split_csv_record("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_record("a,\"b,c\",d") ==
        std::vector<std::string>{"a", "b,c", "d"});
  CHECK(split_csv_record("\"he said \"\"hi\"\"\",2") ==
        std::vector<std::string>{"he said \"hi\"", "2"});
  CHECK(split_csv_record("") == std::vector<std::string>{""});
  CHECK(split_csv_record("x,") == std::vector<std::string>{"x", ""});
}

TEST_CASE("format_double preserves values") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.6789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("triangle packing round-trips") {
  CHECK(triangle_size(3) == 6);
  Eigen::MatrixXd s(3, 3);
  s << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  std::vector<double> tri = matrix_to_triangle(s);
  REQUIRE(tri.size() == 6);
  CHECK(tri[0] == 1.0);  // y11
  CHECK(tri[1] == 2.0);  // y21
  CHECK(tri[2] == 4.0);  // y22
  CHECK(tri[5] == 6.0);  // y33
  CHECK((triangle_to_matrix(tri, 3) - s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample csv round-trips exactly") {
  SimConfig cfg;
  cfg.q = 2;
  cfg.n = 40;
  cfg.m = 3;
  cfg.seed = 8;
  GeneratedData data = generate(cfg, 0.3, 1);

  TempDir dir;
  const std::string path = dir.file("sample.csv");
  write_file_atomic(path, sample_to_csv(data.train));

  LoadedSample loaded = read_sample_csv(path, cfg.q, cfg.m);
  CHECK_FALSE(loaded.rescale.has_value());
  REQUIRE(loaded.table.n() == data.train.n());
  CHECK((loaded.table.predictors - data.train.predictors).cwiseAbs().maxCoeff() ==
        0.0);
  for (int i = 0; i < loaded.table.n(); ++i) {
    CHECK((loaded.table.responses[i].entries() -
           data.train.responses[i].entries())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("sample csv header and error reporting") {
  TempDir dir;
  const std::string path = dir.file("bad.csv");

  // wrong header
  write_file_atomic(path, "a,b,c\n1,2,3\n");
  try {
    read_sample_csv(path, 1, 1);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row == 0);
  }

  // non-SPD response on data row 2
  auto header = sample_header(1, 2);
  std::string text;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) text += ",";
    text += header[i];
  }
  text += "\n0.5,1.0,0.0,1.0\n0.6,1.0,0.0,-1.0\n";
  write_file_atomic(path, text);
  try {
    read_sample_csv(path, 1, 2);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row == 2);
  }

  // malformed number
  write_file_atomic(path, "x1,y11,y21,y22\n0.5,1.0,zero,1.0\n");
  CHECK_THROWS_AS(read_sample_csv(path, 1, 2), CsvError);
}

TEST_CASE("predictor rescaling maps columns onto [0,1]") {
  TempDir dir;
  const std::string path = dir.file("wide.csv");
  write_file_atomic(path,
                    "x1,y11\n-10,1.0\n0,2.0\n30,0.5\n");
  LoadedSample loaded = read_sample_csv(path, 1, 1, /*rescale=*/true);
  REQUIRE(loaded.rescale.has_value());
  CHECK(loaded.table.predictors(0, 0) == doctest::Approx(0.0));
  CHECK(loaded.table.predictors(1, 0) == doctest::Approx(0.25));
  CHECK(loaded.table.predictors(2, 0) == doctest::Approx(1.0));

  // the recorded map reapplies to new data
  write_file_atomic(dir.file("pred.csv"), "x1\n-10\n0\n30\n");
  Eigen::MatrixXd x = read_predictors_csv(dir.file("pred.csv"), 1,
                                          loaded.rescale);
  CHECK(x(1, 0) == doctest::Approx(0.25));
}
