#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "core/csv.hpp"
#include "core/model_io.hpp"
#include "test_support.hpp"

using namespace spinn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("spinn_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("csv values round-trip bitwise") {
  TempDir tmp;
  Rng rng(1);
  Eigen::MatrixXd values(15, 4);
  for (long i = 0; i < values.rows(); ++i) {
    for (long j = 0; j < values.cols(); ++j) {
      // mix magnitudes, signs, and exact integers
      const double base = rng.uniform(-1.0, 1.0);
      const int exp10 = static_cast<int>(rng.below(25)) - 12;
      values(i, j) = (i + j) % 7 == 0 ? std::floor(base * 10)
                                      : base * std::pow(10.0, exp10);
    }
  }
  SUBCASE("without header") {
    write_csv(tmp.file("plain.csv"), values);
    const CsvTable table = read_csv(tmp.file("plain.csv"));
    CHECK(table.header.empty());
    CHECK(testing::exactly_equal(table.values, values));
  }
  SUBCASE("with header") {
    write_csv(tmp.file("head.csv"), values, {"a", "b", "c", "d"});
    const CsvTable table = read_csv(tmp.file("head.csv"));
    CHECK(table.header == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(testing::exactly_equal(table.values, values));
  }
}

TEST_CASE("csv error reporting") {
  TempDir tmp;
  CHECK_THROWS_AS(read_csv(tmp.file("missing.csv")), Error);
  try {
    read_csv(tmp.file("missing.csv"));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }

  {
    std::ofstream out(tmp.file("ragged.csv"));
    out << "1,2,3\n1,2\n";
  }
  CHECK_THROWS_WITH_AS(read_csv(tmp.file("ragged.csv")),
                       doctest::Contains("line 2"), Error);

  {
    std::ofstream out(tmp.file("midtext.csv"));
    out << "1,2\n3,oops\n";
  }
  CHECK_THROWS_WITH_AS(read_csv(tmp.file("midtext.csv")),
                       doctest::Contains("line 2"), Error);

  {
    std::ofstream out(tmp.file("empty.csv"));
  }
  CHECK_THROWS_AS(read_csv(tmp.file("empty.csv")), Error);
}

TEST_CASE("dataset extraction and validation from csv") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("train.csv"));
    out << "x1,x2,y\n0.5,1.0,2.0\n0.25,-1.0,3.0\n";
  }
  const Dataset data =
      dataset_from_table(read_csv(tmp.file("train.csv")), true, Task::regression);
  CHECK(data.n() == 2);
  CHECK(data.p() == 2);
  CHECK(data.responses(1) == 3.0);

  {
    std::ofstream out(tmp.file("nan.csv"));
    out << "0.5,nan,2.0\n";
  }
  CHECK_THROWS_WITH_AS(
      dataset_from_table(read_csv(tmp.file("nan.csv")), true, Task::regression),
      doctest::Contains("row 0 column 1"), Error);

  {
    std::ofstream out(tmp.file("cls.csv"));
    out << "0.5,0.2,0.7\n";
  }
  CHECK_THROWS_AS(dataset_from_table(read_csv(tmp.file("cls.csv")), true,
                                     Task::classification),
                  Error);
}

TEST_CASE("dataset csv writer emits feature headers") {
  TempDir tmp;
  Dataset data;
  data.task = Task::regression;
  data.features = Eigen::MatrixXd::Random(3, 2);
  data.responses = Eigen::VectorXd::Random(3);
  write_dataset_csv(tmp.file("d.csv"), data, true);
  const CsvTable table = read_csv(tmp.file("d.csv"));
  CHECK(table.header == std::vector<std::string>{"x1", "x2", "y"});
  CHECK(testing::exactly_equal(table.values.col(2), data.responses));
  CHECK(testing::exactly_equal(table.values.leftCols(2), data.features));
}

TEST_CASE("model save/load round-trips byte-identically") {
  TempDir tmp;
  Rng rng(10);
  const NetworkArchitecture arch =
      make_architecture(5, {3, 2}, Task::classification, Activation::sigmoid);
  FitResult fake;
  fake.arch = arch;
  fake.params = testing::random_params(arch, rng);
  fake.objective_trace = {1.0, 0.5};
  fake.n_iters = 1;
  fake.converged = true;
  fake.selected_features = {0, 3};
  fake.n_active_hidden = 2;

  const ModelFile model = model_from_fit(fake, PenaltyConfig{0.001, 0.42, 0.25}, 99);
  save_model(model, tmp.file("m.json"));
  const ModelFile loaded = load_model(tmp.file("m.json"));
  save_model(loaded, tmp.file("m2.json"));

  CHECK(slurp(tmp.file("m.json")) == slurp(tmp.file("m2.json")));
  CHECK(loaded.arch == arch);
  CHECK(loaded.penalty.lambda == 0.42);
  CHECK(loaded.meta.seed == 99);
  CHECK(loaded.selected_features == std::vector<int>{0, 3});
  for (std::size_t a = 0; a < loaded.params.weights.size(); ++a) {
    CHECK(testing::exactly_equal(loaded.params.weights[a], model.params.weights[a]));
    CHECK(testing::exactly_equal(loaded.params.intercepts[a], model.params.intercepts[a]));
  }
}

TEST_CASE("version mismatch is rejected") {
  TempDir tmp;
  const NetworkArchitecture arch = make_architecture(2, {2});
  FitResult fake;
  fake.arch = arch;
  fake.params = NetworkParameters::zero(arch);
  const ModelFile model = model_from_fit(fake, PenaltyConfig{}, 1);
  save_model(model, tmp.file("v.json"));

  std::string text = slurp(tmp.file("v.json"));
  const auto pos = text.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"format_version\": 1").size(),
               "\"format_version\": 99");
  {
    std::ofstream out(tmp.file("v99.json"));
    out << text;
  }
  CHECK_THROWS_WITH_AS(load_model(tmp.file("v99.json")),
                       doctest::Contains("version"), Error);

  {
    std::ofstream out(tmp.file("broken.json"));
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_model(tmp.file("broken.json")), Error);
  CHECK_THROWS_AS(load_model(tmp.file("nonexistent.json")), Error);
}

TEST_CASE("format_double survives extreme magnitudes") {
  for (double v : {1.0, -0.0, 1e-300, -2.2250738585072014e-308,
                   1.7976931348623157e308, 0.1, 1.0 / 3.0}) {
    const std::string text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

}  // TEST_SUITE
