#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "subsel/dataset.hpp"
#include "subsel/error.hpp"

using namespace subsel;
namespace fs = std::filesystem;

namespace {

fs::path write_tmp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "subsel_test_dataset";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("three-row file loads in order") {
  const auto p = write_tmp("ok.csv", "a,b,y\n1,2,0\n3,4,1\n5,6,0\n");
  const Dataset d = load_csv(p, {"y", {"a", "b"}, {}});
  CHECK(d.size() == 3);
  CHECK(d.dx() == 2);
  CHECK(d.x(1, 0) == 3.0);
  CHECK(d.x(2, 1) == 6.0);
  CHECK(d.y(1) == 1.0);
  CHECK(d.binary_response());
  CHECK(d.dropped_rows == 0);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("features default to every unused column") {
  const auto p = write_tmp("default.csv", "a,y,z,b\n1,0,9,2\n3,1,8,4\n");
  const Dataset d = load_csv(p, {"y", {}, {"z"}});
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.dz() == 1);
  CHECK(d.z(1, 0) == 8.0);
}

TEST_CASE("quoted header and cells") {
  const auto p = write_tmp("quoted.csv", "\"a\",\"y\"\n\"1.5\",0\n");
  const Dataset d = load_csv(p, {"y", {"a"}, {}});
  CHECK(d.x(0, 0) == 1.5);
}

TEST_CASE("rows with missing cells or wrong field counts are dropped") {
  const auto p = write_tmp("bad_count.csv", "a,b\n1,2\n3\n5,6\n");
  const Dataset d = load_csv(p, {std::nullopt, {"a", "b"}, {}});
  CHECK(d.size() == 2);
  CHECK(d.dropped_rows == 1);
  CHECK(d.x(1, 0) == 5.0);

  const auto q = write_tmp("missing.csv", "a,b\n1,NA\n,2\n3,4\n5,NaN\n");
  const Dataset e = load_csv(q, {std::nullopt, {"a", "b"}, {}});
  CHECK(e.size() == 1);
  CHECK(e.dropped_rows == 3);
}

TEST_CASE("ingest errors") {
  CHECK_THROWS_AS(load_csv(write_tmp("header.csv", "a,b\n"), {std::nullopt, {"a"}, {}}), EmptyDataset);
  CHECK_THROWS_AS(load_csv(write_tmp("col.csv", "a,b\n1,2\n"), {std::nullopt, {"c"}, {}}), ConfigError);
  CHECK_THROWS_AS(load_csv(write_tmp("col2.csv", "a,b\n1,2\n"), {"y", {"a"}, {}}), ConfigError);
  try {
    load_csv(write_tmp("text.csv", "a,b\n1,2\n3,oops\n"), {std::nullopt, {"a", "b"}, {}});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);  // file line, header included
    CHECK(e.column() == 2);
  }
  CHECK_THROWS(load_csv("/nonexistent/file.csv", {}));
}

TEST_CASE("standardize uses the sample standard deviation") {
  Dataset d;
  d.feature_names = {"a"};
  d.x.resize(2, 1);
  d.x << 0, 1;
  const auto [s, t] = standardize(d);
  CHECK(t.mean(0) == doctest::Approx(0.5));
  CHECK(t.sd(0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(s.x(0, 0) == doctest::Approx(-0.70710678));
  CHECK(s.x(1, 0) == doctest::Approx(0.70710678));
}

TEST_CASE("standardize then unstandardize is the identity") {
  Dataset d;
  d.x.resize(5, 2);
  d.x << 1, 10, 2, -3, 7, 4, 0.5, 8, -2, 1;
  d.y = Vector::LinSpaced(5, 0, 4);
  d.response_name = "y";
  const auto [s, t] = standardize(d);
  CHECK(s.x.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
  for (Index j = 0; j < 2; ++j) {
    const double var = s.x.col(j).squaredNorm() / 4.0;
    CHECK(var == doctest::Approx(1.0));
  }
  CHECK(s.y == d.y);
  const Dataset back = unstandardize(s, t);
  CHECK((back.x - d.x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant column cannot be standardized") {
  Dataset d;
  d.x.resize(3, 2);
  d.x << 1, 4, 2, 4, 3, 4;
  CHECK_THROWS_AS(standardize(d), DegenerateColumn);
}

TEST_CASE("write then read round-trips") {
  Dataset d;
  d.feature_names = {"u", "v"};
  d.x.resize(2, 2);
  d.x << 0.1, 1e-17, -3.25, 12345.678901234567;
  d.confounder_names = {"z"};
  d.z.resize(2, 1);
  d.z << 0.3, -0.7;
  d.response_name = "y";
  d.y.resize(2);
  d.y << 1, 0;
  const fs::path p = fs::temp_directory_path() / "subsel_test_dataset" / "round.csv";
  write_csv(d, p);
  const Dataset r = load_csv(p, {"y", {"u", "v"}, {"z"}});
  CHECK(r.x == d.x);
  CHECK(r.z == d.z);
  CHECK(r.y == d.y);
}

TEST_CASE("subset keeps the requested order") {
  Dataset d;
  d.x.resize(3, 1);
  d.x << 10, 20, 30;
  d.z.resize(3, 0);
  const Dataset s = d.subset({2, 0});
  CHECK(s.size() == 2);
  CHECK(s.x(0, 0) == 30.0);
  CHECK(s.x(1, 0) == 10.0);
}
