#include <doctest.h>

#include <charconv>
#include <cmath>
#include <limits>

#include "subsel/error.hpp"
#include "subsel/rng.hpp"
#include "subsel/serialize.hpp"

using namespace subsel;

TEST_CASE("grid JSON: level lists and ranges, file order kept") {
  const Json j = Json::parse(R"({"axes":{"b":[0,1],"a":{"from":-1,"to":1,"count":3}},"z_axes":{"z":[5]}})");
  const CandidateGrid g = grid_from_json(j);
  CHECK(g.size() == 6);
  CHECK(g.x_dims() == 2);
  CHECK(g.z_dims() == 1);
  CHECK(g.axes()[0].name == "b");
  CHECK(g.points()(1, 1) == 0.0);
  CHECK_THROWS_AS(grid_from_json(Json::parse(R"({"axes":{"x":[1,1]}})")), ConfigError);
  CHECK_THROWS_AS(grid_from_json(Json::parse(R"({"x":[1]})")), ConfigError);
}

TEST_CASE("model JSON") {
  const Json j = Json::parse(R"({
    "f": {"family": "linear", "dim": 1, "intercept": true},
    "h": {"family": "trig", "dim": 1, "variable": 0, "fn": "sin", "a": 1, "scale": 0.35},
    "g": {"family": "linear", "dim": 1, "intercept": false, "scale": 0.5}})");
  const ModelSpec s = model_from_json(j);
  CHECK(s.p() == 2);
  CHECK(s.m() == 1);
  CHECK(s.q() == 1);
  Vector x(1), z(1);
  x << 2;
  z << 4;
  const Vector row = eval_row(s, x, z);
  CHECK(row(2) == doctest::Approx(0.35 * std::sin(4.0)));
  CHECK(row(3) == doctest::Approx(2.0));

  const ModelSpec c = model_from_json(Json::parse(R"({"f": {"family": "concat", "parts": [
      {"family": "linear", "dim": 2}, {"family": "polynomial", "dim": 2, "variable": 1, "degree": 2, "intercept": false}]}})"));
  CHECK(c.p() == 5);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"f": {"family": "spline"}})")), ConfigError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"h": {}})")), ConfigError);
}

TEST_CASE("bias and design JSON") {
  const BiasSpec b = bias_from_json(Json::parse(R"({"psi":[1,2],"sigma":2,"n_total":10})"));
  CHECK(b.psi.size() == 2);
  CHECK(b.phi.size() == 0);
  CHECK(b.n_over_sigma() == 5.0);

  const DesignMeasure d = design_from_json(Json::parse(R"({"points":[{"x":[0],"weight":0.25},{"x":[1],"weight":0.75}]})"));
  CHECK(d.size() == 2);
  const Json back = to_json(d);
  CHECK(design_from_json(back).weights() == d.weights());
  CHECK_THROWS_AS(design_from_json(Json::parse(R"({"points":[{"x":[0]}]})")), ConfigError);
}

TEST_CASE("non-finite numbers become null") {
  Vector v(3);
  v << 1.5, std::numeric_limits<double>::quiet_NaN(), -std::numeric_limits<double>::infinity();
  const Json j = to_json(v);
  CHECK(j[0] == 1.5);
  CHECK(j[1].is_null());
  CHECK(j[2].is_null());
}

TEST_CASE("format_double round-trips") {
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20);
    const std::string s = format_double(x);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("selection and verdict records") {
  const Json s = to_json(SubsampleSelection{"iboss", {3, 1}});
  CHECK(s["algorithm"] == "iboss");
  CHECK(s["size"] == 2);
  CriterionValue c{CriterionName::D, -1.0, {{"det", 0.3679}}};
  const Json cj = to_json(c);
  CHECK(cj["name"] == "D");
  CHECK(cj["value"] == -1.0);
  CHECK(cj["meta"]["det"] == 0.3679);
}
