#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "floquet/config.hpp"
#include "floquet/errors.hpp"

using namespace floquet;
using nlohmann::json;

TEST_CASE("defaults") {
  const auto c = default_config();
  CHECK(c.directions.size() == 4);
  CHECK(c.grid == 256);
  CHECK_NOTHROW(make_point(c));
  const auto back = parse_config(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("hash follows content") {
  auto c = default_config();
  const auto h = config_hash(c);
  c.eps[2] = 0.1;
  CHECK(config_hash(c) != h);
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(parse_config(json{{"unknown", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"grid", 100}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"quad", -1e-8}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"tolerances", {{"quad", "small"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"potential", {{"type", "square"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"beta", 2.0}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"directions", {{1, 0}, {0, 1}}}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("potential specs") {
  PotentialSpec p;
  p.type = "cosine";
  p.amplitude = 3;
  p.n = 2;
  const auto q = make_potential(p);
  CHECK(q.value(0.125) == doctest::Approx(3 * std::cos(2 * 3.141592653589793 * 2 * 0.125)).epsilon(1e-14).scale(1));
  p.type = "zero";
  CHECK(make_potential(p).value(0.3) == 0.0);
}

TEST_CASE("csv writer") {
  const auto dir = std::filesystem::temp_directory_path() / "floquet_csv_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = (dir / "x.csv").string();
  {
    CsvWriter w(path, {"a", "b"}, "0123456789abcdef");
    w.row(std::vector<double>{1.0, 0.1});
    CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), OutOfRange);
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# config_hash=0123456789abcdef\na,b\n1,0.1\n");
  std::filesystem::remove_all(dir.parent_path());
}
