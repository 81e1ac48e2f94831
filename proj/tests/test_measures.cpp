#include <doctest.h>

#include <filesystem>
#include <random>

#include "test_util.h"
#include "uot/errors.h"
#include "uot/measure_io.h"
#include "uot/measures.h"

using namespace uot;

TEST_CASE("new_measure strips zero atoms and keeps order") {
  const auto m = new_measure({1.0, 0.0, 2.0}, {{1.0}, {2.0}, {3.0}});
  REQUIRE(m.size() == 2);
  CHECK(m.weights()[0] == 1.0);
  CHECK(m.weights()[1] == 2.0);
  CHECK(m.points()(0, 0) == 1.0);
  CHECK(m.points()(1, 0) == 3.0);
  CHECK(total_mass(m) == 3.0);
}

TEST_CASE("empty input is the null measure") {
  const auto m = new_measure({}, {});
  CHECK(m.is_null());
  CHECK(total_mass(m) == 0.0);
  CHECK(DiscreteMeasure::null(3).is_null());
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(new_measure({-1.0}, {{0.0}}), InvalidMeasure);
  CHECK_THROWS_AS(new_measure({1.0, 1.0}, {{0.0}, {0.0, 1.0}}), InvalidMeasure);
  CHECK_THROWS_AS(new_measure({1.0}, {{0.0}, {1.0}}), InvalidMeasure);
  CHECK_THROWS_AS(new_measure({std::nan("")}, {{0.0}}), InvalidMeasure);
}

TEST_CASE("total_mass") {
  CHECK(total_mass(new_measure({0.5, 0.5}, {{0.0}, {1.0}})) == 1.0);
  CHECK(total_mass(new_measure({2, 3, 4}, {{0.0}, {1.0}, {2.0}})) == 9.0);
  CHECK(total_mass(new_measure({2, 0, 3}, {{0.0}, {1.0}, {2.0}})) == 5.0);
}

TEST_CASE("cost_matrix examples") {
  const auto x = new_measure({1}, {{0.0}});
  const auto y = new_measure({1}, {{2.0}});
  CHECK(cost_matrix(x.points(), y.points(), CostSpec::sq_euclidean())(0, 0) == 4.0);
  CHECK(cost_matrix(x.points(), x.points(), CostSpec::sq_euclidean())(0, 0) == 0.0);
  const auto a = new_measure({1}, {{0.0, 0.0}});
  const auto b = new_measure({1}, {{3.0, 4.0}});
  CHECK(cost_matrix(a.points(), b.points(), CostSpec::euclidean_pow(1.0))(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(cost_matrix(a.points(), b.points(), CostSpec::sq_euclidean(0.5))(0, 0) == 12.5);
  CHECK_THROWS_AS(cost_matrix(x.points(), a.points(), CostSpec::sq_euclidean()), DomainError);
  CHECK_THROWS_AS(CostSpec::euclidean_pow(0.5), DomainError);
}

TEST_CASE("cost matrix is symmetric with zero diagonal") {
  std::mt19937_64 rng(3);
  const auto a = test::random_measure(rng, 7, 3);
  const auto b = test::random_measure(rng, 5, 3);
  for (const CostSpec& c : {CostSpec::sq_euclidean(), CostSpec::euclidean_pow(1.5, 2.0)}) {
    const CostMatrix ab = cost_matrix(a.points(), b.points(), c);
    const CostMatrix ba = cost_matrix(b.points(), a.points(), c);
    CHECK((ab - ba.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cost_matrix(a.points(), a.points(), c).diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cost gradient") {
  Vector x(2), y(2);
  x << 1.0, 2.0;
  y << 0.0, 0.0;
  const Vector g = CostSpec::sq_euclidean().grad_x(x, y);
  CHECK(g[0] == 2.0);
  CHECK(g[1] == 4.0);
  CHECK_THROWS_AS(CostSpec::euclidean_pow(1.0).grad_x(x, x), DomainError);
  CHECK(CostSpec::euclidean_pow(3.0).grad_x(x, x).norm() == 0.0);
}

TEST_CASE("JSON and CSV round-trip bit-exactly") {
  std::mt19937_64 rng(11);
  const auto m = test::random_measure(rng, 9, 3, 2.7);
  const auto j = measure_from_json(measure_to_json(m));
  CHECK(j.weights() == m.weights());
  CHECK(j.points() == m.points());
  const auto c = measure_from_csv(measure_to_csv(m));
  CHECK(c.weights() == m.weights());
  CHECK(c.points() == m.points());

  const auto dir = std::filesystem::temp_directory_path() / "uot_measure_io_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"m.json", "m.csv"}) {
    write_measure(dir / name, m);
    const auto r = read_measure(dir / name);
    CHECK(r.weights() == m.weights());
    CHECK(r.points() == m.points());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("measure parsing errors") {
  CHECK_THROWS_AS(measure_from_json("{\"weights\": [1]}"), ParseError);
  CHECK_THROWS_AS(measure_from_json("not json"), ParseError);
  CHECK_THROWS_AS(measure_from_csv("w,x1\n1,abc\n"), ParseError);
  CHECK_THROWS_AS(measure_from_json("{\"weights\":[-1],\"points\":[[0]]}"), InvalidMeasure);
  CHECK_THROWS_AS(read_measure("/nonexistent/m.json"), ParseError);
}

TEST_CASE("format_double is the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
