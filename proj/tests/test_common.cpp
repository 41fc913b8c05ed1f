#include <doctest.h>

#include <cmath>
#include <limits>

#include "uef/common.hpp"
#include "uef/rng.hpp"

using namespace uef;

TEST_CASE("format_double round-trips shortest representations") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 1e-300, 1e300, 0.30000000000000004}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("format_double_17 is exact for random bit patterns") {
    rng::Engine eng(7);
    for (int i = 0; i < 1000; ++i) {
        const double v = eng.uniform(-1e6, 1e6);
        CHECK(parse_double(format_double_17(v)) == v);
    }
}

TEST_CASE("parse_double rejects garbage") {
    CHECK_THROWS_AS(parse_double("1.2.3"), Error);
    CHECK_THROWS_AS(parse_double("abc"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
    CHECK_THROWS_AS(parse_double("1e"), Error);
}

TEST_CASE("error kinds map to the exit-code contract") {
    CHECK(Error(ErrorKind::config, "x").exit_code() == 2);
    CHECK(Error(ErrorKind::schema, "x").exit_code() == 2);
    CHECK(Error(ErrorKind::data, "x").exit_code() == 2);
    CHECK(Error(ErrorKind::io, "x").exit_code() == 2);
    CHECK(Error(ErrorKind::artifact, "x").exit_code() == 3);
    CHECK(Error(ErrorKind::shape, "x").exit_code() == 4);
    CHECK(Error(ErrorKind::numeric, "x").exit_code() == 4);
    CHECK(Error(ErrorKind::training, "x").exit_code() == 4);
    CHECK(TrainingError(3, "diverged").epoch() == 3);
}

TEST_CASE("KahanSum keeps small terms") {
    KahanSum s;
    s.add(1.0);
    for (int i = 0; i < 10000; ++i) s.add(1e-16);
    CHECK(s.value() == doctest::Approx(1.0 + 1e-12).epsilon(1e-12));
}

TEST_CASE("Matrix row access and equality") {
    Matrix m(2, 3);
    m(0, 0) = 1.0;
    m(1, 2) = 5.0;
    CHECK(m.row(1)[2] == 5.0);
    Matrix k = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 0.0, 5.0}});
    CHECK(m == k);
    CHECK_THROWS_AS(Matrix::from_rows({{1.0}, {1.0, 2.0}}), Error);
}
