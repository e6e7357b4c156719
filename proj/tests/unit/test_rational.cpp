#include "doctest.h"

#include "swlab/rational.hpp"

using swlab::Rational;

TEST_CASE("rational arithmetic normalizes") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -3) == Rational(-1, 3));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
    CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
    CHECK(Rational(-3, 4) < Rational(-1, 2));
    CHECK((Rational(7, 2) - Rational(1, 2)).is_integer());
    CHECK(Rational(-5, 4).str() == "-5/4");
    CHECK(Rational::parse("6/-4") == Rational(-3, 2));
    CHECK(Rational::parse("7") == Rational(7));
}

TEST_CASE("rational errors") {
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    CHECK_THROWS_AS(Rational::parse("x/2"), std::invalid_argument);
    const Rational big(std::int64_t{1} << 62);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}
