#include <catch2/catch_amalgamated.hpp>

#include <ergo/scalar.hpp>

using ergo::Scalar;
using ergo::ScalarMode;

TEST_CASE("rational arithmetic is exact and closed") {
    Scalar a = Scalar::rational(1, 3);
    Scalar b = Scalar::rational(1, 6);
    CHECK((a + b) == Scalar::rational(1, 2));
    CHECK((a - b) == Scalar::rational(1, 6));
    CHECK((a * b) == Scalar::rational(1, 18));
    CHECK((a / b) == Scalar::rational(2));
    CHECK((a + b).is_rational());
    CHECK_FALSE((a + b).promoted());

    // no drift over many operations
    Scalar sum = Scalar::rational(0);
    for (int i = 0; i < 100; ++i) sum += Scalar::rational(1, 100);
    CHECK(sum == Scalar::rational(1));
}

TEST_CASE("parsing") {
    CHECK(Scalar::parse("2/3", ScalarMode::Rational) == Scalar::rational(2, 3));
    CHECK(Scalar::parse("-2/3", ScalarMode::Rational) == Scalar::rational(-2, 3));
    CHECK(Scalar::parse("0.25", ScalarMode::Rational) == Scalar::rational(1, 4));
    CHECK(Scalar::parse("2.5e-3", ScalarMode::Rational) == Scalar::rational(1, 400));
    CHECK(Scalar::parse("7", ScalarMode::Rational) == Scalar::rational(7));
    CHECK(Scalar::parse("0.5", ScalarMode::Floating).value() == 0.5);
    CHECK_THROWS_AS(Scalar::parse("1/0", ScalarMode::Rational), ergo::error);
    CHECK_THROWS_AS(Scalar::parse("abc", ScalarMode::Rational), ergo::error);
    CHECK_THROWS_AS(Scalar::parse("1..2", ScalarMode::Rational), ergo::error);
}

TEST_CASE("mixed-mode arithmetic promotes with a diagnostic flag") {
    Scalar r = Scalar::rational(1, 2);
    Scalar f = Scalar::floating(0.25);
    Scalar mixed = r + f;
    CHECK(mixed.mode() == ScalarMode::Floating);
    CHECK(mixed.promoted());
    CHECK(mixed.value() == 0.75);

    // the flag is sticky through further arithmetic
    CHECK((mixed * f).promoted());
    // pure floating arithmetic is not flagged
    CHECK_FALSE((f + f).promoted());
}

TEST_CASE("division by zero is an error") {
    CHECK_THROWS_AS(Scalar::rational(1) / Scalar::rational(0), ergo::error);
}

TEST_CASE("comparisons and rendering") {
    CHECK(Scalar::rational(1, 3) < Scalar::rational(1, 2));
    CHECK(Scalar::rational(2, 4) == Scalar::rational(1, 2));
    CHECK(Scalar::rational(-1, 2).sign() == -1);
    CHECK(Scalar::rational(0).is_zero());
    CHECK(Scalar::rational(2, 3).str() == "2/3");
    CHECK(Scalar::rational(5).str() == "5");
    CHECK(Scalar::rational(1, 3).value() == Catch::Approx(1.0 / 3.0));
}
