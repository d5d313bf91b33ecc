#include <doctest.h>

#include <random>

#include "dfv/rational.hpp"
#include "dfv/value.hpp"

using dfv::Rational;
using dfv::Type;
using dfv::Value;

TEST_CASE("rational parsing and printing")
{
    CHECK(Rational::parse("12") == Rational(12));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK(Rational::parse("1.25") == Rational(5, 4));
    CHECK(Rational::parse("-0.5") == Rational(-1, 2));
    CHECK(Rational::parse("7/3") == Rational(7, 3));
    CHECK(Rational(6, -4).to_string() == "-3/2");
    CHECK(Rational(5, 4).to_decimal(true) == "1.25");
    CHECK(Rational(3).to_decimal(true) == "3.0");
    CHECK(Rational(1, 3).to_decimal(true) == "1/3");
    CHECK_THROWS(Rational::parse("abc"));
    CHECK_THROWS(Rational(1) / Rational(0));
}

TEST_CASE("rational overflow spills to big numbers")
{
    Rational big(INT64_MAX);
    Rational sq = big * big;
    CHECK(sq / big == big);
    CHECK(sq.numerator_str() == "85070591730234615847396907784232501249");
    Rational x = Rational(INT64_MAX, 3) + Rational(INT64_MAX, 7);
    CHECK(x - Rational(INT64_MAX, 7) == Rational(INT64_MAX, 3));
    CHECK((sq - sq).is_zero());
}

TEST_CASE("euclidean division")
{
    CHECK(Rational::euclid_div(7, 2) == Rational(3));
    CHECK(Rational::euclid_div(-7, 2) == Rational(-4));
    CHECK(Rational::euclid_div(7, -2) == Rational(-3));
    CHECK(Rational::euclid_div(-7, -2) == Rational(4));
}

TEST_CASE("rational field laws against the GMP oracle")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> small(-1000, 1000);
    std::uniform_int_distribution<std::int64_t> wide(INT64_MIN / 2, INT64_MAX / 2);
    for (int i = 0; i < 5000; ++i) {
        auto pick = [&] {
            std::int64_t n = (i % 3 == 0) ? wide(rng) : small(rng);
            std::int64_t d = small(rng);
            if (d == 0) d = 1;
            return Rational(n, d);
        };
        Rational a = pick(), b = pick();
        mpq_class qa = a.to_mpq(), qb = b.to_mpq();
        CHECK((a + b).to_mpq() == qa + qb);
        CHECK((a - b).to_mpq() == qa - qb);
        CHECK((a * b).to_mpq() == qa * qb);
        if (!b.is_zero()) CHECK((a / b).to_mpq() == qa / qb);
        CHECK(((a < b) == (qa < qb)));
        CHECK(Rational::parse(a.to_string()) == a);
    }
}

TEST_CASE("value printing and parsing")
{
    CHECK(Value::boolean(true).to_string() == "true");
    CHECK(Value::real(Rational(1, 2)).to_string() == "0.5");
    CHECK(Value::integer(Rational(-4)).to_string() == "-4");
    CHECK(Value::parse(Type::Real, "0.25") == Value::real(Rational(1, 4)));
    CHECK(Value::parse(Type::Real, "2") == Value::real(Rational(2)));
    CHECK(Value::default_of(Type::Real) == Value::real(Rational(0)));
    CHECK_THROWS(Value::integer(Rational(1, 2)));
}
