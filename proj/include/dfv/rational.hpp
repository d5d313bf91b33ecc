#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dfv {

/// Exact rational number. Values that fit a normalized int64 fraction stay
/// inline; anything larger spills to a GMP rational.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);
    explicit Rational(const mpq_class& q);

    /// Parses "12", "-3", "1.25", "-0.5", "7/3", "-7/3".
    static Rational parse(std::string_view text);

    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] int sign() const;
    [[nodiscard]] bool is_zero() const { return sign() == 0; }

    /// Numerator/denominator as decimal strings (denominator > 0).
    [[nodiscard]] std::string numerator_str() const;
    [[nodiscard]] std::string denominator_str() const;

    /// "3", "-1/2" style.
    [[nodiscard]] std::string to_string() const;
    /// Exact decimal if the denominator has only factors 2 and 5, otherwise num/den.
    /// Integers are rendered with a trailing ".0" when `real_style` is set.
    [[nodiscard]] std::string to_decimal(bool real_style) const;
    [[nodiscard]] bool has_finite_decimal() const;

    [[nodiscard]] double to_double() const;
    [[nodiscard]] mpq_class to_mpq() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    /// Throws std::domain_error on a zero divisor.
    friend Rational operator/(const Rational& a, const Rational& b);

    /// Euclidean integer division and remainder (remainder always >= 0),
    /// matching SMT-LIB `div`/`mod`. Both operands must be integers.
    static Rational euclid_div(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b);
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    [[nodiscard]] std::size_t hash() const;

private:
    void set_big(mpq_class q);
    void normalize_small();

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

}  // namespace dfv
