#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "dfv/rational.hpp"

namespace dfv {

/// Value sorts of the dataflow language.
enum class Type { Bool, Int, Real };

[[nodiscard]] std::string_view to_string(Type t);

/// A stream value: a boolean, an unbounded integer, or an exact rational.
/// Int and Real share the rational representation; `type()` tells them apart.
class Value {
public:
    Value() = default;

    static Value boolean(bool b);
    static Value integer(Rational v);
    static Value real(Rational v);
    /// Zero of the given sort: false, 0, 0.0.
    static Value default_of(Type t);

    [[nodiscard]] Type type() const { return type_; }
    [[nodiscard]] bool as_bool() const { return b_; }
    [[nodiscard]] const Rational& as_number() const { return num_; }

    /// true/false, integers as digits, reals as exact decimals or num/den.
    [[nodiscard]] std::string to_string() const;
    /// Parses a value of a known sort from the textual forms produced by to_string().
    static Value parse(Type t, std::string_view text);

    friend bool operator==(const Value& a, const Value& b);

private:
    Type type_ = Type::Bool;
    bool b_ = false;
    Rational num_;
};

}  // namespace dfv
