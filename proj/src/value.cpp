#include "dfv/value.hpp"

#include <stdexcept>

namespace dfv {

std::string_view to_string(Type t)
{
    switch (t) {
    case Type::Bool: return "bool";
    case Type::Int: return "int";
    case Type::Real: return "real";
    }
    return "?";
}

Value Value::boolean(bool b)
{
    Value v;
    v.type_ = Type::Bool;
    v.b_ = b;
    return v;
}

Value Value::integer(Rational r)
{
    if (!r.is_integer()) throw std::invalid_argument("non-integral int value " + r.to_string());
    Value v;
    v.type_ = Type::Int;
    v.num_ = std::move(r);
    return v;
}

Value Value::real(Rational r)
{
    Value v;
    v.type_ = Type::Real;
    v.num_ = std::move(r);
    return v;
}

Value Value::default_of(Type t)
{
    switch (t) {
    case Type::Bool: return boolean(false);
    case Type::Int: return integer(Rational(0));
    case Type::Real: return real(Rational(0));
    }
    return {};
}

std::string Value::to_string() const
{
    switch (type_) {
    case Type::Bool: return b_ ? "true" : "false";
    case Type::Int: return num_.to_string();
    case Type::Real: return num_.to_decimal(true);
    }
    return {};
}

Value Value::parse(Type t, std::string_view text)
{
    switch (t) {
    case Type::Bool:
        if (text == "true" || text == "1") return boolean(true);
        if (text == "false" || text == "0") return boolean(false);
        throw std::invalid_argument("not a boolean: '" + std::string(text) + "'");
    case Type::Int: return integer(Rational::parse(text));
    case Type::Real: return real(Rational::parse(text));
    }
    throw std::invalid_argument("bad type");
}

bool operator==(const Value& a, const Value& b)
{
    if (a.type_ != b.type_) return false;
    if (a.type_ == Type::Bool) return a.b_ == b.b_;
    return a.num_ == b.num_;
}

}  // namespace dfv
