#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfv/value.hpp"

namespace dfv::interp {

/// Finite prefix of a set of streams. Every column has the same length.
class Trace {
public:
    struct Column {
        Type type = Type::Bool;
        std::vector<Value> values;
    };

    /// Declares a signal; a no-op if it already exists with the same type.
    void add_signal(const std::string& name, Type type);
    void append(const std::string& name, Value v);
    /// Removes columns past `n` steps.
    void truncate(std::size_t n);

    [[nodiscard]] bool has(const std::string& name) const { return columns_.count(name) != 0; }
    [[nodiscard]] const Column& column(const std::string& name) const;
    [[nodiscard]] const Value& at(const std::string& name, std::size_t step) const;
    [[nodiscard]] const std::vector<std::string>& names() const { return order_; }
    /// Number of steps: the common column length (0 when empty).
    [[nodiscard]] std::size_t length() const;
    /// Throws if columns disagree in length.
    void check_rectangular() const;

    /// Per-step conjunction of assertions, filled by simulate.
    std::vector<bool> assertion_ok;

    friend bool operator==(const Trace& a, const Trace& b);

private:
    std::vector<std::string> order_;
    std::map<std::string, Column> columns_;
};

/// CSV with a header row of signal names; booleans true/false, numbers as decimals or num/den.
[[nodiscard]] std::string to_csv(const Trace& t);
/// Parses CSV. Column types come from `types`; columns missing there are inferred
/// (true/false -> bool, otherwise real).
[[nodiscard]] Trace from_csv(const std::string& text, const std::map<std::string, Type>& types);

/// Canonical JSON shared with engine counterexamples:
/// {"length": n, "signals": [{"name", "type", "values": [...]}], "assertion_ok"?: [...]}
/// Booleans are JSON booleans; numbers are exact strings.
[[nodiscard]] nlohmann::json to_json(const Trace& t);
[[nodiscard]] Trace trace_from_json(const nlohmann::json& j);

}  // namespace dfv::interp
