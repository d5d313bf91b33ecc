#include "dfv/interp/trace.hpp"

#include <sstream>
#include <stdexcept>

namespace dfv::interp {

void Trace::add_signal(const std::string& name, Type type)
{
    auto it = columns_.find(name);
    if (it != columns_.end()) {
        if (it->second.type != type) throw std::invalid_argument("signal '" + name + "' redeclared with another type");
        return;
    }
    columns_[name].type = type;
    order_.push_back(name);
}

void Trace::append(const std::string& name, Value v)
{
    auto it = columns_.find(name);
    if (it == columns_.end()) throw std::out_of_range("trace has no signal '" + name + "'");
    if (v.type() != it->second.type) throw std::invalid_argument("value of wrong type for signal '" + name + "'");
    it->second.values.push_back(std::move(v));
}

void Trace::truncate(std::size_t n)
{
    for (auto& [_, c] : columns_) {
        if (c.values.size() > n) c.values.resize(n);
    }
    if (assertion_ok.size() > n) assertion_ok.resize(n);
}

const Trace::Column& Trace::column(const std::string& name) const
{
    auto it = columns_.find(name);
    if (it == columns_.end()) throw std::out_of_range("trace has no signal '" + name + "'");
    return it->second;
}

const Value& Trace::at(const std::string& name, std::size_t step) const
{
    const auto& c = column(name);
    if (step >= c.values.size()) throw std::out_of_range("step " + std::to_string(step) + " beyond trace of '" + name + "'");
    return c.values[step];
}

std::size_t Trace::length() const
{
    if (columns_.empty()) return assertion_ok.size();
    return columns_.begin()->second.values.size();
}

void Trace::check_rectangular() const
{
    std::size_t n = length();
    for (const auto& [name, c] : columns_) {
        if (c.values.size() != n) throw std::logic_error("trace column '" + name + "' has a different length");
    }
}

bool operator==(const Trace& a, const Trace& b)
{
    if (a.order_ != b.order_) return false;
    for (const auto& [name, c] : a.columns_) {
        const auto& d = b.columns_.at(name);
        if (c.type != d.type || c.values != d.values) return false;
    }
    return true;
}

std::string to_csv(const Trace& t)
{
    std::ostringstream os;
    const auto& names = t.names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ",";
        os << names[i];
    }
    os << "\n";
    std::size_t n = t.length();
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) os << ",";
            os << t.at(names[i], s).to_string();
        }
        os << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r' && c != ' ' && c != '\t') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

}  // namespace

Trace from_csv(const std::string& text, const std::map<std::string, Type>& types)
{
    std::istringstream in(text);
    std::string line;
    Trace t;
    if (!std::getline(in, line)) return t;
    auto header = split_csv_line(line);
    if (header.size() == 1 && header[0].empty()) return t;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("CSV row " + std::to_string(rows.size() + 2) + " has " + std::to_string(cells.size())
                                        + " cells, header has " + std::to_string(header.size()));
        }
        rows.push_back(std::move(cells));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        Type ty = Type::Real;
        auto it = types.find(header[i]);
        if (it != types.end()) {
            ty = it->second;
        } else if (!rows.empty() && (rows[0][i] == "true" || rows[0][i] == "false")) {
            ty = Type::Bool;
        }
        t.add_signal(header[i], ty);
        for (const auto& r : rows) t.append(header[i], Value::parse(ty, r[i]));
    }
    return t;
}

nlohmann::json to_json(const Trace& t)
{
    nlohmann::json j;
    j["length"] = t.length();
    j["signals"] = nlohmann::json::array();
    for (const auto& name : t.names()) {
        const auto& c = t.column(name);
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& v : c.values) {
            if (v.type() == Type::Bool) {
                vals.push_back(v.as_bool());
            } else {
                vals.push_back(v.to_string());
            }
        }
        j["signals"].push_back({{"name", name}, {"type", std::string(to_string(c.type))}, {"values", vals}});
    }
    if (!t.assertion_ok.empty()) {
        j["assertion_ok"] = t.assertion_ok;
    }
    return j;
}

Trace trace_from_json(const nlohmann::json& j)
{
    Trace t;
    for (const auto& s : j.at("signals")) {
        std::string name = s.at("name");
        std::string ty = s.at("type");
        Type type = ty == "bool" ? Type::Bool : ty == "int" ? Type::Int : Type::Real;
        t.add_signal(name, type);
        for (const auto& v : s.at("values")) {
            if (type == Type::Bool) {
                t.append(name, Value::boolean(v.get<bool>()));
            } else {
                t.append(name, Value::parse(type, v.get<std::string>()));
            }
        }
    }
    if (j.contains("assertion_ok")) t.assertion_ok = j["assertion_ok"].get<std::vector<bool>>();
    t.check_rectangular();
    return t;
}

}  // namespace dfv::interp
