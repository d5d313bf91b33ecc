#include "dfv/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "dfv/lang/parser.hpp"

namespace dfv::bench {

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in) throw ManifestError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& p)
{
    try {
        return nlohmann::json::parse(slurp(p));
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(p.filename().string() + ": " + e.what());
    }
}

ExpectedClass class_from(const std::string& s)
{
    if (s == "DirectProof") return ExpectedClass::DirectProof;
    if (s == "CompositionalProof") return ExpectedClass::CompositionalProof;
    if (s == "NotModeled") return ExpectedClass::NotModeled;
    throw ManifestError("unknown expected_class '" + s + "'");
}

const std::set<std::string> kNotModeled{"G-160", "G-280", "G-190"};
const std::set<std::string> kCompositional{"G-250", "G-110", "G-120", "G-130", "G-140", "G-150"};

void check_integrity(const Benchmark& b)
{
    std::set<std::string> ids;
    for (const auto& s : b.properties) {
        if (!ids.insert(s.id).second) throw ManifestError("duplicate property " + s.id);
        bool nm = s.expected_class == ExpectedClass::NotModeled;
        bool comp = s.expected_class == ExpectedClass::CompositionalProof;
        if (nm != (kNotModeled.count(s.id) != 0)) throw ManifestError(s.id + ": wrong not-modeled classification");
        if (comp != (kCompositional.count(s.id) != 0)) throw ManifestError(s.id + ": wrong compositional classification");
        if (nm) continue;
        for (const auto& n : {s.node_under_test, s.observer_node}) {
            if (!b.program.program.find_node(n)) throw ManifestError(s.id + ": no node '" + n + "'");
        }
        const auto& obs = b.program.node(s.observer_node);
        const auto* sig = obs.find_signal(s.property);
        if (!sig || sig->type != Type::Bool) throw ManifestError(s.id + ": no boolean signal '" + s.property + "'");
        if (comp) {
            auto it = b.arguments.find(s.argument);
            if (it == b.arguments.end()) throw ManifestError(s.id + ": no argument '" + s.argument + "'");
            if (it->second.top != s.observer_node) throw ManifestError(s.id + ": argument top differs from observer");
        }
    }
    for (const auto& [id, a] : b.arguments) {
        if (!b.program.program.find_node(a.top)) throw ManifestError("argument " + id + ": no node '" + a.top + "'");
        for (const auto& c : a.contracts) {
            if (!b.program.program.find_node(c.node)) throw ManifestError("argument " + id + ": no node '" + c.node + "'");
        }
    }
}

}  // namespace

const char* to_string(ExpectedClass c)
{
    switch (c) {
    case ExpectedClass::DirectProof: return "DirectProof";
    case ExpectedClass::CompositionalProof: return "CompositionalProof";
    case ExpectedClass::NotModeled: return "NotModeled";
    }
    return "?";
}

const PropertySpec& Benchmark::spec(const std::string& id) const
{
    for (const auto& s : properties) {
        if (s.id == id) return s;
    }
    throw ManifestError("no property '" + id + "'");
}

std::filesystem::path default_bench_dir()
{
    if (const char* env = std::getenv("DFV_BENCH_DIR")) return env;
    return DFV_DEFAULT_BENCH_DIR;
}

Benchmark load_benchmark(const std::filesystem::path& dir)
{
    Benchmark b;
    b.dir = dir;
    lang::Program prog;
    for (const char* sub : {"models", "fixtures"}) {
        if (!std::filesystem::is_directory(dir / sub)) {
            if (std::string(sub) == "models") throw ManifestError("no models directory in " + dir.string());
            continue;
        }
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(dir / sub)) {
            if (e.path().extension() == ".lus") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            lang::merge_into(prog, lang::parse(slurp(f)));
            b.files.push_back(f);
        }
    }
    b.program = lang::typecheck(std::move(prog));

    const nlohmann::json props = read_json(dir / "properties.json");
    for (const auto& j : props.at("properties")) {
        PropertySpec s;
        s.id = j.at("id");
        s.row = j.value("row", 0);
        s.prose = j.value("prose", "");
        if (j.contains("node_under_test") && !j["node_under_test"].is_null()) s.node_under_test = j["node_under_test"];
        if (j.contains("observer_node") && !j["observer_node"].is_null()) s.observer_node = j["observer_node"];
        if (j.contains("property") && !j["property"].is_null()) s.property = j["property"];
        s.assumptions_used = j.value("assumptions_used", std::vector<std::string>{});
        s.expected_class = class_from(j.at("expected_class"));
        s.argument = j.value("argument", "");
        b.properties.push_back(std::move(s));
    }
    const nlohmann::json manifest = read_json(dir / "contracts.json");
    for (const auto& [id, a] : manifest.at("arguments").items()) {
        Argument arg;
        arg.id = id;
        arg.top = a.at("top");
        arg.property = a.at("property");
        try {
            arg.contracts = compose::contracts_from_json(a.at("contracts"));
        } catch (const compose::ContractError& e) {
            throw ManifestError("argument " + id + ": " + e.what());
        }
        b.arguments[id] = std::move(arg);
    }
    if (std::filesystem::exists(dir / "expected.json")) b.expected = read_json(dir / "expected.json");
    check_integrity(b);
    return b;
}

engine::VerifyResult verify_direct(const Benchmark& b, const PropertySpec& s, const engine::EngineConfig& cfg)
{
    auto ts = tsys::compile(b.program, s.observer_node);
    return engine::kinduction(ts, s.property, cfg);
}

const BenchRow& BenchReport::row(const std::string& id) const
{
    for (const auto& r : rows) {
        if (r.id == id) return r;
    }
    throw std::out_of_range("no row '" + id + "'");
}

std::size_t BenchReport::count(const std::string& verdict) const
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const BenchRow& r) { return r.verdict == verdict; }));
}

bool BenchReport::consistent() const
{
    return std::none_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.matches_expected == false; });
}

BenchReport run_benchmark(const Benchmark& b, const engine::EngineConfig& cfg, const std::vector<std::string>& ids)
{
    BenchReport rep;
    for (const auto& s : b.properties) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), s.id) == ids.end()) continue;
        BenchRow row;
        row.id = s.id;
        row.row = s.row;
        row.cls = s.expected_class;
        auto t0 = std::chrono::steady_clock::now();
        switch (s.expected_class) {
        case ExpectedClass::NotModeled:
            row.verdict = "NotModeled";
            row.detail = "requirement outside the modeled subsystems";
            break;
        case ExpectedClass::DirectProof: {
            row.attempted = true;
            auto r = verify_direct(b, s, cfg);
            row.verdict = engine::to_string(r.verdict);
            row.k = r.k;
            row.detail = r.detail;
            row.result = engine::to_json(s.id, r);
            break;
        }
        case ExpectedClass::CompositionalProof: {
            const auto& a = b.arguments.at(s.argument);
            row.attempted = true;
            auto arg = compose::run_argument(b.program, a.top, a.property, a.contracts, cfg);
            row.verdict = arg.proved() ? "Valid" : "Unknown";
            row.k = arg.system_result.k;
            if (!arg.proved()) row.detail = "compositional argument incomplete";
            row.result = compose::to_json(arg);
            break;
        }
        }
        if (row.attempted) row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (b.expected.contains("properties") && b.expected["properties"].contains(s.id)) {
            const auto& e = b.expected["properties"][s.id];
            bool ok = e.at("verdict") == row.verdict;
            if (ok && e.contains("k") && row.verdict == "Valid") ok = e["k"].get<int>() == row.k;
            row.matches_expected = ok;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

nlohmann::json to_json(const BenchReport& r)
{
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json x{{"id", row.id},
                         {"row", row.row},
                         {"class", to_string(row.cls)},
                         {"verdict", row.verdict},
                         {"k", row.k},
                         {"attempted", row.attempted},
                         {"time_ms", row.time_ms}};
        if (!row.detail.empty()) x["detail"] = row.detail;
        if (row.matches_expected) x["matches_expected"] = *row.matches_expected;
        if (!row.result.is_null()) x["result"] = row.result;
        j["rows"].push_back(x);
    }
    j["summary"] = {{"valid", r.count("Valid")},
                    {"falsified", r.count("Falsified")},
                    {"unknown", r.count("Unknown")},
                    {"not_modeled", r.count("NotModeled")},
                    {"consistent", r.consistent()}};
    return j;
}

}  // namespace dfv::bench
