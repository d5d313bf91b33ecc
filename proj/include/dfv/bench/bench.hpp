#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfv/compose/compose.hpp"
#include "dfv/engine/engine.hpp"
#include "dfv/lang/typecheck.hpp"

namespace dfv::bench {

enum class ExpectedClass { DirectProof, CompositionalProof, NotModeled };

[[nodiscard]] const char* to_string(ExpectedClass c);

struct PropertySpec {
    std::string id;
    int row = 0;
    std::string prose;
    std::string node_under_test;
    std::string observer_node;
    std::string property;  // property signal of the observer
    std::vector<std::string> assumptions_used;
    ExpectedClass expected_class = ExpectedClass::DirectProof;
    std::string argument;  // key into the argument manifest
};

struct Argument {
    std::string id;
    std::string top;
    std::string property;
    std::vector<compose::Contract> contracts;
};

struct Benchmark {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files;
    lang::TypedProgram program;
    std::vector<PropertySpec> properties;
    std::map<std::string, Argument> arguments;
    nlohmann::json expected;

    [[nodiscard]] const PropertySpec& spec(const std::string& id) const;
};

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Directory the build was configured with.
[[nodiscard]] std::filesystem::path default_bench_dir();

/// Reads models/*.lus and fixtures/*.lus, properties.json, contracts.json and
/// expected.json (optional), and checks the manifest's integrity.
[[nodiscard]] Benchmark load_benchmark(const std::filesystem::path& dir = default_bench_dir());

struct BenchRow {
    std::string id;
    int row = 0;
    ExpectedClass cls = ExpectedClass::DirectProof;
    /// "Valid", "Falsified", "Unknown", or "NotModeled" (never attempted).
    std::string verdict;
    int k = 0;
    /// The engine ran for this row. Zero time otherwise.
    bool attempted = false;
    double time_ms = 0;
    std::string detail;
    nlohmann::json result;
    /// Compared against expected.json; empty when nothing is pinned.
    std::optional<bool> matches_expected;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    [[nodiscard]] const BenchRow& row(const std::string& id) const;
    [[nodiscard]] std::size_t count(const std::string& verdict) const;
    /// No pinned expectation is contradicted.
    [[nodiscard]] bool consistent() const;
};

/// Runs every property (or only `ids`) in catalog order. Not-modeled entries
/// are reported without touching the engine.
[[nodiscard]] BenchReport run_benchmark(const Benchmark& b, const engine::EngineConfig& cfg,
                                        const std::vector<std::string>& ids = {});

/// Verdict of one direct (non-compositional) row.
[[nodiscard]] engine::VerifyResult verify_direct(const Benchmark& b, const PropertySpec& s,
                                                 const engine::EngineConfig& cfg);

/// {"rows": [{id, row, class, verdict, k, time_ms, detail?, matches_expected?, result}], "summary": {...}}
[[nodiscard]] nlohmann::json to_json(const BenchReport& r);

}  // namespace dfv::bench
