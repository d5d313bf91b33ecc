#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfv/engine/smt.hpp"
#include "dfv/interp/interp.hpp"
#include "dfv/interp/trace.hpp"
#include "dfv/tsys/tsys.hpp"

namespace dfv::engine {

struct EngineConfig {
    int k_max = 20;
    double timeout = 300.0;  // seconds, per property
    std::vector<std::string> solver_command = default_solver_command();
    bool use_invariants = false;
    bool parallel_properties = false;
    /// Explicit-state engine for boolean-only systems; no solver needed.
    bool oracle_mode = false;
    /// Keep one solver process per task and use push/pop.
    bool incremental = false;
    /// Cone-of-influence reduction before checking.
    bool slice = true;
    /// Require distinct states along induction windows.
    bool path_compression = false;
    /// Depth used when proving invariant candidates.
    int invariant_k = 2;
    /// Concrete semantics for user externs, used to confirm counterexamples.
    tsys::ExternTable externs;
    /// Input traces for invariant candidate filtering; sampled when empty.
    std::vector<interp::Trace> sim_traces;
};

enum class Verdict { Valid, Falsified, Unknown };
enum class UnknownReason { KMaxReached, Timeout, SolverError, NonlinearSpurious };

[[nodiscard]] const char* to_string(Verdict v);
[[nodiscard]] const char* to_string(UnknownReason r);

struct VerifyResult {
    Verdict verdict = Verdict::Unknown;
    /// Valid: induction depth. Unknown/KMaxReached: depth explored cleanly.
    int k = 0;
    std::vector<std::string> invariants_used;
    /// Falsified: top-level signals for steps 0..step, and the pre cells the
    /// run starts from (by state variable name; defaults for guarded programs).
    interp::Trace trace;
    std::size_t step = 0;
    std::map<std::string, Value> initial;
    UnknownReason reason = UnknownReason::KMaxReached;
    std::string detail;
    double time_ms = 0;
};

[[nodiscard]] nlohmann::json to_json(const std::string& property, const VerifyResult& r);
[[nodiscard]] VerifyResult result_from_json(const nlohmann::json& j);

/// Shortest assumption-respecting path of length <= k violating the property
/// at its last step; Unknown/KMaxReached when clean up to k.
[[nodiscard]] VerifyResult bmc(const tsys::TransitionSystem& ts, const std::string& prop_id, int k,
                               const EngineConfig& cfg = {});
[[nodiscard]] VerifyResult kinduction(const tsys::TransitionSystem& ts, const std::string& prop_id,
                                      const EngineConfig& cfg = {});

struct InvariantCandidate {
    enum class Shape { BoolImplication, BoolEquality, IntervalBound };
    enum class Status { Candidate, SimulatedOk, Proved, Rejected };
    Shape shape = Shape::IntervalBound;
    Status status = Status::Candidate;
    std::size_t a = 0;  // variable indices
    std::size_t b = 0;
    std::optional<Value> lo;
    std::optional<Value> hi;
    tsys::TermRef formula;
    std::string text;
};

/// Template candidates filtered by the traces, then proved jointly by
/// k-induction with iterative removal. Best-effort: solver trouble yields {}.
[[nodiscard]] std::vector<InvariantCandidate> generate_invariants(const tsys::TransitionSystem& ts,
                                                                  const std::vector<interp::Trace>& sim_traces,
                                                                  const EngineConfig& cfg = {});
/// All candidates of the three shapes, before any filtering.
[[nodiscard]] std::vector<InvariantCandidate> enumerate_candidates(const tsys::TransitionSystem& ts,
                                                                   const std::vector<tsys::Assignment>& samples);
/// Random assumption-respecting input traces for a system.
[[nodiscard]] std::vector<interp::Trace> sample_traces(const tsys::TransitionSystem& ts, std::size_t count,
                                                       std::size_t length, std::uint64_t seed,
                                                       const tsys::ExternTable* externs = nullptr);

struct Task {
    std::string id;
    const tsys::TransitionSystem* ts = nullptr;
    std::string property;
};

/// Batch driver: results keyed by task id, independent of scheduling.
[[nodiscard]] std::map<std::string, VerifyResult> verify_all(const std::vector<Task>& tasks, const EngineConfig& cfg);

// Explicit-state engine for systems whose variables are all boolean.
struct OracleLimits {
    std::size_t max_state_bits = 20;
    std::size_t max_input_bits = 12;
};
[[nodiscard]] bool oracle_applies(const tsys::TransitionSystem& ts, const OracleLimits& lim = {});
[[nodiscard]] VerifyResult oracle_bmc(const tsys::TransitionSystem& ts, const std::string& prop_id, int k);
[[nodiscard]] VerifyResult oracle_kinduction(const tsys::TransitionSystem& ts, const std::string& prop_id, int k_max);
/// Exact verdict by full reachability: true when no reachable violation exists.
[[nodiscard]] bool oracle_reachable_safe(const tsys::TransitionSystem& ts, const std::string& prop_id);

/// Re-executes a Falsified result in the interpreter, starting from its
/// initial pre cells.
struct ReplayOutcome {
    /// First step where `prop_id` is false, within the trace.
    std::optional<std::size_t> violation;
    /// Assertions held at every step before the violation (or the whole trace).
    bool assumptions_ok = true;
    [[nodiscard]] bool matches(const VerifyResult& r) const { return assumptions_ok && violation == r.step; }
};
[[nodiscard]] ReplayOutcome replay(const lang::TypedProgram& p, const std::string& node, const std::string& prop_id,
                                   const VerifyResult& r, const interp::SimConfig& cfg = {});

/// SMT-LIB2 logic name for a system.
[[nodiscard]] std::string logic_for(const tsys::TransitionSystem& ts);

}  // namespace dfv::engine
