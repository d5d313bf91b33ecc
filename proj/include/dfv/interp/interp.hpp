#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfv/interp/trace.hpp"
#include "dfv/lang/typecheck.hpp"

namespace dfv::interp {

class EvalError : public std::runtime_error {
public:
    EvalError(std::size_t step, const std::string& message);
    [[nodiscard]] std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Concrete semantics for an extern function.
using ExternFn = std::function<Value(const std::vector<Value>&)>;

struct SimConfig {
    /// Error on reading an uninitialized `pre` instead of substituting the type default.
    bool strict_pre = false;
    std::map<std::string, ExternFn> externs;
};

/// Memory of one node instance.
struct NodeState {
    std::vector<std::optional<Value>> pre;  // per pre site, in source order
    std::vector<bool> arrow_first;          // per arrow site
    std::vector<NodeState> children;        // per call site
    std::size_t steps = 0;

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct StepResult {
    NodeState state;
    /// Inputs, outputs and locals of the stepped node.
    std::map<std::string, Value> values;
    bool assertion_ok = true;
    std::vector<std::string> warnings;
};

namespace detail {
struct Plan;
struct Instance;
}  // namespace detail

/// Compiled interpreter for one typed program. Immutable after construction,
/// so one object may drive several simulations concurrently.
class Interpreter {
public:
    explicit Interpreter(const lang::TypedProgram& p, SimConfig cfg = {});
    ~Interpreter();
    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    [[nodiscard]] const lang::TypedProgram& program() const { return *prog_; }
    [[nodiscard]] const SimConfig& config() const { return cfg_; }

    [[nodiscard]] NodeState init_state(const std::string& node) const;
    [[nodiscard]] StepResult step(const std::string& node, const NodeState& state,
                                  const std::map<std::string, Value>& inputs) const;
    /// Runs `n` steps from the initial state, reading inputs from `inputs`.
    [[nodiscard]] Trace simulate(const std::string& node, const Trace& inputs, std::size_t n) const;
    /// First step where a property signal is false while every assertion held so far.
    [[nodiscard]] std::optional<std::size_t> check_observer(const std::string& node, const Trace& inputs) const;

    /// In-place stepping without map conversions, for long random runs.
    class Runner {
    public:
        Runner(const Interpreter& interp, const std::string& node);
        ~Runner();
        Runner(Runner&&) noexcept;

        [[nodiscard]] const std::vector<lang::VarDecl>& inputs() const;
        void set_input(std::size_t i, const Value& v);
        [[nodiscard]] const Value& input(std::size_t i) const;
        /// Computes all signals for the current inputs without touching memory.
        /// Returns the conjunction of all assertions (including callees').
        bool compute();
        /// Commits the step computed by the last compute(): pre sites latch, arrows clear.
        void commit();
        [[nodiscard]] std::size_t steps() const;
        [[nodiscard]] const Value& signal(const std::string& name) const;
        /// Values of the node's property signals after compute().
        [[nodiscard]] bool properties_hold(std::string* failed = nullptr) const;
        /// Top-level assertion conjuncts that read input `i` and nothing else
        /// (no other signal, no pre, no call). Usable to filter sampled inputs.
        [[nodiscard]] const std::vector<std::size_t>& input_filters(std::size_t i) const;
        /// Evaluates one such conjunct against the current input values.
        [[nodiscard]] bool filter_holds(std::size_t conjunct);
        [[nodiscard]] const std::vector<std::string>& warnings() const;
        [[nodiscard]] NodeState state() const;
        void reset();

    private:
        const Interpreter* interp_;
        std::unique_ptr<detail::Instance> inst_;
        std::vector<std::string> warnings_;
        std::size_t steps_ = 0;
    };

private:
    friend class Runner;
    [[nodiscard]] const detail::Plan& plan(const std::string& node) const;

    std::shared_ptr<const lang::TypedProgram> prog_;
    SimConfig cfg_;
    std::map<std::string, std::unique_ptr<detail::Plan>> plans_;
};

// Convenience wrappers; each compiles the program.
[[nodiscard]] NodeState init_state(const lang::TypedProgram& p, const std::string& node);
[[nodiscard]] StepResult step(const lang::TypedProgram& p, const std::string& node, const NodeState& state,
                              const std::map<std::string, Value>& inputs, const SimConfig& cfg = {});
[[nodiscard]] Trace simulate(const lang::TypedProgram& p, const std::string& node, const Trace& inputs, std::size_t n,
                             const SimConfig& cfg = {});
[[nodiscard]] std::optional<std::size_t> check_observer(const lang::TypedProgram& p, const std::string& node,
                                                        const Trace& inputs, const SimConfig& cfg = {});

}  // namespace dfv::interp
