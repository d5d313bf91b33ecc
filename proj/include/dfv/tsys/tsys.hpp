#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfv/interp/interp.hpp"
#include "dfv/lang/typecheck.hpp"
#include "dfv/tsys/term.hpp"

namespace dfv::tsys {

enum class VarKind { Input, State, Defined };

struct Var {
    std::string name;
    Type type = Type::Bool;
    VarKind kind = VarKind::Defined;
    /// A signal of the compiled node itself (not of an inlined callee).
    bool top_level = false;
    /// State variables: the memory cell they model in the interpreter's NodeState.
    enum class Site { None, Pre, Arrow };
    Site site = Site::None;
    std::vector<std::size_t> instance;  // child indices from the top node
    std::size_t site_index = 0;
};

struct Property {
    std::string id;
    TermRef formula;  // over the current step
};

struct ExternSymbol {
    std::string name;
    std::vector<Type> params;
    Type result = Type::Real;

    friend bool operator==(const ExternSymbol&, const ExternSymbol&) = default;
};

/// A node with every call inlined.
///
/// Per step, each defined variable equals its definition over the same step.
/// Each state variable holds at step i+1 the value of its update term at step i:
/// pre sites carry their operand, arrow flags become false. At step 0 arrow
/// flags are true and pre sites are unconstrained.
struct TransitionSystem {
    std::string node;
    std::vector<Var> vars;
    /// Defined: definition; State: update; Input: null.
    std::vector<TermRef> defs;
    /// Defined variables in dependency order.
    std::vector<std::size_t> def_order;
    /// Per-step assumptions from assertions (callees' included).
    std::vector<TermRef> assumptions;
    std::vector<Property> properties;
    std::vector<ExternSymbol> externs;

    [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const;
    [[nodiscard]] const Property& property(const std::string& id) const;
    [[nodiscard]] std::vector<std::size_t> of_kind(VarKind k) const;

    /// Step-0 constraint: arrow flags true, definitions hold.
    [[nodiscard]] TermRef init() const;
    /// Step i to i+1: state updates and the successor's definitions.
    [[nodiscard]] TermRef trans() const;
    /// Definitions of one step (shared by init and trans).
    [[nodiscard]] TermRef step_constraint(bool next) const;
};

class CompileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] TransitionSystem compile(const lang::TypedProgram& p, const std::string& node);

/// Cone-of-influence reduction for one property. Keeps every assumption
/// together with its cone, so verdicts do not change.
[[nodiscard]] TransitionSystem slice(const TransitionSystem& ts, const std::string& prop_id);

/// Full valuation of one step, indexed like `vars`.
using Assignment = std::vector<Value>;

/// Builds a trace of the top node's signals from per-step valuations by variable
/// name. Internal (namespaced) signals are included when `internal` is set.
[[nodiscard]] interp::Trace concretize(const TransitionSystem& ts,
                                       const std::vector<std::map<std::string, Value>>& steps, bool internal = false);
[[nodiscard]] interp::Trace concretize(const TransitionSystem& ts, const std::vector<Assignment>& steps,
                                       bool internal = false);

/// Executes the system on concrete inputs. Pre cells start at `initial` when
/// given (by state variable index), else at the type default, like the
/// interpreter's default policy.
[[nodiscard]] std::vector<Assignment> run(const TransitionSystem& ts, const interp::Trace& inputs, std::size_t n,
                                          const std::map<std::size_t, Value>& initial = {},
                                          const ExternTable* externs = nullptr);
/// Successor valuation of the state variables only (other entries untouched).
void advance(const TransitionSystem& ts, const Assignment& cur, Assignment& next, const ExternTable* externs);
/// Fills the defined variables of `a` from its inputs and state.
void define(const TransitionSystem& ts, Assignment& a, const ExternTable* externs);

/// Interpreter memory matching a step-0 valuation of the state variables, for replay.
[[nodiscard]] interp::NodeState seed_state(const TransitionSystem& ts, const lang::TypedProgram& p,
                                           const Assignment& step0);

/// SMT-LIB2-styled debug dump: declarations plus named init/trans/assumption/property definitions.
[[nodiscard]] std::string dump_smt(const TransitionSystem& ts);
/// Quoted SMT symbol for a variable at a given unrolling step.
[[nodiscard]] std::string smt_name(const TransitionSystem& ts, std::size_t var, std::size_t step);

}  // namespace dfv::tsys
