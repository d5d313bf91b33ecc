#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfv/engine/engine.hpp"
#include "dfv/lang/typecheck.hpp"

namespace dfv::compose {

struct Clause {
    std::string id;
    lang::Expr expr;
};

/// Assume/guarantee pair for one node. Expressions range over the node's
/// interface signals. `uses` names the contracted nodes whose guarantees this
/// contract's proof relies on: callees in the list are abstracted in the
/// component check, and the list bounds what discharges its assumptions.
struct Contract {
    std::string node;
    std::vector<Clause> assumptions;
    std::vector<Clause> guarantees;
    std::vector<std::string> uses;
};

class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CircularityError : public ContractError {
public:
    explicit CircularityError(std::vector<std::string> cycle);
    [[nodiscard]] const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

/// node -> distinct callees
using CallGraph = std::map<std::string, std::vector<std::string>>;

[[nodiscard]] CallGraph call_graph(const lang::TypedProgram& p);

/// Throws CircularityError when some contract's proof depends on itself
/// through `uses`; rejects unknown nodes and uses of uncontracted nodes.
void check_noncircular(const std::vector<Contract>& contracts, const CallGraph& g);

/// Replaces every contracted node under `top` by an abstraction whose outputs
/// are fresh inputs constrained only by the guarantees. Fresh inputs are
/// threaded up through the callers to `top`; only `top`'s call tree is kept.
/// Contracts on nodes outside the call tree, or on `top` itself, are errors.
[[nodiscard]] lang::TypedProgram abstract_with_contracts(const lang::TypedProgram& p, const std::string& top,
                                                         const std::vector<Contract>& contracts);

/// Name of the concrete signal (in tsys naming, relative to `top`) that a fresh
/// input of an abstraction stands for, e.g. "AutoPilot__1__FPAEng" -> "AutoPilot.FPAEng".
/// Needs the original program to tell single from repeated call sites.
[[nodiscard]] std::string concrete_origin(const lang::TypedProgram& original, const std::string& top,
                                          const std::string& fresh_input);

/// Outcome of one proof obligation set on an abstraction, with the
/// assumption obligations of every abstracted instance under it.
struct Obligations {
    std::map<std::string, engine::VerifyResult> goals;
    /// Keyed "<node>:<assumption id>@<instance prefix>".
    std::map<std::string, engine::VerifyResult> assumptions;
    [[nodiscard]] bool all_valid() const;
};

/// Proves each guarantee of `contract` on its node, with the contract's
/// assumptions as per-step assumptions and the callees it uses abstracted.
[[nodiscard]] Obligations check_component(const lang::TypedProgram& p, const Contract& contract,
                                          const std::vector<Contract>& all, const engine::EngineConfig& cfg);

/// Proves `top_prop` (a property signal of `top`) on the abstraction.
/// Refuses circular contract sets.
[[nodiscard]] Obligations check_system(const lang::TypedProgram& p, const std::string& top,
                                       const std::string& top_prop, const std::vector<Contract>& contracts,
                                       const engine::EngineConfig& cfg);

struct ComponentResult {
    std::string node;
    std::string guarantee;
    engine::VerifyResult result;
};

struct CompositionalArgument {
    std::string top_node;
    std::string top_property;
    std::vector<Contract> contracts;
    std::vector<ComponentResult> components;
    /// Assumption obligations from component and system checks.
    std::map<std::string, engine::VerifyResult> assumptions;
    engine::VerifyResult system_result;

    /// Valid system check, every guarantee Valid, every assumption discharged.
    [[nodiscard]] bool proved() const;
};

/// Runs the whole argument: all component checks, then the system check.
[[nodiscard]] CompositionalArgument run_argument(const lang::TypedProgram& p, const std::string& top,
                                                 const std::string& top_prop, const std::vector<Contract>& contracts,
                                                 const engine::EngineConfig& cfg);

/// {top_property, components: [{node, guarantee, verdict, ...}], assumptions, system_verdict, system}
[[nodiscard]] nlohmann::json to_json(const CompositionalArgument& a);

/// Contract manifest entries: {"node", "assumptions": [{"id","expr"}], "guarantees": [...], "uses": [...]}.
[[nodiscard]] std::vector<Contract> contracts_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const std::vector<Contract>& cs);

}  // namespace dfv::compose
