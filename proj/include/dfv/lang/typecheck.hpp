#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfv/lang/ast.hpp"

namespace dfv::lang {

class TypeCheckError : public std::runtime_error {
public:
    enum class Kind {
        TypeMismatch,
        MultiplyDefined,
        Undefined,
        CausalityCycle,
        RecursiveNode,
        Arity,
        BadProperty,
    };

    TypeCheckError(Kind kind, SourcePos pos, const std::string& message, std::vector<std::string> signals = {});

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] SourcePos pos() const { return pos_; }
    /// For cycles: the signals on the cycle, in dependency order.
    [[nodiscard]] const std::vector<std::string>& signals() const { return signals_; }

private:
    Kind kind_;
    SourcePos pos_;
    std::vector<std::string> signals_;
};

enum class SignalKind { Input, Output, Local };

struct SignalInfo {
    SignalKind kind = SignalKind::Input;
    Type type = Type::Bool;
};

struct NodeInfo {
    std::map<std::string, SignalInfo> signals;
    /// Equation indices in an order where every instantaneous dependency comes first.
    std::vector<std::size_t> schedule;
    /// Distinct callee node names.
    std::vector<std::string> callees;
};

/// A program whose expressions all carry types, with per-node schedules.
struct TypedProgram {
    Program program;
    std::map<std::string, NodeInfo> nodes;

    [[nodiscard]] const NodeDecl& node(const std::string& name) const;
    [[nodiscard]] const NodeInfo& info(const std::string& name) const;
    /// Node names reachable from `root` through calls, root included, callees before callers.
    [[nodiscard]] std::vector<std::string> call_tree(const std::string& root) const;
};

/// Type and causality check. Integer literals used where a real is expected are widened.
[[nodiscard]] TypedProgram typecheck(Program p);

/// Signals an expression reads at the current instant (operands of `pre` are skipped).
void instantaneous_reads(const Expr& e, std::vector<std::string>& out);

}  // namespace dfv::lang
