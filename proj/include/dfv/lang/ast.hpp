#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfv/value.hpp"

namespace dfv::lang {

struct SourcePos {
    int line = 0;
    int column = 0;
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

[[nodiscard]] const char* spelling(UnaryOp op);
[[nodiscard]] const char* spelling(BinaryOp op);
[[nodiscard]] bool is_arithmetic(BinaryOp op);
[[nodiscard]] bool is_comparison(BinaryOp op);
[[nodiscard]] bool is_logical(BinaryOp op);

/// Expression tree. Children live in `args`:
///   Unary: [operand]; Binary: [lhs, rhs]; Ite: [cond, then, else];
///   Pre: [operand]; Arrow: [first, rest]; NodeCall/ExternCall: arguments.
struct Expr {
    enum class Kind { Literal, Var, Unary, Binary, Ite, Pre, Arrow, NodeCall, ExternCall };

    Kind kind = Kind::Literal;
    Value literal;
    std::string name;
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<Expr> args;
    SourcePos pos;
    /// Filled in by typecheck.
    std::optional<Type> type;

    static Expr make_literal(Value v, SourcePos pos = {});
    static Expr make_var(std::string name, SourcePos pos = {});
    static Expr make_unary(UnaryOp op, Expr operand, SourcePos pos = {});
    static Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos pos = {});
    static Expr make_ite(Expr c, Expr t, Expr e, SourcePos pos = {});
    static Expr make_pre(Expr operand, SourcePos pos = {});
    static Expr make_arrow(Expr first, Expr rest, SourcePos pos = {});
    static Expr make_call(std::string callee, std::vector<Expr> args, bool is_extern, SourcePos pos = {});
};

/// Structural equality: ignores positions and type annotations.
[[nodiscard]] bool same_structure(const Expr& a, const Expr& b);

struct VarDecl {
    std::string name;
    Type type = Type::Bool;
    SourcePos pos;
};

struct Equation {
    std::vector<std::string> targets;
    Expr rhs;
    SourcePos pos;
};

struct PropertyAnnotation {
    std::string signal;
    SourcePos pos;
};

struct NodeDecl {
    std::string name;
    std::vector<VarDecl> inputs;
    std::vector<VarDecl> outputs;
    std::vector<VarDecl> locals;
    std::vector<Equation> equations;
    std::vector<Expr> assertions;
    std::vector<PropertyAnnotation> properties;
    SourcePos pos;

    [[nodiscard]] const VarDecl* find_signal(const std::string& name) const;
};

/// Uninterpreted function: `extern name(x: real; ...) returns (r: real);`
struct ExternDecl {
    std::string name;
    std::vector<VarDecl> params;
    VarDecl result;
    SourcePos pos;
};

struct Program {
    std::vector<ExternDecl> externs;
    std::vector<NodeDecl> nodes;

    [[nodiscard]] const NodeDecl* find_node(const std::string& name) const;
    [[nodiscard]] const ExternDecl* find_extern(const std::string& name) const;
};

[[nodiscard]] bool same_structure(const NodeDecl& a, const NodeDecl& b);
[[nodiscard]] bool same_structure(const Program& a, const Program& b);

/// Appends the declarations of `other` to `into`.
void merge_into(Program& into, Program other);

/// Visits every sub-expression of `e` in pre-order.
template <class F>
void walk(const Expr& e, F&& f)
{
    f(e);
    for (const auto& a : e.args) walk(a, f);
}

}  // namespace dfv::lang
