#include "dfv/lang/ast.hpp"

namespace dfv::lang {

const char* spelling(UnaryOp op)
{
    return op == UnaryOp::Neg ? "-" : "not";
}

const char* spelling(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::Implies: return "=>";
    }
    return "?";
}

bool is_arithmetic(BinaryOp op)
{
    return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div;
}

bool is_comparison(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return true;
    default: return false;
    }
}

bool is_logical(BinaryOp op)
{
    return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies;
}

Expr Expr::make_literal(Value v, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Literal;
    e.literal = std::move(v);
    e.pos = pos;
    return e;
}

Expr Expr::make_var(std::string name, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(name);
    e.pos = pos;
    return e;
}

Expr Expr::make_unary(UnaryOp op, Expr operand, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Unary;
    e.unary_op = op;
    e.args.push_back(std::move(operand));
    e.pos = pos;
    return e;
}

Expr Expr::make_binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Binary;
    e.binary_op = op;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    e.pos = pos;
    return e;
}

Expr Expr::make_ite(Expr c, Expr t, Expr f, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Ite;
    e.args.push_back(std::move(c));
    e.args.push_back(std::move(t));
    e.args.push_back(std::move(f));
    e.pos = pos;
    return e;
}

Expr Expr::make_pre(Expr operand, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Pre;
    e.args.push_back(std::move(operand));
    e.pos = pos;
    return e;
}

Expr Expr::make_arrow(Expr first, Expr rest, SourcePos pos)
{
    Expr e;
    e.kind = Kind::Arrow;
    e.args.push_back(std::move(first));
    e.args.push_back(std::move(rest));
    e.pos = pos;
    return e;
}

Expr Expr::make_call(std::string callee, std::vector<Expr> args, bool is_extern, SourcePos pos)
{
    Expr e;
    e.kind = is_extern ? Kind::ExternCall : Kind::NodeCall;
    e.name = std::move(callee);
    e.args = std::move(args);
    e.pos = pos;
    return e;
}

bool same_structure(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
    case Expr::Kind::Literal:
        // an int literal and its widened real form print differently, so keep them distinct
        if (!(a.literal == b.literal)) return false;
        break;
    case Expr::Kind::Var:
    case Expr::Kind::NodeCall:
    case Expr::Kind::ExternCall:
        if (a.name != b.name) return false;
        break;
    case Expr::Kind::Unary:
        if (a.unary_op != b.unary_op) return false;
        break;
    case Expr::Kind::Binary:
        if (a.binary_op != b.binary_op) return false;
        break;
    default: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_structure(a.args[i], b.args[i])) return false;
    }
    return true;
}

namespace {

bool same_decls(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
    }
    return true;
}

}  // namespace

bool same_structure(const NodeDecl& a, const NodeDecl& b)
{
    if (a.name != b.name || !same_decls(a.inputs, b.inputs) || !same_decls(a.outputs, b.outputs)
        || !same_decls(a.locals, b.locals)) {
        return false;
    }
    if (a.equations.size() != b.equations.size() || a.assertions.size() != b.assertions.size()
        || a.properties.size() != b.properties.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        if (a.equations[i].targets != b.equations[i].targets) return false;
        if (!same_structure(a.equations[i].rhs, b.equations[i].rhs)) return false;
    }
    for (std::size_t i = 0; i < a.assertions.size(); ++i) {
        if (!same_structure(a.assertions[i], b.assertions[i])) return false;
    }
    for (std::size_t i = 0; i < a.properties.size(); ++i) {
        if (a.properties[i].signal != b.properties[i].signal) return false;
    }
    return true;
}

bool same_structure(const Program& a, const Program& b)
{
    if (a.nodes.size() != b.nodes.size() || a.externs.size() != b.externs.size()) return false;
    for (std::size_t i = 0; i < a.externs.size(); ++i) {
        const auto& x = a.externs[i];
        const auto& y = b.externs[i];
        if (x.name != y.name || !same_decls(x.params, y.params) || x.result.name != y.result.name
            || x.result.type != y.result.type) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        if (!same_structure(a.nodes[i], b.nodes[i])) return false;
    }
    return true;
}

const VarDecl* NodeDecl::find_signal(const std::string& n) const
{
    for (const auto* group : {&inputs, &outputs, &locals}) {
        for (const auto& d : *group) {
            if (d.name == n) return &d;
        }
    }
    return nullptr;
}

const NodeDecl* Program::find_node(const std::string& n) const
{
    for (const auto& node : nodes) {
        if (node.name == n) return &node;
    }
    return nullptr;
}

const ExternDecl* Program::find_extern(const std::string& n) const
{
    for (const auto& x : externs) {
        if (x.name == n) return &x;
    }
    return nullptr;
}

void merge_into(Program& into, Program other)
{
    for (auto& x : other.externs) into.externs.push_back(std::move(x));
    for (auto& n : other.nodes) into.nodes.push_back(std::move(n));
}

}  // namespace dfv::lang
