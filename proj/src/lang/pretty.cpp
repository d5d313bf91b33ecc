#include "dfv/lang/pretty.hpp"

#include <cctype>
#include <sstream>

namespace dfv::lang {

namespace {

// Binding strength, loosest first. Mirrors the parser's descent order.
enum Prec : int {
    kTop = -1,
    kIte = 0,
    kArrow = 1,
    kImplies = 2,
    kOr = 3,
    kAnd = 4,
    kNot = 5,
    kCmp = 6,
    kAdd = 7,
    kMul = 8,
    kNeg = 9,
    kPre = 10,
    kAtom = 11,
};

int prec_of(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::Ite: return kIte;
    case Expr::Kind::Arrow: return kArrow;
    case Expr::Kind::Pre: return kPre;
    case Expr::Kind::Unary: return e.unary_op == UnaryOp::Not ? kNot : kNeg;
    case Expr::Kind::Binary:
        switch (e.binary_op) {
        case BinaryOp::Implies: return kImplies;
        case BinaryOp::Or: return kOr;
        case BinaryOp::And: return kAnd;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
        default: return kCmp;
        }
    case Expr::Kind::Literal:
        if (e.literal.type() != Type::Bool && e.literal.as_number().sign() < 0) return kNeg;
        if (e.literal.type() == Type::Real && !e.literal.as_number().has_finite_decimal()) return kMul;
        return kAtom;
    default: return kAtom;
    }
}

std::string literal_text(const Value& v)
{
    switch (v.type()) {
    case Type::Bool: return v.as_bool() ? "true" : "false";
    case Type::Int: return v.as_number().to_string();
    case Type::Real: {
        const Rational& r = v.as_number();
        if (r.has_finite_decimal()) return r.to_decimal(true);
        Rational mag = r.sign() < 0 ? -r : r;
        std::string s = mag.numerator_str() + ".0 / " + mag.denominator_str() + ".0";
        return r.sign() < 0 ? "-(" + s + ")" : s;
    }
    }
    return {};
}

std::string render(const Expr& e, int ctx);

std::string wrap(const Expr& e, int ctx, bool tie_needs_parens)
{
    int p = prec_of(e);
    std::string s = render(e, p);
    if (p < ctx || (p == ctx && tie_needs_parens)) return "(" + s + ")";
    return s;
}

std::string render(const Expr& e, int self)
{
    switch (e.kind) {
    case Expr::Kind::Literal: return literal_text(e.literal);
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::NodeCall:
    case Expr::Kind::ExternCall: {
        std::string s = e.name + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) s += ", ";
            s += render(e.args[i], prec_of(e.args[i]));
        }
        return s + ")";
    }
    case Expr::Kind::Pre: return "pre(" + render(e.args[0], prec_of(e.args[0])) + ")";
    case Expr::Kind::Unary: {
        if (e.unary_op == UnaryOp::Not) return "not " + wrap(e.args[0], kNot, false);
        std::string inner = wrap(e.args[0], kNeg, false);
        // "--" would start a comment, and "-3.0" would read back as a literal
        bool digit = !inner.empty() && std::isdigit(static_cast<unsigned char>(inner[0]));
        return inner.starts_with("-") || digit ? "-(" + inner + ")" : "-" + inner;
    }
    case Expr::Kind::Binary: {
        BinaryOp op = e.binary_op;
        bool right_assoc = op == BinaryOp::Implies;
        bool non_assoc = is_comparison(op);
        std::string lhs = wrap(e.args[0], self, right_assoc || non_assoc);
        std::string rhs = wrap(e.args[1], self, !right_assoc || non_assoc);
        if (op == BinaryOp::Sub && rhs.starts_with("-")) rhs = "(" + rhs + ")";
        return lhs + " " + spelling(op) + " " + rhs;
    }
    case Expr::Kind::Arrow:
        return wrap(e.args[0], kArrow, true) + " -> " + wrap(e.args[1], kArrow, false);
    case Expr::Kind::Ite:
        return "if " + render(e.args[0], prec_of(e.args[0])) + " then " + render(e.args[1], prec_of(e.args[1]))
               + " else " + render(e.args[2], prec_of(e.args[2]));
    }
    return {};
}

void print_params(std::ostringstream& os, const std::vector<VarDecl>& ds)
{
    os << "(";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) os << "; ";
        os << ds[i].name << ": " << to_string(ds[i].type);
    }
    os << ")";
}

}  // namespace

std::string pretty(const Expr& e)
{
    return render(e, prec_of(e));
}

std::string pretty(const NodeDecl& n)
{
    std::ostringstream os;
    os << "node " << n.name;
    print_params(os, n.inputs);
    os << "\nreturns ";
    print_params(os, n.outputs);
    os << ";\n";
    if (!n.locals.empty()) {
        os << "var\n";
        for (const auto& l : n.locals) os << "  " << l.name << ": " << to_string(l.type) << ";\n";
    }
    os << "let\n";
    for (const auto& eq : n.equations) {
        os << "  ";
        for (std::size_t i = 0; i < eq.targets.size(); ++i) {
            if (i) os << ", ";
            os << eq.targets[i];
        }
        os << " = " << pretty(eq.rhs) << ";\n";
    }
    for (const auto& a : n.assertions) os << "  assert " << pretty(a) << ";\n";
    for (const auto& p : n.properties) os << "  --!PROPERTY: " << p.signal << " = true;\n";
    os << "tel\n";
    return os.str();
}

std::string pretty(const Program& p)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& x : p.externs) {
        if (!first) os << "\n";
        first = false;
        os << "extern " << x.name;
        print_params(os, x.params);
        os << " returns (" << x.result.name << ": " << to_string(x.result.type) << ");\n";
    }
    for (const auto& n : p.nodes) {
        if (!first) os << "\n";
        first = false;
        os << pretty(n);
    }
    return os.str();
}

}  // namespace dfv::lang
