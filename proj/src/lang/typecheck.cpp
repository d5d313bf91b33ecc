#include "dfv/lang/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "dfv/lang/pretty.hpp"

namespace dfv::lang {

namespace {

std::string where(SourcePos p)
{
    return std::to_string(p.line) + ":" + std::to_string(p.column) + ": ";
}

}  // namespace

TypeCheckError::TypeCheckError(Kind kind, SourcePos pos, const std::string& message, std::vector<std::string> signals)
    : std::runtime_error(where(pos) + message), kind_(kind), pos_(pos), signals_(std::move(signals))
{
}

const NodeDecl& TypedProgram::node(const std::string& name) const
{
    const NodeDecl* n = program.find_node(name);
    if (!n) throw std::out_of_range("unknown node '" + name + "'");
    return *n;
}

const NodeInfo& TypedProgram::info(const std::string& name) const
{
    auto it = nodes.find(name);
    if (it == nodes.end()) throw std::out_of_range("unknown node '" + name + "'");
    return it->second;
}

std::vector<std::string> TypedProgram::call_tree(const std::string& root) const
{
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        if (!seen.insert(n).second) return;
        for (const auto& c : info(n).callees) visit(c);
        order.push_back(n);
    };
    visit(root);
    return order;
}

void instantaneous_reads(const Expr& e, std::vector<std::string>& out)
{
    if (e.kind == Expr::Kind::Pre) return;
    if (e.kind == Expr::Kind::Var) out.push_back(e.name);
    for (const auto& a : e.args) instantaneous_reads(a, out);
}

namespace {

using Kind = TypeCheckError::Kind;

bool is_int_literal(const Expr& e)
{
    if (e.kind == Expr::Kind::Literal) return e.literal.type() == Type::Int;
    if (e.kind == Expr::Kind::Unary && e.unary_op == UnaryOp::Neg) return is_int_literal(e.args[0]);
    return false;
}

void widen(Expr& e)
{
    if (e.kind == Expr::Kind::Literal) {
        e.literal = Value::real(e.literal.as_number());
    } else {
        widen(e.args[0]);
    }
    e.type = Type::Real;
}

class NodeChecker {
public:
    NodeChecker(const Program& prog, NodeDecl& node, NodeInfo& info) : prog_(prog), node_(node), info_(info) {}

    void run()
    {
        declare_signals();
        std::set<std::string> callees;
        for (auto& eq : node_.equations) check_equation(eq, callees);
        for (auto& a : node_.assertions) {
            infer(a, callees);
            require(a, Type::Bool, "assertion");
        }
        for (const auto& p : node_.properties) {
            auto it = info_.signals.find(p.signal);
            if (it == info_.signals.end()) {
                throw TypeCheckError(Kind::BadProperty, p.pos, "property names undeclared signal '" + p.signal + "'");
            }
            if (it->second.kind == SignalKind::Input || it->second.type != Type::Bool) {
                throw TypeCheckError(Kind::BadProperty, p.pos,
                                     "property signal '" + p.signal + "' must be a boolean output or local");
            }
        }
        info_.callees.assign(callees.begin(), callees.end());
        check_definitions();
        schedule();
    }

private:
    void declare_signals()
    {
        auto add = [&](const std::vector<VarDecl>& ds, SignalKind k) {
            for (const auto& d : ds) {
                if (!info_.signals.emplace(d.name, SignalInfo{k, d.type}).second) {
                    throw TypeCheckError(Kind::MultiplyDefined, d.pos,
                                         "signal '" + d.name + "' declared twice in node '" + node_.name + "'", {d.name});
                }
            }
        };
        add(node_.inputs, SignalKind::Input);
        add(node_.outputs, SignalKind::Output);
        add(node_.locals, SignalKind::Local);
    }

    const SignalInfo& signal(const std::string& name, SourcePos pos) const
    {
        auto it = info_.signals.find(name);
        if (it == info_.signals.end()) {
            throw TypeCheckError(Kind::Undefined, pos, "undefined signal '" + name + "' in node '" + node_.name + "'",
                                 {name});
        }
        return it->second;
    }

    void require(Expr& e, Type t, const std::string& what)
    {
        if (*e.type == t) return;
        if (t == Type::Real && *e.type == Type::Int && is_int_literal(e)) {
            widen(e);
            return;
        }
        throw TypeCheckError(Kind::TypeMismatch, e.pos,
                             what + " expects " + std::string(to_string(t)) + " but '" + pretty(e) + "' has type "
                                 + std::string(to_string(*e.type)));
    }

    // brings two operands to one sort, widening an integer literal next to a real
    Type unify(Expr& a, Expr& b, const std::string& what)
    {
        if (*a.type == *b.type) return *a.type;
        if (*a.type == Type::Real && is_int_literal(b)) {
            widen(b);
            return Type::Real;
        }
        if (*b.type == Type::Real && is_int_literal(a)) {
            widen(a);
            return Type::Real;
        }
        throw TypeCheckError(Kind::TypeMismatch, a.pos,
                             what + " operands have different types (" + std::string(to_string(*a.type)) + " vs "
                                 + std::string(to_string(*b.type)) + ")");
    }

    void check_args(Expr& call, const std::vector<VarDecl>& params, std::set<std::string>& callees)
    {
        if (call.args.size() != params.size()) {
            throw TypeCheckError(Kind::Arity, call.pos,
                                 "'" + call.name + "' expects " + std::to_string(params.size()) + " arguments, got "
                                     + std::to_string(call.args.size()));
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            infer(call.args[i], callees);
            require(call.args[i], params[i].type, "argument " + std::to_string(i + 1) + " of '" + call.name + "'");
        }
    }

    void infer(Expr& e, std::set<std::string>& callees)
    {
        switch (e.kind) {
        case Expr::Kind::Literal: e.type = e.literal.type(); return;
        case Expr::Kind::Var: e.type = signal(e.name, e.pos).type; return;
        case Expr::Kind::Unary:
            infer(e.args[0], callees);
            if (e.unary_op == UnaryOp::Not) {
                require(e.args[0], Type::Bool, "'not'");
                e.type = Type::Bool;
            } else {
                if (*e.args[0].type == Type::Bool) {
                    throw TypeCheckError(Kind::TypeMismatch, e.pos, "unary '-' applied to a boolean");
                }
                e.type = e.args[0].type;
            }
            return;
        case Expr::Kind::Binary: {
            infer(e.args[0], callees);
            infer(e.args[1], callees);
            BinaryOp op = e.binary_op;
            if (is_logical(op)) {
                require(e.args[0], Type::Bool, std::string("'") + spelling(op) + "'");
                require(e.args[1], Type::Bool, std::string("'") + spelling(op) + "'");
                e.type = Type::Bool;
                return;
            }
            Type t = unify(e.args[0], e.args[1], std::string("'") + spelling(op) + "'");
            if ((is_arithmetic(op) || (op != BinaryOp::Eq && op != BinaryOp::Ne)) && t == Type::Bool) {
                throw TypeCheckError(Kind::TypeMismatch, e.pos,
                                     std::string("'") + spelling(op) + "' needs numeric operands");
            }
            e.type = is_arithmetic(op) ? t : Type::Bool;
            return;
        }
        case Expr::Kind::Ite:
            for (auto& a : e.args) infer(a, callees);
            require(e.args[0], Type::Bool, "if condition");
            e.type = unify(e.args[1], e.args[2], "if-then-else");
            return;
        case Expr::Kind::Pre:
            infer(e.args[0], callees);
            e.type = e.args[0].type;
            return;
        case Expr::Kind::Arrow:
            infer(e.args[0], callees);
            infer(e.args[1], callees);
            e.type = unify(e.args[0], e.args[1], "'->'");
            return;
        case Expr::Kind::NodeCall:
        case Expr::Kind::ExternCall: {
            if (const ExternDecl* x = prog_.find_extern(e.name)) {
                e.kind = Expr::Kind::ExternCall;
                check_args(e, x->params, callees);
                e.type = x->result.type;
                return;
            }
            const NodeDecl* callee = prog_.find_node(e.name);
            if (!callee) throw TypeCheckError(Kind::Undefined, e.pos, "call to undefined node '" + e.name + "'", {e.name});
            e.kind = Expr::Kind::NodeCall;
            callees.insert(e.name);
            check_args(e, callee->inputs, callees);
            if (callee->outputs.size() != 1) {
                throw TypeCheckError(Kind::Arity, e.pos,
                                     "node '" + e.name + "' returns " + std::to_string(callee->outputs.size())
                                         + " values; bind them with a tuple equation");
            }
            e.type = callee->outputs.front().type;
            return;
        }
        }
    }

    void check_equation(Equation& eq, std::set<std::string>& callees)
    {
        for (const auto& t : eq.targets) {
            const auto& s = signal(t, eq.pos);
            if (s.kind == SignalKind::Input) {
                throw TypeCheckError(Kind::MultiplyDefined, eq.pos, "input '" + t + "' cannot be defined by an equation",
                                     {t});
            }
            if (!defined_.insert(t).second) {
                throw TypeCheckError(Kind::MultiplyDefined, eq.pos, "signal '" + t + "' defined more than once", {t});
            }
        }
        if (eq.targets.size() == 1) {
            infer(eq.rhs, callees);
            require(eq.rhs, signal(eq.targets[0], eq.pos).type, "equation for '" + eq.targets[0] + "'");
            return;
        }
        if (eq.rhs.kind != Expr::Kind::NodeCall || !prog_.find_node(eq.rhs.name)) {
            throw TypeCheckError(Kind::Arity, eq.pos, "a tuple equation needs a node call on its right side");
        }
        const NodeDecl* callee = prog_.find_node(eq.rhs.name);
        if (callee->outputs.size() != eq.targets.size()) {
            throw TypeCheckError(Kind::Arity, eq.pos,
                                 "node '" + callee->name + "' returns " + std::to_string(callee->outputs.size())
                                     + " values but " + std::to_string(eq.targets.size()) + " targets are bound");
        }
        callees.insert(callee->name);
        check_args(eq.rhs, callee->inputs, callees);
        for (std::size_t i = 0; i < eq.targets.size(); ++i) {
            Type want = signal(eq.targets[i], eq.pos).type;
            if (want != callee->outputs[i].type) {
                throw TypeCheckError(Kind::TypeMismatch, eq.pos,
                                     "target '" + eq.targets[i] + "' has type " + std::string(to_string(want))
                                         + " but output " + std::to_string(i + 1) + " of '" + callee->name + "' is "
                                         + std::string(to_string(callee->outputs[i].type)));
            }
        }
        eq.rhs.type = callee->outputs.front().type;
    }

    void check_definitions() const
    {
        for (const auto* group : {&node_.outputs, &node_.locals}) {
            for (const auto& d : *group) {
                if (!defined_.count(d.name)) {
                    throw TypeCheckError(Kind::Undefined, d.pos,
                                         "signal '" + d.name + "' of node '" + node_.name + "' has no equation", {d.name});
                }
            }
        }
    }

    void schedule()
    {
        std::map<std::string, std::size_t> eq_of;
        for (std::size_t i = 0; i < node_.equations.size(); ++i) {
            for (const auto& t : node_.equations[i].targets) eq_of[t] = i;
        }
        std::vector<std::vector<std::size_t>> deps(node_.equations.size());
        std::vector<std::vector<std::string>> via(node_.equations.size());
        for (std::size_t i = 0; i < node_.equations.size(); ++i) {
            std::vector<std::string> reads;
            instantaneous_reads(node_.equations[i].rhs, reads);
            for (const auto& r : reads) {
                auto it = eq_of.find(r);
                if (it != eq_of.end()) {
                    deps[i].push_back(it->second);
                    via[i].push_back(r);
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        std::vector<int> mark(node_.equations.size(), 0);
        std::vector<std::size_t> stack;
        std::function<void(std::size_t)> visit = [&](std::size_t i) {
            mark[i] = 1;
            stack.push_back(i);
            for (std::size_t k = 0; k < deps[i].size(); ++k) {
                std::size_t j = deps[i][k];
                if (mark[j] == 1) {
                    auto from = std::find(stack.begin(), stack.end(), j);
                    std::vector<std::string> cycle;
                    for (auto it = from; it != stack.end(); ++it) cycle.push_back(node_.equations[*it].targets.front());
                    std::string text;
                    for (const auto& s : cycle) text += s + " -> ";
                    text += cycle.front();
                    throw TypeCheckError(Kind::CausalityCycle, node_.equations[j].pos,
                                         "causality cycle in node '" + node_.name + "': " + text, cycle);
                }
                if (mark[j] == 0) visit(j);
            }
            stack.pop_back();
            mark[i] = 2;
            info_.schedule.push_back(i);
        };
        for (std::size_t i = 0; i < node_.equations.size(); ++i) {
            if (mark[i] == 0) visit(i);
        }
    }

    const Program& prog_;
    NodeDecl& node_;
    NodeInfo& info_;
    std::set<std::string> defined_;
};

}  // namespace

TypedProgram typecheck(Program p)
{
    TypedProgram tp;
    std::set<std::string> names;
    for (const auto& x : p.externs) {
        if (!names.insert(x.name).second) {
            throw TypeCheckError(Kind::MultiplyDefined, x.pos, "extern '" + x.name + "' declared twice", {x.name});
        }
    }
    for (const auto& n : p.nodes) {
        if (!names.insert(n.name).second) {
            throw TypeCheckError(Kind::MultiplyDefined, n.pos, "name '" + n.name + "' declared twice", {n.name});
        }
    }
    tp.program = std::move(p);
    for (auto& n : tp.program.nodes) {
        NodeChecker(tp.program, n, tp.nodes[n.name]).run();
    }
    // recursion check over the call graph
    std::map<std::string, int> mark;
    std::vector<std::string> stack;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        mark[n] = 1;
        stack.push_back(n);
        for (const auto& c : tp.nodes[n].callees) {
            if (mark[c] == 1) {
                std::vector<std::string> cycle(std::find(stack.begin(), stack.end(), c), stack.end());
                throw TypeCheckError(Kind::RecursiveNode, tp.program.find_node(c)->pos,
                                     "recursive node call involving '" + c + "'", cycle);
            }
            if (mark[c] == 0) visit(c);
        }
        stack.pop_back();
        mark[n] = 2;
    };
    for (const auto& n : tp.program.nodes) {
        if (mark[n.name] == 0) visit(n.name);
    }
    return tp;
}

}  // namespace dfv::lang
