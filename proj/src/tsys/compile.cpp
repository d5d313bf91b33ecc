#include <functional>
#include <map>
#include <set>

#include "dfv/tsys/tsys.hpp"

namespace dfv::tsys {

using lang::BinaryOp;
using lang::Expr;
using lang::NodeDecl;
using Op = Term::Op;

namespace {

struct Scope {
    const NodeDecl* node = nullptr;
    std::string prefix;
    std::vector<std::size_t> path;
    std::map<std::string, std::size_t> var_of;
    std::map<std::string, int> calls_to;  // how often each callee is called
    std::map<std::string, int> seen;      // occurrences instantiated so far
    std::size_t n_pre = 0;
    std::size_t n_arrow = 0;
    std::size_t n_call = 0;
};

Op op_of(BinaryOp b)
{
    switch (b) {
    case BinaryOp::Add: return Op::Add;
    case BinaryOp::Sub: return Op::Sub;
    case BinaryOp::Mul: return Op::Mul;
    case BinaryOp::Div: return Op::Div;
    case BinaryOp::Eq: return Op::Eq;
    case BinaryOp::Lt: return Op::Lt;
    case BinaryOp::Le: return Op::Le;
    case BinaryOp::And: return Op::And;
    case BinaryOp::Or: return Op::Or;
    case BinaryOp::Implies: return Op::Implies;
    default: break;
    }
    throw CompileError("unexpected operator");
}

class Compiler {
public:
    explicit Compiler(const lang::TypedProgram& p) : prog_(p) {}

    TransitionSystem run(const std::string& node)
    {
        const NodeDecl& n = prog_.node(node);
        ts_.node = node;
        instantiate(n, "", {}, {});
        for (const auto& pa : n.properties) {
            std::size_t v = ts_.find(pa.signal).value();
            ts_.properties.push_back({pa.signal, mk_var(v, Type::Bool)});
        }
        normalize();
        return std::move(ts_);
    }

private:
    std::size_t add_var(std::string name, Type t, VarKind k, bool top)
    {
        Var v;
        v.name = std::move(name);
        v.type = t;
        v.kind = k;
        v.top_level = top;
        ts_.vars.push_back(std::move(v));
        ts_.defs.emplace_back();
        return ts_.vars.size() - 1;
    }

    void instantiate(const NodeDecl& n, const std::string& prefix, const std::vector<std::size_t>& path,
                     const std::vector<TermRef>& args)
    {
        Scope s;
        s.node = &n;
        s.prefix = prefix;
        s.path = path;
        bool top = prefix.empty();
        auto count_calls = [&](const Expr& e) {
            lang::walk(e, [&](const Expr& x) {
                if (x.kind == Expr::Kind::NodeCall) ++s.calls_to[x.name];
            });
        };
        for (const auto& eq : n.equations) count_calls(eq.rhs);
        for (const auto& a : n.assertions) count_calls(a);

        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
            const auto& d = n.inputs[i];
            std::size_t v = add_var(prefix + d.name, d.type, top ? VarKind::Input : VarKind::Defined, top);
            if (!top) ts_.defs[v] = args[i];
            s.var_of[d.name] = v;
        }
        for (const auto* group : {&n.outputs, &n.locals}) {
            for (const auto& d : *group) s.var_of[d.name] = add_var(prefix + d.name, d.type, VarKind::Defined, top);
        }
        for (const auto& eq : n.equations) {
            if (eq.rhs.kind == Expr::Kind::NodeCall) {
                std::vector<std::size_t> outs = call(eq.rhs, s);
                for (std::size_t i = 0; i < eq.targets.size(); ++i) {
                    std::size_t t = s.var_of.at(eq.targets[i]);
                    ts_.defs[t] = mk_var(outs[i], ts_.vars[outs[i]].type);
                }
                continue;
            }
            if (eq.targets.size() != 1) throw CompileError("tuple equation without a node call");
            std::size_t t = s.var_of.at(eq.targets[0]);
            ts_.defs[t] = translate(eq.rhs, s);
        }
        for (const auto& a : n.assertions) ts_.assumptions.push_back(translate(a, s));
    }

    /// Instantiates a call; returns the callee's output variables.
    std::vector<std::size_t> call(const Expr& e, Scope& s)
    {
        std::vector<TermRef> args;
        for (const auto& a : e.args) args.push_back(translate(a, s));
        std::size_t child = s.n_call++;
        int occ = ++s.seen[e.name];
        std::string inst = e.name;
        if (s.calls_to[e.name] > 1) inst += "#" + std::to_string(occ);
        std::vector<std::size_t> path = s.path;
        path.push_back(child);
        const NodeDecl& callee = prog_.node(e.name);
        std::string prefix = s.prefix + inst + ".";
        instantiate(callee, prefix, path, args);
        std::vector<std::size_t> outs;
        for (const auto& d : callee.outputs) outs.push_back(ts_.find(prefix + d.name).value());
        return outs;
    }

    std::size_t state_var(Scope& s, Var::Site site, std::size_t idx, Type t)
    {
        std::string base = site == Var::Site::Pre ? "pre#" : "init#";
        std::size_t v = add_var(s.prefix + base + std::to_string(idx), t, VarKind::State, false);
        ts_.vars[v].site = site;
        ts_.vars[v].instance = s.path;
        ts_.vars[v].site_index = idx;
        return v;
    }

    TermRef translate(const Expr& e, Scope& s)
    {
        Type ty = e.type.value_or(Type::Bool);
        switch (e.kind) {
        case Expr::Kind::Literal: {
            Value v = e.literal;
            if (ty == Type::Real && v.type() == Type::Int) v = Value::real(v.as_number());
            return mk_const(v);
        }
        case Expr::Kind::Var: {
            std::size_t v = s.var_of.at(e.name);
            return mk_var(v, ts_.vars[v].type);
        }
        case Expr::Kind::Unary: {
            TermRef a = translate(e.args[0], s);
            return e.unary_op == lang::UnaryOp::Not ? mk_not(a) : mk_neg(a);
        }
        case Expr::Kind::Binary: {
            TermRef a = translate(e.args[0], s);
            TermRef b = translate(e.args[1], s);
            switch (e.binary_op) {
            case BinaryOp::Ne:
                return mk_not(mk_bin(Op::Eq, a, b));
            case BinaryOp::Gt:
                return mk_bin(Op::Lt, b, a);
            case BinaryOp::Ge:
                return mk_bin(Op::Le, b, a);
            case BinaryOp::Div:
                return mk_bin(a->sort == Type::Int ? Op::IntDiv : Op::Div, a, b);
            default:
                return mk_bin(op_of(e.binary_op), a, b);
            }
        }
        case Expr::Kind::Ite: {
            TermRef c = translate(e.args[0], s);
            TermRef t = translate(e.args[1], s);
            TermRef f = translate(e.args[2], s);
            return mk_ite(c, t, f);
        }
        case Expr::Kind::Arrow: {
            std::size_t flag = state_var(s, Var::Site::Arrow, s.n_arrow++, Type::Bool);
            ts_.defs[flag] = mk_bool(false);
            TermRef a = translate(e.args[0], s);
            TermRef b = translate(e.args[1], s);
            return mk_ite(mk_var(flag, Type::Bool), a, b);
        }
        case Expr::Kind::Pre: {
            std::size_t st = state_var(s, Var::Site::Pre, s.n_pre++, ty);
            ts_.defs[st] = translate(e.args[0], s);
            return mk_var(st, ty);
        }
        case Expr::Kind::NodeCall: {
            std::vector<std::size_t> outs = call(e, s);
            if (outs.size() != 1) throw CompileError("call to '" + e.name + "' used as a single value");
            return mk_var(outs[0], ts_.vars[outs[0]].type);
        }
        case Expr::Kind::ExternCall: {
            const auto* d = prog_.program.find_extern(e.name);
            if (!d) throw CompileError("unknown extern '" + e.name + "'");
            ExternSymbol sym{d->name, {}, d->result.type};
            for (const auto& p : d->params) sym.params.push_back(p.type);
            add_symbol(sym);
            std::vector<TermRef> args;
            for (const auto& a : e.args) args.push_back(translate(a, s));
            return mk_app(e.name, d->result.type, std::move(args));
        }
        }
        throw CompileError("unsupported construct");
    }

    void add_symbol(const ExternSymbol& sym)
    {
        for (const auto& x : ts_.externs) {
            if (x.name == sym.name) return;
        }
        ts_.externs.push_back(sym);
    }

    // Orders definitions, propagates constants, and turns the remaining
    // nonlinear products and quotients into extern symbols.
    void normalize()
    {
        std::vector<int> mark(ts_.vars.size(), 0);
        std::function<void(std::size_t)> visit = [&](std::size_t v) {
            if (ts_.vars[v].kind != VarKind::Defined || mark[v] == 2) return;
            if (mark[v] == 1) throw CompileError("instantaneous cycle through '" + ts_.vars[v].name + "'");
            mark[v] = 1;
            if (!ts_.defs[v]) throw CompileError("signal '" + ts_.vars[v].name + "' has no definition");
            std::vector<std::size_t> deps;
            collect_vars(ts_.defs[v], deps);
            for (std::size_t d : deps) visit(d);
            mark[v] = 2;
            ts_.def_order.push_back(v);
        };
        for (std::size_t v = 0; v < ts_.vars.size(); ++v) visit(v);

        for (std::size_t v : ts_.def_order) {
            ts_.defs[v] = lower(ts_.defs[v]);
            if (is_const(ts_.defs[v])) const_of_[v] = ts_.defs[v];
        }
        for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
            if (ts_.vars[v].kind == VarKind::State) ts_.defs[v] = lower(ts_.defs[v]);
        }
        for (auto& a : ts_.assumptions) a = lower(a);
        for (auto& p : ts_.properties) p.formula = lower(p.formula);
    }

    TermRef lower(const TermRef& t)
    {
        if (t->op == Op::Var) {
            auto it = const_of_.find(t->var);
            return it == const_of_.end() ? t : it->second;
        }
        if (t->op == Op::Const) return t;
        std::vector<TermRef> a;
        for (const auto& x : t->args) a.push_back(lower(x));
        switch (t->op) {
        case Op::Not:
            return mk_not(a[0]);
        case Op::Neg:
            return mk_neg(a[0]);
        case Op::Ite:
            return mk_ite(a[0], a[1], a[2]);
        case Op::App:
            return mk_app(t->fn, t->sort, std::move(a));
        case Op::Mul:
            if (is_const(a[0]) || is_const(a[1])) return mk_bin(Op::Mul, a[0], a[1]);
            return nonlinear(t->sort == Type::Int ? "nlmul_int" : "nlmul_real", t->sort, a);
        case Op::Div:
            if (is_const(a[1]) && !a[1]->value.as_number().is_zero()) {
                return mk_bin(Op::Mul, a[0], mk_const(Value::real(Rational(1) / a[1]->value.as_number())));
            }
            return nonlinear("nldiv_real", Type::Real, a);
        case Op::IntDiv:
            if (is_const(a[1]) && !a[1]->value.as_number().is_zero()) return mk_bin(Op::IntDiv, a[0], a[1]);
            return nonlinear("nldiv_int", Type::Int, a);
        default:
            return mk_bin(t->op, a[0], a[1]);
        }
    }

    TermRef nonlinear(const std::string& fn, Type sort, std::vector<TermRef> args)
    {
        add_symbol({fn, {sort, sort}, sort});
        return mk_app(fn, sort, std::move(args));
    }

    const lang::TypedProgram& prog_;
    TransitionSystem ts_;
    std::map<std::size_t, TermRef> const_of_;
};

}  // namespace

TransitionSystem compile(const lang::TypedProgram& p, const std::string& node)
{
    if (!p.program.find_node(node)) throw CompileError("unknown node '" + node + "'");
    return Compiler(p).run(node);
}

}  // namespace dfv::tsys
