#include "dfv/tsys/term.hpp"

#include <optional>
#include <sstream>

namespace dfv::tsys {

using Op = Term::Op;

namespace {

Value number(Type t, Rational r)
{
    return t == Type::Int ? Value::integer(std::move(r)) : Value::real(std::move(r));
}

bool result_is_bool(Op op)
{
    switch (op) {
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Not:
        return true;
    default:
        return false;
    }
}

bool is_true(const TermRef& t) { return t->op == Op::Const && t->value.type() == Type::Bool && t->value.as_bool(); }
bool is_false(const TermRef& t) { return t->op == Op::Const && t->value.type() == Type::Bool && !t->value.as_bool(); }

TermRef make(Op op, Type sort, std::vector<TermRef> args)
{
    auto t = std::make_shared<Term>();
    t->op = op;
    t->sort = sort;
    t->args = std::move(args);
    return t;
}

// Applies a binary operator to constants; returns nullopt when folding would
// hide a runtime error (division by zero).
std::optional<Value> fold(Op op, Type sort, const Value& a, const Value& b)
{
    switch (op) {
    case Op::Add:
        return number(sort, a.as_number() + b.as_number());
    case Op::Sub:
        return number(sort, a.as_number() - b.as_number());
    case Op::Mul:
        return number(sort, a.as_number() * b.as_number());
    case Op::Div:
        if (b.as_number().is_zero()) return std::nullopt;
        return number(sort, a.as_number() / b.as_number());
    case Op::IntDiv:
        if (b.as_number().is_zero()) return std::nullopt;
        return number(sort, Rational::euclid_div(a.as_number(), b.as_number()));
    case Op::Eq:
        return Value::boolean(a == b);
    case Op::Lt:
        return Value::boolean(a.as_number() < b.as_number());
    case Op::Le:
        return Value::boolean(a.as_number() <= b.as_number());
    case Op::And:
        return Value::boolean(a.as_bool() && b.as_bool());
    case Op::Or:
        return Value::boolean(a.as_bool() || b.as_bool());
    case Op::Implies:
        return Value::boolean(!a.as_bool() || b.as_bool());
    default:
        return std::nullopt;
    }
}

}  // namespace

TermRef mk_const(Value v)
{
    auto t = std::make_shared<Term>();
    t->op = Op::Const;
    t->sort = v.type();
    t->value = std::move(v);
    return t;
}

TermRef mk_bool(bool b) { return mk_const(Value::boolean(b)); }

TermRef mk_var(std::size_t var, Type sort, bool next)
{
    auto t = std::make_shared<Term>();
    t->op = Op::Var;
    t->sort = sort;
    t->var = var;
    t->next = next;
    return t;
}

TermRef mk_not(TermRef a)
{
    if (a->op == Op::Const) return mk_bool(!a->value.as_bool());
    if (a->op == Op::Not) return a->args[0];
    return make(Op::Not, Type::Bool, {std::move(a)});
}

TermRef mk_neg(TermRef a)
{
    if (a->op == Op::Const) return mk_const(number(a->sort, -a->value.as_number()));
    Type sort = a->sort;
    return make(Op::Neg, sort, {std::move(a)});
}

TermRef mk_bin(Op op, TermRef a, TermRef b)
{
    Type sort = result_is_bool(op) ? Type::Bool : a->sort;
    if (a->op == Op::Const && b->op == Op::Const) {
        if (auto v = fold(op, sort, a->value, b->value)) return mk_const(*v);
    }
    switch (op) {
    case Op::And:
        if (is_true(a)) return b;
        if (is_true(b)) return a;
        if (is_false(a) || is_false(b)) return mk_bool(false);
        break;
    case Op::Or:
        if (is_false(a)) return b;
        if (is_false(b)) return a;
        if (is_true(a) || is_true(b)) return mk_bool(true);
        break;
    case Op::Implies:
        if (is_true(a)) return b;
        if (is_false(a) || is_true(b)) return mk_bool(true);
        break;
    default:
        break;
    }
    return make(op, sort, {std::move(a), std::move(b)});
}

TermRef mk_ite(TermRef c, TermRef t, TermRef e)
{
    if (c->op == Op::Const) return c->value.as_bool() ? t : e;
    Type sort = t->sort;
    return make(Op::Ite, sort, {std::move(c), std::move(t), std::move(e)});
}

TermRef mk_app(std::string fn, Type sort, std::vector<TermRef> args)
{
    auto t = make(Op::App, sort, std::move(args));
    std::const_pointer_cast<Term>(t)->fn = std::move(fn);
    return t;
}

TermRef mk_and(const std::vector<TermRef>& parts)
{
    TermRef acc = mk_bool(true);
    for (const auto& p : parts) acc = mk_bin(Op::And, acc, p);
    return acc;
}

bool is_const(const TermRef& t) { return t->op == Op::Const; }

void collect_vars(const TermRef& t, std::vector<std::size_t>& out, bool include_next)
{
    if (t->op == Op::Var) {
        if (!t->next || include_next) out.push_back(t->var);
        return;
    }
    for (const auto& a : t->args) collect_vars(a, out, include_next);
}

bool mentions_app(const TermRef& t)
{
    if (t->op == Op::App) return true;
    for (const auto& a : t->args) {
        if (mentions_app(a)) return true;
    }
    return false;
}

TermRef substitute(const TermRef& t, const std::function<TermRef(const Term&)>& f)
{
    if (t->op == Op::Var) {
        TermRef r = f(*t);
        return r ? r : t;
    }
    if (t->op == Op::Const) return t;
    std::vector<TermRef> args;
    args.reserve(t->args.size());
    bool changed = false;
    for (const auto& a : t->args) {
        args.push_back(substitute(a, f));
        changed = changed || args.back() != a;
    }
    if (!changed) return t;
    switch (t->op) {
    case Op::Not:
        return mk_not(args[0]);
    case Op::Neg:
        return mk_neg(args[0]);
    case Op::Ite:
        return mk_ite(args[0], args[1], args[2]);
    case Op::App:
        return mk_app(t->fn, t->sort, std::move(args));
    default:
        return mk_bin(t->op, args[0], args[1]);
    }
}

TermRef shift(const TermRef& t)
{
    return substitute(t, [](const Term& v) { return mk_var(v.var, v.sort, true); });
}

Value evaluate(const TermRef& t, const std::vector<Value>& cur, const std::vector<Value>* next,
               const ExternTable* externs)
{
    auto ev = [&](const TermRef& a) { return evaluate(a, cur, next, externs); };
    switch (t->op) {
    case Op::Const:
        return t->value;
    case Op::Var:
        if (t->next) {
            if (!next) throw TermEvalError("successor-step variable in a single-step context");
            return (*next)[t->var];
        }
        return cur[t->var];
    case Op::Not:
        return Value::boolean(!ev(t->args[0]).as_bool());
    case Op::Neg:
        return number(t->sort, -ev(t->args[0]).as_number());
    case Op::And:
        return Value::boolean(ev(t->args[0]).as_bool() && ev(t->args[1]).as_bool());
    case Op::Or:
        return Value::boolean(ev(t->args[0]).as_bool() || ev(t->args[1]).as_bool());
    case Op::Implies:
        return Value::boolean(!ev(t->args[0]).as_bool() || ev(t->args[1]).as_bool());
    case Op::Ite:
        return ev(t->args[0]).as_bool() ? ev(t->args[1]) : ev(t->args[2]);
    case Op::App: {
        std::vector<Value> args;
        for (const auto& a : t->args) args.push_back(ev(a));
        if (t->fn == "nlmul_real" || t->fn == "nlmul_int") return number(t->sort, args[0].as_number() * args[1].as_number());
        if (t->fn == "nldiv_real" || t->fn == "nldiv_int") {
            if (args[1].as_number().is_zero()) throw TermEvalError("division by zero");
            return number(t->sort, t->fn == "nldiv_int" ? Rational::euclid_div(args[0].as_number(), args[1].as_number())
                                                         : args[0].as_number() / args[1].as_number());
        }
        if (externs) {
            auto it = externs->find(t->fn);
            if (it != externs->end()) return it->second(args);
        }
        throw TermEvalError("no concrete semantics registered for extern '" + t->fn + "'");
    }
    default: {
        Value a = ev(t->args[0]);
        Value b = ev(t->args[1]);
        if ((t->op == Op::Div || t->op == Op::IntDiv) && b.as_number().is_zero()) {
            throw TermEvalError("division by zero");
        }
        return *fold(t->op, t->sort, a, b);
    }
    }
}

std::string smt_sort(Type t)
{
    switch (t) {
    case Type::Bool:
        return "Bool";
    case Type::Int:
        return "Int";
    case Type::Real:
        return "Real";
    }
    return "Bool";
}

std::string smt_literal(const Value& v)
{
    if (v.type() == Type::Bool) return v.as_bool() ? "true" : "false";
    const Rational& r = v.as_number();
    bool neg = r.sign() < 0;
    Rational a = neg ? -r : r;
    std::string body;
    if (v.type() == Type::Int) {
        body = a.numerator_str();
    } else if (a.is_integer()) {
        body = a.numerator_str() + ".0";
    } else {
        body = "(/ " + a.numerator_str() + ".0 " + a.denominator_str() + ".0)";
    }
    return neg ? "(- " + body + ")" : body;
}

std::string to_smt(const TermRef& t, const std::function<std::string(std::size_t, bool)>& name)
{
    auto sub = [&](std::size_t i) { return to_smt(t->args[i], name); };
    switch (t->op) {
    case Op::Const:
        return smt_literal(t->value);
    case Op::Var:
        return name(t->var, t->next);
    case Op::Not:
        return "(not " + sub(0) + ")";
    case Op::Neg:
        return "(- " + sub(0) + ")";
    case Op::Ite:
        return "(ite " + sub(0) + " " + sub(1) + " " + sub(2) + ")";
    case Op::App: {
        std::string s = "(" + t->fn;
        for (std::size_t i = 0; i < t->args.size(); ++i) s += " " + sub(i);
        return s + ")";
    }
    default:
        break;
    }
    const char* f = "";
    switch (t->op) {
    case Op::Add: f = "+"; break;
    case Op::Sub: f = "-"; break;
    case Op::Mul: f = "*"; break;
    case Op::Div: f = "/"; break;
    case Op::IntDiv: f = "div"; break;
    case Op::Eq: f = "="; break;
    case Op::Lt: f = "<"; break;
    case Op::Le: f = "<="; break;
    case Op::And: f = "and"; break;
    case Op::Or: f = "or"; break;
    case Op::Implies: f = "=>"; break;
    default: break;
    }
    return std::string("(") + f + " " + sub(0) + " " + sub(1) + ")";
}

}  // namespace dfv::tsys
