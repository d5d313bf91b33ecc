#include <algorithm>
#include <set>
#include <sstream>

#include "dfv/tsys/tsys.hpp"

namespace dfv::tsys {

using Op = Term::Op;

std::optional<std::size_t> TransitionSystem::find(const std::string& name) const
{
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == name) return i;
    }
    return std::nullopt;
}

const Property& TransitionSystem::property(const std::string& id) const
{
    for (const auto& p : properties) {
        if (p.id == id) return p;
    }
    throw std::out_of_range("no property '" + id + "' in node '" + node + "'");
}

std::vector<std::size_t> TransitionSystem::of_kind(VarKind k) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].kind == k) out.push_back(i);
    }
    return out;
}

TermRef TransitionSystem::step_constraint(bool next) const
{
    std::vector<TermRef> parts;
    for (std::size_t v : def_order) {
        TermRef d = next ? shift(defs[v]) : defs[v];
        parts.push_back(mk_bin(Op::Eq, mk_var(v, vars[v].type, next), d));
    }
    return mk_and(parts);
}

TermRef TransitionSystem::init() const
{
    std::vector<TermRef> parts;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].site == Var::Site::Arrow) parts.push_back(mk_var(v, Type::Bool));
    }
    parts.push_back(step_constraint(false));
    return mk_and(parts);
}

TermRef TransitionSystem::trans() const
{
    std::vector<TermRef> parts;
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].kind == VarKind::State) parts.push_back(mk_bin(Op::Eq, mk_var(v, vars[v].type, true), defs[v]));
    }
    parts.push_back(step_constraint(true));
    return mk_and(parts);
}

TransitionSystem slice(const TransitionSystem& ts, const std::string& prop_id)
{
    const Property& prop = ts.property(prop_id);
    std::vector<char> keep(ts.vars.size(), 0);
    std::vector<std::size_t> work;
    collect_vars(prop.formula, work);
    for (const auto& a : ts.assumptions) collect_vars(a, work);
    while (!work.empty()) {
        std::size_t v = work.back();
        work.pop_back();
        if (keep[v]) continue;
        keep[v] = 1;
        if (ts.defs[v]) collect_vars(ts.defs[v], work);
    }

    std::vector<std::size_t> remap(ts.vars.size(), 0);
    TransitionSystem out;
    out.node = ts.node;
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        if (!keep[v]) continue;
        remap[v] = out.vars.size();
        out.vars.push_back(ts.vars[v]);
    }
    auto re = [&](const TermRef& t) {
        return substitute(t, [&](const Term& x) { return mk_var(remap[x.var], x.sort, x.next); });
    };
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        if (keep[v]) out.defs.push_back(ts.defs[v] ? re(ts.defs[v]) : nullptr);
    }
    for (std::size_t v : ts.def_order) {
        if (keep[v]) out.def_order.push_back(remap[v]);
    }
    for (const auto& a : ts.assumptions) out.assumptions.push_back(re(a));
    out.properties.push_back({prop.id, re(prop.formula)});

    std::set<std::string> used;
    std::function<void(const TermRef&)> apps = [&](const TermRef& t) {
        if (t->op == Op::App) used.insert(t->fn);
        for (const auto& a : t->args) apps(a);
    };
    for (const auto& d : out.defs) {
        if (d) apps(d);
    }
    for (const auto& a : out.assumptions) apps(a);
    apps(out.properties[0].formula);
    for (const auto& e : ts.externs) {
        if (used.count(e.name)) out.externs.push_back(e);
    }
    return out;
}

namespace {

bool shown(const Var& v, bool internal) { return v.kind != VarKind::State && (v.top_level || internal); }

}  // namespace

interp::Trace concretize(const TransitionSystem& ts, const std::vector<std::map<std::string, Value>>& steps,
                         bool internal)
{
    interp::Trace t;
    for (const auto& v : ts.vars) {
        if (shown(v, internal)) t.add_signal(v.name, v.type);
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (const auto& v : ts.vars) {
            auto it = steps[i].find(v.name);
            if (it == steps[i].end()) {
                throw std::invalid_argument("assignment for step " + std::to_string(i) + " lacks variable '" + v.name + "'");
            }
            if (shown(v, internal)) t.append(v.name, it->second);
        }
    }
    return t;
}

interp::Trace concretize(const TransitionSystem& ts, const std::vector<Assignment>& steps, bool internal)
{
    interp::Trace t;
    for (const auto& v : ts.vars) {
        if (shown(v, internal)) t.add_signal(v.name, v.type);
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].size() != ts.vars.size()) {
            throw std::invalid_argument("assignment for step " + std::to_string(i) + " has the wrong size");
        }
        for (std::size_t v = 0; v < ts.vars.size(); ++v) {
            if (shown(ts.vars[v], internal)) t.append(ts.vars[v].name, steps[i][v]);
        }
    }
    return t;
}

void define(const TransitionSystem& ts, Assignment& a, const ExternTable* externs)
{
    for (std::size_t v : ts.def_order) a[v] = evaluate(ts.defs[v], a, nullptr, externs);
}

void advance(const TransitionSystem& ts, const Assignment& cur, Assignment& next, const ExternTable* externs)
{
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        if (ts.vars[v].kind == VarKind::State) next[v] = evaluate(ts.defs[v], cur, nullptr, externs);
    }
}

std::vector<Assignment> run(const TransitionSystem& ts, const interp::Trace& inputs, std::size_t n,
                            const std::map<std::size_t, Value>& initial, const ExternTable* externs)
{
    std::vector<Assignment> out;
    Assignment cur(ts.vars.size());
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        const Var& x = ts.vars[v];
        if (x.site == Var::Site::Arrow) {
            cur[v] = Value::boolean(true);
        } else if (x.site == Var::Site::Pre) {
            auto it = initial.find(v);
            cur[v] = it == initial.end() ? Value::default_of(x.type) : it->second;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t v = 0; v < ts.vars.size(); ++v) {
            if (ts.vars[v].kind == VarKind::Input) cur[v] = inputs.at(ts.vars[v].name, i);
        }
        define(ts, cur, externs);
        out.push_back(cur);
        if (i + 1 < n) {
            Assignment next(ts.vars.size());
            advance(ts, cur, next, externs);
            cur = std::move(next);
        }
    }
    return out;
}

interp::NodeState seed_state(const TransitionSystem& ts, const lang::TypedProgram& p, const Assignment& step0)
{
    interp::NodeState st = interp::init_state(p, ts.node);
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        const Var& x = ts.vars[v];
        if (x.site != Var::Site::Pre) continue;
        interp::NodeState* s = &st;
        for (std::size_t c : x.instance) s = &s->children.at(c);
        s->pre.at(x.site_index) = step0[v];
    }
    return st;
}

std::string smt_name(const TransitionSystem& ts, std::size_t var, std::size_t step)
{
    return "|" + ts.vars[var].name + "@" + std::to_string(step) + "|";
}

std::string dump_smt(const TransitionSystem& ts)
{
    std::ostringstream os;
    auto name = [&](std::size_t v, bool next) { return "|" + ts.vars[v].name + (next ? "'" : "") + "|"; };
    os << "; node " << ts.node << "\n";
    for (const auto& e : ts.externs) {
        os << "(declare-fun " << e.name << " (";
        for (std::size_t i = 0; i < e.params.size(); ++i) os << (i ? " " : "") << smt_sort(e.params[i]);
        os << ") " << smt_sort(e.result) << ")\n";
    }
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        const char* kind = ts.vars[v].kind == VarKind::Input ? "input" : ts.vars[v].kind == VarKind::State ? "state" : "defined";
        for (bool next : {false, true}) {
            os << "(declare-fun " << name(v, next) << " () " << smt_sort(ts.vars[v].type) << ")";
            if (!next) os << " ; " << kind;
            os << "\n";
        }
    }
    os << "(define-fun init () Bool " << to_smt(ts.init(), name) << ")\n";
    os << "(define-fun trans () Bool " << to_smt(ts.trans(), name) << ")\n";
    for (std::size_t i = 0; i < ts.assumptions.size(); ++i) {
        os << "(define-fun |assumption#" << i << "| () Bool " << to_smt(ts.assumptions[i], name) << ")\n";
    }
    for (const auto& p : ts.properties) {
        os << "(define-fun |property:" << p.id << "| () Bool " << to_smt(p.formula, name) << ")\n";
    }
    return os.str();
}

}  // namespace dfv::tsys
