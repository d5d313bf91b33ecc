#include <set>

#include "internal.hpp"

namespace dfv::engine {

using tsys::TermRef;
using tsys::TransitionSystem;
using tsys::VarKind;

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Falsified: return "Falsified";
    case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

const char* to_string(UnknownReason r)
{
    switch (r) {
    case UnknownReason::KMaxReached: return "KMaxReached";
    case UnknownReason::Timeout: return "Timeout";
    case UnknownReason::SolverError: return "SolverError";
    case UnknownReason::NonlinearSpurious: return "NonlinearSpurious";
    }
    return "SolverError";
}

std::string logic_for(const TransitionSystem& ts)
{
    bool has_int = false;
    bool has_real = false;
    auto note = [&](Type t) {
        has_int = has_int || t == Type::Int;
        has_real = has_real || t == Type::Real;
    };
    for (const auto& v : ts.vars) note(v.type);
    for (const auto& e : ts.externs) {
        note(e.result);
        for (Type t : e.params) note(t);
    }
    std::string arith = has_int && has_real ? "LIRA" : has_int ? "LIA" : has_real ? "LRA" : "";
    if (!ts.externs.empty()) return "QF_UF" + arith;
    return arith.empty() ? "QF_UF" : "QF_" + arith;
}

namespace detail {

std::string Unroller::at(const TermRef& t, std::size_t i) const
{
    return tsys::to_smt(t, [&](std::size_t v, bool next) { return tsys::smt_name(ts_, v, next ? i + 1 : i); });
}

void Unroller::add_step(std::size_t i)
{
    if (i == 0) {
        for (const auto& e : ts_.externs) {
            std::string d = "(declare-fun " + e.name + " (";
            for (std::size_t k = 0; k < e.params.size(); ++k) d += (k ? " " : "") + tsys::smt_sort(e.params[k]);
            s_.command(d + ") " + tsys::smt_sort(e.result) + ")");
        }
    }
    for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
        s_.command("(declare-const " + tsys::smt_name(ts_, v, i) + " " + tsys::smt_sort(ts_.vars[v].type) + ")");
    }
    for (std::size_t v : ts_.def_order) {
        s_.command("(assert (= " + tsys::smt_name(ts_, v, i) + " " + at(ts_.defs[v], i) + "))");
    }
    if (i > 0) {
        for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
            if (ts_.vars[v].kind == VarKind::State) {
                s_.command("(assert (= " + tsys::smt_name(ts_, v, i) + " " + at(ts_.defs[v], i - 1) + "))");
            }
        }
    }
    steps_ = std::max(steps_, i + 1);
}

void Unroller::assert_init()
{
    for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
        if (ts_.vars[v].site == tsys::Var::Site::Arrow) s_.command("(assert " + tsys::smt_name(ts_, v, 0) + ")");
    }
}

void Unroller::assert_assumptions(std::size_t i)
{
    for (const auto& a : ts_.assumptions) s_.command("(assert " + at(a, i) + ")");
}

std::string Unroller::distinct(std::size_t i, std::size_t j) const
{
    std::string s = "(or false";
    for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
        if (ts_.vars[v].kind != VarKind::State) continue;
        s += " (not (= " + tsys::smt_name(ts_, v, i) + " " + tsys::smt_name(ts_, v, j) + "))";
    }
    return s + ")";
}

void Unroller::read_model(std::size_t last, std::vector<std::map<std::string, Value>>& inputs,
                          std::map<std::string, Value>& initial)
{
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> which;  // (step, var)
    for (std::size_t i = 0; i <= last; ++i) {
        for (std::size_t v = 0; v < ts_.vars.size(); ++v) {
            bool want = ts_.vars[v].kind == VarKind::Input || (i == 0 && ts_.vars[v].site == tsys::Var::Site::Pre);
            if (!want) continue;
            names.push_back(tsys::smt_name(ts_, v, i));
            which.emplace_back(i, v);
        }
    }
    auto vals = s_.get_values(names);
    inputs.assign(last + 1, {});
    for (std::size_t k = 0; k < vals.size(); ++k) {
        auto [i, v] = which[k];
        Value x;
        try {
            x = parse_smt_value(vals[k], ts_.vars[v].type);
        } catch (const std::exception& e) {
            throw SolverError(std::string("cannot read model value: ") + e.what());
        }
        if (ts_.vars[v].kind == VarKind::Input) {
            inputs[i][ts_.vars[v].name] = x;
        } else {
            initial[ts_.vars[v].name] = x;
        }
    }
}

bool confirm(const TransitionSystem& full, const std::string& prop_id,
             const std::vector<std::map<std::string, Value>>& inputs, const std::map<std::string, Value>& initial,
             const tsys::ExternTable* externs, VerifyResult& out, std::string& why)
{
    std::size_t n = inputs.size();
    interp::Trace in;
    for (std::size_t v : full.of_kind(VarKind::Input)) {
        const auto& var = full.vars[v];
        in.add_signal(var.name, var.type);
        for (std::size_t i = 0; i < n; ++i) {
            auto it = inputs[i].find(var.name);
            in.append(var.name, it == inputs[i].end() ? Value::default_of(var.type) : it->second);
        }
    }
    std::map<std::size_t, Value> init;
    for (std::size_t v = 0; v < full.vars.size(); ++v) {
        if (full.vars[v].site != tsys::Var::Site::Pre) continue;
        auto it = initial.find(full.vars[v].name);
        init[v] = it == initial.end() ? Value::default_of(full.vars[v].type) : it->second;
    }
    std::vector<tsys::Assignment> run;
    try {
        run = tsys::run(full, in, n, init, externs);
    } catch (const tsys::TermEvalError& e) {
        why = e.what();
        return false;
    }
    const TermRef& prop = full.property(prop_id).formula;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& a : full.assumptions) {
            if (!tsys::evaluate(a, run[i], nullptr, externs).as_bool()) {
                why = "assumptions fail at step " + std::to_string(i) + " under concrete semantics";
                return false;
            }
        }
        if (!tsys::evaluate(prop, run[i], nullptr, externs).as_bool()) {
            run.resize(i + 1);
            out = VerifyResult{};
            out.verdict = Verdict::Falsified;
            out.step = i;
            out.trace = tsys::concretize(full, run);
            for (const auto& [v, val] : init) out.initial[full.vars[v].name] = val;
            return true;
        }
    }
    why = "property holds under concrete semantics";
    return false;
}

void conjuncts(const TermRef& t, std::vector<TermRef>& out)
{
    if (t->op == tsys::Term::Op::And) {
        conjuncts(t->args[0], out);
        conjuncts(t->args[1], out);
        return;
    }
    if (t->op == tsys::Term::Op::Const && t->value.as_bool()) return;
    out.push_back(t);
}

}  // namespace detail

namespace {

using detail::Unroller;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

VerifyResult unknown(UnknownReason r, std::string detail = {}, int k = 0)
{
    VerifyResult out;
    out.verdict = Verdict::Unknown;
    out.reason = r;
    out.detail = std::move(detail);
    out.k = k;
    return out;
}

// Base-case driver: grows one unrolling from init and asks at each new depth
// whether the property can fail there.
class BaseCase {
public:
    BaseCase(const TransitionSystem& full, const TransitionSystem& ts, const std::string& prop, const EngineConfig& cfg,
             Clock::time_point deadline)
        : full_(full), ts_(ts), prop_(prop), cfg_(cfg),
          solver_(cfg.solver_command, logic_for(ts), deadline, cfg.incremental), un_(ts, solver_)
    {
    }

    /// Checks depth `d` (depths are checked in order). Returns a result when
    /// the search must stop at this depth.
    std::optional<VerifyResult> check(std::size_t d)
    {
        un_.add_step(d);
        if (d == 0) un_.assert_init();
        un_.assert_assumptions(d);
        const TermRef& p = ts_.property(prop_).formula;
        solver_.push();
        solver_.command("(assert (not " + un_.at(p, d) + "))");
        auto r = solver_.check();
        std::optional<VerifyResult> out;
        if (r == Solver::Result::Sat) {
            std::vector<std::map<std::string, Value>> inputs;
            std::map<std::string, Value> initial;
            un_.read_model(d, inputs, initial);
            VerifyResult f;
            std::string why;
            if (detail::confirm(full_, prop_, inputs, initial, &cfg_.externs, f, why)) {
                out = std::move(f);
            } else if (!ts_.externs.empty()) {
                std::string syms;
                for (const auto& e : ts_.externs) syms += (syms.empty() ? "" : ", ") + e.name;
                out = unknown(UnknownReason::NonlinearSpurious,
                              "counterexample at step " + std::to_string(d) + " relies on uninterpreted " + syms + " ("
                                  + why + "); add assertions refining these functions",
                              static_cast<int>(d));
            } else {
                out = unknown(UnknownReason::SolverError, "counterexample failed concrete replay: " + why);
            }
        } else if (r == Solver::Result::Unknown) {
            out = unknown(UnknownReason::SolverError, "solver answered unknown at depth " + std::to_string(d));
        }
        solver_.pop();
        if (!out) solver_.command("(assert " + un_.at(p, d) + ")");
        return out;
    }

private:
    const TransitionSystem& full_;
    const TransitionSystem& ts_;
    const std::string& prop_;
    const EngineConfig& cfg_;
    Solver solver_;
    Unroller un_;
};

VerifyResult finish(VerifyResult r, Clock::time_point t0)
{
    r.time_ms = ms_since(t0);
    return r;
}

template <class F>
VerifyResult guarded(Clock::time_point t0, F&& body)
{
    try {
        return finish(body(), t0);
    } catch (const SolverTimeout&) {
        return finish(unknown(UnknownReason::Timeout, "timeout"), t0);
    } catch (const SolverError& e) {
        return finish(unknown(UnknownReason::SolverError, e.what()), t0);
    }
}

}  // namespace

VerifyResult bmc(const TransitionSystem& ts, const std::string& prop_id, int k, const EngineConfig& cfg)
{
    auto t0 = Clock::now();
    (void)ts.property(prop_id);
    if (cfg.oracle_mode) {
        if (!oracle_applies(ts)) {
            return finish(unknown(UnknownReason::SolverError, "oracle mode needs a small boolean-only system"), t0);
        }
        return finish(oracle_bmc(ts, prop_id, k), t0);
    }
    TransitionSystem sliced = cfg.slice ? tsys::slice(ts, prop_id) : ts;
    auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout));
    return guarded(t0, [&]() -> VerifyResult {
        BaseCase base(ts, sliced, prop_id, cfg, deadline);
        for (int d = 0; d <= k; ++d) {
            if (auto r = base.check(static_cast<std::size_t>(d))) return *r;
        }
        return unknown(UnknownReason::KMaxReached, "no counterexample up to depth " + std::to_string(k), k);
    });
}

VerifyResult kinduction(const TransitionSystem& ts, const std::string& prop_id, const EngineConfig& cfg)
{
    auto t0 = Clock::now();
    (void)ts.property(prop_id);
    if (cfg.k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    if (cfg.oracle_mode) {
        if (!oracle_applies(ts)) {
            return finish(unknown(UnknownReason::SolverError, "oracle mode needs a small boolean-only system"), t0);
        }
        return finish(oracle_kinduction(ts, prop_id, cfg.k_max), t0);
    }
    TransitionSystem sliced = cfg.slice ? tsys::slice(ts, prop_id) : ts;
    auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout));
    return guarded(t0, [&]() -> VerifyResult {
        std::vector<InvariantCandidate> invs;
        if (cfg.use_invariants) {
            std::vector<interp::Trace> traces = cfg.sim_traces;
            if (traces.empty()) traces = sample_traces(sliced, 20, 40, 1, &cfg.externs);
            EngineConfig icfg = cfg;
            icfg.timeout = std::max(1.0, std::chrono::duration<double>(deadline - Clock::now()).count());
            invs = generate_invariants(sliced, traces, icfg);
        }
        BaseCase base(ts, sliced, prop_id, cfg, deadline);
        Solver step(cfg.solver_command, logic_for(sliced), deadline, cfg.incremental);
        Unroller su(sliced, step);
        const TermRef& p = sliced.property(prop_id).formula;
        auto add_window_step = [&](std::size_t i) {
            su.add_step(i);
            su.assert_assumptions(i);
            for (const auto& inv : invs) step.command("(assert " + su.at(inv.formula, i) + ")");
            if (cfg.path_compression) {
                for (std::size_t j = 0; j < i; ++j) step.command("(assert " + su.distinct(j, i) + ")");
            }
        };
        add_window_step(0);
        for (int k = 1; k <= cfg.k_max; ++k) {
            if (auto r = base.check(static_cast<std::size_t>(k - 1))) return *r;
            // window 0..k, property assumed on 0..k-1
            step.command("(assert " + su.at(p, static_cast<std::size_t>(k - 1)) + ")");
            add_window_step(static_cast<std::size_t>(k));
            step.push();
            step.command("(assert (not " + su.at(p, static_cast<std::size_t>(k)) + "))");
            auto r = step.check();
            step.pop();
            if (r == Solver::Result::Unsat) {
                VerifyResult v;
                v.verdict = Verdict::Valid;
                v.k = k;
                for (const auto& inv : invs) v.invariants_used.push_back(inv.text);
                return v;
            }
        }
        // the base case covers depth k_max too, so a shallow enough violation is never missed
        if (auto r = base.check(static_cast<std::size_t>(cfg.k_max))) return *r;
        return unknown(UnknownReason::KMaxReached, "not " + std::to_string(cfg.k_max) + "-inductive", cfg.k_max);
    });
}

}  // namespace dfv::engine
