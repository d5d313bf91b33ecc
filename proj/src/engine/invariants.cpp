#include <algorithm>
#include <random>
#include <atomic>
#include <set>
#include <thread>

#include "dfv/interp/random_sim.hpp"
#include "internal.hpp"

namespace dfv::engine {

using tsys::Term;
using tsys::TermRef;
using tsys::TransitionSystem;
using tsys::VarKind;
using Op = Term::Op;

namespace {

constexpr std::size_t kMaxBoolVars = 40;

// Conjuncts of the assumptions that read exactly one input and nothing else.
std::map<std::size_t, std::vector<TermRef>> input_filters(const TransitionSystem& ts)
{
    std::map<std::size_t, std::vector<TermRef>> out;
    for (const auto& a : ts.assumptions) {
        std::vector<TermRef> parts;
        detail::conjuncts(a, parts);
        for (const auto& c : parts) {
            std::vector<std::size_t> vs;
            tsys::collect_vars(c, vs);
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            if (vs.size() == 1 && ts.vars[vs[0]].kind == VarKind::Input && !tsys::mentions_app(c)) {
                out[vs[0]].push_back(c);
            }
        }
    }
    return out;
}

}  // namespace

std::vector<interp::Trace> sample_traces(const TransitionSystem& ts, std::size_t count, std::size_t length,
                                         std::uint64_t seed, const tsys::ExternTable* externs)
{
    std::vector<interp::Trace> out;
    auto inputs = ts.of_kind(VarKind::Input);
    auto filters = input_filters(ts);
    for (std::size_t t = 0; t < count; ++t) {
        std::mt19937_64 rng(seed * 7919 + t);
        interp::Trace tr;
        for (std::size_t v : inputs) tr.add_signal(ts.vars[v].name, ts.vars[v].type);
        tsys::Assignment cur(ts.vars.size());
        for (std::size_t v = 0; v < ts.vars.size(); ++v) {
            if (ts.vars[v].site == tsys::Var::Site::Arrow) cur[v] = Value::boolean(true);
            if (ts.vars[v].site == tsys::Var::Site::Pre) cur[v] = Value::default_of(ts.vars[v].type);
        }
        try {
            for (std::size_t step = 0; step < length; ++step) {
                bool ok = false;
                for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
                    for (std::size_t v : inputs) {
                        bool hold = step > 0 && attempt == 0 && std::bernoulli_distribution(0.4)(rng);
                        if (hold) {
                            cur[v] = tr.at(ts.vars[v].name, step - 1);
                        } else {
                            auto it = filters.find(v);
                            for (int tries = 0; tries < 200; ++tries) {
                                cur[v] = interp::sample_value(ts.vars[v].type, rng);
                                if (it == filters.end()) break;
                                bool pass = true;
                                for (const auto& c : it->second) pass = pass && tsys::evaluate(c, cur, nullptr, externs).as_bool();
                                if (pass) break;
                            }
                        }
                    }
                    tsys::define(ts, cur, externs);
                    ok = true;
                    for (const auto& a : ts.assumptions) ok = ok && tsys::evaluate(a, cur, nullptr, externs).as_bool();
                }
                if (!ok) break;
                for (std::size_t v : inputs) tr.append(ts.vars[v].name, cur[v]);
                tsys::Assignment nxt = cur;
                tsys::advance(ts, cur, nxt, externs);
                cur = std::move(nxt);
            }
        } catch (const tsys::TermEvalError&) {
            // keep the prefix sampled so far
        }
        if (tr.length() > 0) out.push_back(std::move(tr));
    }
    return out;
}

std::vector<InvariantCandidate> enumerate_candidates(const TransitionSystem& ts,
                                                     const std::vector<tsys::Assignment>& samples)
{
    std::vector<InvariantCandidate> out;
    std::vector<std::size_t> bools;
    std::vector<std::size_t> nums;
    for (std::size_t v : ts.def_order) {
        if (tsys::is_const(ts.defs[v])) continue;
        (ts.vars[v].type == Type::Bool ? bools : nums).push_back(v);
    }
    if (bools.size() > kMaxBoolVars) {
        std::vector<std::size_t> top;
        for (std::size_t v : bools) {
            if (ts.vars[v].top_level && top.size() < kMaxBoolVars) top.push_back(v);
        }
        bools = std::move(top);
    }
    auto var = [&](std::size_t v) { return tsys::mk_var(v, ts.vars[v].type); };
    auto name = [&](std::size_t v) { return ts.vars[v].name; };

    for (std::size_t v : nums) {
        if (samples.empty()) break;
        Value lo = samples[0][v];
        Value hi = lo;
        for (const auto& s : samples) {
            if (s[v].as_number() < lo.as_number()) lo = s[v];
            if (s[v].as_number() > hi.as_number()) hi = s[v];
        }
        InvariantCandidate a;
        a.shape = InvariantCandidate::Shape::IntervalBound;
        a.a = v;
        a.lo = lo;
        a.formula = tsys::mk_bin(Op::Le, tsys::mk_const(lo), var(v));
        a.text = name(v) + " >= " + lo.to_string();
        out.push_back(a);
        InvariantCandidate b;
        b.shape = InvariantCandidate::Shape::IntervalBound;
        b.a = v;
        b.hi = hi;
        b.formula = tsys::mk_bin(Op::Le, var(v), tsys::mk_const(hi));
        b.text = name(v) + " <= " + hi.to_string();
        out.push_back(b);
    }
    for (std::size_t i = 0; i < bools.size(); ++i) {
        for (std::size_t j = i + 1; j < bools.size(); ++j) {
            std::size_t a = bools[i];
            std::size_t b = bools[j];
            InvariantCandidate eq;
            eq.shape = InvariantCandidate::Shape::BoolEquality;
            eq.a = a;
            eq.b = b;
            eq.formula = tsys::mk_bin(Op::Eq, var(a), var(b));
            eq.text = name(a) + " = " + name(b);
            out.push_back(eq);
            for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
                InvariantCandidate im;
                im.shape = InvariantCandidate::Shape::BoolImplication;
                im.a = x;
                im.b = y;
                im.formula = tsys::mk_bin(Op::Implies, var(x), var(y));
                im.text = name(x) + " => " + name(y);
                out.push_back(im);
            }
        }
    }
    return out;
}

std::vector<InvariantCandidate> generate_invariants(const TransitionSystem& ts,
                                                    const std::vector<interp::Trace>& sim_traces,
                                                    const EngineConfig& cfg)
{
    using Status = InvariantCandidate::Status;
    std::vector<tsys::Assignment> samples;
    for (const auto& t : sim_traces) {
        try {
            auto run = tsys::run(ts, t, t.length(), {}, &cfg.externs);
            samples.insert(samples.end(), run.begin(), run.end());
        } catch (const std::exception&) {
            // traces the system cannot execute contribute nothing
        }
    }
    if (samples.empty()) return {};
    std::vector<InvariantCandidate> cands = enumerate_candidates(ts, samples);
    std::vector<InvariantCandidate> live;
    for (auto& c : cands) {
        bool ok = true;
        for (const auto& s : samples) {
            if (!tsys::evaluate(c.formula, s, nullptr, &cfg.externs).as_bool()) {
                ok = false;
                break;
            }
        }
        c.status = ok ? Status::SimulatedOk : Status::Rejected;
        if (ok) live.push_back(c);
    }
    // equalities subsume their implications
    {
        std::set<std::pair<std::size_t, std::size_t>> eqs;
        for (const auto& c : live) {
            if (c.shape == InvariantCandidate::Shape::BoolEquality) eqs.insert({c.a, c.b});
        }
        std::erase_if(live, [&](const InvariantCandidate& c) {
            return c.shape == InvariantCandidate::Shape::BoolImplication
                   && (eqs.count({c.a, c.b}) || eqs.count({c.b, c.a}));
        });
    }
    if (live.empty() || cfg.oracle_mode) return {};

    const std::size_t k = static_cast<std::size_t>(std::max(1, cfg.invariant_k));
    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout));
    try {
        // Drops every live candidate that is false at step `at` of the model.
        auto prune = [&](Solver& s, detail::Unroller& u, std::size_t at) {
            std::vector<std::string> terms;
            for (const auto& c : live) terms.push_back(u.at(c.formula, at));
            auto vals = s.get_values(terms);
            std::vector<InvariantCandidate> keep;
            for (std::size_t i = 0; i < live.size(); ++i) {
                if (vals[i].is_atom && vals[i].atom == "true") keep.push_back(live[i]);
            }
            if (keep.size() == live.size()) throw SolverError("model falsifies no candidate");
            live = std::move(keep);
        };
        auto conj = [&](detail::Unroller& u, std::size_t at) {
            std::string s = "(and true";
            for (const auto& c : live) s += " " + u.at(c.formula, at);
            return s + ")";
        };

        Solver base(cfg.solver_command, logic_for(ts), deadline, cfg.incremental);
        detail::Unroller bu(ts, base);
        for (std::size_t d = 0; d < k && !live.empty(); ++d) {
            bu.add_step(d);
            if (d == 0) bu.assert_init();
            bu.assert_assumptions(d);
            for (;;) {
                if (live.empty()) break;
                base.push();
                base.command("(assert (not " + conj(bu, d) + "))");
                auto r = base.check();
                if (r == Solver::Result::Unsat) {
                    base.pop();
                    break;
                }
                if (r == Solver::Result::Unknown) throw SolverError("unknown");
                prune(base, bu, d);
                base.pop();
            }
        }

        Solver step(cfg.solver_command, logic_for(ts), deadline, cfg.incremental);
        detail::Unroller su(ts, step);
        for (std::size_t i = 0; i <= k; ++i) {
            su.add_step(i);
            su.assert_assumptions(i);
        }
        for (int iter = 0; iter < 200 && !live.empty(); ++iter) {
            step.push();
            for (std::size_t i = 0; i < k; ++i) step.command("(assert " + conj(su, i) + ")");
            step.command("(assert (not " + conj(su, k) + "))");
            auto r = step.check();
            if (r == Solver::Result::Unsat) {
                step.pop();
                for (auto& c : live) c.status = Status::Proved;
                return live;
            }
            if (r == Solver::Result::Unknown) throw SolverError("unknown");
            prune(step, su, k);
            step.pop();
        }
    } catch (const std::exception&) {
        return {};
    }
    return {};
}

std::map<std::string, VerifyResult> verify_all(const std::vector<Task>& tasks, const EngineConfig& cfg)
{
    std::vector<VerifyResult> results(tasks.size());
    auto run_one = [&](std::size_t i) {
        try {
            results[i] = kinduction(*tasks[i].ts, tasks[i].property, cfg);
        } catch (const std::exception& e) {
            results[i] = VerifyResult{};
            results[i].verdict = Verdict::Unknown;
            results[i].reason = UnknownReason::SolverError;
            results[i].detail = e.what();
        }
    };
    if (cfg.parallel_properties && tasks.size() > 1) {
        std::atomic<std::size_t> next{0};
        unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(tasks.size())));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < tasks.size(); i = next++) run_one(i);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    }
    std::map<std::string, VerifyResult> out;
    for (std::size_t i = 0; i < tasks.size(); ++i) out[tasks[i].id] = std::move(results[i]);
    return out;
}

nlohmann::json to_json(const std::string& property, const VerifyResult& r)
{
    nlohmann::json j;
    j["property"] = property;
    j["verdict"] = to_string(r.verdict);
    j["k"] = r.k;
    j["time_ms"] = r.time_ms;
    if (r.verdict == Verdict::Falsified) {
        j["step"] = r.step;
        j["trace"] = interp::to_json(r.trace);
        nlohmann::json init = nlohmann::json::object();
        for (const auto& [n, v] : r.initial) {
            if (v.type() == Type::Bool) {
                init[n] = v.as_bool();
            } else {
                init[n] = v.to_string();
            }
        }
        j["initial"] = init;
    }
    if (r.verdict == Verdict::Unknown) j["reason"] = to_string(r.reason);
    if (!r.detail.empty()) j["detail"] = r.detail;
    if (!r.invariants_used.empty()) j["invariants"] = r.invariants_used;
    return j;
}

VerifyResult result_from_json(const nlohmann::json& j)
{
    VerifyResult r;
    std::string v = j.at("verdict");
    r.verdict = v == "Valid" ? Verdict::Valid : v == "Falsified" ? Verdict::Falsified : Verdict::Unknown;
    r.k = j.value("k", 0);
    r.time_ms = j.value("time_ms", 0.0);
    if (j.contains("reason")) {
        std::string s = j["reason"];
        for (auto reason : {UnknownReason::KMaxReached, UnknownReason::Timeout, UnknownReason::SolverError,
                            UnknownReason::NonlinearSpurious}) {
            if (s == to_string(reason)) r.reason = reason;
        }
    }
    r.detail = j.value("detail", std::string());
    if (j.contains("invariants")) r.invariants_used = j["invariants"].get<std::vector<std::string>>();
    if (r.verdict == Verdict::Falsified) {
        r.step = j.at("step");
        r.trace = interp::trace_from_json(j.at("trace"));
        if (j.contains("initial")) {
            // types come from the trace's JSON encoding: booleans are JSON booleans
            for (const auto& [n, val] : j["initial"].items()) {
                if (val.is_boolean()) {
                    r.initial[n] = Value::boolean(val.get<bool>());
                } else {
                    std::string s = val.get<std::string>();
                    bool is_int = s.find_first_of("./") == std::string::npos;
                    r.initial[n] = Value::parse(is_int ? Type::Int : Type::Real, s);
                }
            }
        }
    }
    return r;
}

}  // namespace dfv::engine
