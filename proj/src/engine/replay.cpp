#include "dfv/engine/engine.hpp"
#include "dfv/interp/interp.hpp"

namespace dfv::engine {

ReplayOutcome replay(const lang::TypedProgram& p, const std::string& node, const std::string& prop_id,
                     const VerifyResult& r, const interp::SimConfig& cfg)
{
    tsys::TransitionSystem ts = tsys::compile(p, node);
    tsys::Assignment s0(ts.vars.size());
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        auto it = r.initial.find(ts.vars[v].name);
        s0[v] = it != r.initial.end() ? it->second : Value::default_of(ts.vars[v].type);
    }
    interp::Interpreter in(p, cfg);
    interp::NodeState st = tsys::seed_state(ts, p, s0);
    const auto& decl = p.node(node);
    ReplayOutcome out;
    for (std::size_t i = 0; i < r.trace.length(); ++i) {
        std::map<std::string, Value> iv;
        for (const auto& d : decl.inputs) iv[d.name] = r.trace.at(d.name, i);
        auto res = in.step(node, st, iv);
        if (!res.values.at(prop_id).as_bool()) {
            out.violation = i;
            out.assumptions_ok = out.assumptions_ok && res.assertion_ok;
            return out;
        }
        out.assumptions_ok = out.assumptions_ok && res.assertion_ok;
        st = std::move(res.state);
    }
    return out;
}

}  // namespace dfv::engine
