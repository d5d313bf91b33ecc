#include "dfv/interp/random_sim.hpp"

namespace dfv::interp {

Value sample_value(Type t, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> pct(0, 99);
    if (t == Type::Bool) return Value::boolean(rng() & 1U);
    int r = pct(rng);
    Rational v;
    if (r < 30) {
        v = Rational(0);
    } else if (r < 70) {
        std::uniform_int_distribution<int> k(-48, 48);
        v = t == Type::Int ? Rational(k(rng) / 4) : Rational(k(rng), 4);
    } else {
        std::uniform_int_distribution<int> k(-800, 800);
        v = t == Type::Int ? Rational(k(rng)) : Rational(k(rng), 2);
    }
    return t == Type::Int ? Value::integer(v) : Value::real(v);
}

RandomSimResult random_simulate(const Interpreter& interp, const std::string& node, const RandomSimOptions& opt)
{
    RandomSimResult res;
    std::mt19937_64 rng(opt.seed);
    std::bernoulli_distribution hold(opt.hold_probability);
    Interpreter::Runner run(interp, node);
    const auto& ins = run.inputs();
    const auto& names_src = interp.program().node(node);
    if (opt.record) {
        for (const auto* group : {&names_src.inputs, &names_src.outputs, &names_src.locals}) {
            for (const auto& d : *group) res.trace.add_signal(d.name, d.type);
        }
    }
    std::vector<Value> prev(ins.size());
    for (std::size_t s = 0; s < opt.steps; ++s) {
        bool ok = false;
        for (int attempt = 0; attempt < opt.max_retries && !ok; ++attempt) {
            for (std::size_t i = 0; i < ins.size(); ++i) {
                if (s > 0 && hold(rng)) {
                    run.set_input(i, prev[i]);
                    continue;
                }
                const auto& filters = run.input_filters(i);
                for (int tries = 0; tries < 200; ++tries) {
                    run.set_input(i, sample_value(ins[i].type, rng));
                    bool pass = true;
                    for (std::size_t c : filters) {
                        if (!run.filter_holds(c)) {
                            pass = false;
                            break;
                        }
                    }
                    if (pass) break;
                }
            }
            ok = run.compute();
            if (!ok) ++res.rejected;
        }
        if (!ok) {
            res.stalled = true;
            break;
        }
        if (opt.record) {
            for (const auto& name : res.trace.names()) res.trace.append(name, run.signal(name));
            res.trace.assertion_ok.push_back(true);
        }
        res.steps_run = s + 1;
        std::string failed;
        if (!run.properties_hold(&failed)) {
            res.violation = s;
            res.property = failed;
            break;
        }
        for (std::size_t i = 0; i < ins.size(); ++i) prev[i] = run.input(i);
        run.commit();
    }
    return res;
}

}  // namespace dfv::interp
