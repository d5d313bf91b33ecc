#include <unordered_map>

#include "internal.hpp"

namespace dfv::engine {

using tsys::Term;
using tsys::TermRef;
using tsys::TransitionSystem;
using tsys::VarKind;

namespace {

bool beval(const Term& t, const std::vector<char>& v)
{
    using Op = Term::Op;
    switch (t.op) {
    case Op::Const: return t.value.as_bool();
    case Op::Var: return v[t.var] != 0;
    case Op::Not: return !beval(*t.args[0], v);
    case Op::And: return beval(*t.args[0], v) && beval(*t.args[1], v);
    case Op::Or: return beval(*t.args[0], v) || beval(*t.args[1], v);
    case Op::Implies: return !beval(*t.args[0], v) || beval(*t.args[1], v);
    case Op::Eq: return beval(*t.args[0], v) == beval(*t.args[1], v);
    case Op::Ite: return beval(*t.args[0], v) ? beval(*t.args[1], v) : beval(*t.args[2], v);
    default: throw std::logic_error("non-boolean term in the oracle");
    }
}

// Finite transition relation over packed state and input bits, tabulated once.
class Explicit {
public:
    Explicit(const TransitionSystem& ts, const std::string& prop) : ts_(ts), prop_(ts.property(prop).formula)
    {
        state_ = ts.of_kind(VarKind::State);
        input_ = ts.of_kind(VarKind::Input);
        ns_ = std::uint32_t{1} << state_.size();
        ni_ = std::uint32_t{1} << input_.size();
        next_.resize(static_cast<std::size_t>(ns_) * ni_);
        ok_.resize(next_.size());
        std::vector<char> v(ts.vars.size(), 0);
        for (std::uint32_t s = 0; s < ns_; ++s) {
            for (std::uint32_t i = 0; i < ni_; ++i) {
                load(s, i, v);
                bool asm_ok = true;
                for (const auto& a : ts.assumptions) asm_ok = asm_ok && beval(*a, v);
                bool p = beval(*prop_, v);
                std::uint32_t n = 0;
                for (std::size_t k = 0; k < state_.size(); ++k) {
                    if (beval(*ts.defs[state_[k]], v)) n |= std::uint32_t{1} << k;
                }
                std::size_t idx = static_cast<std::size_t>(s) * ni_ + i;
                next_[idx] = n;
                ok_[idx] = static_cast<std::uint8_t>((asm_ok ? 1 : 0) | (p ? 2 : 0));
            }
        }
    }

    void load(std::uint32_t s, std::uint32_t i, std::vector<char>& v) const
    {
        for (std::size_t k = 0; k < state_.size(); ++k) v[state_[k]] = static_cast<char>((s >> k) & 1);
        for (std::size_t k = 0; k < input_.size(); ++k) v[input_[k]] = static_cast<char>((i >> k) & 1);
        for (std::size_t d : ts_.def_order) v[d] = static_cast<char>(beval(*ts_.defs[d], v));
    }

    [[nodiscard]] bool asm_ok(std::uint32_t s, std::uint32_t i) const { return ok_[idx(s, i)] & 1; }
    [[nodiscard]] bool prop_ok(std::uint32_t s, std::uint32_t i) const { return ok_[idx(s, i)] & 2; }
    [[nodiscard]] std::uint32_t next(std::uint32_t s, std::uint32_t i) const { return next_[idx(s, i)]; }

    [[nodiscard]] std::vector<std::uint32_t> initial_states() const
    {
        std::uint32_t fixed = 0;
        std::uint32_t free_mask = 0;
        for (std::size_t k = 0; k < state_.size(); ++k) {
            if (ts_.vars[state_[k]].site == tsys::Var::Site::Arrow) {
                fixed |= std::uint32_t{1} << k;
            } else {
                free_mask |= std::uint32_t{1} << k;
            }
        }
        std::vector<std::uint32_t> out;
        // enumerate subsets of the free bits
        std::uint32_t sub = 0;
        do {
            out.push_back(fixed | sub);
            sub = (sub - free_mask) & free_mask;
        } while (sub != 0);
        return out;
    }

    struct Hit {
        std::vector<std::uint32_t> states;
        std::vector<std::uint32_t> inputs;
    };

    // Breadth-first search from the initial states up to `depth` (or to the
    // fixpoint when depth < 0). Returns the shortest violating path.
    std::optional<Hit> search(int depth) const
    {
        std::unordered_map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>> parent;  // state -> (pred, input)
        std::vector<std::uint32_t> frontier;
        std::vector<char> seen(ns_, 0);
        for (std::uint32_t s : initial_states()) {
            seen[s] = 1;
            frontier.push_back(s);
        }
        std::unordered_map<std::uint32_t, bool> is_root;
        for (std::uint32_t s : frontier) is_root[s] = true;
        for (int d = 0; depth < 0 || d <= depth; ++d) {
            if (frontier.empty()) break;
            std::vector<std::uint32_t> nxt;
            for (std::uint32_t s : frontier) {
                for (std::uint32_t i = 0; i < ni_; ++i) {
                    if (!asm_ok(s, i)) continue;
                    if (!prop_ok(s, i)) {
                        Hit h;
                        h.inputs.push_back(i);
                        h.states.push_back(s);
                        std::uint32_t cur = s;
                        while (!is_root.count(cur)) {
                            auto [pred, in] = parent.at(cur);
                            h.states.push_back(pred);
                            h.inputs.push_back(in);
                            cur = pred;
                        }
                        std::reverse(h.states.begin(), h.states.end());
                        std::reverse(h.inputs.begin(), h.inputs.end());
                        return h;
                    }
                    std::uint32_t n = next(s, i);
                    if (!seen[n]) {
                        seen[n] = 1;
                        parent[n] = {s, i};
                        nxt.push_back(n);
                    }
                }
            }
            frontier = std::move(nxt);
        }
        return std::nullopt;
    }

    // Smallest k <= k_max whose induction step holds, using backward sets:
    // W0 = states that can violate now, Wj = states that can reach W(j-1)
    // through a property-satisfying step.
    [[nodiscard]] std::vector<bool> step_holds(int k_max) const
    {
        std::vector<bool> holds(static_cast<std::size_t>(k_max) + 1, false);
        std::vector<char> w(ns_, 0);
        for (std::uint32_t s = 0; s < ns_; ++s) {
            for (std::uint32_t i = 0; i < ni_ && !w[s]; ++i) {
                if (asm_ok(s, i) && !prop_ok(s, i)) w[s] = 1;
            }
        }
        for (int k = 1; k <= k_max; ++k) {
            std::vector<char> nw(ns_, 0);
            bool any = false;
            for (std::uint32_t s = 0; s < ns_; ++s) {
                for (std::uint32_t i = 0; i < ni_; ++i) {
                    if (asm_ok(s, i) && prop_ok(s, i) && w[next(s, i)]) {
                        nw[s] = 1;
                        any = true;
                        break;
                    }
                }
            }
            holds[static_cast<std::size_t>(k)] = !any;
            w = std::move(nw);
        }
        return holds;
    }

    VerifyResult falsified(const Hit& h, const std::string& prop) const
    {
        std::vector<std::map<std::string, Value>> inputs(h.inputs.size());
        for (std::size_t d = 0; d < h.inputs.size(); ++d) {
            for (std::size_t k = 0; k < input_.size(); ++k) {
                inputs[d][ts_.vars[input_[k]].name] = Value::boolean((h.inputs[d] >> k) & 1);
            }
        }
        std::map<std::string, Value> initial;
        for (std::size_t k = 0; k < state_.size(); ++k) {
            if (ts_.vars[state_[k]].site == tsys::Var::Site::Pre) {
                initial[ts_.vars[state_[k]].name] = Value::boolean((h.states[0] >> k) & 1);
            }
        }
        VerifyResult out;
        std::string why;
        if (!detail::confirm(ts_, prop, inputs, initial, nullptr, out, why)) {
            throw std::logic_error("oracle path failed replay: " + why);
        }
        return out;
    }

private:
    [[nodiscard]] std::size_t idx(std::uint32_t s, std::uint32_t i) const { return static_cast<std::size_t>(s) * ni_ + i; }

    const TransitionSystem& ts_;
    TermRef prop_;
    std::vector<std::size_t> state_;
    std::vector<std::size_t> input_;
    std::uint32_t ns_ = 1;
    std::uint32_t ni_ = 1;
    std::vector<std::uint32_t> next_;
    std::vector<std::uint8_t> ok_;
};

}  // namespace

bool oracle_applies(const TransitionSystem& ts, const OracleLimits& lim)
{
    for (const auto& v : ts.vars) {
        if (v.type != Type::Bool) return false;
    }
    if (!ts.externs.empty()) return false;
    std::size_t s = ts.of_kind(VarKind::State).size();
    std::size_t i = ts.of_kind(VarKind::Input).size();
    return s <= lim.max_state_bits && i <= lim.max_input_bits && s + i <= 24;
}

VerifyResult oracle_bmc(const TransitionSystem& ts, const std::string& prop_id, int k)
{
    Explicit ex(ts, prop_id);
    if (auto h = ex.search(k)) return ex.falsified(*h, prop_id);
    VerifyResult r;
    r.verdict = Verdict::Unknown;
    r.reason = UnknownReason::KMaxReached;
    r.k = k;
    r.detail = "no counterexample up to depth " + std::to_string(k);
    return r;
}

VerifyResult oracle_kinduction(const TransitionSystem& ts, const std::string& prop_id, int k_max)
{
    Explicit ex(ts, prop_id);
    auto hit = ex.search(k_max);
    std::vector<bool> holds = ex.step_holds(k_max);
    for (int k = 1; k <= k_max; ++k) {
        if (hit && hit->inputs.size() == static_cast<std::size_t>(k)) return ex.falsified(*hit, prop_id);
        if (holds[static_cast<std::size_t>(k)]) {
            VerifyResult r;
            r.verdict = Verdict::Valid;
            r.k = k;
            return r;
        }
    }
    if (hit) return ex.falsified(*hit, prop_id);
    VerifyResult r;
    r.verdict = Verdict::Unknown;
    r.reason = UnknownReason::KMaxReached;
    r.k = k_max;
    r.detail = "not " + std::to_string(k_max) + "-inductive";
    return r;
}

bool oracle_reachable_safe(const TransitionSystem& ts, const std::string& prop_id)
{
    return !Explicit(ts, prop_id).search(-1).has_value();
}

}  // namespace dfv::engine
