#pragma once

// Random boolean dataflow programs and an exhaustive interpreter-level BMC.

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dfv/interp/interp.hpp"

namespace testutil {

struct RandomSystem {
    std::string source;
    int inputs = 0;
    int state_sites = 0;
};

class BoolProgramGen {
public:
    BoolProgramGen(std::uint64_t seed, int max_inputs, int max_sites) : rng_(seed), max_inputs_(max_inputs), max_sites_(max_sites) {}

    RandomSystem make(const std::string& name)
    {
        sites_ = 0;
        n_in_ = 1 + pick(max_inputs_);
        n_loc_ = 2 + pick(4);
        std::string s = "node " + name + "(";
        for (int i = 0; i < n_in_; ++i) s += (i ? ", " : "") + std::string("i") + std::to_string(i);
        s += ": bool) returns (ok: bool);\nvar ";
        for (int j = 0; j < n_loc_; ++j) s += (j ? ", " : "") + std::string("x") + std::to_string(j);
        s += ": bool;\nlet\n";
        for (int j = 0; j < n_loc_; ++j) {
            cur_ = j;
            s += "  x" + std::to_string(j) + " = " + expr(3) + ";\n";
        }
        cur_ = n_loc_;
        if (pick(10) < 3) s += "  assert " + expr(2) + ";\n";
        s += "  ok = " + expr(3) + ";\n  --!PROPERTY: ok;\ntel\n";
        return {s, n_in_, sites_};
    }

private:
    int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

    std::string leaf()
    {
        int r = pick(10);
        if (r < 4 || cur_ == 0) return "i" + std::to_string(pick(n_in_));
        if (r < 8) return "x" + std::to_string(pick(cur_));
        return pick(2) ? "true" : "false";
    }

    // pre may read any local, including later ones; that is what makes state
    std::string pre_operand()
    {
        return pick(3) == 0 ? "i" + std::to_string(pick(n_in_)) : "x" + std::to_string(pick(n_loc_));
    }

    std::string expr(int depth)
    {
        if (depth == 0) return leaf();
        int r = pick(12);
        if (r < 2) return leaf();
        if (r < 4 && sites_ < max_sites_) {
            ++sites_;
            if (pick(3) == 0) return "pre(" + pre_operand() + ")";  // unguarded
            if (sites_ < max_sites_) {
                ++sites_;
                return "(" + expr(depth - 1) + " -> pre(" + pre_operand() + "))";
            }
            return "pre(" + pre_operand() + ")";
        }
        if (r < 5) return "(not " + expr(depth - 1) + ")";
        if (r < 7) return "(" + expr(depth - 1) + " and " + expr(depth - 1) + ")";
        if (r < 9) return "(" + expr(depth - 1) + " or " + expr(depth - 1) + ")";
        if (r < 10) return "(" + expr(depth - 1) + " = " + expr(depth - 1) + ")";
        if (r < 11) return "(" + expr(depth - 1) + " => " + expr(depth - 1) + ")";
        return "(if " + expr(depth - 1) + " then " + expr(depth - 1) + " else " + expr(depth - 1) + ")";
    }

    std::mt19937_64 rng_;
    int max_inputs_;
    int max_sites_;
    int n_in_ = 0;
    int n_loc_ = 0;
    int cur_ = 0;
    int sites_ = 0;
};

inline void state_key(const dfv::interp::NodeState& s, std::string& out)
{
    for (const auto& p : s.pre) out += !p ? '?' : p->as_bool() ? '1' : '0';
    for (bool a : s.arrow_first) out += a ? 'F' : 'f';
    out += '[';
    for (const auto& c : s.children) state_key(c, out);
    out += ']';
}

inline void all_pre_valuations(dfv::interp::NodeState& s, std::vector<dfv::interp::NodeState>& out)
{
    // collect pointers to every pre cell, then enumerate
    std::vector<std::optional<dfv::Value>*> cells;
    std::vector<dfv::interp::NodeState*> stack{&s};
    while (!stack.empty()) {
        auto* n = stack.back();
        stack.pop_back();
        for (auto& p : n->pre) cells.push_back(&p);
        for (auto& c : n->children) stack.push_back(&c);
    }
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << cells.size()); ++m) {
        for (std::size_t k = 0; k < cells.size(); ++k) *cells[k] = dfv::Value::boolean((m >> k) & 1);
        out.push_back(s);
    }
}

/// Shortest depth <= k at which some assertion-respecting run from any
/// initial memory violates the node's property, by enumerating interpreter
/// states level by level.
inline std::optional<std::size_t> brute_force_bmc(const dfv::interp::Interpreter& in, const std::string& node, int k)
{
    const auto& decl = in.program().node(node);
    std::vector<dfv::interp::NodeState> frontier;
    dfv::interp::NodeState init = in.init_state(node);
    all_pre_valuations(init, frontier);
    std::set<std::string> seen;
    for (const auto& s : frontier) {
        std::string key;
        state_key(s, key);
        seen.insert(key);
    }
    const std::size_t n_in = decl.inputs.size();
    for (int d = 0; d <= k; ++d) {
        std::vector<dfv::interp::NodeState> next;
        for (const auto& s : frontier) {
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << n_in); ++m) {
                std::map<std::string, dfv::Value> iv;
                for (std::size_t i = 0; i < n_in; ++i) iv[decl.inputs[i].name] = dfv::Value::boolean((m >> i) & 1);
                auto r = in.step(node, s, iv);
                if (!r.assertion_ok) continue;
                for (const auto& p : decl.properties) {
                    if (!r.values.at(p.signal).as_bool()) return static_cast<std::size_t>(d);
                }
                std::string key;
                state_key(r.state, key);
                if (seen.insert(key).second) next.push_back(std::move(r.state));
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

}  // namespace testutil
