#pragma once

#include <map>
#include <string>
#include <vector>

#include "dfv/engine/engine.hpp"

namespace dfv::engine::detail {

/// Writes per-step copies of a system into a solver.
class Unroller {
public:
    Unroller(const tsys::TransitionSystem& ts, Solver& s) : ts_(ts), s_(s) {}

    /// Declares step i with its definitions, and links it to step i-1.
    void add_step(std::size_t i);
    void assert_init();
    void assert_assumptions(std::size_t i);
    [[nodiscard]] std::string at(const tsys::TermRef& t, std::size_t i) const;
    /// States i and j differ somewhere.
    [[nodiscard]] std::string distinct(std::size_t i, std::size_t j) const;
    [[nodiscard]] std::size_t steps() const { return steps_; }

    /// Values of inputs at steps 0..last and of pre cells at step 0, by name.
    void read_model(std::size_t last, std::vector<std::map<std::string, Value>>& inputs,
                    std::map<std::string, Value>& initial);

private:
    const tsys::TransitionSystem& ts_;
    Solver& s_;
    std::size_t steps_ = 0;
};

/// Replays a candidate counterexample concretely on the full system. On
/// success fills a Falsified result; otherwise explains why not.
bool confirm(const tsys::TransitionSystem& full, const std::string& prop_id,
             const std::vector<std::map<std::string, Value>>& inputs, const std::map<std::string, Value>& initial,
             const tsys::ExternTable* externs, VerifyResult& out, std::string& why);

/// Splits nested conjunctions.
void conjuncts(const tsys::TermRef& t, std::vector<tsys::TermRef>& out);

}  // namespace dfv::engine::detail
