#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dfv/interp/interp.hpp"

namespace dfv::interp {

struct RandomSimOptions {
    std::size_t steps = 10000;
    std::uint64_t seed = 1;
    /// Fresh input vectors tried per step before giving up on satisfying the assertions.
    int max_retries = 64;
    /// Chance that an input keeps its previous value; lets latches and holds be exercised.
    double hold_probability = 0.4;
    bool record = false;
};

struct RandomSimResult {
    std::size_t steps_run = 0;
    std::optional<std::size_t> violation;
    std::string property;
    std::size_t rejected = 0;
    /// True when no assertion-satisfying input was found and the run ended early.
    bool stalled = false;
    Trace trace;  // filled when record is set
};

/// Draws a value: booleans uniformly; numbers from a mix of zero, small
/// quarter-steps and a wide half-step range.
[[nodiscard]] Value sample_value(Type t, std::mt19937_64& rng);

/// Random simulation under assertion-satisfying inputs. Single-input assertion
/// conjuncts filter each input; the rest are enforced by rejecting whole steps.
/// Stops at the first property violation.
[[nodiscard]] RandomSimResult random_simulate(const Interpreter& interp, const std::string& node,
                                              const RandomSimOptions& opt);

}  // namespace dfv::interp
