#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfv/value.hpp"

namespace dfv::engine {

struct SExpr {
    bool is_atom = true;
    std::string atom;  // symbols keep their |quotes| stripped
    std::vector<SExpr> list;

    [[nodiscard]] std::string to_string() const;
};

/// Parses one s-expression; throws std::invalid_argument on malformed text.
[[nodiscard]] SExpr parse_sexpr(const std::string& text);
/// Reads an SMT-LIB2 value term (true/false, numerals, decimals, (- x), (/ a b)).
[[nodiscard]] Value parse_smt_value(const SExpr& e, Type t);

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SolverTimeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

/// The solver command line: SOLVER_CMD when set, else `z3 -in -smt2`.
[[nodiscard]] std::vector<std::string> default_solver_command();
[[nodiscard]] std::vector<std::string> split_command(const std::string& cmd);

/// One SMT-LIB2 conversation. In the default stateless mode every check-sat
/// runs in a fresh process fed the whole current script; incremental mode
/// keeps one process and forwards push/pop.
class Solver {
public:
    enum class Result { Sat, Unsat, Unknown };

    Solver(std::vector<std::string> command, std::string logic, Clock::time_point deadline, bool incremental = false);
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    /// Appends one command (declaration, definition or assertion).
    void command(const std::string& text);
    void push();
    void pop();
    Result check();
    /// Values of the given symbols in the last sat model.
    [[nodiscard]] std::vector<SExpr> get_values(const std::vector<std::string>& terms);

private:
    class Process;
    void ensure_process();
    std::string read_response();

    std::vector<std::string> command_;
    std::string logic_;
    Clock::time_point deadline_;
    bool incremental_;
    std::vector<std::vector<std::string>> frames_;
    std::unique_ptr<Process> proc_;
    bool model_ready_ = false;
};

}  // namespace dfv::engine
