#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfv/value.hpp"

namespace dfv::tsys {

struct Term;
using TermRef = std::shared_ptr<const Term>;

/// Formula node. Variables index the owning system's variable table; `next`
/// marks a reference to the successor step inside transition formulas.
struct Term {
    enum class Op {
        Const,
        Var,
        Not,
        Neg,
        Add,
        Sub,
        Mul,     // raw product; after normalization at least one side is constant
        Div,     // raw real quotient; removed by normalization
        IntDiv,  // Euclidean; after normalization the divisor is a nonzero constant
        Eq,
        Lt,
        Le,
        And,
        Or,
        Implies,
        Ite,
        App,  // extern symbol application
    };
    Op op = Op::Const;
    Type sort = Type::Bool;
    Value value;
    std::size_t var = 0;
    bool next = false;
    std::string fn;
    std::vector<TermRef> args;
};

[[nodiscard]] TermRef mk_const(Value v);
[[nodiscard]] TermRef mk_bool(bool b);
[[nodiscard]] TermRef mk_var(std::size_t var, Type sort, bool next = false);
[[nodiscard]] TermRef mk_not(TermRef a);
[[nodiscard]] TermRef mk_neg(TermRef a);
[[nodiscard]] TermRef mk_bin(Term::Op op, TermRef a, TermRef b);
[[nodiscard]] TermRef mk_ite(TermRef c, TermRef t, TermRef e);
[[nodiscard]] TermRef mk_app(std::string fn, Type sort, std::vector<TermRef> args);
/// n-ary conjunction; `true` when empty.
[[nodiscard]] TermRef mk_and(const std::vector<TermRef>& parts);

[[nodiscard]] bool is_const(const TermRef& t);

/// Variables referenced, as (index, next) pairs collected into `out`.
void collect_vars(const TermRef& t, std::vector<std::size_t>& out, bool include_next = true);
[[nodiscard]] bool mentions_app(const TermRef& t);
/// Copies `t` with every variable moved to the successor step.
[[nodiscard]] TermRef shift(const TermRef& t);
/// Replaces variables through `f` (returning nullptr keeps the variable).
[[nodiscard]] TermRef substitute(const TermRef& t, const std::function<TermRef(const Term&)>& f);

/// Concrete semantics of extern symbols: name -> function over argument values.
using ExternTable = std::map<std::string, std::function<Value(const std::vector<Value>&)>>;

class TermEvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluates with ite and the boolean connectives short-circuiting, like the
/// interpreter. Built-in nonlinear symbols (nlmul_*, nldiv_*) are always known.
[[nodiscard]] Value evaluate(const TermRef& t, const std::vector<Value>& cur, const std::vector<Value>* next,
                             const ExternTable* externs);

/// SMT-LIB2 rendering; `name(var, next)` spells variable references.
[[nodiscard]] std::string to_smt(const TermRef& t, const std::function<std::string(std::size_t, bool)>& name);
/// Exact SMT-LIB2 literal for a value.
[[nodiscard]] std::string smt_literal(const Value& v);
[[nodiscard]] std::string smt_sort(Type t);

}  // namespace dfv::tsys
