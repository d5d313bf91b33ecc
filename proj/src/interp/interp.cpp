#include "dfv/interp/interp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace dfv::interp {

using lang::BinaryOp;
using lang::Expr;
using lang::NodeDecl;
using lang::UnaryOp;

EvalError::EvalError(std::size_t step, const std::string& message)
    : std::runtime_error("step " + std::to_string(step) + ": " + message), step_(step)
{
}

namespace detail {

struct CExpr {
    enum class Op : std::uint8_t { Lit, Slot, Neg, Not, Bin, Ite, Pre, Arrow, Extern };
    Op op = Op::Lit;
    BinaryOp bin = BinaryOp::Add;
    Type type = Type::Bool;
    int idx = 0;  // slot, pre site or arrow site
    Value lit;
    const ExternFn* fn = nullptr;
    std::string name;  // extern name, or the pre operand text for warnings
    std::vector<CExpr> args;
};

struct CallItem {
    std::string callee;
    const Plan* plan = nullptr;
    std::vector<CExpr> args;
    std::vector<int> out_slots;
};

struct Item {
    bool is_call = false;
    int slot = -1;  // equations
    CExpr rhs;      // equations
    int call = -1;  // calls
};

struct Plan {
    std::string node;
    std::vector<std::string> slot_names;  // only signals have names; temps are ""
    std::vector<Type> slot_types;
    std::map<std::string, int> slot_of;
    std::vector<int> input_slots;
    std::vector<int> output_slots;
    std::vector<int> local_slots;
    std::vector<CallItem> calls;
    std::vector<Item> order;
    std::vector<CExpr> assertions;
    std::vector<CExpr> conjuncts;  // top-level assertion conjuncts
    std::vector<std::vector<std::size_t>> input_filters;
    std::vector<CExpr> pre_operands;
    std::vector<std::string> pre_text;
    int n_arrows = 0;
    std::vector<int> property_slots;
    std::vector<std::string> property_names;
};

struct Instance {
    const Plan* plan = nullptr;
    std::vector<Value> slots;
    std::vector<Value> pre;
    std::vector<char> pre_init;
    std::vector<char> arrow;
    std::vector<Instance> children;
    std::vector<Value> scratch;

    explicit Instance(const Plan* p) : plan(p)
    {
        slots.resize(p->slot_types.size());
        for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = Value::default_of(p->slot_types[i]);
        pre.resize(p->pre_operands.size());
        pre_init.assign(p->pre_operands.size(), 0);
        arrow.assign(static_cast<std::size_t>(p->n_arrows), 1);
        for (const auto& c : p->calls) children.emplace_back(c.plan);
    }
};

}  // namespace detail

using detail::CExpr;
using detail::Instance;
using detail::Plan;

namespace {

Value make_number(Type t, Rational r)
{
    return t == Type::Int ? Value::integer(std::move(r)) : Value::real(std::move(r));
}

void split_conjuncts(const Expr& e, std::vector<const Expr*>& out)
{
    if (e.kind == Expr::Kind::Binary && e.binary_op == BinaryOp::And) {
        split_conjuncts(e.args[0], out);
        split_conjuncts(e.args[1], out);
        return;
    }
    out.push_back(&e);
}

// Compiles one node. Calls nested in expressions are hoisted into their own
// scheduled items writing temporary slots, so every instance steps each instant.
class PlanBuilder {
public:
    PlanBuilder(const lang::TypedProgram& p, const NodeDecl& n, const SimConfig& cfg,
                const std::map<std::string, std::unique_ptr<Plan>>& done)
        : prog_(p), node_(n), cfg_(cfg), done_(done)
    {
    }

    std::unique_ptr<Plan> build()
    {
        plan_ = std::make_unique<Plan>();
        plan_->node = node_.name;
        for (const auto& d : node_.inputs) plan_->input_slots.push_back(add_slot(d.name, d.type));
        for (const auto& d : node_.outputs) plan_->output_slots.push_back(add_slot(d.name, d.type));
        for (const auto& d : node_.locals) plan_->local_slots.push_back(add_slot(d.name, d.type));

        // Equations and hoisted calls, with their instantaneous dependencies.
        struct Pending {
            detail::Item item;
            std::vector<int> deps;  // slots read instantaneously
            std::vector<int> defs;  // slots written
        };
        std::vector<Pending> pending;
        auto emit_calls = [&](std::vector<std::pair<int, std::vector<int>>>& calls) {
            for (auto& [ci, deps] : calls) {
                Pending pc;
                pc.item.is_call = true;
                pc.item.call = ci;
                pc.deps = std::move(deps);
                pc.defs = plan_->calls[static_cast<std::size_t>(ci)].out_slots;
                pending.push_back(std::move(pc));
            }
            calls.clear();
        };
        for (const auto& eq : node_.equations) {
            if (eq.targets.size() > 1 || (eq.rhs.kind == Expr::Kind::NodeCall && eq.targets.size() == 1)) {
                std::vector<int> outs;
                for (const auto& t : eq.targets) outs.push_back(plan_->slot_of.at(t));
                std::vector<int> deps;
                make_call(eq.rhs, outs, deps);
                emit_calls(hoisted_);
                continue;
            }
            Pending pe;
            pe.item.slot = plan_->slot_of.at(eq.targets[0]);
            pe.item.rhs = compile(eq.rhs, pe.deps, false);
            pe.defs = {pe.item.slot};
            pending.push_back(std::move(pe));
            emit_calls(hoisted_);
        }
        for (const auto& a : node_.assertions) {
            std::vector<int> ignored;
            plan_->assertions.push_back(compile(a, ignored, false));
            emit_calls(hoisted_);
            std::vector<const Expr*> parts;
            split_conjuncts(a, parts);
            for (const Expr* c : parts) {
                std::vector<int> deps;
                bool pure = true;
                lang::walk(*c, [&](const Expr& s) {
                    if (s.kind == Expr::Kind::Pre || s.kind == Expr::Kind::Arrow || s.kind == Expr::Kind::NodeCall
                        || s.kind == Expr::Kind::ExternCall) {
                        pure = false;
                    }
                    if (s.kind == Expr::Kind::Var) deps.push_back(plan_->slot_of.at(s.name));
                });
                std::sort(deps.begin(), deps.end());
                deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
                if (!pure || deps.size() != 1) continue;
                auto it = std::find(plan_->input_slots.begin(), plan_->input_slots.end(), deps[0]);
                if (it == plan_->input_slots.end()) continue;
                std::vector<int> unused;
                plan_->conjuncts.push_back(compile(*c, unused, false));
                plan_->input_filters.resize(plan_->input_slots.size());
                plan_->input_filters[static_cast<std::size_t>(it - plan_->input_slots.begin())].push_back(
                    plan_->conjuncts.size() - 1);
            }
        }
        plan_->input_filters.resize(plan_->input_slots.size());
        // Pre operands are compiled as they are met; calls inside them were hoisted too.
        emit_calls(hoisted_);

        // Topological order over slots.
        std::map<int, std::size_t> writer;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            for (int d : pending[i].defs) writer[d] = i;
        }
        std::vector<int> mark(pending.size(), 0);
        std::function<void(std::size_t)> visit = [&](std::size_t i) {
            if (mark[i] == 2) return;
            if (mark[i] == 1) throw std::logic_error("cyclic schedule in node '" + node_.name + "'");
            mark[i] = 1;
            for (int d : pending[i].deps) {
                auto it = writer.find(d);
                if (it != writer.end()) visit(it->second);
            }
            mark[i] = 2;
            plan_->order.push_back(std::move(pending[i].item));
        };
        for (std::size_t i = 0; i < pending.size(); ++i) visit(i);

        for (const auto& pa : node_.properties) {
            plan_->property_slots.push_back(plan_->slot_of.at(pa.signal));
            plan_->property_names.push_back(pa.signal);
        }
        return std::move(plan_);
    }

private:
    int add_slot(const std::string& name, Type t)
    {
        int s = static_cast<int>(plan_->slot_types.size());
        plan_->slot_types.push_back(t);
        plan_->slot_names.push_back(name);
        if (!name.empty()) plan_->slot_of[name] = s;
        return s;
    }

    void make_call(const Expr& e, std::vector<int> outs, std::vector<int>& deps_of_user)
    {
        detail::CallItem c;
        c.callee = e.name;
        c.plan = done_.at(e.name).get();
        std::vector<int> deps;
        for (const auto& a : e.args) c.args.push_back(compile(a, deps, false));
        c.out_slots = std::move(outs);
        plan_->calls.push_back(std::move(c));
        int ci = static_cast<int>(plan_->calls.size()) - 1;
        hoisted_.emplace_back(ci, std::move(deps));
        (void)deps_of_user;
    }

    CExpr compile(const Expr& e, std::vector<int>& deps, bool under_pre)
    {
        CExpr c;
        c.type = *e.type;
        switch (e.kind) {
        case Expr::Kind::Literal:
            c.op = CExpr::Op::Lit;
            c.lit = e.literal;
            if (c.type == Type::Real && c.lit.type() == Type::Int) c.lit = Value::real(c.lit.as_number());
            break;
        case Expr::Kind::Var:
            c.op = CExpr::Op::Slot;
            c.idx = plan_->slot_of.at(e.name);
            if (!under_pre) deps.push_back(c.idx);
            break;
        case Expr::Kind::Unary:
            c.op = e.unary_op == UnaryOp::Not ? CExpr::Op::Not : CExpr::Op::Neg;
            c.args.push_back(compile(e.args[0], deps, under_pre));
            break;
        case Expr::Kind::Binary:
            c.op = CExpr::Op::Bin;
            c.bin = e.binary_op;
            c.args.push_back(compile(e.args[0], deps, under_pre));
            c.args.push_back(compile(e.args[1], deps, under_pre));
            break;
        case Expr::Kind::Ite:
            c.op = CExpr::Op::Ite;
            for (const auto& a : e.args) c.args.push_back(compile(a, deps, under_pre));
            break;
        case Expr::Kind::Arrow:
            c.op = CExpr::Op::Arrow;
            c.idx = plan_->n_arrows++;
            for (const auto& a : e.args) c.args.push_back(compile(a, deps, under_pre));
            break;
        case Expr::Kind::Pre: {
            c.op = CExpr::Op::Pre;
            c.idx = static_cast<int>(plan_->pre_operands.size());
            plan_->pre_operands.emplace_back();
            plan_->pre_text.emplace_back();
            // The operand is evaluated at the end of the step; its reads do not
            // constrain this instant's schedule.
            CExpr operand = compile(e.args[0], deps, true);
            plan_->pre_operands[static_cast<std::size_t>(c.idx)] = std::move(operand);
            plan_->pre_text[static_cast<std::size_t>(c.idx)] = describe(e.args[0]);
            break;
        }
        case Expr::Kind::NodeCall: {
            int tmp = add_slot("", c.type);
            std::size_t before = hoisted_.size();
            make_call(e, {tmp}, deps);
            if (!under_pre) {
                deps.push_back(tmp);
            }
            (void)before;
            c.op = CExpr::Op::Slot;
            c.idx = tmp;
            break;
        }
        case Expr::Kind::ExternCall: {
            c.op = CExpr::Op::Extern;
            c.name = e.name;
            auto it = cfg_.externs.find(e.name);
            c.fn = it == cfg_.externs.end() ? nullptr : &it->second;
            for (const auto& a : e.args) c.args.push_back(compile(a, deps, under_pre));
            break;
        }
        }
        return c;
    }

    static std::string describe(const Expr& e)
    {
        if (e.kind == Expr::Kind::Var) return e.name;
        return "expression at " + std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column);
    }

    const lang::TypedProgram& prog_;
    const NodeDecl& node_;
    const SimConfig& cfg_;
    const std::map<std::string, std::unique_ptr<Plan>>& done_;
    std::unique_ptr<Plan> plan_;
    std::vector<std::pair<int, std::vector<int>>> hoisted_;
};

struct Ctx {
    const SimConfig* cfg = nullptr;
    std::vector<std::string>* warnings = nullptr;
    std::size_t step = 0;
};

Value eval(const CExpr& c, Instance& in, Ctx& ctx);

Value eval_bin(const CExpr& c, Instance& in, Ctx& ctx)
{
    BinaryOp op = c.bin;
    if (op == BinaryOp::And) {
        if (!eval(c.args[0], in, ctx).as_bool()) return Value::boolean(false);
        return Value::boolean(eval(c.args[1], in, ctx).as_bool());
    }
    if (op == BinaryOp::Or) {
        if (eval(c.args[0], in, ctx).as_bool()) return Value::boolean(true);
        return Value::boolean(eval(c.args[1], in, ctx).as_bool());
    }
    if (op == BinaryOp::Implies) {
        if (!eval(c.args[0], in, ctx).as_bool()) return Value::boolean(true);
        return Value::boolean(eval(c.args[1], in, ctx).as_bool());
    }
    Value a = eval(c.args[0], in, ctx);
    Value b = eval(c.args[1], in, ctx);
    if (a.type() == Type::Bool) {
        switch (op) {
        case BinaryOp::Eq: return Value::boolean(a.as_bool() == b.as_bool());
        case BinaryOp::Ne: return Value::boolean(a.as_bool() != b.as_bool());
        default: throw std::logic_error("boolean operands for arithmetic operator");
        }
    }
    const Rational& x = a.as_number();
    const Rational& y = b.as_number();
    switch (op) {
    case BinaryOp::Add: return make_number(c.type, x + y);
    case BinaryOp::Sub: return make_number(c.type, x - y);
    case BinaryOp::Mul: return make_number(c.type, x * y);
    case BinaryOp::Div:
        if (y.is_zero()) throw EvalError(ctx.step, "division by zero");
        if (c.type == Type::Int) return Value::integer(Rational::euclid_div(x, y));
        return Value::real(x / y);
    case BinaryOp::Eq: return Value::boolean(x == y);
    case BinaryOp::Ne: return Value::boolean(x != y);
    case BinaryOp::Lt: return Value::boolean(x < y);
    case BinaryOp::Le: return Value::boolean(x <= y);
    case BinaryOp::Gt: return Value::boolean(x > y);
    case BinaryOp::Ge: return Value::boolean(x >= y);
    default: break;
    }
    throw std::logic_error("unhandled operator");
}

Value eval(const CExpr& c, Instance& in, Ctx& ctx)
{
    switch (c.op) {
    case CExpr::Op::Lit: return c.lit;
    case CExpr::Op::Slot: return in.slots[static_cast<std::size_t>(c.idx)];
    case CExpr::Op::Not: return Value::boolean(!eval(c.args[0], in, ctx).as_bool());
    case CExpr::Op::Neg: return make_number(c.type, -eval(c.args[0], in, ctx).as_number());
    case CExpr::Op::Bin: return eval_bin(c, in, ctx);
    case CExpr::Op::Ite:
        return eval(c.args[0], in, ctx).as_bool() ? eval(c.args[1], in, ctx) : eval(c.args[2], in, ctx);
    case CExpr::Op::Arrow:
        return in.arrow[static_cast<std::size_t>(c.idx)] ? eval(c.args[0], in, ctx) : eval(c.args[1], in, ctx);
    case CExpr::Op::Pre: {
        auto i = static_cast<std::size_t>(c.idx);
        if (in.pre_init[i]) return in.pre[i];
        std::string msg = "pre(" + in.plan->pre_text[i] + ") in node '" + in.plan->node + "' read before initialization";
        if (ctx.cfg->strict_pre) throw EvalError(ctx.step, msg);
        if (ctx.warnings && ctx.warnings->size() < 100) {
            ctx.warnings->push_back("step " + std::to_string(ctx.step) + ": " + msg + "; using the default value");
        }
        return Value::default_of(c.type);
    }
    case CExpr::Op::Extern: {
        if (!c.fn) {
            throw EvalError(ctx.step, "extern call '" + c.name
                                          + "' encountered; externs are symbolic unless a concrete function is registered");
        }
        std::vector<Value> args;
        args.reserve(c.args.size());
        for (const auto& a : c.args) args.push_back(eval(a, in, ctx));
        Value r = (*c.fn)(args);
        if (r.type() != c.type) throw EvalError(ctx.step, "extern '" + c.name + "' returned a value of the wrong type");
        return r;
    }
    }
    throw std::logic_error("bad compiled expression");
}

bool compute_instance(Instance& in, Ctx& ctx)
{
    const Plan& p = *in.plan;
    bool ok = true;
    for (const auto& item : p.order) {
        if (!item.is_call) {
            in.slots[static_cast<std::size_t>(item.slot)] = eval(item.rhs, in, ctx);
            continue;
        }
        const auto& call = p.calls[static_cast<std::size_t>(item.call)];
        Instance& child = in.children[static_cast<std::size_t>(item.call)];
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            child.slots[static_cast<std::size_t>(child.plan->input_slots[i])] = eval(call.args[i], in, ctx);
        }
        ok = compute_instance(child, ctx) && ok;
        for (std::size_t j = 0; j < call.out_slots.size(); ++j) {
            in.slots[static_cast<std::size_t>(call.out_slots[j])] =
                child.slots[static_cast<std::size_t>(child.plan->output_slots[j])];
        }
    }
    for (const auto& a : p.assertions) {
        if (!eval(a, in, ctx).as_bool()) ok = false;
    }
    return ok;
}

void commit_instance(Instance& in, Ctx& ctx)
{
    const Plan& p = *in.plan;
    in.scratch.clear();
    for (const auto& op : p.pre_operands) in.scratch.push_back(eval(op, in, ctx));
    for (std::size_t i = 0; i < in.scratch.size(); ++i) {
        in.pre[i] = std::move(in.scratch[i]);
        in.pre_init[i] = 1;
    }
    std::fill(in.arrow.begin(), in.arrow.end(), 0);
    for (auto& c : in.children) commit_instance(c, ctx);
}

NodeState to_state(const Instance& in, std::size_t steps)
{
    NodeState s;
    for (std::size_t i = 0; i < in.pre.size(); ++i) {
        if (in.pre_init[i]) {
            s.pre.emplace_back(in.pre[i]);
        } else {
            s.pre.emplace_back(std::nullopt);
        }
    }
    for (char a : in.arrow) s.arrow_first.push_back(a != 0);
    for (const auto& c : in.children) s.children.push_back(to_state(c, steps));
    s.steps = steps;
    return s;
}

void load_state(Instance& in, const NodeState& s)
{
    if (s.pre.size() != in.pre.size() || s.arrow_first.size() != in.arrow.size()
        || s.children.size() != in.children.size()) {
        throw std::invalid_argument("node state does not match node '" + in.plan->node + "'");
    }
    for (std::size_t i = 0; i < s.pre.size(); ++i) {
        in.pre_init[i] = s.pre[i].has_value();
        if (s.pre[i]) in.pre[i] = *s.pre[i];
    }
    for (std::size_t i = 0; i < s.arrow_first.size(); ++i) in.arrow[i] = s.arrow_first[i];
    for (std::size_t i = 0; i < s.children.size(); ++i) load_state(in.children[i], s.children[i]);
}

}  // namespace

Interpreter::Interpreter(const lang::TypedProgram& p, SimConfig cfg)
    : prog_(std::make_shared<lang::TypedProgram>(p)), cfg_(std::move(cfg))
{
    // Compile callees first so call items can point at their plans.
    std::set<std::string> done;
    std::function<void(const std::string&)> build = [&](const std::string& name) {
        if (done.count(name)) return;
        done.insert(name);
        for (const auto& c : prog_->info(name).callees) build(c);
        PlanBuilder b(*prog_, prog_->node(name), cfg_, plans_);
        plans_[name] = b.build();
    };
    for (const auto& n : prog_->program.nodes) build(n.name);
}

Interpreter::~Interpreter() = default;

const Plan& Interpreter::plan(const std::string& node) const
{
    auto it = plans_.find(node);
    if (it == plans_.end()) throw std::out_of_range("unknown node '" + node + "'");
    return *it->second;
}

NodeState Interpreter::init_state(const std::string& node) const
{
    Instance in(&plan(node));
    return to_state(in, 0);
}

StepResult Interpreter::step(const std::string& node, const NodeState& state,
                             const std::map<std::string, Value>& inputs) const
{
    const Plan& p = plan(node);
    Instance in(&p);
    load_state(in, state);
    const NodeDecl& decl = prog_->node(node);
    for (std::size_t i = 0; i < decl.inputs.size(); ++i) {
        auto it = inputs.find(decl.inputs[i].name);
        if (it == inputs.end()) throw std::invalid_argument("missing input '" + decl.inputs[i].name + "'");
        if (it->second.type() != decl.inputs[i].type) {
            throw std::invalid_argument("input '" + decl.inputs[i].name + "' must have type "
                                        + std::string(to_string(decl.inputs[i].type)));
        }
        in.slots[static_cast<std::size_t>(p.input_slots[i])] = it->second;
    }
    StepResult r;
    Ctx ctx{&cfg_, &r.warnings, state.steps};
    r.assertion_ok = compute_instance(in, ctx);
    for (std::size_t i = 0; i < p.slot_names.size(); ++i) {
        if (!p.slot_names[i].empty()) r.values[p.slot_names[i]] = in.slots[i];
    }
    commit_instance(in, ctx);
    r.state = to_state(in, state.steps + 1);
    return r;
}

Trace Interpreter::simulate(const std::string& node, const Trace& inputs, std::size_t n) const
{
    Runner run(*this, node);
    const auto& ins = run.inputs();
    for (const auto& d : ins) {
        if (!inputs.has(d.name)) throw std::invalid_argument("input trace lacks signal '" + d.name + "'");
        if (inputs.column(d.name).values.size() < n) {
            throw std::invalid_argument("input trace for '" + d.name + "' is shorter than " + std::to_string(n));
        }
        if (inputs.column(d.name).type != d.type) throw std::invalid_argument("input '" + d.name + "' has the wrong type");
    }
    const Plan& p = plan(node);
    Trace out;
    for (std::size_t i = 0; i < p.slot_names.size(); ++i) {
        if (!p.slot_names[i].empty()) out.add_signal(p.slot_names[i], p.slot_types[i]);
    }
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < ins.size(); ++i) run.set_input(i, inputs.at(ins[i].name, s));
        out.assertion_ok.push_back(run.compute());
        for (std::size_t i = 0; i < p.slot_names.size(); ++i) {
            if (!p.slot_names[i].empty()) out.append(p.slot_names[i], run.signal(p.slot_names[i]));
        }
        run.commit();
    }
    return out;
}

std::optional<std::size_t> Interpreter::check_observer(const std::string& node, const Trace& inputs) const
{
    const Plan& p = plan(node);
    if (p.property_slots.empty()) throw std::invalid_argument("node '" + node + "' has no property annotation");
    Runner run(*this, node);
    const auto& ins = run.inputs();
    std::size_t n = inputs.length();
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < ins.size(); ++i) run.set_input(i, inputs.at(ins[i].name, s));
        bool ok = run.compute();
        if (!ok) return std::nullopt;
        if (!run.properties_hold()) return s;
        run.commit();
    }
    return std::nullopt;
}

Interpreter::Runner::Runner(const Interpreter& interp, const std::string& node)
    : interp_(&interp), inst_(std::make_unique<Instance>(&interp.plan(node)))
{
}

Interpreter::Runner::~Runner() = default;
Interpreter::Runner::Runner(Runner&&) noexcept = default;

const std::vector<lang::VarDecl>& Interpreter::Runner::inputs() const
{
    return interp_->prog_->node(inst_->plan->node).inputs;
}

void Interpreter::Runner::set_input(std::size_t i, const Value& v)
{
    inst_->slots[static_cast<std::size_t>(inst_->plan->input_slots[i])] = v;
}

const Value& Interpreter::Runner::input(std::size_t i) const
{
    return inst_->slots[static_cast<std::size_t>(inst_->plan->input_slots[i])];
}

bool Interpreter::Runner::compute()
{
    Ctx ctx{&interp_->cfg_, &warnings_, steps_};
    return compute_instance(*inst_, ctx);
}

void Interpreter::Runner::commit()
{
    Ctx ctx{&interp_->cfg_, &warnings_, steps_};
    commit_instance(*inst_, ctx);
    ++steps_;
}

std::size_t Interpreter::Runner::steps() const { return steps_; }

const Value& Interpreter::Runner::signal(const std::string& name) const
{
    auto it = inst_->plan->slot_of.find(name);
    if (it == inst_->plan->slot_of.end()) throw std::out_of_range("no signal '" + name + "'");
    return inst_->slots[static_cast<std::size_t>(it->second)];
}

bool Interpreter::Runner::properties_hold(std::string* failed) const
{
    const Plan& p = *inst_->plan;
    for (std::size_t i = 0; i < p.property_slots.size(); ++i) {
        if (!inst_->slots[static_cast<std::size_t>(p.property_slots[i])].as_bool()) {
            if (failed) *failed = p.property_names[i];
            return false;
        }
    }
    return true;
}

const std::vector<std::size_t>& Interpreter::Runner::input_filters(std::size_t i) const
{
    return inst_->plan->input_filters.at(i);
}

bool Interpreter::Runner::filter_holds(std::size_t conjunct)
{
    Ctx ctx{&interp_->cfg_, &warnings_, steps_};
    return eval(inst_->plan->conjuncts.at(conjunct), *inst_, ctx).as_bool();
}

const std::vector<std::string>& Interpreter::Runner::warnings() const { return warnings_; }

NodeState Interpreter::Runner::state() const { return to_state(*inst_, steps_); }

void Interpreter::Runner::reset()
{
    const Plan* p = inst_->plan;
    inst_ = std::make_unique<Instance>(p);
    warnings_.clear();
    steps_ = 0;
}

NodeState init_state(const lang::TypedProgram& p, const std::string& node)
{
    return Interpreter(p).init_state(node);
}

StepResult step(const lang::TypedProgram& p, const std::string& node, const NodeState& state,
                const std::map<std::string, Value>& inputs, const SimConfig& cfg)
{
    return Interpreter(p, cfg).step(node, state, inputs);
}

Trace simulate(const lang::TypedProgram& p, const std::string& node, const Trace& inputs, std::size_t n,
               const SimConfig& cfg)
{
    return Interpreter(p, cfg).simulate(node, inputs, n);
}

std::optional<std::size_t> check_observer(const lang::TypedProgram& p, const std::string& node, const Trace& inputs,
                                          const SimConfig& cfg)
{
    return Interpreter(p, cfg).check_observer(node, inputs);
}

}  // namespace dfv::interp
