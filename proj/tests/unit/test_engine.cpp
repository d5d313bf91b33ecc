#include <doctest.h>

#include <chrono>

#include "dfv/engine/engine.hpp"
#include "dfv/interp/interp.hpp"
#include "randsys.hpp"
#include "util.hpp"

using namespace dfv;
using namespace dfv::engine;

namespace {

const char* kCounter = R"(
node C(i: bool) returns (ok: bool);
var c: int;
let
  c = 0 -> pre c + 1;
  ok = c < 3;
  --!PROPERTY: ok;
tel
)";

const char* kToggle = R"(
node T(i: bool) returns (ok: bool);
var t: bool;
let
  t = true -> not pre t;
  ok = t or not t;
  --!PROPERTY: ok;
tel
)";

Value sin_deg(const std::vector<Value>& a)
{
    Rational x = a[0].as_number();
    bool neg = x.sign() < 0;
    if (neg) x = -x;
    Rational p = x * (Rational(180) - x);
    Rational s = Rational(4) * p / (Rational(40500) - p);
    return Value::real(neg ? -s : s);
}

// Replays a counterexample in the interpreter, starting from the reported
// pre cells, and returns the first step where a property of `node` fails.
std::optional<std::size_t> replay(const lang::TypedProgram& p, const std::string& node, const VerifyResult& r,
                                  const interp::SimConfig& cfg = {})
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
    for (std::size_t i = 0; i < r.trace.length(); ++i) {
        std::map<std::string, Value> iv;
        for (const auto& d : decl.inputs) iv[d.name] = r.trace.at(d.name, i);
        auto out = in.step(node, st, iv);
        if (!out.assertion_ok) return std::nullopt;
        for (const auto& prop : decl.properties) {
            if (!out.values.at(prop.signal).as_bool()) return i;
        }
        st = std::move(out.state);
    }
    return std::nullopt;
}

EngineConfig quick()
{
    EngineConfig c;
    c.k_max = 8;
    c.timeout = 60;
    return c;
}

}  // namespace

TEST_CASE("s-expression reader")
{
    auto e = parse_sexpr("((|x@0| (- 3)) (y (/ 1.0 3.0)))");
    REQUIRE(!e.is_atom);
    REQUIRE(e.list.size() == 2);
    CHECK(e.list[0].list[0].atom == "x@0");
    CHECK(parse_smt_value(e.list[0].list[1], Type::Int) == Value::integer(-3));
    CHECK(parse_smt_value(e.list[1].list[1], Type::Real) == Value::real(Rational(1, 3)));
    CHECK(parse_smt_value(parse_sexpr("(- (/ 5.0 2.0))"), Type::Real) == Value::real(Rational(-5, 2)));
    CHECK(parse_smt_value(parse_sexpr("true"), Type::Bool) == Value::boolean(true));
    CHECK_THROWS((void)parse_sexpr("(a b"));
}

TEST_CASE("counter is falsified at step 3 and the trace replays")
{
    auto p = testutil::program(kCounter);
    auto ts = tsys::compile(p, "C");
    auto r = kinduction(ts, "ok", quick());
    REQUIRE(r.verdict == Verdict::Falsified);
    CHECK(r.step == 3);
    CHECK(r.trace.length() == 4);
    CHECK(r.trace.at("c", 3) == Value::integer(3));
    CHECK(replay(p, "C", r) == std::optional<std::size_t>(3));
    CHECK(interp::check_observer(p, "C", r.trace) == std::optional<std::size_t>(3));

    auto b = bmc(ts, "ok", 2, quick());
    CHECK(b.verdict == Verdict::Unknown);
    CHECK(b.reason == UnknownReason::KMaxReached);
    CHECK(b.k == 2);
    CHECK(bmc(ts, "ok", 3, quick()).verdict == Verdict::Falsified);
}

TEST_CASE("unsatisfiable assumptions give a clean k-max verdict, not a proof")
{
    auto p = testutil::program(R"(
node U(i: bool) returns (ok: bool);
let
  assert i and not i;
  ok = false;
  --!PROPERTY: ok;
tel
)");
    auto ts = tsys::compile(p, "U");
    auto c = quick();
    c.k_max = 3;
    auto r = kinduction(ts, "ok", c);
    // vacuous: every step query is unsat, so induction closes at k = 1
    CHECK(r.verdict == Verdict::Valid);
    auto b = bmc(ts, "ok", 3, c);
    CHECK(b.verdict == Verdict::Unknown);
    CHECK(b.reason == UnknownReason::KMaxReached);
}

TEST_CASE("toggle tautology is 1-inductive")
{
    auto p = testutil::program(kToggle);
    auto ts = tsys::compile(p, "T");
    auto r = kinduction(ts, "ok", quick());
    CHECK(r.verdict == Verdict::Valid);
    CHECK(r.k == 1);
}

TEST_CASE("mode logic without the stick override violates G-180")
{
    auto p = testutil::bench_program();
    auto ts = tsys::compile(p, "ML_NoOverride_Stick");
    auto r = kinduction(ts, "ok", quick());
    REQUIRE(r.verdict == Verdict::Falsified);
    CHECK(r.trace.at("Stick", r.step).as_bool());
    CHECK(r.trace.at("FPAEng", r.step).as_bool());
    CHECK(replay(p, "ML_NoOverride_Stick", r) == std::optional<std::size_t>(r.step));
    REQUIRE(oracle_applies(ts));
    auto o = oracle_bmc(ts, "ok", 8);
    REQUIRE(o.verdict == Verdict::Falsified);
    CHECK(o.step == r.step);
    CHECK(!oracle_reachable_safe(ts, "ok"));

    auto c = quick();
    c.oracle_mode = true;
    auto om = kinduction(ts, "ok", c);
    CHECK(om.verdict == Verdict::Falsified);
    CHECK(om.step == r.step);
}

TEST_CASE("boolean G-180 is proved with the oracle's induction depth")
{
    auto p = testutil::bench_program();
    auto ts = tsys::compile(p, "ML_G180");
    auto r = kinduction(ts, "ok", quick());
    REQUIRE(r.verdict == Verdict::Valid);
    CHECK(r.k <= 4);
    auto o = oracle_kinduction(ts, "ok", 8);
    REQUIRE(o.verdict == Verdict::Valid);
    CHECK(o.k == r.k);
    CHECK(oracle_reachable_safe(ts, "ok"));
}

TEST_CASE("every boolean mode logic view agrees with the oracle")
{
    auto p = testutil::bench_program();
    for (const char* node : {"ML_G180", "ML_Exclusive", "ML_CaptureHolds", "ML_StickOverride", "ML_NoOverride_Stick"}) {
        CAPTURE(node);
        auto ts = tsys::compile(p, node);
        REQUIRE(oracle_applies(ts));
        auto s = kinduction(ts, "ok", quick());
        auto o = oracle_kinduction(ts, "ok", 8);
        CHECK(s.verdict == o.verdict);
        CHECK(s.k == o.k);
        if (o.verdict == Verdict::Falsified) CHECK(s.step == o.step);
        if (o.verdict == Verdict::Valid) CHECK(oracle_reachable_safe(ts, "ok"));
    }
}

TEST_CASE("invariant candidates")
{
    SUBCASE("a copied boolean yields an equality")
    {
        auto p = testutil::program(R"(
node E(i: bool) returns (ok: bool);
var a, b: bool;
let
  a = false -> pre i;
  b = false -> pre i;
  ok = a = b;
  --!PROPERTY: ok;
tel
)");
        auto ts = tsys::compile(p, "E");
        auto inv = generate_invariants(ts, sample_traces(ts, 8, 10, 1));
        bool found = false;
        for (const auto& c : inv) {
            CHECK(c.status == InvariantCandidate::Status::Proved);
            if (c.shape == InvariantCandidate::Shape::BoolEquality && ts.vars[c.a].name != "ok"
                && ts.vars[c.b].name != "ok")
                found = true;
        }
        CHECK(found);
    }
    SUBCASE("saturation output gets its bounds")
    {
        auto p = testutil::bench_program();
        // the bound itself, by exhaustive simulation over small rationals
        interp::Interpreter in(p);
        auto st = in.init_state("saturation");
        for (int num = -40; num <= 40; ++num) {
            for (int den = 1; den <= 4; ++den) {
                auto out = in.step("saturation", st,
                                   {{"x", Value::real(Rational(num, den))},
                                    {"lo", Value::real(Rational(0))},
                                    {"hi", Value::real(Rational(3))}});
                Rational y = out.values.at("y").as_number();
                CHECK(y >= Rational(0));
                CHECK(y <= Rational(3));
            }
        }
        auto ts = tsys::compile(p, "SaturatedDelay");
        auto inv = generate_invariants(ts, sample_traces(ts, 8, 20, 2));
        std::size_t y = *ts.find("y");
        bool lo = false;
        bool hi = false;
        for (const auto& c : inv) {
            if (c.shape != InvariantCandidate::Shape::IntervalBound || c.a != y) continue;
            if (c.lo && *c.lo == Value::real(Rational(0))) lo = true;
            if (c.hi && *c.hi == Value::real(Rational(3))) hi = true;
        }
        CHECK(lo);
        CHECK(hi);
    }
    SUBCASE("no defined variables means no candidates")
    {
        auto p = testutil::program("node N(i: bool) returns (o: bool); let o = i; tel\n");
        auto ts = tsys::compile(p, "N");
        CHECK(generate_invariants(ts, {}).empty());
    }
}

TEST_CASE("saturated delay line needs interval invariants")
{
    auto p = testutil::bench_program();
    auto ts = tsys::compile(p, "SaturatedDelay");
    auto c = quick();
    c.k_max = 3;
    auto plain = kinduction(ts, "ok", c);
    CHECK(plain.verdict == Verdict::Unknown);
    CHECK(plain.reason == UnknownReason::KMaxReached);

    c.use_invariants = true;
    auto with = kinduction(ts, "ok", c);
    REQUIRE(with.verdict == Verdict::Valid);
    CHECK(with.k == 1);
    CHECK(!with.invariants_used.empty());

    // without help the bound on the fifth stage closes one step after the delay line fills
    c.use_invariants = false;
    c.k_max = 8;
    auto deep = kinduction(ts, "ok", c);
    REQUIRE(deep.verdict == Verdict::Valid);
    CHECK(deep.k == 5);
}

TEST_CASE("batch driver")
{
    auto p = testutil::bench_program(kCounter);
    CHECK(verify_all({}, quick()).empty());
    std::vector<tsys::TransitionSystem> systems;
    for (const char* n : {"C", "ML_G180", "ML_NoOverride_Stick", "SaturatedDelay"}) systems.push_back(tsys::compile(p, n));
    std::vector<Task> tasks;
    for (const auto& ts : systems) tasks.push_back({ts.node, &ts, "ok"});
    auto c = quick();
    c.k_max = 3;
    auto serial = verify_all(tasks, c);
    c.parallel_properties = true;
    auto par = verify_all(tasks, c);
    REQUIRE(serial.size() == 4);
    for (const auto& [id, r] : serial) {
        CAPTURE(id);
        CHECK(par.at(id).verdict == r.verdict);
        CHECK(par.at(id).k == r.k);
        CHECK(par.at(id).step == r.step);
        CHECK(par.at(id).trace == r.trace);
    }
    CHECK(serial.at("C").verdict == Verdict::Falsified);
    CHECK(serial.at("ML_G180").verdict == Verdict::Valid);
    CHECK(serial.at("SaturatedDelay").verdict == Verdict::Unknown);
}

TEST_CASE("random boolean systems: SMT, oracle and brute force agree")
{
    int checked = 0;
    int falsified = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        testutil::BoolProgramGen gen(seed, 3, 5);
        auto sys = gen.make("R");
        CAPTURE(sys.source);
        lang::TypedProgram p;
        try {
            p = testutil::program(sys.source);
        } catch (const std::exception&) {
            continue;  // rejected programs (e.g. causality) are not interesting here
        }
        auto ts = tsys::compile(p, "R");
        if (!oracle_applies(ts)) continue;
        ++checked;
        const int depth = 4;
        interp::Interpreter in(p);
        auto brute = testutil::brute_force_bmc(in, "R", depth);
        auto smt = bmc(ts, "ok", depth, quick());
        auto orc = oracle_bmc(ts, "ok", depth);
        if (brute) {
            ++falsified;
            REQUIRE(smt.verdict == Verdict::Falsified);
            CHECK(smt.step == *brute);
            REQUIRE(orc.verdict == Verdict::Falsified);
            CHECK(orc.step == *brute);
            CHECK(replay(p, "R", smt) == std::optional<std::size_t>(smt.step));
        } else {
            CHECK(smt.verdict == Verdict::Unknown);
            CHECK(orc.verdict == Verdict::Unknown);
        }
        auto ki = kinduction(ts, "ok", quick());
        auto ko = oracle_kinduction(ts, "ok", 8);
        CHECK(ki.verdict == ko.verdict);
        CHECK(ki.k == ko.k);
        if (ko.verdict == Verdict::Valid) CHECK(oracle_reachable_safe(ts, "ok"));

        // slicing must not change verdicts
        auto nc = quick();
        nc.slice = false;
        auto unsliced = kinduction(ts, "ok", nc);
        CHECK(unsliced.verdict == ki.verdict);
        CHECK(unsliced.k == ki.k);
    }
    CHECK(checked >= 40);
    CHECK(falsified >= 5);
    CHECK(falsified < checked);
}

TEST_CASE("solver trouble is reported, not hidden")
{
    auto p = testutil::program(kCounter);
    auto ts = tsys::compile(p, "C");
    auto c = quick();
    c.solver_command = {"/nonexistent/solver"};
    auto r = kinduction(ts, "ok", c);
    CHECK(r.verdict == Verdict::Unknown);
    CHECK(r.reason == UnknownReason::SolverError);

    c.solver_command = {"sleep", "30"};
    c.timeout = 0.5;
    auto t0 = std::chrono::steady_clock::now();
    auto t = kinduction(ts, "ok", c);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(t.verdict == Verdict::Unknown);
    CHECK(t.reason == UnknownReason::Timeout);
    CHECK(secs < 5);
}

TEST_CASE("nonlinear extern terms: spurious without refinement, valid with it")
{
    auto p = testutil::bench_program();
    auto c = quick();
    c.externs["sin_deg"] = sin_deg;
    auto ts = tsys::compile(p, "FPA_TRIG");
    auto r = kinduction(ts, "ok", c);
    CHECK(r.verdict == Verdict::Unknown);
    CHECK(r.reason == UnknownReason::NonlinearSpurious);
    CHECK(!r.detail.empty());

    auto ts2 = tsys::compile(p, "FPA_TRIG_REFINED");
    auto r2 = kinduction(ts2, "ok", c);
    CHECK(r2.verdict == Verdict::Valid);
    CHECK(r2.k == 1);
}

TEST_CASE("result JSON round trip")
{
    auto p = testutil::program(kCounter);
    auto ts = tsys::compile(p, "C");
    auto r = kinduction(ts, "ok", quick());
    auto j = to_json("ok", r);
    CHECK(j["verdict"] == "Falsified");
    CHECK(j["property"] == "ok");
    auto back = result_from_json(j);
    CHECK(back.verdict == r.verdict);
    CHECK(back.step == r.step);
    CHECK(back.trace == r.trace);
    CHECK(back.initial == r.initial);

    VerifyResult u;
    u.reason = UnknownReason::Timeout;
    u.detail = "budget";
    auto uj = to_json("p", u);
    CHECK(uj["reason"] == "Timeout");
    auto ub = result_from_json(uj);
    CHECK(ub.reason == UnknownReason::Timeout);
    CHECK(ub.detail == "budget");
}

TEST_CASE("incremental solving matches one process per query")
{
    auto p = testutil::bench_program(kCounter);
    for (const char* n : {"C", "ML_G180", "ML_NoOverride_Stick", "SaturatedDelay"}) {
        CAPTURE(n);
        auto ts = tsys::compile(p, n);
        auto a = quick();
        a.k_max = 6;
        auto b = a;
        b.incremental = true;
        auto ra = kinduction(ts, "ok", a);
        auto rb = kinduction(ts, "ok", b);
        CHECK(ra.verdict == rb.verdict);
        CHECK(ra.k == rb.k);
        CHECK(ra.step == rb.step);
    }
}
