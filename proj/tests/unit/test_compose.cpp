#include <doctest.h>

#include <chrono>
#include <random>

#include "dfv/compose/compose.hpp"
#include "dfv/interp/random_sim.hpp"
#include "dfv/lang/parser.hpp"
#include "dfv/lang/pretty.hpp"
#include "util.hpp"

using namespace dfv;
using namespace dfv::compose;
using engine::Verdict;

namespace {

nlohmann::json argument(const std::string& id)
{
    auto j = nlohmann::json::parse(testutil::read_file(std::filesystem::path(DFV_BENCH_DIR) / "contracts.json"));
    return j.at("arguments").at(id);
}

std::vector<Contract> contracts_of(const std::string& id)
{
    return contracts_from_json(argument(id).at("contracts"));
}

engine::EngineConfig cfg()
{
    engine::EngineConfig c;
    c.k_max = 6;
    c.timeout = 60;
    return c;
}

Contract single(const std::string& node, const std::string& id, const std::string& expr)
{
    return {node, {}, {{id, lang::parse_expression(expr)}}, {}};
}

const lang::TypedProgram& bench()
{
    static const lang::TypedProgram p = testutil::bench_program(R"(
node Zero(x: real) returns (y: real); let y = 0.0; tel
node UseZero(x: real) returns (ok: bool); var y: real; let y = Zero(x); ok = y = 0.0; --!PROPERTY: ok; tel
node NoEnv(HeadEng: bool; Heading, HeadCmd, BankLimit: real) returns (ok: bool);
var RollCmd: real;
let
  RollCmd = HeadingControl(HeadEng, Heading, HeadCmd, BankLimit);
  ok = not HeadEng or ((HeadCmd = Heading) = (RollCmd = 0.0));
  --!PROPERTY: ok;
tel
node TwoZeros(x: real) returns (ok: bool);
var a, b: real;
let
  a = Zero(x);
  b = Zero(x + 1.0);
  ok = a = b;
  --!PROPERTY: ok;
tel
)");
    return p;
}

}  // namespace

TEST_CASE("component checks")
{
    const auto& p = bench();
    SUBCASE("A2 holds on the altitude controller")
    {
        auto ob = check_component(p, single("AltitudeControl", "A2", "(AltEng = true) or (AltGammaCmd = 0.0)"), {}, cfg());
        REQUIRE(ob.goals.count("A2"));
        CHECK(ob.goals.at("A2").verdict == Verdict::Valid);
    }
    SUBCASE("trivial guarantee")
    {
        auto ob = check_component(p, single("Zero", "T", "true"), {}, cfg());
        CHECK(ob.goals.at("T").verdict == Verdict::Valid);
        CHECK(ob.goals.at("T").k == 1);
    }
    SUBCASE("false guarantee fails at once")
    {
        auto ob = check_component(p, single("Zero", "One", "y = 1.0"), {}, cfg());
        CHECK(ob.goals.at("One").verdict == Verdict::Falsified);
        CHECK(ob.goals.at("One").step == 0);
    }
    SUBCASE("assumptions restrict the environment")
    {
        Contract c = single("HeadingControl", "pos", "not HeadEng or HeadCmd = Heading or not (RollCmd = 0.0)");
        auto without = check_component(p, c, {}, cfg());
        CHECK(without.goals.at("pos").verdict == Verdict::Falsified);
        c.assumptions.push_back({"H1", lang::parse_expression("BankLimit > 0.0")});
        // a full turn of difference still reads as "on heading"
        CHECK(check_component(p, c, {}, cfg()).goals.at("pos").verdict == Verdict::Falsified);
        c.assumptions.push_back({"H2", lang::parse_expression("Heading >= 0.0 and Heading < 360.0")});
        c.assumptions.push_back({"H3", lang::parse_expression("HeadCmd >= 0.0 and HeadCmd < 360.0")});
        auto with = check_component(p, c, {}, cfg());
        CHECK(with.goals.at("pos").verdict == Verdict::Valid);
    }
}

TEST_CASE("abstraction")
{
    const auto& p = bench();
    SUBCASE("empty contract set leaves the program alone")
    {
        auto q = abstract_with_contracts(p, "G_120", {});
        CHECK(lang::same_structure(q.program, p.program));
    }
    SUBCASE("AutoPilot keeps only its two guarantees")
    {
        auto cs = contracts_of("G-120");
        std::vector<Contract> ap{cs[0]};
        REQUIRE(ap[0].node == "AutoPilot");
        auto q = abstract_with_contracts(p, "G_120", ap);
        const auto& n = q.node("AutoPilot");
        CHECK(n.assertions.size() == 2);
        CHECK(n.locals.empty());
        CHECK(n.equations.size() == 5);
        CHECK(n.inputs.size() == 15);
        CHECK(lang::pretty(n.assertions[1]) == lang::pretty(lang::parse_expression("(not (AltMode = 0.0)) or (AltEng = false)")));
        // ModeLogic is gone, FPAControl stays concrete
        CHECK(q.program.find_node("ModeLogic") == nullptr);
        CHECK(q.node("FPAControl").equations.size() == 3);
        const auto& top = q.node("G_120");
        CHECK(top.find_signal("AutoPilot__1__free__FPAEng"));
        CHECK(concrete_origin(p, "G_120", "AutoPilot__1__free__FPAEng") == "AutoPilot.FPAEng");
        CHECK(q.program.find_node("G_130") == nullptr);
    }
    SUBCASE("repeated call sites get distinct fresh inputs")
    {
        auto q = abstract_with_contracts(p, "TwoZeros", {single("Zero", "Z", "y = 0.0")});
        const auto& top = q.node("TwoZeros");
        CHECK(top.inputs.size() == 3);
        CHECK(concrete_origin(p, "TwoZeros", "Zero__2__free__y") == "Zero#2.y");
        auto ob = check_system(p, "TwoZeros", "ok", {single("Zero", "Z", "y = 0.0")}, cfg());
        CHECK(ob.goals.at("ok").verdict == Verdict::Valid);
        auto weak = check_system(p, "TwoZeros", "ok", {single("Zero", "Z", "y >= 0.0")}, cfg());
        CHECK(weak.goals.at("ok").verdict == Verdict::Falsified);
    }
    SUBCASE("contracts must sit in the call tree")
    {
        CHECK_THROWS_AS((void)abstract_with_contracts(p, "G_120", {single("HeadingControl", "x", "true")}), ContractError);
        CHECK_THROWS_AS((void)abstract_with_contracts(p, "G_120", {single("G_120", "x", "true")}), ContractError);
    }
    SUBCASE("concrete runs satisfying the guarantees are runs of the abstraction")
    {
        auto cs = contracts_of("G-120");
        auto q = abstract_with_contracts(p, "G_120", cs);
        auto concrete = tsys::compile(p, "G_120");
        interp::Interpreter abs(q);
        const auto& qtop = q.node("G_120");
        auto traces = engine::sample_traces(concrete, 100, 12, 7);
        REQUIRE(traces.size() == 100);
        int steps_checked = 0;
        for (const auto& t : traces) {
            auto run = tsys::run(concrete, t, t.length());
            auto full = tsys::concretize(concrete, run, true);
            auto st = abs.init_state("G_120");
            for (std::size_t i = 0; i < t.length(); ++i) {
                std::map<std::string, Value> in;
                for (const auto& d : qtop.inputs) {
                    in[d.name] = t.has(d.name) ? t.at(d.name, i) : full.at(concrete_origin(p, "G_120", d.name), i);
                }
                auto r = abs.step("G_120", st, in);
                CHECK(r.assertion_ok);
                CHECK(r.values.at("Obs") == full.at("Obs", i));
                st = std::move(r.state);
                ++steps_checked;
            }
        }
        CHECK(steps_checked == 1200);
    }
}

TEST_CASE("G-120 argument")
{
    const auto& p = bench();
    auto cs = contracts_of("G-120");
    auto t0 = std::chrono::steady_clock::now();
    auto a = run_argument(p, "G_120", "Obs", cs, cfg());
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(a.components.size() == 4);
    for (const auto& c : a.components) {
        CAPTURE(c.guarantee);
        CHECK(c.result.verdict == Verdict::Valid);
    }
    CHECK(a.system_result.verdict == Verdict::Valid);
    CHECK(a.assumptions.empty());
    CHECK(a.proved());
    CHECK(secs < 60);
    auto j = to_json(a);
    CHECK(j["system_verdict"] == "Valid");
    CHECK(j["components"].size() == 4);

    // every guarantee is needed
    for (const char* drop : {"G-180", "A1", "A2", "FPA1"}) {
        CAPTURE(drop);
        auto weaker = cs;
        for (auto& c : weaker) {
            std::erase_if(c.guarantees, [&](const Clause& g) { return g.id == drop; });
        }
        auto ob = check_system(p, "G_120", "Obs", weaker, cfg());
        const auto& r = ob.goals.at("Obs");
        CHECK(r.verdict != Verdict::Valid);
        if (r.verdict == Verdict::Falsified) {
            auto q = abstract_with_contracts(p, "G_120", weaker);
            CHECK(interp::check_observer(q, "G_120", r.trace) == std::optional<std::size_t>(r.step));
        }
    }
}

TEST_CASE("adding guarantees never breaks a proof")
{
    const auto& p = bench();
    auto cs = contracts_of("G-120");
    std::vector<std::pair<std::size_t, std::size_t>> clauses;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = 0; j < cs[i].guarantees.size(); ++j) clauses.emplace_back(i, j);
    }
    REQUIRE(clauses.size() == 4);
    std::map<unsigned, Verdict> verdict;
    for (unsigned mask = 0; mask < 16; ++mask) {
        auto sub = cs;
        for (auto& c : sub) c.guarantees.clear();
        for (std::size_t b = 0; b < 4; ++b) {
            if (mask & (1u << b)) sub[clauses[b].first].guarantees.push_back(cs[clauses[b].first].guarantees[clauses[b].second]);
        }
        auto c = cfg();
        c.k_max = 3;
        verdict[mask] = check_system(p, "G_120", "Obs", sub, c).goals.at("Obs").verdict;
    }
    CHECK(verdict[15] == Verdict::Valid);
    for (unsigned a = 0; a < 16; ++a) {
        for (unsigned b = 0; b < 16; ++b) {
            if ((a & b) != a || verdict[a] != Verdict::Valid) continue;
            CAPTURE(a);
            CAPTURE(b);
            CHECK(verdict[b] == Verdict::Valid);
        }
    }
}

TEST_CASE("the other compositional rows")
{
    const auto& p = bench();
    for (const char* id : {"G-130", "G-140", "G-150", "G-250", "G-110"}) {
        CAPTURE(id);
        auto arg = argument(id);
        auto a = run_argument(p, arg["top"], arg["property"], contracts_from_json(arg["contracts"]), cfg());
        for (const auto& c : a.components) {
            CAPTURE(c.guarantee);
            CHECK(c.result.verdict == Verdict::Valid);
        }
        for (const auto& [k, r] : a.assumptions) {
            CAPTURE(k);
            CHECK(r.verdict == Verdict::Valid);
        }
        CHECK(a.system_result.verdict == Verdict::Valid);
        CHECK(a.proved());
    }
}

TEST_CASE("assumption obligations")
{
    const auto& p = bench();
    auto g250 = contracts_of("G-250");
    SUBCASE("discharged by the environment asserts")
    {
        auto ob = check_system(p, "G_250", "ok", g250, cfg());
        CHECK(ob.goals.at("ok").verdict == Verdict::Valid);
        REQUIRE(ob.assumptions.size() == 3);
        CHECK(ob.assumptions.count("HeadingControl:H1@HeadingControl"));
        CHECK(ob.all_valid());
    }
    SUBCASE("reported when the context does not provide them")
    {
        auto ob = check_system(p, "NoEnv", "ok", g250, cfg());
        CHECK(ob.goals.at("ok").verdict == Verdict::Valid);  // the guarantee alone suffices...
        CHECK(!ob.all_valid());                              // ...but it was bought with unmet assumptions
        CHECK(ob.assumptions.at("HeadingControl:H1@HeadingControl").verdict == Verdict::Falsified);
    }
}

TEST_CASE("circularity")
{
    const auto& p = bench();
    auto g = call_graph(p);
    CHECK_NOTHROW(check_noncircular(contracts_of("G-120"), g));
    CHECK_NOTHROW(check_noncircular(contracts_of("G-140"), g));
    CHECK_NOTHROW(check_noncircular({}, g));
    Contract a = single("AltitudeControl", "x", "true");
    Contract b = single("FPAControl", "y", "true");
    a.uses = {"FPAControl"};
    b.uses = {"AltitudeControl"};
    try {
        check_noncircular({a, b}, g);
        FAIL("cycle not detected");
    } catch (const CircularityError& e) {
        CHECK(e.cycle() == std::vector<std::string>{"AltitudeControl", "FPAControl"});
    }
    CHECK_THROWS_AS((void)check_system(p, "G_120", "Obs", {a, b}, cfg()), CircularityError);
}

TEST_CASE("system property given as an expression")
{
    const auto& p = bench();
    auto ob = check_system(p, "UseZero", "true", {}, cfg());
    CHECK(ob.goals.at("true").verdict == Verdict::Valid);
    CHECK(ob.goals.at("true").k == 1);
}

TEST_CASE("proved compositional argument survives concrete simulation")
{
    const auto& p = bench();
    interp::Interpreter in(p);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        interp::RandomSimOptions o;
        o.steps = 1000;
        o.seed = seed;
        auto r = interp::random_simulate(in, "G_120", o);
        CHECK(!r.violation);
        CHECK(!r.stalled);
    }
}

TEST_CASE("contract manifest round trip")
{
    auto cs = contracts_of("G-140");
    auto back = contracts_from_json(to_json(cs));
    REQUIRE(back.size() == cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        CHECK(back[i].node == cs[i].node);
        REQUIRE(back[i].guarantees.size() == cs[i].guarantees.size());
        for (std::size_t j = 0; j < cs[i].guarantees.size(); ++j) {
            CHECK(lang::same_structure(back[i].guarantees[j].expr, cs[i].guarantees[j].expr));
        }
        CHECK(back[i].assumptions.size() == cs[i].assumptions.size());
    }
    CHECK_THROWS_AS((void)contracts_from_json(nlohmann::json::parse(R"([{"node":"X","guarantees":[{"id":"g","expr":"a and"}]}])")),
                    ContractError);
}
