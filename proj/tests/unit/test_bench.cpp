#include <doctest.h>

#include <fstream>

#include "dfv/bench/bench.hpp"
#include "dfv/interp/interp.hpp"
#include "dfv/interp/random_sim.hpp"
#include "dfv/lang/pretty.hpp"
#include "util.hpp"

using namespace dfv;
using namespace dfv::bench;

namespace {

const Benchmark& shipped()
{
    static const Benchmark b = load_benchmark();
    return b;
}

Value r(long n, long d = 1) { return Value::real(Rational(n, d)); }

std::filesystem::path scratch_copy(const std::string& tag)
{
    auto dir = std::filesystem::temp_directory_path() / ("dfv_bench_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::copy(DFV_BENCH_DIR, dir, std::filesystem::copy_options::recursive);
    return dir;
}

void edit_json(const std::filesystem::path& f, const std::function<void(nlohmann::json&)>& fn)
{
    auto j = nlohmann::json::parse(testutil::read_file(f));
    fn(j);
    std::ofstream(f) << j.dump(2);
}

}  // namespace

TEST_CASE("stdlib blocks")
{
    const auto& p = shipped().program;
    interp::Interpreter in(p);
    auto once = [&](const char* node, Value x, Value a, Value b) {
        const auto& d = p.node(node);
        std::map<std::string, Value> iv{{d.inputs[0].name, x}, {d.inputs[1].name, a}, {d.inputs[2].name, b}};
        return in.step(node, in.init_state(node), iv).values.at("y");
    };
    CHECK(once("saturation", r(5), r(0), r(3)) == r(3));
    CHECK(once("saturation", r(-1), r(0), r(3)) == r(0));
    CHECK(once("saturation", r(2), r(0), r(3)) == r(2));
    CHECK(once("dead_zone", r(0), r(-1), r(1)) == r(0));
    CHECK(once("dead_zone", r(3), r(-1), r(1)) == r(2));
    CHECK(once("dead_zone", r(-3), r(-1), r(1)) == r(-2));

    interp::Trace t;
    for (const char* s : {"x", "dt", "x0"}) t.add_signal(s, Type::Real);
    for (int i = 0; i < 4; ++i) {
        t.append("x", r(1));
        t.append("dt", r(1, 2));
        t.append("x0", r(0));
    }
    auto out = in.simulate("integrator", t, 4);
    CHECK(out.at("y", 0) == r(0));
    CHECK(out.at("y", 1) == r(1, 2));
    CHECK(out.at("y", 2) == r(1));
    CHECK(out.at("y", 3) == r(3, 2));
}

TEST_CASE("catalog shape")
{
    const auto& b = shipped();
    REQUIRE(b.properties.size() == 20);
    int direct = 0;
    int comp = 0;
    int nm = 0;
    for (const auto& s : b.properties) {
        CAPTURE(s.id);
        CHECK(!s.prose.empty());
        switch (s.expected_class) {
        case ExpectedClass::DirectProof: ++direct; break;
        case ExpectedClass::CompositionalProof: ++comp; break;
        case ExpectedClass::NotModeled: ++nm; break;
        }
    }
    CHECK(direct == 11);
    CHECK(comp == 6);
    CHECK(nm == 3);
    CHECK(b.spec("G-120").assumptions_used == std::vector<std::string>{"G-180", "A1", "A2", "FPA1"});
    CHECK(b.arguments.size() == 6);
    CHECK(b.arguments.at("G-120").contracts.size() == 3);
    for (const char* n : {"ModeLogic", "AutoPilot", "AltitudeControl", "FPAControl", "HeadingControl", "Autothrottle"}) {
        CHECK(b.program.program.find_node(n) != nullptr);
    }
}

TEST_CASE("catalog thresholds")
{
    const auto& b = shipped();
    // the six environment asserts of the climb argument, GammaCmd window included
    const auto& g120 = b.program.node("G_120");
    REQUIRE(g120.assertions.size() == 6);
    CHECK(lang::pretty(g120.assertions[5]).find("GammaCmd > 1.0") != std::string::npos);
    CHECK(lang::pretty(g120.assertions[5]).find("GammaCmd < 10.0") != std::string::npos);

    interp::Interpreter in(b.program);
    // 200 ft capture: exactly at the threshold altitude engages, just outside does not
    auto engage = [&](long alt) {
        const auto& d = b.program.node("AutoPilot");
        std::map<std::string, Value> iv;
        for (const auto& v : d.inputs) iv[v.name] = r(0);
        iv["AltMode"] = r(1);
        iv["FPAMode"] = r(1);
        iv["AltCmd"] = r(10000);
        iv["Altitude"] = r(alt);
        auto out = in.step("AutoPilot", in.init_state("AutoPilot"), iv);
        return std::make_pair(out.values.at("AltEng").as_bool(), out.values.at("FPAEng").as_bool());
    };
    CHECK(engage(9800) == std::make_pair(true, false));
    CHECK(engage(10200) == std::make_pair(true, false));
    CHECK(engage(9799) == std::make_pair(false, true));
    CHECK(engage(10201) == std::make_pair(false, true));

    // 250 ft hold: the observer flags leaving the band once inside it
    auto g200 = [&](const std::vector<long>& alt_steps) {
        interp::Trace t;
        for (const char* s : {"AltCmd", "Alt0", "GsKts", "Hdot", "HdotChgRate"}) t.add_signal(s, Type::Real);
        t.add_signal("AltEng", Type::Bool);
        for (long a : alt_steps) {
            t.append("AltEng", Value::boolean(true));
            t.append("AltCmd", r(1000));
            t.append("Alt0", r(a));
            for (const char* s : {"GsKts", "Hdot", "HdotChgRate"}) t.append(s, r(0));
        }
        return in.simulate("G_200", t, alt_steps.size());
    };
    auto tr = g200({1250, 1250, 1250, 1250});
    for (std::size_t i = 0; i < 4; ++i) CHECK(tr.at("ok", i).as_bool());
    CHECK(tr.at("Inside", 0).as_bool());
    CHECK(!g200({1251}).at("Inside", 0).as_bool());
}

TEST_CASE("catalog invariants by simulation")
{
    const auto& b = shipped();
    interp::Interpreter in(b.program);
    for (const char* n : {"ModeExclusive", "StickOverride", "G_260", "G_290", "G_240"}) {
        CAPTURE(n);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            interp::RandomSimOptions o;
            o.steps = 2000;
            o.seed = seed;
            auto res = interp::random_simulate(in, n, o);
            CHECK(!res.violation);
            CHECK(!res.stalled);
        }
        auto v = engine::kinduction(tsys::compile(b.program, n), "ok");
        CHECK(v.verdict == engine::Verdict::Valid);
    }
}

TEST_CASE("benchmark run")
{
    const auto& b = shipped();
    engine::EngineConfig cfg;
    cfg.timeout = 60;
    auto rep = run_benchmark(b, cfg);
    REQUIRE(rep.rows.size() == 20);
    CHECK(rep.count("Valid") == 17);
    CHECK(rep.count("NotModeled") == 3);
    for (const char* id : {"G-160", "G-280", "G-190"}) {
        CHECK(rep.row(id).verdict == "NotModeled");
        CHECK(rep.row(id).result.is_null());
        CHECK(!rep.row(id).attempted);
    }
    CHECK(rep.consistent());
    for (const auto& row : rep.rows) {
        CAPTURE(row.id);
        if (row.verdict != "NotModeled") CHECK(row.matches_expected == std::optional<bool>(true));
    }
    auto again = run_benchmark(b, cfg);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(again.rows[i].verdict == rep.rows[i].verdict);
        CHECK(again.rows[i].k == rep.rows[i].k);
    }
    auto j = to_json(rep);
    CHECK(j["summary"]["valid"] == 17);
    CHECK(j["summary"]["not_modeled"] == 3);

    auto only = run_benchmark(b, cfg, {"G-180", "G-160"});
    CHECK(only.rows.size() == 2);
}

TEST_CASE("manifest integrity")
{
    SUBCASE("missing observer node")
    {
        auto dir = scratch_copy("missing_node");
        edit_json(dir / "properties.json", [](nlohmann::json& j) { j["properties"][6]["observer_node"] = "G_999"; });
        CHECK_THROWS_AS((void)load_benchmark(dir), ManifestError);
    }
    SUBCASE("red row reclassified")
    {
        auto dir = scratch_copy("reclass");
        edit_json(dir / "properties.json", [](nlohmann::json& j) {
            for (auto& p : j["properties"]) {
                if (p["id"] == "G-190") p["expected_class"] = "DirectProof";
            }
        });
        CHECK_THROWS_AS((void)load_benchmark(dir), ManifestError);
    }
    SUBCASE("contract on unknown node")
    {
        auto dir = scratch_copy("bad_contract");
        edit_json(dir / "contracts.json", [](nlohmann::json& j) { j["arguments"]["G-120"]["contracts"][0]["node"] = "Nope"; });
        CHECK_THROWS_AS((void)load_benchmark(dir), ManifestError);
    }
    SUBCASE("pinned verdict contradicted")
    {
        auto dir = scratch_copy("pins");
        edit_json(dir / "expected.json", [](nlohmann::json& j) { j["properties"]["G-180"]["verdict"] = "Falsified"; });
        auto rep = run_benchmark(load_benchmark(dir), {}, {"G-180"});
        CHECK(!rep.consistent());
    }
}
