#include <doctest.h>

#include <chrono>
#include <random>
#include <regex>

#include "dfv/bench/bench.hpp"
#include "dfv/safetycase/pattern.hpp"
#include "util.hpp"

using namespace dfv::safetycase;
using nlohmann::json;

namespace {

std::filesystem::path sc_dir() { return std::filesystem::path(DFV_BENCH_DIR) / "safetycase"; }
json load(const std::string& f) { return json::parse(testutil::read_file(sc_dir() / f)); }

std::size_t kind_count(const GsnGraph& g, ElementKind k) { return query(g, {.kind = k}).size(); }

std::size_t label_count(const GsnGraph& g, const std::string& label)
{
    return query(g, {.kind = ElementKind::Strategy, .meta_key = "label", .meta_value = label}).size();
}

bool structurally_clean(const GsnGraph& g)
{
    for (const auto& d : validate(g)) {
        if (d.kind != Defect::Kind::Undeveloped) return false;
    }
    return true;
}

std::size_t count_edges(const std::string& dot) { return static_cast<std::size_t>(std::count(dot.begin(), dot.end(), '>')); }

std::size_t count_dot_nodes(const std::string& dot)
{
    std::regex node(R"(^\s+"[^"]+" \[shape)");
    std::size_t n = 0;
    std::istringstream in(dot);
    for (std::string line; std::getline(in, line);) {
        if (std::regex_search(line, node)) ++n;
    }
    return n;
}

// Independent expansion of the default pattern: every requirement yields a
// goal, a context and one strategy; a leaf adds a solution when it is proved
// or carries informal evidence.
struct Expected {
    std::size_t elements = 0;
    std::size_t links = 0;
    std::size_t solutions = 0;
    std::map<std::string, std::size_t> labels;
};

bool expand(const RequirementNode& n, const Results& res, Expected& e, bool is_root)
{
    e.elements += 3;
    e.links += 2 + (is_root ? 0 : 1);
    auto it = res.find(n.key());
    bool valid = it != res.end() && it->second.formalized && it->second.verdict == "Valid";
    bool proved;
    if (n.children.empty()) {
        proved = valid;
        bool informal = it != res.end() && !it->second.formalized;
        if (proved || informal) {
            ++e.elements;
            ++e.links;
            ++e.solutions;
        }
    } else {
        bool all = true;
        for (const auto& c : n.children) all = expand(c, res, e, false) && all;
        proved = all && valid;
    }
    std::string label = n.children.empty() ? (proved ? "direct-formal-proof" : "informal-compositional")
                                           : (proved ? "formal-compositional" : "informal-compositional");
    ++e.labels[label];
    return proved;
}

Expected expand(const RequirementTree& t, const Results& res)
{
    Expected e;
    for (const auto& r : t.roots) expand(r, res, e, true);
    return e;
}

RequirementNode single_leaf()
{
    return {"R-1", "The only requirement", "", "", "", {}};
}

Results valid_for(const std::string& k)
{
    Evidence e;
    e.verdict = "Valid";
    e.k = 2;
    e.evidence = "proof";
    return {{k, e}};
}

}  // namespace

TEST_CASE("empty tree and empty graph")
{
    auto g = instantiate_pattern(default_pattern(), {}, {});
    CHECK(g.empty());
    CHECK(validate(g).empty());
    auto m = metrics(g);
    CHECK(m.total == 0);
    CHECK(m.links == 0);
    CHECK(m.max_depth == 0);
    CHECK(m.undeveloped == 0);
    CHECK(m.formalized_fraction == 0.0);
    auto dot = export_dot(g);
    CHECK(dot.find("digraph gsn {") == 0);
    CHECK(count_dot_nodes(dot) == 0);
    CHECK(query(g, {}).empty());
}

TEST_CASE("single proved leaf")
{
    RequirementTree t{{single_leaf()}};
    auto g = instantiate_pattern(default_pattern(), t, valid_for("R-1"));
    REQUIRE(g.size() == 4);
    CHECK(kind_count(g, ElementKind::Goal) == 1);
    CHECK(kind_count(g, ElementKind::Strategy) == 1);
    CHECK(kind_count(g, ElementKind::Solution) == 1);
    CHECK(kind_count(g, ElementKind::Context) == 1);
    CHECK(g.roots() == std::vector<std::string>{"goal:R-1"});
    CHECK(g.element("s_direct:R-1").metadata["label"] == "direct-formal-proof");
    CHECK(g.element("sol_proof:R-1").text == "R-1 Valid by k-induction (k = 2)");
    CHECK(g.element("ctx:R-1").text == default_pattern().default_context);
    CHECK(validate(g).empty());
    auto dot = export_dot(g);
    CHECK(count_dot_nodes(dot) == 4);
    CHECK(count_edges(dot) == 3);
    CHECK(dot.find("shape=parallelogram") != std::string::npos);
    CHECK(dot.find("shape=circle") != std::string::npos);
    CHECK(dot.find("style=rounded") != std::string::npos);

    auto s = check_leaf_support(g, "goal:R-1");
    CHECK(s.leaves.size() == 1);
    CHECK(s.formal_fraction() == 1.0);

    // unproved leaf: goal, context and an undeveloped informal strategy
    auto u = instantiate_pattern(default_pattern(), t, {});
    CHECK(u.size() == 3);
    CHECK(u.element("s_informal:R-1").metadata["undeveloped"] == true);
    CHECK(check_leaf_support(u, "goal:R-1").count(LeafClass::Undeveloped) == 1);
    CHECK(metrics(u).undeveloped == 1);
}

TEST_CASE("validate")
{
    auto goal = [](const std::string& id) { return GsnElement{id, ElementKind::Goal, id, json::object()}; };
    SUBCASE("goal chain ending in a solution")
    {
        GsnGraph g;
        g.add_element(goal("G1"));
        g.add_element(goal("G2"));
        g.add_element({"Sn1", ElementKind::Solution, "evidence", {{"formalized", true}}});
        g.add_link(LinkKind::SupportedBy, "G1", "G2");
        g.add_link(LinkKind::SupportedBy, "G2", "Sn1");
        g.add_root("G1");
        CHECK(validate(g).empty());
        auto s = check_leaf_support(g, "G1");
        REQUIRE(s.leaves.size() == 1);
        CHECK(s.leaves[0].first == "G2");
        CHECK(s.leaves[0].second == LeafClass::FormalEvidence);
        CHECK(metrics(g).max_depth == 3);
    }
    SUBCASE("solution with an outgoing link")
    {
        GsnGraph g;
        g.add_element(goal("G1"));
        g.add_element({"Sn1", ElementKind::Solution, "evidence", json::object()});
        g.add_link(LinkKind::SupportedBy, "G1", "Sn1");
        g.add_link(LinkKind::SupportedBy, "Sn1", "G1");
        g.add_root("G1");
        auto d = validate(g);
        CHECK(std::any_of(d.begin(), d.end(), [](const Defect& x) { return x.kind == Defect::Kind::LinkKind && x.element == "Sn1"; }));
        CHECK_THROWS_AS((void)export_dot(g), GsnError);
    }
    SUBCASE("self-supporting goal")
    {
        GsnGraph g;
        g.add_element(goal("G1"));
        g.add_link(LinkKind::SupportedBy, "G1", "G1");
        g.add_root("G1");
        auto d = validate(g);
        REQUIRE(d.size() == 1);
        CHECK(d[0].kind == Defect::Kind::Cycle);
        (void)metrics(g);
    }
    SUBCASE("undeveloped, orphan, dangling, context misuse")
    {
        GsnGraph g;
        g.add_element(goal("G1"));
        g.add_element(goal("G2"));
        g.add_element({"C1", ElementKind::Context, "ctx", json::object()});
        g.add_link(LinkKind::SupportedBy, "G1", "C1");
        g.add_link(LinkKind::InContextOf, "G1", "C9");
        g.add_root("G1");
        std::map<Defect::Kind, int> n;
        for (const auto& d : validate(g)) ++n[d.kind];
        CHECK(n[Defect::Kind::LinkKind] == 1);
        CHECK(n[Defect::Kind::DanglingLink] == 1);
        CHECK(n[Defect::Kind::Orphan] == 1);       // G2
        CHECK(n[Defect::Kind::Undeveloped] == 1);  // G2
    }
    SUBCASE("duplicate ids")
    {
        GsnGraph g;
        g.add_element(goal("G1"));
        CHECK_THROWS_AS(g.add_element(goal("G1")), GsnError);
    }
}

TEST_CASE("G-120 fixture")
{
    auto pattern = pattern_from_json(load("pattern.json"));
    CHECK(pattern == default_pattern());
    auto tree = requirements_from_json(load("g120_requirements.json"));
    auto g = instantiate_pattern(pattern, tree, results_from_json(load("g120_results.json")));

    // hand expansion: 5 requirements x (goal, context, strategy) + 4 proved leaves
    CHECK(g.size() == 19);
    CHECK(g.links().size() == 18);
    CHECK(validate(g).empty());
    CHECK(kind_count(g, ElementKind::Goal) == 5);
    CHECK(kind_count(g, ElementKind::Solution) == 4);
    CHECK(label_count(g, "direct-formal-proof") == 4);
    CHECK(label_count(g, "formal-compositional") == 1);
    CHECK(label_count(g, "informal-compositional") == 0);

    // the figure fragment: G-120 goal, compositional strategy, subgoals for A2 and FPA1
    CHECK(g.roots() == std::vector<std::string>{"goal:G-120"});
    auto s5 = g.targets("goal:G-120", LinkKind::SupportedBy);
    REQUIRE(s5 == std::vector<std::string>{"s_formal:G-120"});
    auto sub = g.targets("s_formal:G-120", LinkKind::SupportedBy);
    CHECK(sub == std::vector<std::string>{"goal:G-180", "goal:A1", "goal:A2", "goal:FPA1"});
    CHECK(g.targets("goal:A2", LinkKind::SupportedBy) == std::vector<std::string>{"s_direct:A2", "sol_proof:A2"});
    CHECK(g.targets("goal:FPA1", LinkKind::SupportedBy) == std::vector<std::string>{"s_direct:FPA1", "sol_proof:FPA1"});
    CHECK(g.element("goal:G-120").metadata["risk"] == "high");
    CHECK(g.element("goal:G-120").metadata["depends_on_assumptions"] == json({"G-180", "A1", "A2", "FPA1"}));
    CHECK(g.element("ctx:FPA1").text == g.element("ctx:G-120").text);

    auto s = check_leaf_support(g, "goal:G-120");
    CHECK(s.leaves.size() == 4);
    CHECK(s.count(LeafClass::FormalEvidence) == 4);
    auto m = metrics(g);
    CHECK(m.max_depth == 4);
    CHECK(m.undeveloped == 0);
    CHECK(m.formalized_fraction == 1.0);

    CHECK(query(g, {}).size() == 19);
    CHECK(query(g, {.text = "no such words"}).empty());
    CHECK(query(g, {.kind = ElementKind::Solution, .related_to = "fpa"}).size() == 2);
    CHECK(query(g, {.kind = ElementKind::Solution, .related_to = "climb"}).size() == 4);
    CHECK(query(g, {.kind = ElementKind::Goal, .text = "altitude"}).size() == 3);

    // a leaf goal is its own single-leaf report
    auto leaf = check_leaf_support(g, "goal:A2");
    CHECK(leaf.leaves == std::vector<std::pair<std::string, LeafClass>>{{"goal:A2", LeafClass::FormalEvidence}});
    CHECK_THROWS_AS((void)check_leaf_support(g, "goal:nope"), GsnError);
    CHECK_THROWS_AS((void)check_leaf_support(g, "ctx:A2"), GsnError);

    CHECK(graph_from_json(json::parse(to_json(g).dump())) == g);
}

TEST_CASE("G-120 with FPA1 backed by testing")
{
    auto tree = requirements_from_json(load("g120_requirements.json"));
    auto g = instantiate_pattern(default_pattern(), tree, results_from_json(load("g120_results_fpa1_informal.json")));
    CHECK(g.size() == 19);
    CHECK(validate(g).empty());
    auto s = check_leaf_support(g, "goal:G-120");
    CHECK(s.count(LeafClass::FormalEvidence) == 3);
    CHECK(s.count(LeafClass::InformalEvidence) == 1);
    CHECK(s.count(LeafClass::Undeveloped) == 0);
    std::vector<std::string> informal;
    for (const auto& [id, c] : s.leaves) {
        if (c == LeafClass::InformalEvidence) informal.push_back(id);
    }
    CHECK(informal == std::vector<std::string>{"goal:FPA1"});

    CHECK(label_count(g, "direct-formal-proof") == 3);
    CHECK(label_count(g, "informal-compositional") == 2);
    CHECK(g.element("s_informal:G-120").metadata["unproved_children"] == json({"FPA1"}));
    CHECK(query(g, {.kind = ElementKind::Solution, .meta_key = "formalized", .meta_value = false}).size() == 1);
    CHECK(metrics(g).formalized_fraction == doctest::Approx(0.6));
}

TEST_CASE("catalog safety case from a benchmark run")
{
    auto b = dfv::bench::load_benchmark();
    auto report = dfv::bench::to_json(dfv::bench::run_benchmark(b, {}));
    auto results = results_from_json(report);
    auto tree = requirements_from_json(load("tcm_requirements.json"));
    auto dropped = restrict_results(results, tree);
    // component checks of G-140 that the tree does not list individually
    CHECK(dropped == std::vector<std::string>{"G-140/A1", "G-140/A2", "G-140/FPA1", "G-140/G-180"});
    CHECK_THROWS_AS((void)instantiate_pattern(default_pattern(), tree, results_from_json(report)), PatternError);

    auto g = instantiate_pattern(default_pattern(), tree, results);
    CHECK(tree.size() == 44);
    CHECK(g.size() == 3 * 44 + 28);
    CHECK(validate(g).empty());
    auto e = expand(tree, results);
    CHECK(g.size() == e.elements);
    CHECK(g.links().size() == e.links);

    CHECK(label_count(g, "direct-formal-proof") == 28);
    CHECK(label_count(g, "formal-compositional") == 6);
    CHECK(label_count(g, "informal-compositional") == 10);
    CHECK(query(g, {.kind = ElementKind::Solution, .related_to = "autopilot"}).size() == 12);

    auto s = check_leaf_support(g, "goal:FAR-25.1329");
    CHECK(s.leaves.size() == 31);
    CHECK(s.count(LeafClass::FormalEvidence) == 28);
    CHECK(s.count(LeafClass::Undeveloped) == 3);
    CHECK(metrics(g).undeveloped == 3);

    CHECK(graph_from_json(json::parse(to_json(g).dump())) == g);
    CHECK(instantiate_pattern(default_pattern(), tree, results) == g);
}

TEST_CASE("synthetic five-hundred requirement case")
{
    auto t0 = std::chrono::steady_clock::now();
    auto s = synthetic_tree(4, 6, 20, 10);
    CHECK(s.requirements == 508);
    CHECK(s.proved_leaves == 432);
    auto g = instantiate_pattern(default_pattern(), s.tree, s.results);
    CHECK(g.size() == 3 * s.requirements + s.proved_leaves);
    CHECK(g.size() == 1956);
    CHECK(g.size() == expand(s.tree, s.results).elements);
    CHECK(g.size() >= 1800);
    CHECK(g.size() <= 2200);
    CHECK(validate(g).empty());
    CHECK(g.size() / default_pattern().placeholders.size() >= 100);
    auto m = metrics(g);
    CHECK(m.total == 1956);
    CHECK(m.undeveloped == 48);
    CHECK(m.max_depth == 6);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 5.0);
}

TEST_CASE("random trees follow the count law")
{
    std::mt19937_64 rng(20261016);
    auto pattern = default_pattern();
    for (int trial = 0; trial < 200; ++trial) {
        Results res;
        int next = 0;
        std::function<RequirementNode(int)> make = [&](int depth) {
            RequirementNode n{"R" + std::to_string(next++), "requirement", "", "", "", {}};
            if (rng() % 4 == 0) n.context = "context " + n.id;
            std::size_t kids = depth < 4 && rng() % 3 ? rng() % 4 : 0;
            for (std::size_t i = 0; i < kids; ++i) n.children.push_back(make(depth + 1));
            switch (rng() % 5) {
            case 0: break;
            case 1: res[n.id] = Evidence{"Falsified", std::nullopt, "cex", true, {}}; break;
            case 2: res[n.id] = Evidence{std::nullopt, std::nullopt, "tests", false, {}}; break;
            default: res[n.id] = Evidence{"Valid", 1, "proof", true, {}}; break;
            }
            return n;
        };
        RequirementTree t;
        std::size_t roots = rng() % 3;
        for (std::size_t i = 0; i < roots; ++i) t.roots.push_back(make(1));
        CAPTURE(trial);

        auto g = instantiate_pattern(pattern, t, res);
        auto e = expand(t, res);
        CHECK(g.size() == e.elements);
        CHECK(g.links().size() == e.links);
        CHECK(kind_count(g, ElementKind::Solution) == e.solutions);
        CHECK(structurally_clean(g));
        for (const auto& [label, n] : e.labels) CHECK(label_count(g, label) == n);
        CHECK(kind_count(g, ElementKind::Strategy) == t.size());
        CHECK(instantiate_pattern(pattern, t, res) == g);
        CHECK(graph_from_json(to_json(g)) == g);
        (void)export_dot(g);
    }
}

TEST_CASE("pattern and input errors")
{
    RequirementTree two_level{{{"P", "parent", "", "", "", {single_leaf()}}}};
    SUBCASE("no per-child expansion")
    {
        auto p = default_pattern();
        std::erase_if(p.links, [](const PatternLink& l) { return l.per_child; });
        CHECK_NOTHROW((void)instantiate_pattern(p, RequirementTree{{single_leaf()}}, {}));
        CHECK_THROWS_AS((void)instantiate_pattern(p, two_level, {}), PatternError);
    }
    SUBCASE("too many placeholders")
    {
        auto p = default_pattern();
        for (int i = 0; i < 13; ++i) p.placeholders.push_back({"extra" + std::to_string(i), ElementKind::Context, "x", "always", json::object(), false});
        CHECK_THROWS_AS(check_pattern(p), PatternError);
    }
    SUBCASE("unknown template field")
    {
        auto p = default_pattern();
        p.placeholders[1].text = "{weather}";
        CHECK_THROWS_AS(check_pattern(p), PatternError);
    }
    SUBCASE("results for an unknown requirement")
    {
        CHECK_THROWS_AS((void)instantiate_pattern(default_pattern(), two_level, valid_for("R-9")), PatternError);
    }
    SUBCASE("duplicate requirement ids")
    {
        RequirementTree dup{{single_leaf(), single_leaf()}};
        CHECK_THROWS_AS((void)instantiate_pattern(default_pattern(), dup, {}), PatternError);
    }
    SUBCASE("round trips")
    {
        CHECK(pattern_from_json(to_json(default_pattern())) == default_pattern());
        auto t = requirements_from_json(load("tcm_requirements.json"));
        CHECK(to_json(requirements_from_json(to_json(t))) == to_json(t));
        auto r = results_from_json(load("g120_results_fpa1_informal.json"));
        CHECK(to_json(results_from_json(to_json(r))) == to_json(r));
    }
}
