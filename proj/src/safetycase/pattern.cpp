#include "dfv/safetycase/pattern.hpp"

#include <functional>
#include <set>

namespace dfv::safetycase {

const char* to_string(StrategyLabel l)
{
    switch (l) {
    case StrategyLabel::DirectFormalProof: return "direct-formal-proof";
    case StrategyLabel::FormalCompositional: return "formal-compositional";
    case StrategyLabel::InformalCompositional: return "informal-compositional";
    }
    return "?";
}

std::size_t RequirementTree::size() const
{
    std::function<std::size_t(const RequirementNode&)> n = [&](const RequirementNode& r) {
        std::size_t s = 1;
        for (const auto& c : r.children) s += n(c);
        return s;
    };
    std::size_t s = 0;
    for (const auto& r : roots) s += n(r);
    return s;
}

bool operator==(const GsnPattern& a, const GsnPattern& b) { return to_json(a) == to_json(b); }

GsnPattern default_pattern()
{
    GsnPattern p;
    p.name = "formal-verification-argument";
    p.default_context = "Autopilot in normal operation";
    p.placeholders = {
        {"goal", ElementKind::Goal, "{id}: {text}", "always", nlohmann::json::object(), true},
        {"ctx", ElementKind::Context, "{context}", "always", nlohmann::json::object(), false},
        {"s_direct", ElementKind::Strategy, "Argument by direct formal proof of {property}", "direct-formal-proof",
         nlohmann::json::object(), false},
        {"s_formal", ElementKind::Strategy, "Argument by formal compositional reasoning over formally proved component goals",
         "formal-compositional", nlohmann::json::object(), false},
        {"s_informal", ElementKind::Strategy, "Argument by informal compositional reasoning", "informal-compositional",
         nlohmann::json::object(), false},
        {"sol_proof", ElementKind::Solution, "{property} {verdict} by k-induction (k = {k})", "proved-leaf",
         nlohmann::json::object(), false},
        {"sol_informal", ElementKind::Solution, "{property}: {evidence}", "informal-leaf", nlohmann::json::object(), false},
    };
    p.links = {
        {LinkKind::InContextOf, "goal", "ctx", false},
        {LinkKind::SupportedBy, "goal", "s_direct", false},
        {LinkKind::SupportedBy, "goal", "s_formal", false},
        {LinkKind::SupportedBy, "goal", "s_informal", false},
        {LinkKind::SupportedBy, "goal", "sol_proof", false},
        {LinkKind::SupportedBy, "goal", "sol_informal", false},
        {LinkKind::SupportedBy, "s_formal", "goal", true},
        {LinkKind::SupportedBy, "s_informal", "goal", true},
    };
    return p;
}

namespace {

const std::set<std::string> kConditions{"always",       "direct-formal-proof", "formal-compositional", "informal-compositional",
                                        "proved-leaf",  "informal-leaf"};
const std::set<std::string> kFields{"id", "text", "context", "property", "verdict", "k", "evidence", "label"};

std::vector<std::string> template_fields(const std::string& t)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while ((i = t.find('{', i)) != std::string::npos) {
        auto j = t.find('}', i);
        if (j == std::string::npos) throw PatternError("unterminated field in template '" + t + "'");
        out.push_back(t.substr(i + 1, j - i - 1));
        i = j + 1;
    }
    return out;
}

std::string fill(const std::string& t, const std::map<std::string, std::string>& fields)
{
    std::string out;
    std::size_t i = 0;
    while (i < t.size()) {
        if (t[i] == '{') {
            auto j = t.find('}', i);
            out += fields.at(t.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            out += t[i++];
        }
    }
    return out;
}

void collect_keys(const RequirementNode& n, std::set<std::string>& ids, std::set<std::string>& keys)
{
    if (!ids.insert(n.id).second) throw PatternError("duplicate requirement id '" + n.id + "'");
    keys.insert(n.key());
    for (const auto& c : n.children) collect_keys(c, ids, keys);
}

struct Instantiator {
    const GsnPattern& p;
    const Results& results;
    GsnGraph g;
    const Placeholder* root = nullptr;

    static std::string eid(const std::string& ph, const std::string& req) { return ph + ":" + req; }

    const Evidence* result(const RequirementNode& n) const
    {
        auto it = results.find(n.key());
        return it == results.end() ? nullptr : &it->second;
    }

    static bool valid_formal(const Evidence* e) { return e && e->formalized && e->verdict == "Valid"; }

    // Returns whether the requirement is formally proved.
    bool expand(const RequirementNode& n, const std::string& inherited_ctx)
    {
        std::string ctx = n.context.empty() ? inherited_ctx : n.context;
        const Evidence* res = result(n);
        bool leaf = n.children.empty();

        std::vector<bool> child_proved;
        std::vector<std::string> unproved;
        // children first only to learn their status; their elements are emitted after ours
        GsnGraph saved = std::move(g);
        g = GsnGraph();
        for (const auto& c : n.children) {
            child_proved.push_back(expand(c, ctx));
            if (!child_proved.back()) unproved.push_back(c.id);
        }
        GsnGraph children = std::move(g);
        g = std::move(saved);

        StrategyLabel label = StrategyLabel::InformalCompositional;
        if (leaf && valid_formal(res)) label = StrategyLabel::DirectFormalProof;
        if (!leaf && unproved.empty() && valid_formal(res)) label = StrategyLabel::FormalCompositional;
        bool proved = label != StrategyLabel::InformalCompositional;

        std::set<std::string> active{"always", to_string(label)};
        if (leaf && proved) active.insert("proved-leaf");
        if (leaf && res && !res->formalized) active.insert("informal-leaf");

        std::map<std::string, std::string> fields{
            {"id", n.id},
            {"text", n.text},
            {"context", ctx},
            {"property", n.key()},
            {"verdict", res && res->verdict ? *res->verdict : "-"},
            {"k", res && res->k ? std::to_string(*res->k) : "-"},
            {"evidence", res ? res->evidence : ""},
            {"label", to_string(label)},
        };

        std::set<std::string> made;
        for (const auto& ph : p.placeholders) {
            if (!active.count(ph.when)) continue;
            GsnElement e{eid(ph.id, n.id), ph.kind, fill(ph.text, fields), ph.metadata};
            e.metadata["requirement"] = n.id;
            switch (ph.kind) {
            case ElementKind::Goal:
                e.metadata["formalized"] = proved;
                e.metadata["depends_on_assumptions"] = res ? res->assumptions : std::vector<std::string>{};
                if (!n.risk.empty()) e.metadata["risk"] = n.risk;
                break;
            case ElementKind::Strategy:
                e.metadata["label"] = to_string(label);
                if (!unproved.empty()) e.metadata["unproved_children"] = unproved;
                if (leaf && !active.count("proved-leaf") && !active.count("informal-leaf")) e.metadata["undeveloped"] = true;
                break;
            case ElementKind::Solution:
                e.metadata["formalized"] = res ? res->formalized : false;
                e.metadata["property"] = n.key();
                if (res && res->verdict) e.metadata["verdict"] = *res->verdict;
                if (res && res->k) e.metadata["k"] = *res->k;
                if (res && !res->evidence.empty()) e.metadata["evidence"] = res->evidence;
                break;
            default: break;
            }
            g.add_element(std::move(e));
            made.insert(ph.id);
        }

        bool expanded = false;
        for (const auto& l : p.links) {
            if (!made.count(l.from)) continue;
            if (l.per_child) {
                for (const auto& c : n.children) g.add_link(l.kind, eid(l.from, n.id), eid(l.to, c.id));
                expanded = expanded || !n.children.empty();
            } else if (made.count(l.to)) {
                g.add_link(l.kind, eid(l.from, n.id), eid(l.to, n.id));
            }
        }
        if (!leaf && !expanded) {
            throw PatternError("pattern/tree arity mismatch: requirement " + n.id + " has " + std::to_string(n.children.size())
                               + " children but pattern '" + p.name + "' has no per-child expansion for it");
        }

        for (const auto& e : children.elements()) g.add_element(e);
        for (const auto& l : children.links()) g.add_link(l.kind, l.from, l.to);
        return proved;
    }
};

}  // namespace

void check_pattern(const GsnPattern& p)
{
    if (p.placeholders.size() >= 20) {
        throw PatternError("pattern '" + p.name + "' has " + std::to_string(p.placeholders.size()) + " placeholders");
    }
    std::map<std::string, const Placeholder*> byid;
    const Placeholder* root = nullptr;
    for (const auto& ph : p.placeholders) {
        if (!byid.emplace(ph.id, &ph).second) throw PatternError("duplicate placeholder '" + ph.id + "'");
        if (!kConditions.count(ph.when)) throw PatternError("placeholder " + ph.id + ": unknown condition '" + ph.when + "'");
        for (const auto& f : template_fields(ph.text)) {
            if (!kFields.count(f)) throw PatternError("placeholder " + ph.id + ": unknown field '{" + f + "}'");
        }
        if (ph.root) {
            if (root) throw PatternError("pattern has more than one root placeholder");
            root = &ph;
        }
    }
    if (!root || root->kind != ElementKind::Goal || root->when != "always") {
        throw PatternError("pattern needs exactly one unconditional root Goal placeholder");
    }
    for (const auto& l : p.links) {
        if (!byid.count(l.from) || !byid.count(l.to)) throw PatternError("link " + l.from + " -> " + l.to + ": unknown placeholder");
        if (l.per_child && l.to != root->id) throw PatternError("per-child link must target the root placeholder");
    }
}

GsnGraph instantiate_pattern(const GsnPattern& p, const RequirementTree& tree, const Results& results)
{
    check_pattern(p);
    std::set<std::string> ids;
    std::set<std::string> keys;
    for (const auto& r : tree.roots) collect_keys(r, ids, keys);
    for (const auto& [k, _] : results) {
        if (!keys.count(k)) throw PatternError("result for unknown requirement '" + k + "'");
    }
    Instantiator in{p, results, {}, nullptr};
    for (const auto& ph : p.placeholders) {
        if (ph.root) in.root = &ph;
    }
    for (const auto& r : tree.roots) {
        in.expand(r, p.default_context);
        in.g.add_root(Instantiator::eid(in.root->id, r.id));
    }
    return std::move(in.g);
}

std::vector<std::string> restrict_results(Results& results, const RequirementTree& tree)
{
    std::set<std::string> ids;
    std::set<std::string> keys;
    for (const auto& r : tree.roots) collect_keys(r, ids, keys);
    std::vector<std::string> dropped;
    for (auto it = results.begin(); it != results.end();) {
        if (keys.count(it->first)) {
            ++it;
        } else {
            dropped.push_back(it->first);
            it = results.erase(it);
        }
    }
    return dropped;
}

GsnPattern pattern_from_json(const nlohmann::json& j)
{
    GsnPattern p;
    try {
        p.name = j.value("name", std::string("pattern"));
        p.default_context = j.value("default_context", std::string());
        for (const auto& x : j.at("placeholders")) {
            p.placeholders.push_back({x.at("id").get<std::string>(), element_kind_from_string(x.at("kind").get<std::string>()),
                                      x.at("text").get<std::string>(), x.value("when", std::string("always")),
                                      x.value("metadata", nlohmann::json::object()), x.value("root", false)});
        }
        for (const auto& x : j.at("links")) {
            p.links.push_back({link_kind_from_string(x.at("kind").get<std::string>()), x.at("from").get<std::string>(),
                               x.at("to").get<std::string>(), x.value("multiplicity", std::string("one")) == "per-child"});
        }
    } catch (const nlohmann::json::exception& e) {
        throw PatternError(std::string("malformed pattern JSON: ") + e.what());
    } catch (const GsnError& e) {
        throw PatternError(e.what());
    }
    check_pattern(p);
    return p;
}

nlohmann::json to_json(const GsnPattern& p)
{
    nlohmann::json j;
    j["name"] = p.name;
    j["default_context"] = p.default_context;
    j["placeholders"] = nlohmann::json::array();
    for (const auto& ph : p.placeholders) {
        nlohmann::json x{{"id", ph.id}, {"kind", to_string(ph.kind)}, {"text", ph.text}, {"when", ph.when}};
        if (!ph.metadata.empty()) x["metadata"] = ph.metadata;
        if (ph.root) x["root"] = true;
        j["placeholders"].push_back(x);
    }
    j["links"] = nlohmann::json::array();
    for (const auto& l : p.links) {
        nlohmann::json x{{"kind", to_string(l.kind)}, {"from", l.from}, {"to", l.to}};
        if (l.per_child) x["multiplicity"] = "per-child";
        j["links"].push_back(x);
    }
    return j;
}

namespace {

RequirementNode req_from_json(const nlohmann::json& j)
{
    RequirementNode n;
    n.id = j.at("id").get<std::string>();
    n.text = j.value("text", std::string());
    n.context = j.value("context", std::string());
    n.property = j.value("property", std::string());
    n.risk = j.value("risk", std::string());
    for (const auto& c : j.value("children", nlohmann::json::array())) n.children.push_back(req_from_json(c));
    return n;
}

nlohmann::json req_to_json(const RequirementNode& n)
{
    nlohmann::json j{{"id", n.id}, {"text", n.text}};
    if (!n.context.empty()) j["context"] = n.context;
    if (!n.property.empty()) j["property"] = n.property;
    if (!n.risk.empty()) j["risk"] = n.risk;
    if (!n.children.empty()) {
        j["children"] = nlohmann::json::array();
        for (const auto& c : n.children) j["children"].push_back(req_to_json(c));
    }
    return j;
}

Evidence evidence_from_json(const nlohmann::json& x)
{
    Evidence e;
    if (x.contains("verdict") && x["verdict"].is_string()) e.verdict = x["verdict"].get<std::string>();
    if (x.contains("k") && x["k"].is_number_integer()) e.k = x["k"].get<int>();
    e.evidence = x.value("evidence", std::string());
    e.formalized = x.value("formalized", true);
    e.assumptions = x.value("assumptions", std::vector<std::string>{});
    return e;
}

}  // namespace

RequirementTree requirements_from_json(const nlohmann::json& j)
{
    RequirementTree t;
    try {
        for (const auto& r : j.at("requirements")) t.roots.push_back(req_from_json(r));
    } catch (const nlohmann::json::exception& e) {
        throw PatternError(std::string("malformed requirements JSON: ") + e.what());
    }
    return t;
}

nlohmann::json to_json(const RequirementTree& t)
{
    nlohmann::json j;
    j["requirements"] = nlohmann::json::array();
    for (const auto& r : t.roots) j["requirements"].push_back(req_to_json(r));
    return j;
}

Results results_from_json(const nlohmann::json& j)
{
    Results out;
    try {
        if (j.contains("results")) {
            for (const auto& [k, v] : j["results"].items()) out[k] = evidence_from_json(v);
            return out;
        }
        for (const auto& row : j.at("rows")) {
            std::string id = row.at("id");
            std::string verdict = row.at("verdict");
            if (verdict == "NotModeled") continue;
            Evidence e;
            e.verdict = verdict;
            if (verdict == "Valid") e.k = row.value("k", 0);
            e.evidence = "benchmark row " + std::to_string(row.value("row", 0));
            const auto& res = row.value("result", nlohmann::json());
            if (res.is_object() && res.contains("components")) {
                e.evidence = "compositional argument " + id;
                for (const auto& c : res["components"]) {
                    std::string g = c.at("guarantee");
                    e.assumptions.push_back(g);
                    Evidence ce;
                    ce.verdict = c.at("verdict").get<std::string>();
                    if (ce.verdict == "Valid") ce.k = c.value("k", 0);
                    ce.evidence = "component check " + c.value("node", std::string()) + " in argument " + id;
                    out[id + "/" + g] = ce;
                }
            }
            out[id] = e;
        }
    } catch (const nlohmann::json::exception& e) {
        throw PatternError(std::string("malformed results JSON: ") + e.what());
    }
    return out;
}

nlohmann::json to_json(const Results& r)
{
    nlohmann::json j;
    j["results"] = nlohmann::json::object();
    for (const auto& [k, e] : r) {
        nlohmann::json x{{"formalized", e.formalized}};
        if (e.verdict) x["verdict"] = *e.verdict;
        if (e.k) x["k"] = *e.k;
        if (!e.evidence.empty()) x["evidence"] = e.evidence;
        if (!e.assumptions.empty()) x["assumptions"] = e.assumptions;
        j["results"][k] = x;
    }
    return j;
}

SyntheticTree synthetic_tree(std::size_t roots, std::size_t mid, std::size_t leaves, std::size_t unproved_every)
{
    SyntheticTree s;
    std::size_t leaf_no = 0;
    auto valid = [](const std::string& ev) {
        Evidence e;
        e.verdict = "Valid";
        e.k = 1;
        e.evidence = ev;
        return e;
    };
    for (std::size_t a = 1; a <= roots; ++a) {
        RequirementNode r{"SYS-" + std::to_string(a), "System-level requirement " + std::to_string(a), "Flight phase " + std::to_string(a),
                          "", "", {}};
        s.results[r.id] = valid("composition check " + r.id);
        for (std::size_t b = 1; b <= mid; ++b) {
            RequirementNode m{r.id + "." + std::to_string(b), "Subsystem requirement " + std::to_string(b) + " of " + r.id, "", "", "", {}};
            s.results[m.id] = valid("composition check " + m.id);
            for (std::size_t c = 1; c <= leaves; ++c) {
                RequirementNode l{m.id + "." + std::to_string(c), "Component property " + std::to_string(c) + " of " + m.id, "", "", "", {}};
                ++leaf_no;
                if (unproved_every == 0 || leaf_no % unproved_every != 0) {
                    s.results[l.id] = valid("k-induction proof of " + l.id);
                    ++s.proved_leaves;
                }
                m.children.push_back(std::move(l));
            }
            r.children.push_back(std::move(m));
        }
        s.tree.roots.push_back(std::move(r));
    }
    s.requirements = s.tree.size();
    return s;
}

}  // namespace dfv::safetycase
