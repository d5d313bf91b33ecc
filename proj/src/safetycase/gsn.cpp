#include "dfv/safetycase/gsn.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace dfv::safetycase {

const char* to_string(ElementKind k)
{
    switch (k) {
    case ElementKind::Goal: return "Goal";
    case ElementKind::Strategy: return "Strategy";
    case ElementKind::Context: return "Context";
    case ElementKind::Solution: return "Solution";
    case ElementKind::Assumption: return "Assumption";
    case ElementKind::Justification: return "Justification";
    }
    return "?";
}

const char* to_string(LinkKind k) { return k == LinkKind::SupportedBy ? "SupportedBy" : "InContextOf"; }

ElementKind element_kind_from_string(const std::string& s)
{
    for (auto k : {ElementKind::Goal, ElementKind::Strategy, ElementKind::Context, ElementKind::Solution,
                   ElementKind::Assumption, ElementKind::Justification}) {
        if (s == to_string(k)) return k;
    }
    throw GsnError("unknown element kind '" + s + "'");
}

LinkKind link_kind_from_string(const std::string& s)
{
    if (s == "SupportedBy") return LinkKind::SupportedBy;
    if (s == "InContextOf") return LinkKind::InContextOf;
    throw GsnError("unknown link kind '" + s + "'");
}

const char* to_string(Defect::Kind k)
{
    switch (k) {
    case Defect::Kind::DanglingLink: return "dangling-link";
    case Defect::Kind::LinkKind: return "link-kind";
    case Defect::Kind::Cycle: return "cycle";
    case Defect::Kind::Undeveloped: return "undeveloped";
    case Defect::Kind::Orphan: return "orphan";
    case Defect::Kind::BadRoot: return "bad-root";
    }
    return "?";
}

const char* to_string(LeafClass c)
{
    switch (c) {
    case LeafClass::FormalEvidence: return "formal-evidence";
    case LeafClass::InformalEvidence: return "informal-evidence";
    case LeafClass::Undeveloped: return "undeveloped";
    }
    return "?";
}

void GsnGraph::add_element(GsnElement e)
{
    if (index_.count(e.id)) throw GsnError("duplicate element id '" + e.id + "'");
    index_[e.id] = elements_.size();
    elements_.push_back(std::move(e));
}

void GsnGraph::add_link(LinkKind kind, const std::string& from, const std::string& to)
{
    out_.emplace(from, links_.size());
    links_.push_back({kind, from, to});
}

void GsnGraph::add_root(const std::string& id) { roots_.push_back(id); }

const GsnElement* GsnGraph::find(const std::string& id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &elements_[it->second];
}

const GsnElement& GsnGraph::element(const std::string& id) const
{
    const auto* e = find(id);
    if (!e) throw GsnError("no element '" + id + "'");
    return *e;
}

std::vector<std::string> GsnGraph::targets(const std::string& from, LinkKind kind) const
{
    std::vector<std::size_t> idx;
    auto [b, e] = out_.equal_range(from);
    for (auto it = b; it != e; ++it) {
        if (links_[it->second].kind == kind) idx.push_back(it->second);
    }
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(links_[i].to);
    return out;
}

namespace {

bool supported_by_ok(ElementKind from, ElementKind to)
{
    if (from == ElementKind::Goal) {
        return to == ElementKind::Goal || to == ElementKind::Strategy || to == ElementKind::Solution;
    }
    if (from == ElementKind::Strategy) return to == ElementKind::Goal;
    return false;
}

bool in_context_ok(ElementKind from, ElementKind to)
{
    return (from == ElementKind::Goal || from == ElementKind::Strategy)
        && (to == ElementKind::Context || to == ElementKind::Assumption || to == ElementKind::Justification);
}

std::string lower(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool contains_ci(const std::string& hay, const std::string& needle) { return lower(hay).find(lower(needle)) != std::string::npos; }

bool formalized(const GsnElement& e)
{
    auto it = e.metadata.find("formalized");
    return it != e.metadata.end() && it->is_boolean() && it->get<bool>();
}

}  // namespace

std::vector<Defect> validate(const GsnGraph& g)
{
    std::vector<Defect> out;
    for (const auto& l : g.links()) {
        const auto* a = g.find(l.from);
        const auto* b = g.find(l.to);
        if (!a || !b) {
            out.push_back({Defect::Kind::DanglingLink, a ? l.to : l.from,
                           std::string(to_string(l.kind)) + " link " + l.from + " -> " + l.to + " has a missing endpoint"});
            continue;
        }
        bool ok = l.kind == LinkKind::SupportedBy ? supported_by_ok(a->kind, b->kind) : in_context_ok(a->kind, b->kind);
        if (!ok) {
            out.push_back({Defect::Kind::LinkKind, l.from,
                           std::string(to_string(l.kind)) + " from " + to_string(a->kind) + " " + l.from + " to "
                               + to_string(b->kind) + " " + l.to + " is not allowed"});
        }
    }
    for (const auto& r : g.roots()) {
        const auto* e = g.find(r);
        if (!e || e->kind != ElementKind::Goal) out.push_back({Defect::Kind::BadRoot, r, "root " + r + " is not a Goal"});
    }
    if (g.roots().empty() && !g.empty()) out.push_back({Defect::Kind::BadRoot, "", "graph has no root goal"});

    // SupportedBy cycles, one defect per back edge
    std::map<std::string, int> colour;
    std::function<void(const std::string&)> dfs = [&](const std::string& v) {
        colour[v] = 1;
        for (const auto& w : g.targets(v, LinkKind::SupportedBy)) {
            if (!g.find(w)) continue;
            int c = colour[w];
            if (c == 1) {
                out.push_back({Defect::Kind::Cycle, w, "SupportedBy cycle through " + v + " -> " + w});
            } else if (c == 0) {
                dfs(w);
            }
        }
        colour[v] = 2;
    };
    for (const auto& e : g.elements()) {
        if (colour[e.id] == 0) dfs(e.id);
    }

    for (const auto& e : g.elements()) {
        if (e.kind == ElementKind::Goal && g.targets(e.id, LinkKind::SupportedBy).empty()) {
            out.push_back({Defect::Kind::Undeveloped, e.id, "goal " + e.id + " has no support"});
        }
    }

    std::set<std::string> reached;
    std::vector<std::string> stack;
    if (g.roots().empty()) {
        for (const auto& l : g.links()) {
            reached.insert(l.from);
            reached.insert(l.to);
        }
    } else {
        for (const auto& r : g.roots()) stack.push_back(r);
    }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (!reached.insert(v).second) continue;
        for (auto k : {LinkKind::SupportedBy, LinkKind::InContextOf}) {
            for (auto& w : g.targets(v, k)) stack.push_back(w);
        }
    }
    for (const auto& e : g.elements()) {
        bool lone_root = g.roots().empty() && g.size() == 1;
        if (!reached.count(e.id) && !lone_root) {
            out.push_back({Defect::Kind::Orphan, e.id, to_string(e.kind) + std::string(" ") + e.id + " is unreachable"});
        }
    }
    return out;
}

std::vector<std::string> supported_closure(const GsnGraph& g, const std::string& root)
{
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::function<void(const std::string&)> go = [&](const std::string& v) {
        if (!seen.insert(v).second || !g.find(v)) return;
        order.push_back(v);
        for (const auto& w : g.targets(v, LinkKind::SupportedBy)) go(w);
    };
    go(root);
    return order;
}

std::size_t LeafSupport::count(LeafClass c) const
{
    return static_cast<std::size_t>(std::count_if(leaves.begin(), leaves.end(), [&](const auto& p) { return p.second == c; }));
}

double LeafSupport::formal_fraction() const
{
    return leaves.empty() ? 0.0 : static_cast<double>(count(LeafClass::FormalEvidence)) / static_cast<double>(leaves.size());
}

namespace {

bool is_leaf_goal(const GsnGraph& g, const std::string& id)
{
    auto cl = supported_closure(g, id);
    return std::none_of(cl.begin() + 1, cl.end(), [&](const std::string& v) { return g.element(v).kind == ElementKind::Goal; });
}

LeafClass classify(const GsnGraph& g, const std::string& goal)
{
    bool any = false;
    bool all_formal = true;
    for (const auto& v : supported_closure(g, goal)) {
        const auto& e = g.element(v);
        if (e.kind != ElementKind::Solution) continue;
        any = true;
        all_formal = all_formal && formalized(e);
    }
    if (!any) return LeafClass::Undeveloped;
    return all_formal ? LeafClass::FormalEvidence : LeafClass::InformalEvidence;
}

}  // namespace

LeafSupport check_leaf_support(const GsnGraph& g, const std::string& root)
{
    const auto* r = g.find(root);
    if (!r || r->kind != ElementKind::Goal) throw GsnError("no goal '" + root + "'");
    LeafSupport s;
    s.root = root;
    for (const auto& v : supported_closure(g, root)) {
        if (g.element(v).kind == ElementKind::Goal && is_leaf_goal(g, v)) s.leaves.emplace_back(v, classify(g, v));
    }
    return s;
}

std::vector<GsnElement> query(const GsnGraph& g, const Query& q)
{
    std::optional<std::set<std::string>> related;
    if (q.related_to) {
        related.emplace();
        for (const auto& e : g.elements()) {
            if (e.kind != ElementKind::Goal || !contains_ci(e.text, *q.related_to)) continue;
            for (auto& v : supported_closure(g, e.id)) related->insert(v);
        }
    }
    std::vector<GsnElement> out;
    for (const auto& e : g.elements()) {
        if (q.kind && e.kind != *q.kind) continue;
        if (q.text && !contains_ci(e.text, *q.text)) continue;
        if (related && !related->count(e.id)) continue;
        if (q.meta_key) {
            auto it = e.metadata.find(*q.meta_key);
            if (it == e.metadata.end()) continue;
            if (q.meta_value && *it != *q.meta_value) continue;
        }
        out.push_back(e);
    }
    return out;
}

Metrics metrics(const GsnGraph& g)
{
    Metrics m;
    m.total = g.size();
    m.links = g.links().size();
    std::size_t goals = 0;
    std::size_t formal_goals = 0;
    for (const auto& e : g.elements()) {
        ++m.per_kind[e.kind];
        if (e.kind != ElementKind::Goal) continue;
        ++goals;
        if (formalized(e)) ++formal_goals;
    }
    m.formalized_fraction = goals ? static_cast<double>(formal_goals) / static_cast<double>(goals) : 0.0;

    // leaf classification and depth in one memoised pass; cycles are cut
    std::map<std::string, std::size_t> depth;
    std::set<std::string> active;
    std::function<std::size_t(const std::string&)> longest = [&](const std::string& v) -> std::size_t {
        if (auto it = depth.find(v); it != depth.end()) return it->second;
        if (!g.find(v) || !active.insert(v).second) return 0;
        std::size_t best = 0;
        for (const auto& w : g.targets(v, LinkKind::SupportedBy)) best = std::max(best, longest(w));
        active.erase(v);
        return depth[v] = best + 1;
    };
    std::vector<std::string> starts = g.roots();
    if (starts.empty()) {
        std::set<std::string> has_parent;
        for (const auto& l : g.links()) {
            if (l.kind == LinkKind::SupportedBy) has_parent.insert(l.to);
        }
        for (const auto& e : g.elements()) {
            if (!has_parent.count(e.id)) starts.push_back(e.id);
        }
    }
    for (const auto& r : starts) m.max_depth = std::max(m.max_depth, longest(r));

    std::map<std::string, bool> goal_below;
    std::function<bool(const std::string&)> has_goal = [&](const std::string& v) -> bool {
        if (auto it = goal_below.find(v); it != goal_below.end()) return it->second;
        goal_below[v] = false;
        bool any = false;
        for (const auto& w : g.targets(v, LinkKind::SupportedBy)) {
            const auto* e = g.find(w);
            if (!e) continue;
            if (e->kind == ElementKind::Goal || has_goal(w)) any = true;
        }
        return goal_below[v] = any;
    };
    for (const auto& e : g.elements()) {
        if (e.kind == ElementKind::Goal && !has_goal(e.id) && classify(g, e.id) == LeafClass::Undeveloped) ++m.undeveloped;
    }
    return m;
}

nlohmann::json to_json(const GsnGraph& g)
{
    nlohmann::json j;
    j["elements"] = nlohmann::json::array();
    for (const auto& e : g.elements()) {
        j["elements"].push_back({{"id", e.id}, {"kind", to_string(e.kind)}, {"text", e.text}, {"metadata", e.metadata}});
    }
    j["links"] = nlohmann::json::array();
    for (const auto& l : g.links()) j["links"].push_back({{"kind", to_string(l.kind)}, {"from", l.from}, {"to", l.to}});
    j["roots"] = g.roots();
    return j;
}

GsnGraph graph_from_json(const nlohmann::json& j)
{
    GsnGraph g;
    try {
        for (const auto& e : j.at("elements")) {
            g.add_element({e.at("id").get<std::string>(), element_kind_from_string(e.at("kind").get<std::string>()),
                           e.value("text", std::string()), e.value("metadata", nlohmann::json::object())});
        }
        for (const auto& l : j.at("links")) {
            g.add_link(link_kind_from_string(l.at("kind").get<std::string>()), l.at("from").get<std::string>(),
                       l.at("to").get<std::string>());
        }
        for (const auto& r : j.value("roots", nlohmann::json::array())) g.add_root(r.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw GsnError(std::string("malformed safety case JSON: ") + e.what());
    }
    return g;
}

nlohmann::json to_json(const std::vector<Defect>& ds)
{
    auto j = nlohmann::json::array();
    for (const auto& d : ds) j.push_back({{"kind", to_string(d.kind)}, {"element", d.element}, {"message", d.message}});
    return j;
}

nlohmann::json to_json(const LeafSupport& s)
{
    nlohmann::json j;
    j["root"] = s.root;
    j["leaves"] = nlohmann::json::array();
    for (const auto& [id, c] : s.leaves) j["leaves"].push_back({{"goal", id}, {"class", to_string(c)}});
    j["counts"] = {{"formal-evidence", s.count(LeafClass::FormalEvidence)},
                   {"informal-evidence", s.count(LeafClass::InformalEvidence)},
                   {"undeveloped", s.count(LeafClass::Undeveloped)}};
    j["formal_fraction"] = s.formal_fraction();
    return j;
}

nlohmann::json to_json(const Metrics& m)
{
    nlohmann::json per = nlohmann::json::object();
    for (auto k : {ElementKind::Goal, ElementKind::Strategy, ElementKind::Context, ElementKind::Solution,
                   ElementKind::Assumption, ElementKind::Justification}) {
        auto it = m.per_kind.find(k);
        per[to_string(k)] = it == m.per_kind.end() ? 0 : it->second;
    }
    return {{"per_kind", per},
            {"total", m.total},
            {"links", m.links},
            {"max_depth", m.max_depth},
            {"undeveloped", m.undeveloped},
            {"formalized_fraction", m.formalized_fraction}};
}

nlohmann::json to_json(const std::vector<GsnElement>& es)
{
    auto j = nlohmann::json::array();
    for (const auto& e : es) j.push_back({{"id", e.id}, {"kind", to_string(e.kind)}, {"text", e.text}, {"metadata", e.metadata}});
    return j;
}

namespace {

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

std::string wrap(const std::string& text, std::size_t width)
{
    std::istringstream in(text);
    std::string word;
    std::string out;
    std::size_t line = 0;
    while (in >> word) {
        if (line && line + 1 + word.size() > width) {
            out += '\n';
            line = 0;
        } else if (line) {
            out += ' ';
            ++line;
        }
        out += word;
        line += word.size();
    }
    return out;
}

const char* shape(ElementKind k)
{
    switch (k) {
    case ElementKind::Goal: return "shape=box";
    case ElementKind::Strategy: return "shape=parallelogram";
    case ElementKind::Context: return "shape=box, style=rounded";
    case ElementKind::Solution: return "shape=circle";
    case ElementKind::Assumption: return "shape=ellipse, xlabel=\"A\"";
    case ElementKind::Justification: return "shape=ellipse, xlabel=\"J\"";
    }
    return "shape=box";
}

}  // namespace

std::string export_dot(const GsnGraph& g)
{
    for (const auto& d : validate(g)) {
        if (d.kind == Defect::Kind::LinkKind || d.kind == Defect::Kind::DanglingLink) {
            throw GsnError("cannot export defective graph: " + d.message);
        }
    }
    std::ostringstream os;
    os << "digraph gsn {\n  rankdir=TB;\n  node [fontname=\"Helvetica\", fontsize=10];\n";
    for (const auto& e : g.elements()) {
        os << "  \"" << dot_escape(e.id) << "\" [" << shape(e.kind) << ", label=\"" << dot_escape(e.id + "\n" + wrap(e.text, 36))
           << "\"];\n";
    }
    for (const auto& l : g.links()) {
        os << "  \"" << dot_escape(l.from) << "\" -> \"" << dot_escape(l.to) << "\"";
        if (l.kind == LinkKind::InContextOf) os << " [arrowhead=empty]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace dfv::safetycase
