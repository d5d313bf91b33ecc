#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dfv::safetycase {

enum class ElementKind { Goal, Strategy, Context, Solution, Assumption, Justification };
enum class LinkKind { SupportedBy, InContextOf };

[[nodiscard]] const char* to_string(ElementKind k);
[[nodiscard]] const char* to_string(LinkKind k);
[[nodiscard]] ElementKind element_kind_from_string(const std::string& s);
[[nodiscard]] LinkKind link_kind_from_string(const std::string& s);

class GsnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GsnElement {
    std::string id;
    ElementKind kind = ElementKind::Goal;
    std::string text;
    /// Free-form; the generator writes risk, formalized, depends_on_assumptions,
    /// requirement, verdict, k, evidence, label.
    nlohmann::json metadata = nlohmann::json::object();

    friend bool operator==(const GsnElement&, const GsnElement&) = default;
};

struct GsnLink {
    LinkKind kind = LinkKind::SupportedBy;
    std::string from;
    std::string to;

    friend bool operator==(const GsnLink&, const GsnLink&) = default;
};

/// Elements keep insertion order. Links are not checked on insertion, so that
/// imported graphs can be inspected by validate().
class GsnGraph {
public:
    /// Throws GsnError on a duplicate id.
    void add_element(GsnElement e);
    void add_link(LinkKind kind, const std::string& from, const std::string& to);
    void add_root(const std::string& id);

    [[nodiscard]] const std::vector<GsnElement>& elements() const { return elements_; }
    [[nodiscard]] const std::vector<GsnLink>& links() const { return links_; }
    [[nodiscard]] const std::vector<std::string>& roots() const { return roots_; }
    [[nodiscard]] const GsnElement* find(const std::string& id) const;
    [[nodiscard]] const GsnElement& element(const std::string& id) const;
    [[nodiscard]] std::vector<std::string> targets(const std::string& from, LinkKind kind) const;
    [[nodiscard]] bool empty() const { return elements_.empty(); }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }

    friend bool operator==(const GsnGraph& a, const GsnGraph& b)
    {
        return a.elements_ == b.elements_ && a.links_ == b.links_ && a.roots_ == b.roots_;
    }

private:
    std::vector<GsnElement> elements_;
    std::vector<GsnLink> links_;
    std::vector<std::string> roots_;
    std::map<std::string, std::size_t> index_;
    std::multimap<std::string, std::size_t> out_;
};

struct Defect {
    enum class Kind { DanglingLink, LinkKind, Cycle, Undeveloped, Orphan, BadRoot };
    Kind kind;
    std::string element;
    std::string message;
};

[[nodiscard]] const char* to_string(Defect::Kind k);

[[nodiscard]] std::vector<Defect> validate(const GsnGraph& g);

/// Goals, strategies and solutions reachable from `root` over SupportedBy, root included.
[[nodiscard]] std::vector<std::string> supported_closure(const GsnGraph& g, const std::string& root);

enum class LeafClass { FormalEvidence, InformalEvidence, Undeveloped };
[[nodiscard]] const char* to_string(LeafClass c);

struct LeafSupport {
    std::string root;
    std::vector<std::pair<std::string, LeafClass>> leaves;  // in closure order
    [[nodiscard]] std::size_t count(LeafClass c) const;
    [[nodiscard]] double formal_fraction() const;
};

/// Leaf goals are goals in the root's SupportedBy closure with no goal below them.
/// Throws GsnError when `root` is not a Goal of `g`.
[[nodiscard]] LeafSupport check_leaf_support(const GsnGraph& g, const std::string& root);

struct Query {
    std::optional<ElementKind> kind{};
    /// Case-insensitive substring of the element text.
    std::optional<std::string> text{};
    /// Keep only elements in the SupportedBy closure of goals whose text
    /// contains this (case-insensitive).
    std::optional<std::string> related_to{};
    /// Metadata key that must be present, and equal `meta_value` when given.
    std::optional<std::string> meta_key{};
    std::optional<nlohmann::json> meta_value{};
};

[[nodiscard]] std::vector<GsnElement> query(const GsnGraph& g, const Query& q);

struct Metrics {
    std::map<ElementKind, std::size_t> per_kind;
    std::size_t total = 0;
    std::size_t links = 0;
    /// Elements on the longest SupportedBy path from a root.
    std::size_t max_depth = 0;
    /// Leaf goals without any Solution below them.
    std::size_t undeveloped = 0;
    /// Goals with metadata formalized=true over all goals.
    double formalized_fraction = 0;
};

[[nodiscard]] Metrics metrics(const GsnGraph& g);

[[nodiscard]] nlohmann::json to_json(const GsnGraph& g);
[[nodiscard]] GsnGraph graph_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const std::vector<Defect>& d);
[[nodiscard]] nlohmann::json to_json(const LeafSupport& s);
[[nodiscard]] nlohmann::json to_json(const Metrics& m);
[[nodiscard]] nlohmann::json to_json(const std::vector<GsnElement>& es);

/// Throws GsnError if validate() reports link-kind or dangling-link defects.
[[nodiscard]] std::string export_dot(const GsnGraph& g);

}  // namespace dfv::safetycase
