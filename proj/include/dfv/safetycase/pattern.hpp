#pragma once

#include "dfv/safetycase/gsn.hpp"

namespace dfv::safetycase {

class PatternError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Verification outcome attached to a requirement, keyed by property id.
struct Evidence {
    std::optional<std::string> verdict;
    std::optional<int> k;
    std::string evidence;
    /// false for evidence such as testing or review.
    bool formalized = true;
    std::vector<std::string> assumptions;
};

using Results = std::map<std::string, Evidence>;

struct RequirementNode {
    std::string id;
    std::string text;
    /// Operating context; inherited from the parent when empty.
    std::string context;
    /// Results key; the requirement id when empty. For internal nodes this
    /// names the composition check.
    std::string property;
    std::string risk;
    std::vector<RequirementNode> children;

    [[nodiscard]] const std::string& key() const { return property.empty() ? id : property; }
};

struct RequirementTree {
    std::vector<RequirementNode> roots;
    [[nodiscard]] std::size_t size() const;
};

enum class StrategyLabel { DirectFormalProof, FormalCompositional, InformalCompositional };
[[nodiscard]] const char* to_string(StrategyLabel l);

struct Placeholder {
    std::string id;
    ElementKind kind = ElementKind::Goal;
    /// Fields: {id} {text} {context} {property} {verdict} {k} {evidence} {label}.
    std::string text;
    /// always | direct-formal-proof | formal-compositional | informal-compositional
    /// | proved-leaf | informal-leaf
    std::string when = "always";
    nlohmann::json metadata = nlohmann::json::object();
    /// The per-requirement goal that parents link to.
    bool root = false;
};

struct PatternLink {
    LinkKind kind = LinkKind::SupportedBy;
    std::string from;
    std::string to;
    /// Expands once per child requirement, targeting the child's root placeholder.
    bool per_child = false;
};

struct GsnPattern {
    std::string name;
    std::string default_context;
    std::vector<Placeholder> placeholders;
    std::vector<PatternLink> links;

    friend bool operator==(const GsnPattern& a, const GsnPattern& b);
};

/// Goal, Context, three Strategies, two Solutions.
[[nodiscard]] GsnPattern default_pattern();

/// Throws PatternError on malformed patterns (size >= 20, unknown fields or
/// placeholders, no single root goal).
void check_pattern(const GsnPattern& p);

/// Throws PatternError on duplicate requirement ids, results for unknown keys,
/// or a requirement with children where the pattern has no per-child expansion.
[[nodiscard]] GsnGraph instantiate_pattern(const GsnPattern& p, const RequirementTree& tree, const Results& results);

/// Keeps only results whose key some requirement uses; returns the dropped keys.
std::vector<std::string> restrict_results(Results& results, const RequirementTree& tree);

[[nodiscard]] GsnPattern pattern_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const GsnPattern& p);
[[nodiscard]] RequirementTree requirements_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const RequirementTree& t);
/// Accepts {"results": {key: {...}}} or a benchmark report ({"rows": [...]}).
/// Compositional rows also yield "<row>/<guarantee>" entries per component.
[[nodiscard]] Results results_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const Results& r);

/// `roots` top requirements, each with `mid` children, each with `leaves`
/// leaves. Every `unproved_every`-th leaf (1-based, counting globally) has no
/// result; the rest are Valid, and every internal node has a Valid composition check.
struct SyntheticTree {
    RequirementTree tree;
    Results results;
    std::size_t requirements = 0;
    std::size_t proved_leaves = 0;
};
[[nodiscard]] SyntheticTree synthetic_tree(std::size_t roots, std::size_t mid, std::size_t leaves, std::size_t unproved_every);

}  // namespace dfv::safetycase
