#include "dfv/compose/compose.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "dfv/lang/parser.hpp"
#include "dfv/lang/pretty.hpp"

namespace dfv::compose {

using engine::Verdict;
using engine::VerifyResult;

namespace {

std::string join(const std::vector<std::string>& v, const char* sep)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

std::map<std::string, const Contract*> index_contracts(const std::vector<Contract>& cs)
{
    std::map<std::string, const Contract*> m;
    for (const auto& c : cs) {
        if (!m.emplace(c.node, &c).second) throw ContractError("two contracts for node '" + c.node + "'");
    }
    return m;
}

// Nodes reachable from `root` without descending into contracted nodes,
// callees before callers.
std::vector<std::string> kept_nodes(const lang::TypedProgram& p, const std::string& root,
                                    const std::map<std::string, const Contract*>& contracted)
{
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        if (!seen.insert(n).second) return;
        if (n == root || !contracted.count(n)) {
            for (const auto& c : p.info(n).callees) visit(c);
        }
        order.push_back(n);
    };
    visit(root);
    return order;
}

class Abstracter {
public:
    Abstracter(const lang::TypedProgram& p, const std::map<std::string, const Contract*>& contracted)
        : p_(p), contracted_(contracted)
    {
    }

    lang::NodeDecl abstract_node(const lang::NodeDecl& orig, const Contract& c)
    {
        lang::NodeDecl n;
        n.name = orig.name;
        n.pos = orig.pos;
        n.inputs = orig.inputs;
        n.outputs = orig.outputs;
        for (const auto& o : orig.outputs) {
            std::string fresh = "free__" + o.name;
            if (orig.find_signal(fresh)) throw ContractError("node '" + orig.name + "' already has a signal '" + fresh + "'");
            n.inputs.push_back({fresh, o.type, o.pos});
            extra_[orig.name].push_back({fresh, o.type, o.pos});
            n.equations.push_back({{o.name}, lang::Expr::make_var(fresh), o.pos});
        }
        for (std::size_t i = 0; i < c.assumptions.size(); ++i) {
            std::string local = "asm__" + std::to_string(i);
            n.locals.push_back({local, Type::Bool, {}});
            n.equations.push_back({{local}, c.assumptions[i].expr, {}});
        }
        for (const auto& g : c.guarantees) n.assertions.push_back(g.expr);
        return n;
    }

    lang::NodeDecl rewrite_node(const lang::NodeDecl& orig)
    {
        lang::NodeDecl n = orig;
        counts_.clear();
        added_.clear();
        // same visiting order as call-site numbering: equations, then assertions
        for (auto& eq : n.equations) eq.rhs = rewrite(eq.rhs);
        for (auto& a : n.assertions) a = rewrite(a);
        for (const auto& d : added_) {
            if (orig.find_signal(d.name)) throw ContractError("node '" + orig.name + "' already has a signal '" + d.name + "'");
            n.inputs.push_back(d);
        }
        extra_[orig.name] = added_;
        return n;
    }

private:
    lang::Expr rewrite(const lang::Expr& e)
    {
        lang::Expr out = e;
        for (auto& a : out.args) a = rewrite(a);
        if (e.kind != lang::Expr::Kind::NodeCall) return out;
        int k = ++counts_[e.name];
        auto it = extra_.find(e.name);
        if (it == extra_.end()) return out;
        for (const auto& d : it->second) {
            std::string fresh = e.name + "__" + std::to_string(k) + "__" + d.name;
            added_.push_back({fresh, d.type, e.pos});
            out.args.push_back(lang::Expr::make_var(fresh, e.pos));
        }
        return out;
    }

public:
    const lang::TypedProgram& p_;
    const std::map<std::string, const Contract*>& contracted_;
    std::map<std::string, std::vector<lang::VarDecl>> extra_;
    std::map<std::string, int> counts_;
    std::vector<lang::VarDecl> added_;
};

// Untyped program holding `top`'s call tree with contracted nodes abstracted.
lang::Program abstract_program(const lang::TypedProgram& p, const std::string& top,
                               const std::vector<Contract>& contracts)
{
    auto contracted = index_contracts(contracts);
    (void)p.node(top);
    if (contracted.count(top)) throw ContractError("contract on '" + top + "' cannot abstract the node under proof");
    auto tree = p.call_tree(top);
    for (const auto& c : contracts) {
        if (std::find(tree.begin(), tree.end(), c.node) == tree.end()) {
            throw ContractError("contract node '" + c.node + "' is not called from '" + top + "'");
        }
    }
    Abstracter ab(p, contracted);
    std::map<std::string, lang::NodeDecl> decls;
    for (const auto& name : kept_nodes(p, top, contracted)) {
        auto it = contracted.find(name);
        if (it != contracted.end() && name != top) {
            decls[name] = ab.abstract_node(p.node(name), *it->second);
        } else {
            decls[name] = ab.rewrite_node(p.node(name));
        }
    }
    lang::Program out;
    out.externs = p.program.externs;
    for (const auto& n : p.program.nodes) {
        auto it = decls.find(n.name);
        if (it != decls.end()) out.nodes.push_back(std::move(it->second));
    }
    return out;
}

void add_goal(lang::NodeDecl& n, const std::string& local, const lang::Expr& e)
{
    if (n.find_signal(local)) throw ContractError("node '" + n.name + "' already has a signal '" + local + "'");
    n.locals.push_back({local, Type::Bool, {}});
    n.equations.push_back({{local}, e, {}});
    n.properties.push_back({local, {}});
}

lang::NodeDecl& node_in(lang::Program& p, const std::string& name)
{
    for (auto& n : p.nodes) {
        if (n.name == name) return n;
    }
    throw ContractError("no node '" + name + "'");
}

std::set<std::string> uses_closure(const std::string& node, const std::map<std::string, const Contract*>& contracted)
{
    std::set<std::string> out;
    std::vector<std::string> work{node};
    while (!work.empty()) {
        auto n = work.back();
        work.pop_back();
        auto it = contracted.find(n);
        if (it == contracted.end()) continue;
        for (const auto& u : it->second->uses) {
            if (out.insert(u).second) work.push_back(u);
        }
    }
    return out;
}

struct AsmSite {
    std::size_t var;
    std::string key;
};

// Assumption locals of abstracted instances of `node` in a compiled system.
std::vector<AsmSite> assumption_sites(const tsys::TransitionSystem& ts, const Contract& c)
{
    std::vector<AsmSite> out;
    for (std::size_t v = 0; v < ts.vars.size(); ++v) {
        const std::string& name = ts.vars[v].name;
        auto dot = name.rfind('.');
        if (dot == std::string::npos) continue;
        std::string local = name.substr(dot + 1);
        if (local.rfind("asm__", 0) != 0) continue;
        std::string prefix = name.substr(0, dot);
        std::string inst = prefix.substr(prefix.rfind('.') == std::string::npos ? 0 : prefix.rfind('.') + 1);
        if (inst.substr(0, inst.find('#')) != c.node) continue;
        std::size_t i = std::stoul(local.substr(5));
        out.push_back({v, c.node + ":" + c.assumptions.at(i).id + "@" + prefix});
    }
    return out;
}

// Proves the given goals of `root` on the abstraction, plus the assumptions
// of every abstracted instance, each discharged with only the guarantees its
// contract declares it uses.
Obligations prove(const lang::TypedProgram& p, const std::string& root, const std::vector<Contract>& contracts,
                  const std::function<std::vector<std::pair<std::string, std::string>>(lang::NodeDecl&)>& instrument,
                  const engine::EngineConfig& cfg)
{
    Obligations ob;
    {
        lang::Program ap = abstract_program(p, root, contracts);
        auto goals = instrument(node_in(ap, root));
        auto tp = lang::typecheck(std::move(ap));
        auto ts = tsys::compile(tp, root);
        for (const auto& [local, key] : goals) ob.goals[key] = engine::kinduction(ts, local, cfg);
    }
    auto contracted = index_contracts(contracts);
    auto present = kept_nodes(p, root, contracted);
    for (const auto& c : contracts) {
        if (c.assumptions.empty() || c.node == root) continue;
        if (std::find(present.begin(), present.end(), c.node) == present.end()) continue;
        auto allowed = uses_closure(c.node, contracted);
        std::vector<Contract> weakened = contracts;
        for (auto& w : weakened) {
            if (!allowed.count(w.node)) w.guarantees.clear();
        }
        lang::Program ap = abstract_program(p, root, weakened);
        (void)instrument(node_in(ap, root));
        auto tp = lang::typecheck(std::move(ap));
        auto ts = tsys::compile(tp, root);
        for (const auto& site : assumption_sites(ts, c)) {
            std::string id = "__asm_" + std::to_string(site.var);
            ts.properties.push_back({id, tsys::mk_var(site.var, Type::Bool)});
            ob.assumptions[site.key] = engine::kinduction(ts, id, cfg);
        }
    }
    return ob;
}

}  // namespace

CircularityError::CircularityError(std::vector<std::string> cycle)
    : ContractError("circular contract dependency: " + join(cycle, " -> ")), cycle_(std::move(cycle))
{
}

CallGraph call_graph(const lang::TypedProgram& p)
{
    CallGraph g;
    for (const auto& [name, info] : p.nodes) g[name] = info.callees;
    return g;
}

void check_noncircular(const std::vector<Contract>& contracts, const CallGraph& g)
{
    auto contracted = index_contracts(contracts);
    std::map<std::string, std::vector<std::string>> deps;
    for (const auto& c : contracts) {
        if (!g.count(c.node)) throw ContractError("contract for unknown node '" + c.node + "'");
        for (const auto& u : c.uses) {
            if (!contracted.count(u)) throw ContractError("contract " + c.node + " uses '" + u + "', which has no contract");
            deps[c.node].push_back(u);
        }
    }
    std::map<std::string, int> color;  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::function<void(const std::string&)> dfs = [&](const std::string& n) {
        color[n] = 1;
        stack.push_back(n);
        for (const auto& m : deps[n]) {
            if (color[m] == 1) {
                auto from = std::find(stack.begin(), stack.end(), m);
                throw CircularityError(std::vector<std::string>(from, stack.end()));
            }
            if (color[m] == 0) dfs(m);
        }
        stack.pop_back();
        color[n] = 2;
    };
    for (const auto& c : contracts) {
        if (color[c.node] == 0) dfs(c.node);
    }
}

lang::TypedProgram abstract_with_contracts(const lang::TypedProgram& p, const std::string& top,
                                           const std::vector<Contract>& contracts)
{
    if (contracts.empty()) return p;
    return lang::typecheck(abstract_program(p, top, contracts));
}

std::string concrete_origin(const lang::TypedProgram& original, const std::string& top, const std::string& fresh_input)
{
    std::string node = top;
    std::string rest = fresh_input;
    std::string prefix;
    while (true) {
        if (rest.rfind("free__", 0) == 0) return prefix + rest.substr(6);
        auto a = rest.find("__");
        auto b = a == std::string::npos ? a : rest.find("__", a + 2);
        if (b == std::string::npos) throw std::invalid_argument("'" + fresh_input + "' is not a contract-abstraction input");
        std::string callee = rest.substr(0, a);
        std::string k = rest.substr(a + 2, b - a - 2);
        // count call sites of `callee` in `node` to pick tsys instance naming
        int calls = 0;
        std::function<void(const lang::Expr&)> count = [&](const lang::Expr& e) {
            for (const auto& x : e.args) count(x);
            if (e.kind == lang::Expr::Kind::NodeCall && e.name == callee) ++calls;
        };
        const auto& decl = original.node(node);
        for (const auto& eq : decl.equations) count(eq.rhs);
        for (const auto& as : decl.assertions) count(as);
        prefix += calls > 1 ? callee + "#" + k + "." : callee + ".";
        node = callee;
        rest = rest.substr(b + 2);
    }
}

bool Obligations::all_valid() const
{
    for (const auto& [_, r] : goals) {
        if (r.verdict != Verdict::Valid) return false;
    }
    for (const auto& [_, r] : assumptions) {
        if (r.verdict != Verdict::Valid) return false;
    }
    return true;
}

Obligations check_component(const lang::TypedProgram& p, const Contract& contract, const std::vector<Contract>& all,
                            const engine::EngineConfig& cfg)
{
    (void)p.node(contract.node);
    auto tree = p.call_tree(contract.node);
    std::vector<Contract> inner;
    for (const auto& c : all) {
        bool used = std::find(contract.uses.begin(), contract.uses.end(), c.node) != contract.uses.end();
        if (used && c.node != contract.node && std::find(tree.begin(), tree.end(), c.node) != tree.end()) {
            inner.push_back(c);
        }
    }
    return prove(
        p, contract.node, inner,
        [&](lang::NodeDecl& n) {
            n.properties.clear();
            for (const auto& a : contract.assumptions) n.assertions.push_back(a.expr);
            std::vector<std::pair<std::string, std::string>> goals;
            for (std::size_t i = 0; i < contract.guarantees.size(); ++i) {
                std::string local = "grt__" + std::to_string(i);
                add_goal(n, local, contract.guarantees[i].expr);
                goals.emplace_back(local, contract.guarantees[i].id);
            }
            return goals;
        },
        cfg);
}

Obligations check_system(const lang::TypedProgram& p, const std::string& top, const std::string& top_prop,
                         const std::vector<Contract>& contracts, const engine::EngineConfig& cfg)
{
    check_noncircular(contracts, call_graph(p));
    return prove(
        p, top, contracts,
        [&](lang::NodeDecl& n) -> std::vector<std::pair<std::string, std::string>> {
            const lang::VarDecl* sig = n.find_signal(top_prop);
            if (sig) {
                if (sig->type != Type::Bool) throw ContractError("property signal '" + top_prop + "' is not boolean");
                bool annotated = false;
                for (const auto& a : n.properties) annotated = annotated || a.signal == top_prop;
                if (!annotated) n.properties.push_back({top_prop, {}});
                return {{top_prop, top_prop}};
            }
            add_goal(n, "top__prop", lang::parse_expression(top_prop));
            return {{"top__prop", top_prop}};
        },
        cfg);
}

bool CompositionalArgument::proved() const
{
    if (system_result.verdict != Verdict::Valid) return false;
    for (const auto& c : components) {
        if (c.result.verdict != Verdict::Valid) return false;
    }
    for (const auto& [_, r] : assumptions) {
        if (r.verdict != Verdict::Valid) return false;
    }
    return true;
}

CompositionalArgument run_argument(const lang::TypedProgram& p, const std::string& top, const std::string& top_prop,
                                   const std::vector<Contract>& contracts, const engine::EngineConfig& cfg)
{
    check_noncircular(contracts, call_graph(p));
    CompositionalArgument a;
    a.top_node = top;
    a.top_property = top_prop;
    a.contracts = contracts;
    for (const auto& c : contracts) {
        auto ob = check_component(p, c, contracts, cfg);
        for (const auto& g : c.guarantees) a.components.push_back({c.node, g.id, ob.goals.at(g.id)});
        for (auto& [k, r] : ob.assumptions) a.assumptions["component " + c.node + ": " + k] = std::move(r);
    }
    auto sys = check_system(p, top, top_prop, contracts, cfg);
    a.system_result = sys.goals.at(top_prop);
    for (auto& [k, r] : sys.assumptions) a.assumptions["system: " + k] = std::move(r);
    return a;
}

nlohmann::json to_json(const CompositionalArgument& a)
{
    nlohmann::json j;
    j["top_node"] = a.top_node;
    j["top_property"] = a.top_property;
    j["components"] = nlohmann::json::array();
    for (const auto& c : a.components) {
        auto r = engine::to_json(c.guarantee, c.result);
        r["node"] = c.node;
        r["guarantee"] = c.guarantee;
        j["components"].push_back(r);
    }
    j["assumptions"] = nlohmann::json::array();
    for (const auto& [k, r] : a.assumptions) j["assumptions"].push_back(engine::to_json(k, r));
    j["system"] = engine::to_json(a.top_property, a.system_result);
    j["system_verdict"] = engine::to_string(a.system_result.verdict);
    j["proved"] = a.proved();
    return j;
}

std::vector<Contract> contracts_from_json(const nlohmann::json& j)
{
    auto clauses = [](const nlohmann::json& arr, const std::string& node) {
        std::vector<Clause> out;
        for (const auto& c : arr) {
            std::string id = c.at("id");
            try {
                out.push_back({id, lang::parse_expression(c.at("expr").get<std::string>())});
            } catch (const lang::ParseError& e) {
                throw ContractError("contract " + node + "/" + id + ": " + e.what());
            }
        }
        return out;
    };
    std::vector<Contract> out;
    for (const auto& c : j) {
        Contract k;
        k.node = c.at("node");
        if (c.contains("assumptions")) k.assumptions = clauses(c["assumptions"], k.node);
        if (c.contains("guarantees")) k.guarantees = clauses(c["guarantees"], k.node);
        if (c.contains("uses")) k.uses = c["uses"].get<std::vector<std::string>>();
        out.push_back(std::move(k));
    }
    return out;
}

nlohmann::json to_json(const std::vector<Contract>& cs)
{
    auto clauses = [](const std::vector<Clause>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : v) a.push_back({{"id", c.id}, {"expr", lang::pretty(c.expr)}});
        return a;
    };
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : cs) {
        j.push_back({{"node", c.node},
                     {"assumptions", clauses(c.assumptions)},
                     {"guarantees", clauses(c.guarantees)},
                     {"uses", c.uses}});
    }
    return j;
}

}  // namespace dfv::compose
