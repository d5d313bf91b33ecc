#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dfv/bench/bench.hpp"
#include "dfv/compose/compose.hpp"
#include "dfv/engine/engine.hpp"
#include "dfv/interp/interp.hpp"
#include "dfv/lang/parser.hpp"
#include "dfv/safetycase/pattern.hpp"

using namespace dfv;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Exit-code carrying errors raised by the command bodies.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Diagnostic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path)
{
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << text;
}

lang::TypedProgram load_program(const std::vector<std::string>& files)
{
    lang::Program prog;
    for (const auto& f : files) {
        auto text = slurp(f);
        try {
            lang::merge_into(prog, lang::parse(text));
        } catch (const lang::ParseError& e) {
            throw Diagnostic(f + ":" + std::string(e.what()));
        } catch (const std::exception& e) {
            throw Diagnostic(f + ": error: " + e.what());
        }
    }
    try {
        return lang::typecheck(std::move(prog));
    } catch (const lang::TypeCheckError& e) {
        std::string where = files.size() == 1 ? files[0] : "program";
        std::string msg = where + ":" + std::string(e.what());
        if (e.kind() == lang::TypeCheckError::Kind::CausalityCycle && !e.signals().empty()) {
            msg += "\n  cycle:";
            for (const auto& s : e.signals()) msg += " " + s;
        }
        throw Diagnostic(msg);
    }
}

struct EngineOpts {
    int k_max = 20;
    double timeout = 300;
    std::string solver_cmd;
    bool invariants = false;
    bool oracle = false;
    bool no_slice = false;
    bool incremental = false;

    void add(CLI::App* app)
    {
        app->add_option("--k-max", k_max, "Maximum induction depth")->check(CLI::Range(1, 1000));
        app->add_option("--timeout", timeout, "Seconds per property")->check(CLI::PositiveNumber);
        app->add_option("--solver-cmd", solver_cmd, "SMT-LIB2 solver command line (default: $SOLVER_CMD or z3)");
        app->add_flag("--invariants", invariants, "Generate invariants before induction");
        app->add_flag("--oracle", oracle, "Explicit-state engine for boolean systems");
        app->add_flag("--no-slice", no_slice, "Disable cone-of-influence reduction");
        app->add_flag("--incremental", incremental, "One solver process per task with push/pop");
    }

    [[nodiscard]] engine::EngineConfig config() const
    {
        engine::EngineConfig c;
        c.k_max = k_max;
        c.timeout = timeout;
        if (!solver_cmd.empty()) {
            std::istringstream in(solver_cmd);
            c.solver_command.clear();
            for (std::string w; in >> w;) c.solver_command.push_back(w);
        }
        c.use_invariants = invariants;
        c.oracle_mode = oracle;
        c.slice = !no_slice;
        c.incremental = incremental;
        return c;
    }
};

// check

int cmd_check(const std::vector<std::string>& files, bool as_json)
{
    auto p = load_program(files);
    if (as_json) {
        json j{{"files", files}, {"nodes", json::array()}};
        for (const auto& n : p.program.nodes) j["nodes"].push_back(n.name);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << files.size() << " file(s), " << p.program.nodes.size() << " node(s): ok\n";
    }
    return kOk;
}

// sim

int cmd_sim(const std::vector<std::string>& files, const std::string& node, const std::string& trace_path, std::size_t n,
            bool n_given, const std::string& replay_path, const std::string& out)
{
    auto p = load_program(files);
    if (!p.program.find_node(node)) throw Diagnostic("no node '" + node + "'");
    const auto& decl = p.node(node);

    if (!replay_path.empty()) {
        auto j = read_json(replay_path);
        // accept a single result or a verify report
        if (j.contains("results")) {
            for (const auto& r : j["results"]) {
                if (r.value("verdict", "") == "Falsified") {
                    j = r;
                    break;
                }
            }
        }
        if (j.value("verdict", "") != "Falsified") throw Diagnostic(replay_path + ": no Falsified result to replay");
        auto r = engine::result_from_json(j);
        std::string prop = j.value("property", decl.properties.empty() ? std::string() : decl.properties[0].signal);
        auto o = engine::replay(p, node, prop, r);
        json rep{{"property", prop},
                 {"reported_step", r.step},
                 {"violation_step", o.violation ? json(*o.violation) : json()},
                 {"assumptions_ok", o.assumptions_ok},
                 {"matches", o.matches(r)}};
        emit(rep.dump(2) + "\n", out);
        return o.matches(r) ? kOk : kFail;
    }

    interp::Trace inputs;
    if (!trace_path.empty()) {
        std::map<std::string, Type> types;
        for (const auto& v : decl.inputs) types[v.name] = v.type;
        try {
            inputs = interp::from_csv(slurp(trace_path), types);
        } catch (const std::invalid_argument& e) {
            throw Diagnostic(trace_path + ": " + e.what());
        }
    }
    if (!n_given) n = inputs.length();
    interp::Interpreter in(p);
    interp::Trace t;
    try {
        t = in.simulate(node, inputs, n);
    } catch (const std::exception& e) {
        throw Diagnostic(std::string("simulation failed: ") + e.what());
    }
    emit(interp::to_csv(t), out);
    return kOk;
}

// verify

json verify_report_json(const std::string& node, const std::vector<std::pair<std::string, engine::VerifyResult>>& rs,
                        const lang::TypedProgram& p)
{
    json j{{"node", node}, {"results", json::array()}};
    for (const auto& [prop, r] : rs) {
        auto x = engine::to_json(prop, r);
        if (r.verdict == engine::Verdict::Falsified) {
            auto o = engine::replay(p, node, prop, r);
            x["replay"] = {{"violation_step", o.violation ? json(*o.violation) : json()}, {"matches", o.matches(r)}};
        }
        j["results"].push_back(x);
    }
    return j;
}

void print_result(const std::string& node, const std::string& prop, const engine::VerifyResult& r)
{
    std::cout << node << " " << prop << ": " << engine::to_string(r.verdict);
    if (r.verdict == engine::Verdict::Valid) std::cout << " (k=" << r.k << ")";
    if (r.verdict == engine::Verdict::Falsified) std::cout << " at step " << r.step;
    if (r.verdict == engine::Verdict::Unknown) std::cout << " (" << engine::to_string(r.reason) << ")";
    std::printf(" [%.0f ms]\n", r.time_ms);
    if (!r.detail.empty()) std::cout << "  " << r.detail << "\n";
    if (r.verdict == engine::Verdict::Falsified) std::cout << interp::to_csv(r.trace);
}

int cmd_verify_compositional(const lang::TypedProgram& p, std::string node, std::vector<std::string> props,
                             const std::string& contracts_path, const std::string& argument_id,
                             const engine::EngineConfig& cfg, bool as_json, const std::string& out)
{
    auto j = read_json(contracts_path);
    json contracts_json = j;
    if (j.contains("arguments")) {
        const auto& args = j["arguments"];
        std::string id = argument_id;
        if (id.empty() && args.size() == 1) id = args.begin().key();
        if (id.empty() || !args.contains(id)) throw Diagnostic("choose an argument with --argument (" + contracts_path + ")");
        const auto& a = args[id];
        if (node.empty()) node = a.at("top").get<std::string>();
        if (props.empty()) props.push_back(a.at("property").get<std::string>());
        contracts_json = a.at("contracts");
    }
    if (node.empty()) throw Diagnostic("--node is required");
    if (props.size() != 1) throw Diagnostic("compositional verification takes exactly one --prop");
    std::vector<compose::Contract> contracts;
    try {
        contracts = compose::contracts_from_json(contracts_json);
    } catch (const std::exception& e) {
        throw Diagnostic(contracts_path + ": " + e.what());
    }
    compose::CompositionalArgument arg;
    try {
        arg = compose::run_argument(p, node, props[0], contracts, cfg);
    } catch (const compose::CircularityError& e) {
        throw Diagnostic(e.what());
    } catch (const compose::ContractError& e) {
        throw Diagnostic(e.what());
    }
    if (as_json) {
        emit(compose::to_json(arg).dump(2) + "\n", out);
    } else {
        for (const auto& c : arg.components) print_result(c.node, c.guarantee, c.result);
        for (const auto& [k, r] : arg.assumptions) print_result("assumption", k, r);
        print_result(node, props[0], arg.system_result);
        std::cout << (arg.proved() ? "argument proved\n" : "argument not proved\n");
    }
    return arg.proved() ? kOk : kFail;
}

int cmd_verify(const std::vector<std::string>& files, const std::string& node_in, const std::vector<std::string>& props_in,
               const EngineOpts& eo, const std::string& contracts, const std::string& argument, bool as_json,
               const std::string& out)
{
    auto p = load_program(files);
    auto cfg = eo.config();
    if (!contracts.empty()) return cmd_verify_compositional(p, node_in, props_in, contracts, argument, cfg, as_json, out);
    if (node_in.empty()) throw Diagnostic("--node is required");
    if (!p.program.find_node(node_in)) throw Diagnostic("no node '" + node_in + "'");
    tsys::TransitionSystem ts;
    try {
        ts = tsys::compile(p, node_in);
    } catch (const std::exception& e) {
        throw Diagnostic(e.what());
    }
    std::vector<std::string> props = props_in;
    if (props.empty()) {
        for (const auto& pr : ts.properties) props.push_back(pr.id);
    }
    if (props.empty()) throw Diagnostic("node " + node_in + " declares no properties");
    for (const auto& pr : props) {
        bool known = std::any_of(ts.properties.begin(), ts.properties.end(), [&](const tsys::Property& x) { return x.id == pr; });
        if (!known) throw Diagnostic("unknown property '" + pr + "' of node " + node_in);
    }
    std::vector<std::pair<std::string, engine::VerifyResult>> rs;
    bool all_valid = true;
    for (const auto& pr : props) {
        auto r = engine::kinduction(ts, pr, cfg);
        all_valid = all_valid && r.verdict == engine::Verdict::Valid;
        rs.emplace_back(pr, std::move(r));
    }
    if (as_json) {
        emit(verify_report_json(node_in, rs, p).dump(2) + "\n", out);
    } else {
        for (const auto& [pr, r] : rs) print_result(node_in, pr, r);
    }
    return all_valid ? kOk : kFail;
}

// bench

int cmd_bench_run(const std::string& dir, const std::vector<std::string>& only, const EngineOpts& eo, bool as_json,
                  const std::string& out)
{
    bench::Benchmark b;
    try {
        b = bench::load_benchmark(dir.empty() ? bench::default_bench_dir() : std::filesystem::path(dir));
    } catch (const bench::ManifestError& e) {
        throw IoError(e.what());
    }
    for (const auto& id : only) {
        bool known = std::any_of(b.properties.begin(), b.properties.end(), [&](const auto& s) { return s.id == id; });
        if (!known) throw Diagnostic("unknown property '" + id + "'");
    }
    auto rep = bench::run_benchmark(b, eo.config(), only);
    if (as_json) {
        emit(bench::to_json(rep).dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        for (const auto& row : rep.rows) {
            char line[200];
            std::snprintf(line, sizeof line, "%2d  %-6s %-18s %-10s %-4s %8.0f ms%s\n", row.row, row.id.c_str(),
                          bench::to_string(row.cls), row.verdict.c_str(),
                          row.verdict == "Valid" ? ("k=" + std::to_string(row.k)).c_str() : "",
                          row.time_ms, row.matches_expected == std::optional<bool>(false) ? "  MISMATCH" : "");
            os << line;
        }
        os << rep.count("Valid") << " valid, " << rep.count("Falsified") << " falsified, " << rep.count("Unknown")
           << " unknown, " << rep.count("NotModeled") << " not modeled\n";
        emit(os.str(), out);
    }
    return rep.consistent() ? kOk : kFail;
}

// safety-case

safetycase::GsnGraph load_case(const std::string& path)
{
    try {
        return safetycase::graph_from_json(read_json(path));
    } catch (const safetycase::GsnError& e) {
        throw Diagnostic(path + ": " + e.what());
    }
}

struct CaseOpts {
    std::string requirements;
    std::string results;
    std::string pattern;
    bool synthetic = false;
    std::string case_file;
    std::string dot;
    std::string out;
    std::string root;
    std::string kind;
    std::string text;
    std::string related;
    std::string meta;
    bool as_json = false;
};

safetycase::GsnGraph generate(const CaseOpts& o)
{
    using namespace safetycase;
    GsnPattern pattern = default_pattern();
    if (!o.pattern.empty()) pattern = pattern_from_json(read_json(o.pattern));
    RequirementTree tree;
    Results results;
    if (o.synthetic) {
        auto s = synthetic_tree(4, 6, 20, 10);
        tree = std::move(s.tree);
        results = std::move(s.results);
    } else {
        if (o.requirements.empty()) throw Diagnostic("--requirements or --synthetic is required");
        tree = requirements_from_json(read_json(o.requirements));
        if (!o.results.empty()) {
            results = results_from_json(read_json(o.results));
            auto dropped = restrict_results(results, tree);
            if (!dropped.empty()) std::cerr << "note: " << dropped.size() << " result(s) name no requirement and were ignored\n";
        }
    }
    return instantiate_pattern(pattern, tree, results);
}

void print_metrics(const safetycase::Metrics& m)
{
    for (const auto& [k, n] : m.per_kind) std::cout << safetycase::to_string(k) << ": " << n << "\n";
    std::cout << "total: " << m.total << "\nlinks: " << m.links << "\nmax depth: " << m.max_depth
              << "\nundeveloped: " << m.undeveloped << "\nformalized fraction: " << m.formalized_fraction << "\n";
}

int cmd_safety_case(const std::string& sub, const CaseOpts& o)
{
    using namespace safetycase;
    try {
        if (sub == "generate") {
            auto g = generate(o);
            emit(to_json(g).dump(2) + "\n", o.out);
            if (!o.dot.empty()) emit(export_dot(g), o.dot);
            return kOk;
        }
        auto g = o.case_file.empty() ? generate(o) : load_case(o.case_file);
        if (sub == "validate") {
            auto d = validate(g);
            if (o.as_json) {
                emit(json{{"defects", to_json(d)}, {"ok", d.empty()}}.dump(2) + "\n", o.out);
            } else {
                for (const auto& x : d) std::cout << to_string(x.kind) << ": " << x.message << "\n";
                std::cout << d.size() << " defect(s)\n";
            }
            if (!o.dot.empty()) emit(export_dot(g), o.dot);
            return d.empty() ? kOk : kFail;
        }
        if (sub == "query") {
            Query q;
            if (!o.kind.empty()) q.kind = element_kind_from_string(o.kind);
            if (!o.text.empty()) q.text = o.text;
            if (!o.related.empty()) q.related_to = o.related;
            if (!o.meta.empty()) {
                auto eq = o.meta.find('=');
                q.meta_key = o.meta.substr(0, eq);
                if (eq != std::string::npos) {
                    auto v = o.meta.substr(eq + 1);
                    q.meta_value = json::accept(v) ? json::parse(v) : json(v);
                }
            }
            auto es = query(g, q);
            if (o.as_json) {
                emit(to_json(es).dump(2) + "\n", o.out);
            } else {
                for (const auto& e : es) std::cout << e.id << "  [" << to_string(e.kind) << "]  " << e.text << "\n";
                std::cout << es.size() << " element(s)\n";
            }
            return kOk;
        }
        if (sub == "metrics") {
            auto m = metrics(g);
            if (o.as_json) {
                emit(to_json(m).dump(2) + "\n", o.out);
            } else {
                print_metrics(m);
            }
            return kOk;
        }
        if (sub == "leaf-support") {
            std::string root = o.root.empty() && !g.roots().empty() ? g.roots()[0] : o.root;
            auto s = check_leaf_support(g, root);
            if (o.as_json) {
                emit(to_json(s).dump(2) + "\n", o.out);
            } else {
                for (const auto& [id, c] : s.leaves) std::cout << id << ": " << to_string(c) << "\n";
                std::cout << s.leaves.size() << " leaf goal(s), formal fraction " << s.formal_fraction() << "\n";
            }
            return kOk;
        }
    } catch (const PatternError& e) {
        throw Diagnostic(e.what());
    } catch (const GsnError& e) {
        throw Diagnostic(e.what());
    }
    throw Diagnostic("unknown safety-case command '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"dfv: verification toolkit for synchronous dataflow programs"};
    app.require_subcommand(1);
    bool as_json = false;
    bool as_text = false;
    std::string out;

    auto format_flags = [&](CLI::App* sub) {
        auto* j = sub->add_flag("--json", as_json, "JSON output");
        auto* t = sub->add_flag("--text", as_text, "Text output (default)");
        j->excludes(t);
        sub->add_option("-o,--output", out, "Output file (default: stdout)");
    };

    std::vector<std::string> files;
    auto* check = app.add_subcommand("check", "Parse and type-check");
    check->add_option("files", files, "Source files")->required();
    format_flags(check);

    std::string node;
    std::string trace_path;
    std::string replay_path;
    std::size_t steps = 0;
    auto* sim = app.add_subcommand("sim", "Simulate a node on an input trace, CSV out");
    sim->add_option("files", files, "Source files")->required();
    sim->add_option("--node", node, "Node to run")->required();
    sim->add_option("--trace", trace_path, "Input CSV");
    auto* n_opt = sim->add_option("-n,--steps", steps, "Number of steps (default: trace length)");
    sim->add_option("--replay", replay_path, "Replay a Falsified result JSON and report the violation step");
    sim->add_option("-o,--output", out, "Output file (default: stdout)");

    std::vector<std::string> props;
    std::string contracts;
    std::string argument;
    EngineOpts eo;
    auto* verify = app.add_subcommand("verify", "Prove node properties by k-induction");
    verify->add_option("files", files, "Source files")->required();
    verify->add_option("--node", node, "Node under verification");
    verify->add_option("--prop", props, "Property signal (repeatable; default: all)");
    verify->add_option("--compositional", contracts, "Contracts JSON for an assume/guarantee argument");
    verify->add_option("--argument", argument, "Argument id inside the contracts file");
    eo.add(verify);
    format_flags(verify);

    std::string bench_dir;
    std::vector<std::string> only;
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark catalog");
    bench_cmd->require_subcommand(1);
    auto* bench_run = bench_cmd->add_subcommand("run", "Run the property catalog");
    bench_run->add_option("--bench-dir", bench_dir, "Benchmark directory (default: $DFV_BENCH_DIR or the shipped one)");
    bench_run->add_option("--only", only, "Property ids to run");
    eo.add(bench_run);
    format_flags(bench_run);

    CaseOpts co;
    auto* sc = app.add_subcommand("safety-case", "Generate, validate and query GSN safety cases");
    sc->require_subcommand(1);
    auto case_inputs = [&](CLI::App* s, bool with_case) {
        if (with_case) s->add_option("case", co.case_file, "Safety case JSON (omit to generate from --requirements)");
        s->add_option("--requirements", co.requirements, "Requirement tree JSON");
        s->add_option("--results", co.results, "Results JSON or benchmark report");
        s->add_option("--pattern", co.pattern, "Pattern JSON (default: built-in pattern)");
        s->add_flag("--synthetic", co.synthetic, "Use the generated 508-requirement tree");
    };
    auto* gen = sc->add_subcommand("generate", "Instantiate the pattern over a requirement tree");
    case_inputs(gen, false);
    gen->add_option("-o,--output", co.out, "Case JSON file (default: stdout)");
    gen->add_option("--dot", co.dot, "Also write Graphviz DOT");
    auto* val = sc->add_subcommand("validate", "Report structural defects");
    case_inputs(val, true);
    val->add_option("--dot", co.dot, "Write Graphviz DOT");
    format_flags(val);
    auto* qry = sc->add_subcommand("query", "Filter elements");
    case_inputs(qry, true);
    qry->add_option("--kind", co.kind, "Element kind");
    qry->add_option("--contains", co.text, "Text substring");
    qry->add_option("--related-to", co.related, "Only elements supporting goals whose text contains this");
    qry->add_option("--meta", co.meta, "Metadata key or key=value");
    format_flags(qry);
    auto* met = sc->add_subcommand("metrics", "Element counts and depth");
    case_inputs(met, true);
    format_flags(met);
    auto* leaf = sc->add_subcommand("leaf-support", "Classify the evidence under a goal");
    case_inputs(leaf, true);
    leaf->add_option("--root", co.root, "Root goal id (default: first root)");
    format_flags(leaf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kUsage;
    }

    try {
        if (check->parsed()) return cmd_check(files, as_json);
        if (sim->parsed()) return cmd_sim(files, node, trace_path, steps, n_opt->count() > 0, replay_path, out);
        if (verify->parsed()) return cmd_verify(files, node, props, eo, contracts, argument, as_json, out);
        if (bench_run->parsed()) return cmd_bench_run(bench_dir, only, eo, as_json, out);
        co.as_json = as_json;
        if (co.out.empty()) co.out = out;
        for (auto* s : {gen, val, qry, met, leaf}) {
            if (s->parsed()) return cmd_safety_case(s->get_name(), co);
        }
    } catch (const IoError& e) {
        std::cerr << "dfv: " << e.what() << "\n";
        return kUsage;
    } catch (const Diagnostic& e) {
        std::cerr << e.what() << "\n";
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "dfv: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
