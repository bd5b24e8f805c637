// Command-line driver for the msgsynth library.

#include "msgsynth/choice.hpp"
#include "msgsynth/io.hpp"
#include "msgsynth/realization.hpp"
#include "msgsynth/runtime.hpp"
#include "msgsynth/verification.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace msgsynth;

enum Exit { ok = 0, negative = 1, usage = 2, inconclusive = 3 };

struct Options {
    std::string file;
    std::string node;
    std::string chart;
    std::vector<std::string> run;
    std::size_t cap = default_linearization_cap;
    std::string out = "text";
    std::size_t initial_choice = 0;
    std::size_t channel_bound = 4;
    std::size_t max_configs = 200000;
    std::uint64_t seed = 1;
    std::size_t max_steps = 100;
    std::size_t visits = 3;
    std::size_t event_cap = 12;
    bool json = false;
    bool channels = false;
    bool naive = false;
    bool dot = false;
};

int cmd_validate(const Options& o)
{
    const Specification spec = load_spec(o.file, {.check_invariants = false});
    int code = ok;
    for (const auto& [name, b] : spec.charts) {
        for (const BmscViolation& v : validate_bmsc(b)) {
            std::cerr << "bMSC " << name << ": " << v.detail << "\n";
            code = negative;
        }
    }
    for (const GraphViolation& v : validate_graph(spec.graph)) {
        std::cerr << v.detail << "\n";
        code = negative;
    }
    if (code == ok) {
        if (o.dot) {
            std::cout << export_dot(spec.graph);
        } else {
            std::cout << "valid: " << spec.charts.size() << " bMSCs, " << spec.graph.size() << " nodes\n";
        }
    }
    return code;
}

int cmd_classify(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    const Classification c = classify(g);
    if (o.json) {
        std::cout << to_json(g, c).dump(2) << "\n";
    } else {
        for (const auto& [n, cls] : c.choice_nodes) {
            std::cout << g.nodes[n] << ": " << to_string(cls) << "\n";
            auto v = c.verdicts.find(n);
            if (v != c.verdicts.end() && v->second.counterexample) {
                std::cout << "  unresolved path " << g.render(*v->second.counterexample) << "\n";
            }
        }
        std::cout << to_string(c.overall) << "\n";
    }
    return c.overall == MsgClass::neither ? negative : ok;
}

int cmd_triggers(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    std::cout << to_string(triggers(g, g.index_of(o.node))) << "\n";
    return ok;
}

int cmd_linearize(const Options& o)
{
    const Specification spec = load_spec(o.file);
    for (const Word& w : linearizations(spec.chart(o.chart), o.cap)) {
        std::cout << to_string(w) << "\n";
    }
    return ok;
}

int cmd_synthesize(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    const Cfm cfm = synthesize_cfm(g, {.initial_choice = o.initial_choice});
    if (o.out == "dot") {
        std::cout << export_dot(cfm);
    } else if (o.out == "json") {
        std::cout << to_json(cfm).dump(2) << "\n";
    } else {
        std::cout << render_text(cfm);
    }
    return ok;
}

Cfm build_cfm(const Options& o, const MsgGraph& g)
{
    return o.naive ? naive_projection_cfm(g) : synthesize_cfm(g, {.initial_choice = o.initial_choice});
}

int cmd_explore(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    const Cfm cfm = build_cfm(o, g);
    const ExplorationResult r = explore(cfm, {o.channel_bound, o.max_configs});
    if (o.json) {
        std::cout << to_json(r).dump(2) << "\n";
    } else {
        std::cout << "configurations: " << r.configurations.size() << "\n"
                  << "transitions: " << r.edges.size() << "\n"
                  << "accepting: " << r.accepting.size() << "\n"
                  << "deadlocks: " << r.deadlocks.size() << "\n"
                  << "boundary: " << r.boundary.size() << "\n"
                  << "exact: " << (r.exact() ? "yes" : "no") << "\n";
    }
    if (!r.exact()) {
        return inconclusive;
    }
    return r.deadlocks.empty() ? ok : negative;
}

int cmd_simulate(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    const Cfm cfm = build_cfm(o, g);
    const Trace t = simulate(cfm, o.seed, o.max_steps);
    std::cout << render_trace(cfm, t, o.channels);
    std::cout << (t.accepting ? "accepting" : t.truncated ? "truncated" : "stuck") << " after " << t.steps.size()
              << " steps\n";
    if (t.accepting) {
        return ok;
    }
    return t.truncated ? inconclusive : negative;
}

int cmd_equiv(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    const Cfm cfm = build_cfm(o, g);
    EquivalenceBounds bounds;
    bounds.visits = o.visits;
    bounds.event_cap = o.event_cap;
    bounds.channel_depth = o.channel_bound;
    bounds.max_configurations = o.max_configs;
    const EquivalenceReport r = check_equivalence(g, cfm, bounds);
    if (o.json) {
        std::cout << to_json(r).dump(2) << "\n";
    } else {
        std::cout << "verdict: " << to_string(r.verdict) << "\n"
                  << "word length bound: " << r.word_length_bound << "\n"
                  << "graph words: " << r.msg_words << "\n"
                  << "cfm words: " << r.cfm_words << "\n"
                  << "deadlocks: " << r.deadlocks << "\n";
        for (const Word& w : r.missing_in_cfm) {
            std::cout << "missing: " << to_string(w) << "\n";
        }
        for (const Word& w : r.extra_in_cfm) {
            std::cout << "extra: " << to_string(w) << "\n";
        }
    }
    switch (r.verdict) {
    case Verdict::equal_at_bound: return ok;
    case Verdict::mismatch: return negative;
    case Verdict::inconclusive: return inconclusive;
    }
    return inconclusive;
}

int cmd_partition(const Options& o)
{
    const MsgGraph g = load_spec(o.file).graph;
    Path run;
    for (const std::string& n : o.run) {
        run.push_back(g.index_of(n));
    }
    if (!g.is_run(run)) {
        std::cerr << g.render(run) << " is not a run\n";
        return usage;
    }
    std::vector<PredictionPath> pieces;
    try {
        pieces = partition_run(g, run);
    } catch (const ClassError&) {
        throw;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return negative;
    }
    for (const PredictionPath& p : pieces) {
        std::cout << g.render(p.nodes);
    }
    std::cout << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Analysis and synthesis of message sequence graphs"};
    app.require_subcommand(1);
    Options o;

    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("file", o.file, "Specification file")->required()->check(CLI::ExistingFile);
        return sub;
    };
    auto add_cfm_flags = [&](CLI::App* sub) {
        sub->add_option("--initial", o.initial_choice, "Index of the shared initial prediction");
        sub->add_flag("--naive", o.naive, "Use the annotation-free projection instead of synthesis");
    };

    CLI::App* validate = add("validate", "Check structural invariants");
    validate->add_flag("--dot", o.dot, "Print the graph in DOT format");

    CLI::App* classify_cmd = add("classify", "Classify choice nodes");
    classify_cmd->add_flag("--json", o.json, "JSON output");

    CLI::App* triggers_cmd = add("triggers", "Triggers set of a node");
    triggers_cmd->add_option("node", o.node, "Node id")->required();

    CLI::App* linearize = add("linearize", "Linearizations of a bMSC");
    linearize->add_option("bmsc", o.chart, "bMSC name")->required();
    linearize->add_option("--cap", o.cap, "Maximum event count");

    CLI::App* synthesize = add("synthesize", "Synthesize a deadlock-free CFM");
    synthesize->add_option("--out", o.out, "Output format")->check(CLI::IsMember({"text", "dot", "json"}));
    synthesize->add_option("--initial", o.initial_choice, "Index of the shared initial prediction");

    CLI::App* explore_cmd = add("explore", "Explore the synthesized CFM");
    explore_cmd->add_option("--channel-bound", o.channel_bound, "Maximum channel length")->check(CLI::PositiveNumber);
    explore_cmd->add_option("--max-configs", o.max_configs, "Configuration budget")->check(CLI::PositiveNumber);
    explore_cmd->add_flag("--json", o.json, "JSON output");
    add_cfm_flags(explore_cmd);

    CLI::App* simulate_cmd = add("simulate", "Run the synthesized CFM once");
    simulate_cmd->add_option("--seed", o.seed, "Random seed");
    simulate_cmd->add_option("--max-steps", o.max_steps, "Step limit");
    simulate_cmd->add_flag("--channels", o.channels, "Print channel contents after each step");
    add_cfm_flags(simulate_cmd);

    CLI::App* equiv = add("equiv", "Bounded language comparison of the graph and its CFM");
    equiv->add_option("--visits", o.visits, "Maximum visits per node")->check(CLI::PositiveNumber);
    equiv->add_option("--event-cap", o.event_cap, "Maximum events per run")->check(CLI::PositiveNumber);
    equiv->add_option("--channel-bound", o.channel_bound, "Maximum channel length")->check(CLI::PositiveNumber);
    equiv->add_option("--max-configs", o.max_configs, "Configuration budget")->check(CLI::PositiveNumber);
    equiv->add_flag("--json", o.json, "JSON output");
    add_cfm_flags(equiv);

    CLI::App* partition = add("partition", "Split a run into prediction paths");
    partition->add_option("run", o.run, "Node ids of the run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (validate->parsed()) return cmd_validate(o);
        if (classify_cmd->parsed()) return cmd_classify(o);
        if (triggers_cmd->parsed()) return cmd_triggers(o);
        if (linearize->parsed()) return cmd_linearize(o);
        if (synthesize->parsed()) return cmd_synthesize(o);
        if (explore_cmd->parsed()) return cmd_explore(o);
        if (simulate_cmd->parsed()) return cmd_simulate(o);
        if (equiv->parsed()) return cmd_equiv(o);
        if (partition->parsed()) return cmd_partition(o);
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return usage;
    } catch (const ClassError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "offending nodes:";
        for (const std::string& n : e.offending_nodes) {
            std::cerr << ' ' << n;
        }
        std::cerr << "\n";
        return negative;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
