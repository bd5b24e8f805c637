#include "support.hpp"

#include "msgsynth/realization.hpp"
#include "msgsynth/runtime.hpp"

#include <doctest.h>

using namespace testing;

namespace {

const std::vector<std::string>& corpus()
{
    static const std::vector<std::string> names{"cross", "empty", "local", "relay", "uncontrollable"};
    return names;
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + needle.size())) {
        ++n;
    }
    return n;
}

std::vector<Diagnostic> diagnostics_of(std::string_view text)
{
    try {
        parse_spec(text);
    } catch (const ParseError& e) {
        return e.diagnostics();
    }
    return {};
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& needle)
{
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
        return d.message.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("the crossing fixture parses into the expected chart and graph")
{
    const Specification spec = load("cross");
    Bmsc expected = make_bmsc(pids({"p", "q"}), {{"a", ProcessId("p"), ProcessId("q"), MessageLabel("m"), 0},
                                                 {"b", ProcessId("q"), ProcessId("p"), MessageLabel("m'"), 0}});
    expected.order[ProcessId("p")] = {send_of(0), receive_of(1)};
    expected.order[ProcessId("q")] = {send_of(1), receive_of(0)};
    CHECK(isomorphic(spec.chart("S"), expected));

    const MsgGraph& g = spec.graph;
    CHECK(g.name == "cross");
    CHECK(g.size() == 3);
    CHECK(g.nodes[g.initial] == "s0");
    CHECK(g.nodes[g.terminal] == "sf");
    CHECK(g.has_edge(g.index_of("s"), g.index_of("s")));
    CHECK(g.labels[g.initial].empty());
    CHECK_THROWS_AS(spec.chart("T"), Error);
}

TEST_CASE("the empty fixture has two nodes and no events")
{
    const MsgGraph g = graph("empty");
    CHECK(g.size() == 2);
    CHECK(g.successors[g.initial] == std::vector<NodeIndex>{g.terminal});
    for (const Bmsc& b : g.labels) {
        CHECK(b.event_count() == 0);
    }
}

TEST_CASE("undeclared processes are reported at the message")
{
    try {
        load("bad_process");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.diagnostics().size() >= 1);
        CHECK(e.diagnostics()[0].where.line == 3);
        CHECK(e.diagnostics()[0].where.column == 3);
        CHECK(std::string(e.what()).find("bad_process.msg:3:3") != std::string::npos);
        CHECK(std::string(e.what()).find("undeclared process z") != std::string::npos);
    }
}

TEST_CASE("syntax errors carry a location")
{
    const auto ds = diagnostics_of("bmsc S {\n  processes p q\n  msg a: p -> q label m;\n}\n");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].where.line == 3);

    const auto bad_char = diagnostics_of("bmsc S { processes p q; } $");
    REQUIRE(bad_char.size() == 1);
    CHECK(bad_char[0].where.column == 27);
}

TEST_CASE("semantic errors are collected together")
{
    const auto ds = diagnostics_of(R"(bmsc S {
  processes p q;
  msg a: p -> q label m;
  msg a: p -> q label m;
  msg c: p -> p label m;
  order p: !a;
  order p: !a;
}
graph g { init s0; final sf; node s0: T; s0 -> sf; }
)");
    CHECK(mentions(ds, "duplicate message a"));
    CHECK(mentions(ds, "self"));
    CHECK(mentions(ds, "duplicate order"));
    CHECK(mentions(ds, "unknown bMSC T"));
    CHECK(ds.size() >= 4);
}

TEST_CASE("FIFO violations are parse errors unless invariants are skipped")
{
    const std::string text = R"(bmsc S {
  processes p q;
  msg x: p -> q label m;
  msg y: p -> q label m;
  order p: !x !y;
  order q: ?y ?x;
}
graph g { init s0; final sf; node s0: S; s0 -> sf; }
)";
    CHECK(mentions(diagnostics_of(text), "overtake"));
    const Specification lax = parse_spec(text, "<input>", {.check_invariants = false});
    CHECK_FALSE(validate_bmsc(lax.chart("S")).empty());
}

TEST_CASE("graph shape violations are parse errors")
{
    const auto ds = diagnostics_of("graph g { init s0; final sf; node m: empty; s0 -> sf; sf -> m; }");
    CHECK_FALSE(ds.empty());
}

TEST_CASE("printing is canonical and round-trips")
{
    for (const std::string& name : corpus()) {
        CAPTURE(name);
        const Specification spec = load(name);
        const std::string printed = print_spec(spec);
        const Specification again = parse_spec(printed);
        CHECK(print_spec(again) == printed);
        REQUIRE(again.graph.size() == spec.graph.size());
        for (NodeIndex n = 0; n < spec.graph.size(); ++n) {
            const NodeIndex m = again.graph.index_of(spec.graph.nodes[n]);
            CHECK(isomorphic(again.graph.labels[m], spec.graph.labels[n]));
            CHECK(again.graph.successors[m].size() == spec.graph.successors[n].size());
        }
        CHECK(again.graph.nodes[again.graph.initial] == spec.graph.nodes[spec.graph.initial]);
    }
}

TEST_CASE("graph DOT export")
{
    const std::string dot = export_dot(graph("cross"));
    CHECK(dot == export_dot(graph("cross")));
    CHECK(dot.rfind("digraph \"cross\" {", 0) == 0);
    CHECK(count(dot, " -> ") == 3);
    CHECK(count(dot, "[label=") == 3);
    CHECK(count(dot, "shape=box") == 1);
    CHECK(count(dot, "shape=doublecircle") == 1);
}

TEST_CASE("CFM DOT export")
{
    const std::string empty = export_dot(synthesize_cfm(graph("empty")));
    CHECK(count(empty, "subgraph") == 2);
    CHECK(count(empty, "shape=doublecircle") == 2);

    const Cfm local = synthesize_cfm(graph("local"));
    const std::string dot = export_dot(local);
    CHECK(dot == export_dot(synthesize_cfm(graph("local"))));
    CHECK(count(dot, "q?p(") == 2);
    CHECK(count(dot, "p!q(") == 2);
}

TEST_CASE("classification JSON")
{
    const MsgGraph g = graph("cross");
    const nlohmann::json j = to_json(g, classify(g));
    CHECK(j.at("graph") == "cross");
    CHECK(j.at("overall") == "controllable-choice MSG");
    CHECK(j.at("choice_nodes").at("s") == "controllable-choice");

    const MsgGraph u = graph("uncontrollable");
    const nlohmann::json ju = to_json(u, classify(u));
    CHECK(ju.at("choice_nodes").at("u") == "uncontrollable");
    CHECK(ju.contains("counterexamples"));
}

TEST_CASE("CFM JSON round trip")
{
    for (const std::string& name : controllable_fixtures()) {
        CAPTURE(name);
        const Cfm cfm = synthesize_cfm(graph(name));
        const nlohmann::json j = to_json(cfm);
        const Cfm back = cfm_from_json(nlohmann::json::parse(j.dump()));
        CHECK(to_json(back).at("machines") == j.at("machines"));
        // Payload text depends on the realization, which is not serialized.
        auto strip = [](nlohmann::json payloads) {
            for (auto& p : payloads) {
                p.erase("text");
            }
            return payloads;
        };
        CHECK(strip(to_json(back).at("payloads")) == strip(j.at("payloads")));
        CHECK(accepted_words(back, 6).words == accepted_words(cfm, 6).words);
        CHECK(explore(back).configurations.size() == explore(cfm).configurations.size());
    }
}

TEST_CASE("malformed CFM documents are rejected")
{
    nlohmann::json j = to_json(synthesize_cfm(graph("local")));
    j["machines"][0]["initial"] = 99;
    CHECK_THROWS_AS(cfm_from_json(j), Error);
    CHECK_THROWS_AS(cfm_from_json(nlohmann::json::object()), Error);
}

TEST_CASE("exploration and equivalence JSON")
{
    const MsgGraph g = graph("cross");
    const Cfm cfm = synthesize_cfm(g);
    const nlohmann::json ex = to_json(explore(cfm));
    CHECK(ex.at("configurations") == 359);
    CHECK(ex.at("deadlocks").empty());
    CHECK(ex.at("exact") == true);

    const nlohmann::json eq = to_json(check_equivalence(g, cfm));
    CHECK(eq.at("verdict") == "equal-at-bound");
    CHECK(eq.at("missing_in_cfm").empty());
}

TEST_CASE("partition JSON")
{
    const MsgGraph g = graph("cross");
    const Path run{g.index_of("s0"), g.index_of("s"), g.index_of("s"), g.index_of("s"), g.index_of("sf")};
    const Classification cls = classify(g);
    const auto expected = partitions_oracle(g, cls, initial_path(g).nodes, run);
    REQUIRE(expected.size() == 1);
    const nlohmann::json j = to_json(g, partition_run(g, run));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == expected[0].size());
    CHECK(j[0].at("nodes") == nlohmann::json{"s0", "s"});
    CHECK(j[1].at("nodes") == nlohmann::json{"s", "s"});
    CHECK(j[2].at("nodes") == nlohmann::json{"sf"});
}
