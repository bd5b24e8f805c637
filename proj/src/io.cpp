#include "msgsynth/io.hpp"

#include "msgsynth/realization.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

namespace msgsynth {

namespace {

using nlohmann::json;

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + '"';
}

json path_json(const MsgGraph& g, const Path& p)
{
    json out = json::array();
    for (NodeIndex n : p) {
        out.push_back(g.nodes[n]);
    }
    return out;
}

json words_json(const std::set<Word>& words)
{
    json out = json::array();
    for (const Word& w : words) {
        out.push_back(to_string(w));
    }
    return out;
}

json action_json(const Action& a)
{
    return {{"kind", a.kind == EventKind::send ? "send" : "receive"},
            {"process", a.process.str()},
            {"peer", a.peer.str()},
            {"label", a.label.str()}};
}

Action action_from_json(const json& j)
{
    Action a;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "send" && kind != "receive") {
        throw Error("unknown action kind " + kind);
    }
    a.kind = kind == "send" ? EventKind::send : EventKind::receive;
    a.process = ProcessId(j.at("process").get<std::string>());
    a.peer = ProcessId(j.at("peer").get<std::string>());
    a.label = MessageLabel(j.at("label").get<std::string>());
    return a;
}

json optional_id(const std::optional<PredictionId>& id)
{
    return id ? json(*id) : json(nullptr);
}

std::optional<PredictionId> optional_id_from(const json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<PredictionId>();
}

Mode mode_from(const std::string& s)
{
    for (Mode m : {Mode::initial, Mode::executing, Mode::polling}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw Error("unknown mode " + s);
}

}  // namespace

std::string export_dot(const MsgGraph& g)
{
    std::vector<NodeIndex> order(g.size());
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return g.nodes[a] < g.nodes[b]; });

    std::ostringstream out;
    out << "digraph " << quote(g.name) << " {\n";
    for (NodeIndex n : order) {
        std::string label = g.nodes[n];
        for (const Message& m : g.labels[n].messages) {
            label += "\\n" + m.sender.str() + "->" + m.receiver.str() + ":" + m.label.str();
        }
        out << "  " << quote(g.nodes[n]) << " [label=" << quote(label);
        if (n == g.initial) {
            out << ", shape=box";
        } else if (n == g.terminal) {
            out << ", shape=doublecircle";
        }
        out << "];\n";
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (NodeIndex n = 0; n < g.size(); ++n) {
        for (NodeIndex t : g.successors[n]) {
            edges.emplace_back(g.nodes[n], g.nodes[t]);
        }
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& [a, b] : edges) {
        out << "  " << quote(a) << " -> " << quote(b) << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const Cfm& cfm)
{
    std::ostringstream out;
    out << "digraph cfm {\n";
    for (std::size_t i = 0; i < cfm.machines.size(); ++i) {
        const ProcessMachine& m = cfm.machines[i];
        const std::string prefix = m.process.str() + "_";
        out << "  subgraph " << quote("cluster_" + m.process.str()) << " {\n";
        out << "    label=" << quote(m.process.str()) << ";\n";
        for (StateId s = 0; s < m.state_count(); ++s) {
            out << "    " << quote(prefix + std::to_string(s)) << " [label=" << quote(m.names[s])
                << ", shape=" << (m.accepting[s] ? "doublecircle" : "circle") << "];\n";
        }
        out << "    " << quote(prefix + "start") << " [shape=point];\n";
        out << "    " << quote(prefix + "start") << " -> " << quote(prefix + std::to_string(m.initial)) << ";\n";
        std::vector<std::tuple<StateId, StateId, std::string>> edges;
        for (const Transition& t : m.transitions) {
            edges.emplace_back(t.from, t.to, t.action.str() + " " + cfm.describe(t.payload));
        }
        std::sort(edges.begin(), edges.end());
        for (const auto& [from, to, label] : edges) {
            out << "    " << quote(prefix + std::to_string(from)) << " -> " << quote(prefix + std::to_string(to))
                << " [label=" << quote(label) << "];\n";
        }
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

json to_json(const MsgGraph& g, const Classification& c)
{
    json nodes = json::object();
    json counterexamples = json::object();
    for (const auto& [n, cls] : c.choice_nodes) {
        nodes[g.nodes[n]] = to_string(cls);
        auto v = c.verdicts.find(n);
        if (v != c.verdicts.end() && v->second.counterexample) {
            counterexamples[g.nodes[n]] = {
                {"failure", v->second.failure == ControllabilityVerdict::Failure::cycle ? "cycle" : "path-from-initial"},
                {"path", path_json(g, *v->second.counterexample)}};
        }
    }
    json out = {{"graph", g.name}, {"overall", to_string(c.overall)}, {"choice_nodes", nodes}};
    if (!counterexamples.empty()) {
        out["counterexamples"] = counterexamples;
    }
    return out;
}

json to_json(const MsgGraph& g, const std::vector<PredictionPath>& paths)
{
    json out = json::array();
    for (const PredictionPath& p : paths) {
        out.push_back({{"nodes", path_json(g, p.nodes)}, {"kind", to_string(p.kind)}});
    }
    return out;
}

json to_json(const EquivalenceReport& r)
{
    return {{"verdict", to_string(r.verdict)},
            {"bounds",
             {{"visits", r.bounds.visits},
              {"event_cap", r.bounds.event_cap},
              {"channel_depth", r.bounds.channel_depth},
              {"max_configurations", r.bounds.max_configurations},
              {"word_budget", r.bounds.word_budget}}},
            {"word_length_bound", r.word_length_bound},
            {"msg_words", r.msg_words},
            {"cfm_words", r.cfm_words},
            {"missing_in_cfm", words_json(r.missing_in_cfm)},
            {"extra_in_cfm", words_json(r.extra_in_cfm)},
            {"beyond_visit_bound", r.beyond_visit_bound},
            {"skipped_runs", r.skipped_runs},
            {"cfm_truncated", r.cfm_truncated},
            {"configurations", r.configurations},
            {"deadlocks", r.deadlocks},
            {"exploration_exact", r.exploration_exact}};
}

json to_json(const ExplorationResult& r)
{
    return {{"configurations", r.configurations.size()},
            {"transitions", r.edges.size()},
            {"accepting", r.accepting.size()},
            {"deadlocks", r.deadlocks},
            {"boundary", r.boundary.size()},
            {"budget_exhausted", r.budget_exhausted},
            {"exact", r.exact()}};
}

json to_json(const Cfm& cfm)
{
    json processes = json::array();
    for (const ProcessId& p : cfm.processes) {
        processes.push_back(p.str());
    }
    json payloads = json::array();
    for (PayloadId id = 0; id < cfm.payloads.size(); ++id) {
        const Payload& p = cfm.payloads[id];
        payloads.push_back({{"label", p.label.str()},
                            {"current", optional_id(p.current)},
                            {"next", optional_id(p.next)},
                            {"text", cfm.describe(id)}});
    }
    json machines = json::array();
    for (const ProcessMachine& m : cfm.machines) {
        json states = json::array();
        for (StateId s = 0; s < m.state_count(); ++s) {
            json state = {{"name", m.names[s]}, {"accepting", static_cast<bool>(m.accepting[s])}};
            if (s < m.local.size()) {
                const LocalState& l = m.local[s];
                state["local"] = {{"mode", to_string(l.mode)},
                                  {"current", optional_id(l.current)},
                                  {"next", optional_id(l.next)},
                                  {"position", l.position}};
            }
            states.push_back(state);
        }
        json transitions = json::array();
        for (const Transition& t : m.transitions) {
            json jt = {{"from", t.from}, {"to", t.to}, {"action", action_json(t.action)}, {"payload", t.payload}};
            if (t.started != 0) {
                jt["started"] = t.started;
            }
            if (t.adopts) {
                jt["adopts"] = true;
            }
            transitions.push_back(jt);
        }
        json jm = {{"process", m.process.str()}, {"initial", m.initial}, {"states", states}, {"transitions", transitions}};
        if (m.initial_started != 0) {
            jm["initial_started"] = m.initial_started;
        }
        machines.push_back(jm);
    }
    json out = {{"processes", processes}, {"payloads", payloads}, {"machines", machines}};
    if (cfm.realization) {
        json predictions = json::array();
        for (PredictionId id = 0; id < cfm.realization->predictions().size(); ++id) {
            predictions.push_back(cfm.realization->describe(id));
        }
        out["predictions"] = predictions;
    }
    return out;
}

Cfm cfm_from_json(const json& j)
{
    try {
        Cfm cfm;
        for (const json& p : j.at("processes")) {
            cfm.processes.emplace_back(p.get<std::string>());
        }
        for (const json& p : j.at("payloads")) {
            cfm.payloads.push_back({MessageLabel(p.at("label").get<std::string>()),
                                    optional_id_from(p.at("current")), optional_id_from(p.at("next"))});
        }
        for (const json& jm : j.at("machines")) {
            ProcessMachine m;
            m.process = ProcessId(jm.at("process").get<std::string>());
            bool any_local = false;
            for (const json& s : jm.at("states")) {
                m.add_state(s.at("name").get<std::string>(), s.at("accepting").get<bool>());
                if (s.contains("local")) {
                    const json& l = s.at("local");
                    m.local.push_back({mode_from(l.at("mode").get<std::string>()), optional_id_from(l.at("current")),
                                       optional_id_from(l.at("next")), l.at("position").get<std::uint32_t>()});
                    any_local = true;
                }
            }
            if (any_local && m.local.size() != m.state_count()) {
                throw Error("machine " + m.process.str() + " has local data for only some states");
            }
            m.initial = jm.at("initial").get<StateId>();
            if (m.initial >= m.state_count()) {
                throw Error("machine " + m.process.str() + " has an out-of-range initial state");
            }
            m.initial_started = jm.value("initial_started", std::uint32_t{0});
            for (const json& t : jm.at("transitions")) {
                Transition tr;
                tr.from = t.at("from").get<StateId>();
                tr.to = t.at("to").get<StateId>();
                tr.action = action_from_json(t.at("action"));
                tr.payload = t.at("payload").get<PayloadId>();
                tr.started = t.value("started", std::uint32_t{0});
                tr.adopts = t.value("adopts", false);
                if (tr.from >= m.state_count() || tr.to >= m.state_count() || tr.payload >= cfm.payloads.size()) {
                    throw Error("machine " + m.process.str() + " has an out-of-range transition");
                }
                m.transitions.push_back(tr);
            }
            cfm.machines.push_back(std::move(m));
        }
        if (cfm.machines.size() != cfm.processes.size()) {
            throw Error("machine count differs from process count");
        }
        cfm.finalize();
        return cfm;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed CFM document: ") + e.what());
    }
}

std::string render_text(const Cfm& cfm)
{
    std::ostringstream out;
    for (const ProcessMachine& m : cfm.machines) {
        out << "machine " << m.process.str() << " (" << m.state_count() << " states, " << m.transitions.size()
            << " transitions)\n";
        for (StateId s = 0; s < m.state_count(); ++s) {
            out << "  " << s << (s == m.initial ? " initial" : "") << (m.accepting[s] ? " accepting" : "") << "  "
                << m.names[s] << "\n";
            for (std::uint32_t t : m.outgoing[s]) {
                const Transition& tr = m.transitions[t];
                out << "    " << tr.action.str() << " " << cfm.describe(tr.payload) << " -> " << tr.to << "\n";
            }
        }
    }
    if (!cfm.unsafe_promotions.empty()) {
        out << "unsafe promotions: " << cfm.unsafe_promotions.size() << "\n";
    }
    return out.str();
}

}  // namespace msgsynth
