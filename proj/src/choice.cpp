#include "msgsynth/choice.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>

namespace msgsynth {

std::string to_string(const ProcessSet& s)
{
    std::string out = "{";
    bool first = true;
    for (const ProcessId& p : s) {
        if (!first) {
            out += ',';
        }
        first = false;
        out += p.str();
    }
    out += '}';
    return out;
}

ProcessSet initiating_processes(const Bmsc& b)
{
    // Only the first event of a process can be minimal, and it is minimal
    // exactly when it is a send.
    ProcessSet out;
    for (const auto& [p, events] : b.order) {
        if (!events.empty() && kind_of(events.front()) == EventKind::send) {
            out.insert(p);
        }
    }
    return out;
}

ProcessSet triggers(const MsgGraph& g, NodeIndex s)
{
    if (s >= g.size()) {
        throw Error("unknown node index " + std::to_string(s));
    }
    ProcessSet out;
    for (const ProcessId& p : g.processes()) {
        // Walk through nodes silent for p; the first node where p appears
        // decides whether p starts with a send.
        std::vector<bool> visited(g.size(), false);
        std::deque<NodeIndex> work;
        for (NodeIndex t : g.successors[s]) {
            if (!visited[t]) {
                visited[t] = true;
                work.push_back(t);
            }
        }
        while (!work.empty()) {
            NodeIndex v = work.front();
            work.pop_front();
            const auto& events = g.labels[v].events_on(p);
            if (!events.empty()) {
                if (kind_of(events.front()) == EventKind::send) {
                    out.insert(p);
                    break;
                }
                continue;
            }
            for (NodeIndex t : g.successors[v]) {
                if (!visited[t]) {
                    visited[t] = true;
                    work.push_back(t);
                }
            }
        }
    }
    return out;
}

std::vector<EventId> resolving_events(const Bmsc& b, const ProcessSet& targets)
{
    const VisualOrder order = visual_order(b);
    std::vector<EventId> out;
    for (std::size_t m = 0; m < b.messages.size(); ++m) {
        const EventId e = send_of(m);
        bool resolving = true;
        for (const ProcessId& p : targets) {
            const auto& events = b.events_on(p);
            if (std::none_of(events.begin(), events.end(), [&](EventId f) { return order(e, f); })) {
                resolving = false;
                break;
            }
        }
        if (resolving) {
            out.push_back(e);
        }
    }
    return out;
}

bool is_local_choice(const MsgGraph& g, NodeIndex u)
{
    if (u >= g.size() || !g.is_choice(u)) {
        throw Error("not a choice node: " + (u < g.size() ? g.nodes[u] : std::to_string(u)));
    }
    return triggers(g, u).size() == 1;
}

// ---------------------------------------------------------------------------
// Controllability: product of the graph with a coverage automaton.
//
// For every send e of the composed chart so far we keep two process sets:
// `strict`, the processes with an event strictly after e, and `reach`,
// strict plus the sender of e. Appending a chart extends both by the
// processes reachable inside that chart from any event on a process in
// reach. The abstraction is monotone, so only the maximal pairs matter.

namespace {

using Mask = std::uint64_t;

struct Candidate {
    Mask reach = 0;
    Mask strict = 0;
    auto operator<=>(const Candidate&) const = default;
};

using Antichain = std::vector<Candidate>;

bool dominated(const Candidate& a, const Candidate& b)
{
    return (a.reach & ~b.reach) == 0 && (a.strict & ~b.strict) == 0;
}

Antichain normalize(Antichain in)
{
    std::sort(in.begin(), in.end());
    in.erase(std::unique(in.begin(), in.end()), in.end());
    Antichain out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < in.size() && keep; ++j) {
            if (i != j && dominated(in[i], in[j]) && in[i] != in[j]) {
                keep = false;
            }
        }
        if (keep) {
            out.push_back(in[i]);
        }
    }
    return out;
}

struct NodeSummary {
    // Processes reachable from the first event of each process.
    std::vector<Mask> reachable_from;
    std::vector<Candidate> fresh;
};

class CoverageAutomaton {
public:
    explicit CoverageAutomaton(const MsgGraph& g) : g_(g), processes_(g.processes())
    {
        if (processes_.size() > 64) {
            throw Error("controllability check supports at most 64 processes");
        }
        for (const Bmsc& b : g.labels) {
            summaries_.push_back(summarize(b));
        }
    }

    Mask mask_of(const ProcessSet& s) const
    {
        Mask m = 0;
        for (const ProcessId& p : s) {
            m |= bit(p);
        }
        return m;
    }

    Antichain start(NodeIndex v) const { return normalize(summaries_[v].fresh); }

    Antichain advance(const Antichain& a, NodeIndex v) const
    {
        const NodeSummary& s = summaries_[v];
        Antichain out = s.fresh;
        for (const Candidate& c : a) {
            Mask grown = 0;
            for (std::size_t i = 0; i < processes_.size(); ++i) {
                if (c.reach & (Mask{1} << i)) {
                    grown |= s.reachable_from[i];
                }
            }
            out.push_back({c.reach | grown, c.strict | grown});
        }
        return normalize(std::move(out));
    }

    static bool resolved(const Antichain& a, Mask targets)
    {
        return std::any_of(a.begin(), a.end(), [&](const Candidate& c) { return (targets & ~c.strict) == 0; });
    }

private:
    Mask bit(const ProcessId& p) const
    {
        auto it = std::lower_bound(processes_.begin(), processes_.end(), p);
        return Mask{1} << static_cast<std::size_t>(it - processes_.begin());
    }

    NodeSummary summarize(const Bmsc& b) const
    {
        NodeSummary s;
        s.reachable_from.assign(processes_.size(), 0);
        if (b.empty()) {
            return s;
        }
        const VisualOrder order = visual_order(b);
        auto after = [&](EventId e, bool inclusive) {
            Mask m = inclusive ? bit(b.process_of(e)) : 0;
            for (EventId f = 0; f < b.event_count(); ++f) {
                if (order(e, f)) {
                    m |= bit(b.process_of(f));
                }
            }
            return m;
        };
        for (std::size_t i = 0; i < processes_.size(); ++i) {
            const auto& events = b.events_on(processes_[i]);
            if (!events.empty()) {
                s.reachable_from[i] = after(events.front(), true);
            }
        }
        for (std::size_t m = 0; m < b.messages.size(); ++m) {
            const EventId e = send_of(m);
            const Mask strict = after(e, false);
            s.fresh.push_back({strict | bit(b.process_of(e)), strict});
        }
        return s;
    }

    const MsgGraph& g_;
    std::vector<ProcessId> processes_;
    std::vector<NodeSummary> summaries_;
};

// Breadth-first search over (node, antichain); returns an unresolved path
// ending at `target`, if one exists.
std::optional<Path> find_unresolved(const MsgGraph& g, const CoverageAutomaton& automaton,
                                    const std::vector<NodeIndex>& starts, NodeIndex target, Mask targets)
{
    using State = std::pair<NodeIndex, Antichain>;
    std::map<State, std::size_t> ids;
    std::vector<State> states;
    std::vector<std::optional<std::size_t>> parent;
    std::deque<std::size_t> work;

    auto visit = [&](State s, std::optional<std::size_t> from) {
        auto [it, inserted] = ids.emplace(s, states.size());
        if (inserted) {
            states.push_back(std::move(s));
            parent.push_back(from);
            work.push_back(it->second);
        }
    };
    for (NodeIndex v : starts) {
        visit({v, automaton.start(v)}, std::nullopt);
    }
    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop_front();
        const auto [node, chain] = states[id];
        if (node == target && !CoverageAutomaton::resolved(chain, targets)) {
            Path path;
            for (std::optional<std::size_t> cur = id; cur; cur = parent[*cur]) {
                path.push_back(states[*cur].first);
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (NodeIndex t : g.successors[node]) {
            visit({t, automaton.advance(chain, t)}, id);
        }
    }
    return std::nullopt;
}

}  // namespace

ControllabilityVerdict is_controllable_choice(const MsgGraph& g, NodeIndex u)
{
    if (u >= g.size() || !g.is_choice(u)) {
        throw Error("not a choice node: " + (u < g.size() ? g.nodes[u] : std::to_string(u)));
    }
    const CoverageAutomaton automaton(g);
    const Mask targets = automaton.mask_of(triggers(g, u));

    ControllabilityVerdict verdict;
    if (auto path = find_unresolved(g, automaton, {g.initial}, u, targets)) {
        verdict.failure = ControllabilityVerdict::Failure::path_from_initial;
        verdict.counterexample = std::move(path);
        return verdict;
    }
    if (auto path = find_unresolved(g, automaton, g.successors[u], u, targets)) {
        verdict.failure = ControllabilityVerdict::Failure::cycle;
        verdict.counterexample = std::move(path);
        return verdict;
    }
    verdict.controllable = true;
    return verdict;
}

const char* to_string(NodeClass c)
{
    switch (c) {
    case NodeClass::local_choice: return "local-choice";
    case NodeClass::controllable_choice: return "controllable-choice";
    case NodeClass::uncontrollable: return "uncontrollable";
    }
    return "?";
}

const char* to_string(MsgClass c)
{
    switch (c) {
    case MsgClass::local_choice: return "local-choice MSG";
    case MsgClass::controllable_choice: return "controllable-choice MSG";
    case MsgClass::neither: return "neither";
    }
    return "?";
}

bool Classification::is_local(NodeIndex n) const
{
    auto it = choice_nodes.find(n);
    return it != choice_nodes.end() && it->second == NodeClass::local_choice;
}

bool Classification::is_controllable(NodeIndex n) const
{
    auto it = choice_nodes.find(n);
    return it != choice_nodes.end() && it->second == NodeClass::controllable_choice;
}

std::vector<NodeIndex> Classification::offending() const
{
    std::vector<NodeIndex> out;
    for (const auto& [n, c] : choice_nodes) {
        if (c == NodeClass::uncontrollable) {
            out.push_back(n);
        }
    }
    return out;
}

Classification classify(const MsgGraph& g)
{
    Classification cls;
    bool all_local = true;
    bool all_ok = true;
    for (NodeIndex n = 0; n < g.size(); ++n) {
        if (!g.is_choice(n)) {
            continue;
        }
        if (triggers(g, n).size() == 1) {
            cls.choice_nodes[n] = NodeClass::local_choice;
            continue;
        }
        all_local = false;
        ControllabilityVerdict v = is_controllable_choice(g, n);
        cls.choice_nodes[n] = v.controllable ? NodeClass::controllable_choice : NodeClass::uncontrollable;
        all_ok = all_ok && v.controllable;
        cls.verdicts[n] = std::move(v);
    }
    cls.overall = all_local ? MsgClass::local_choice : all_ok ? MsgClass::controllable_choice : MsgClass::neither;
    return cls;
}

const char* to_string(PathKind k)
{
    switch (k) {
    case PathKind::initial: return "initial";
    case PathKind::local_terminated: return "local-terminated";
    case PathKind::controllable_revisit: return "controllable-revisit";
    case PathKind::terminal_terminated: return "terminal-terminated";
    }
    return "?";
}

PredictionPath initial_path(const MsgGraph& g)
{
    PredictionPath out{{g.initial}, PathKind::initial};
    while (out.last() != g.terminal && g.successors[out.last()].size() == 1) {
        out.nodes.push_back(g.successors[out.last()].front());
        if (out.nodes.size() > g.size()) {
            throw Error("initial path does not reach a choice node or the terminal node");
        }
    }
    return out;
}

std::optional<PathKind> terminating_kind(const MsgGraph& g, const Classification& cls, const Path& path)
{
    if (path.empty()) {
        return std::nullopt;
    }
    const NodeIndex last = path.back();
    if (cls.is_local(last)) {
        return PathKind::local_terminated;
    }
    if (cls.is_controllable(last) && std::find(path.begin(), path.end() - 1, last) != path.end() - 1) {
        return PathKind::controllable_revisit;
    }
    if (last == g.terminal) {
        return PathKind::terminal_terminated;
    }
    return std::nullopt;
}

namespace {

void require_controllable(const MsgGraph& g, const Classification& cls)
{
    if (cls.overall != MsgClass::neither) {
        return;
    }
    std::vector<std::string> names;
    std::string what = "not a controllable-choice MSG; uncontrollable nodes:";
    for (NodeIndex n : cls.offending()) {
        names.push_back(g.nodes[n]);
        what += ' ' + g.nodes[n];
    }
    throw ClassError(what, std::move(names));
}

}  // namespace

std::vector<PredictionPath> prediction_paths(const MsgGraph& g, const Classification& cls)
{
    require_controllable(g, cls);
    const std::size_t bound = 2 * g.size();
    std::set<PredictionPath> found;
    std::set<NodeIndex> started;
    std::deque<NodeIndex> starts;

    auto open = [&](NodeIndex last) {
        if (!cls.is_local(last) && !cls.is_controllable(last)) {
            return;
        }
        for (NodeIndex t : g.successors[last]) {
            if (started.insert(t).second) {
                starts.push_back(t);
            }
        }
    };

    const PredictionPath init = initial_path(g);
    found.insert(init);
    open(init.last());

    Path path;
    std::function<void()> extend = [&] {
        if (auto kind = terminating_kind(g, cls, path)) {
            if (found.insert({path, *kind}).second) {
                open(path.back());
            }
            return;
        }
        if (path.size() >= bound) {
            throw Error("no prediction path within length " + std::to_string(bound) + " from " + g.render(path));
        }
        for (NodeIndex t : g.successors[path.back()]) {
            path.push_back(t);
            extend();
            path.pop_back();
        }
    };
    while (!starts.empty()) {
        path = {starts.front()};
        starts.pop_front();
        extend();
    }
    return {found.begin(), found.end()};
}

std::vector<PredictionPath> prediction_paths(const MsgGraph& g)
{
    return prediction_paths(g, classify(g));
}

std::vector<PredictionPath> partition_run(const MsgGraph& g, const Classification& cls, const Path& run)
{
    if (!g.is_run(run)) {
        throw Error("not a run: " + g.render(run));
    }
    require_controllable(g, cls);
    const PredictionPath init = initial_path(g);
    if (run.size() < init.nodes.size() || !std::equal(init.nodes.begin(), init.nodes.end(), run.begin())) {
        throw Error("run does not start with the initial path " + g.render(init.nodes));
    }
    std::vector<PredictionPath> out{init};
    std::size_t pos = init.nodes.size();
    while (pos < run.size()) {
        bool cut = false;
        for (std::size_t end = pos + 1; end <= run.size(); ++end) {
            Path piece(run.begin() + static_cast<std::ptrdiff_t>(pos), run.begin() + static_cast<std::ptrdiff_t>(end));
            if (auto kind = terminating_kind(g, cls, piece)) {
                out.push_back({std::move(piece), *kind});
                pos = end;
                cut = true;
                break;
            }
        }
        if (!cut) {
            Path stuck(run.begin() + static_cast<std::ptrdiff_t>(pos), run.end());
            throw Error("run suffix " + g.render(stuck) + " has no prediction-path prefix");
        }
    }
    return out;
}

std::vector<PredictionPath> partition_run(const MsgGraph& g, const Path& run)
{
    return partition_run(g, classify(g), run);
}

}  // namespace msgsynth
