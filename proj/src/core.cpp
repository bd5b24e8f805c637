#include "msgsynth/core.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace msgsynth {

std::string Action::str() const
{
    std::string out = process.str();
    out += kind == EventKind::send ? '!' : '?';
    out += peer.str();
    out += '(';
    out += label.str();
    out += ')';
    return out;
}

std::string to_string(const Word& w)
{
    if (w.empty()) {
        return "ε";
    }
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += w[i].str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bmsc

ProcessId Bmsc::process_of(EventId e) const
{
    const Message& m = messages.at(message_of(e));
    return kind_of(e) == EventKind::send ? m.sender : m.receiver;
}

Action Bmsc::action_of(EventId e) const
{
    const Message& m = messages.at(message_of(e));
    if (kind_of(e) == EventKind::send) {
        return Action{EventKind::send, m.sender, m.receiver, m.label};
    }
    return Action{EventKind::receive, m.receiver, m.sender, m.label};
}

const std::vector<EventId>& Bmsc::events_on(const ProcessId& p) const
{
    static const std::vector<EventId> none;
    auto it = order.find(p);
    return it == order.end() ? none : it->second;
}

std::vector<ProcessId> Bmsc::active_processes() const
{
    std::vector<ProcessId> out;
    for (const auto& [p, events] : order) {
        if (!events.empty()) {
            out.push_back(p);
        }
    }
    return out;
}

std::optional<std::size_t> Bmsc::find_message(std::size_t segment, std::string_view id) const
{
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (messages[i].segment == segment && messages[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::string Bmsc::describe(EventId e) const
{
    const Message& m = messages.at(message_of(e));
    std::string out = kind_of(e) == EventKind::send ? "!" : "?";
    out += m.id;
    if (segments > 1) {
        out += '@';
        out += std::to_string(m.segment);
    }
    return out;
}

Bmsc make_bmsc(std::vector<ProcessId> processes, std::vector<Message> messages)
{
    Bmsc b;
    b.processes = std::move(processes);
    b.messages = std::move(messages);
    for (const ProcessId& p : b.processes) {
        b.order[p];
    }
    for (std::size_t i = 0; i < b.messages.size(); ++i) {
        b.order[b.messages[i].sender].push_back(send_of(i));
        b.order[b.messages[i].receiver].push_back(receive_of(i));
    }
    return b;
}

namespace {

// Generating relation of the visual order: process successors and pairing.
std::vector<std::vector<EventId>> base_successors(const Bmsc& b)
{
    std::vector<std::vector<EventId>> succ(b.event_count());
    for (const auto& [p, events] : b.order) {
        for (std::size_t i = 0; i + 1 < events.size(); ++i) {
            succ[events[i]].push_back(events[i + 1]);
        }
    }
    for (std::size_t m = 0; m < b.messages.size(); ++m) {
        succ[send_of(m)].push_back(receive_of(m));
    }
    return succ;
}

std::optional<std::vector<EventId>> topological(const std::vector<std::vector<EventId>>& succ)
{
    std::vector<std::size_t> indegree(succ.size(), 0);
    for (const auto& out : succ) {
        for (EventId t : out) {
            ++indegree[t];
        }
    }
    std::vector<EventId> order;
    std::vector<EventId> ready;
    for (EventId e = 0; e < succ.size(); ++e) {
        if (indegree[e] == 0) {
            ready.push_back(e);
        }
    }
    while (!ready.empty()) {
        EventId e = ready.back();
        ready.pop_back();
        order.push_back(e);
        for (EventId t : succ[e]) {
            if (--indegree[t] == 0) {
                ready.push_back(t);
            }
        }
    }
    if (order.size() != succ.size()) {
        return std::nullopt;
    }
    return order;
}

// Position of each event inside its process order, or npos when the event
// is missing or listed more than once.
constexpr std::size_t npos = static_cast<std::size_t>(-1);

}  // namespace

std::vector<BmscViolation> validate_bmsc(const Bmsc& b)
{
    std::vector<BmscViolation> out;
    const std::size_t n = b.event_count();
    std::set<ProcessId> declared(b.processes.begin(), b.processes.end());

    for (const Message& m : b.messages) {
        if (m.sender == m.receiver) {
            out.push_back({BmscViolationKind::self_message,
                           "message " + m.id + " is sent by " + m.sender.str() + " to itself"});
        }
        for (const ProcessId* p : {&m.sender, &m.receiver}) {
            if (!declared.contains(*p)) {
                out.push_back({BmscViolationKind::pairing,
                               "message " + m.id + " uses undeclared process " + p->str()});
            }
        }
    }

    std::vector<std::size_t> position(n, npos);
    std::vector<int> seen(n, 0);
    bool pairing_ok = true;
    for (const auto& [p, events] : b.order) {
        for (std::size_t i = 0; i < events.size(); ++i) {
            EventId e = events[i];
            if (e >= n) {
                out.push_back({BmscViolationKind::pairing,
                               "process " + p.str() + " lists an event with no message"});
                pairing_ok = false;
                continue;
            }
            if (b.process_of(e) != p) {
                out.push_back({BmscViolationKind::pairing,
                               "event " + b.describe(e) + " is listed on " + p.str() + " but belongs to " +
                                   b.process_of(e).str()});
                pairing_ok = false;
            }
            ++seen[e];
            position[e] = i;
        }
    }
    for (EventId e = 0; e < n; ++e) {
        if (seen[e] != 1) {
            out.push_back({BmscViolationKind::pairing,
                           "event " + b.describe(e) + (seen[e] == 0 ? " is not ordered on its process"
                                                                    : " is ordered more than once")});
            pairing_ok = false;
        }
    }
    if (!pairing_ok) {
        return out;
    }

    for (std::size_t m1 = 0; m1 < b.messages.size(); ++m1) {
        for (std::size_t m2 = 0; m2 < b.messages.size(); ++m2) {
            const Message& x = b.messages[m1];
            const Message& y = b.messages[m2];
            if (m1 == m2 || x.sender != y.sender || x.receiver != y.receiver) {
                continue;
            }
            if (position[send_of(m1)] < position[send_of(m2)] &&
                position[receive_of(m1)] > position[receive_of(m2)]) {
                out.push_back({BmscViolationKind::fifo,
                               "messages " + x.id + " and " + y.id + " overtake each other on channel " +
                                   x.sender.str() + "->" + x.receiver.str()});
            }
        }
    }

    if (!topological(base_successors(b))) {
        out.push_back({BmscViolationKind::cycle, "visual order has a cycle"});
    }
    return out;
}

std::vector<std::pair<EventId, EventId>> VisualOrder::pairs() const
{
    std::vector<std::pair<EventId, EventId>> out;
    for (EventId a = 0; a < n_; ++a) {
        for (EventId b = 0; b < n_; ++b) {
            if (less_[a][b]) {
                out.emplace_back(a, b);
            }
        }
    }
    return out;
}

std::vector<EventId> VisualOrder::minimal() const
{
    std::vector<EventId> out;
    for (EventId b = 0; b < n_; ++b) {
        bool has_predecessor = false;
        for (EventId a = 0; a < n_ && !has_predecessor; ++a) {
            has_predecessor = less_[a][b];
        }
        if (!has_predecessor) {
            out.push_back(b);
        }
    }
    return out;
}

VisualOrder visual_order(const Bmsc& b)
{
    const auto succ = base_successors(b);
    const auto topo = topological(succ);
    if (!topo) {
        throw InvalidBmsc("visual order has a cycle");
    }
    VisualOrder order(b.event_count());
    std::vector<std::vector<bool>> reach(b.event_count(), std::vector<bool>(b.event_count(), false));
    for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
        EventId e = *it;
        for (EventId t : succ[e]) {
            reach[e][t] = true;
            for (EventId u = 0; u < b.event_count(); ++u) {
                if (reach[t][u]) {
                    reach[e][u] = true;
                }
            }
        }
    }
    for (EventId x = 0; x < b.event_count(); ++x) {
        for (EventId y = 0; y < b.event_count(); ++y) {
            if (reach[x][y]) {
                order.set(x, y);
            }
        }
    }
    return order;
}

Word projection(const Bmsc& b, const ProcessId& p)
{
    Word out;
    for (EventId e : b.events_on(p)) {
        out.push_back(b.action_of(e));
    }
    return out;
}

Bmsc compose(const Bmsc& first, const Bmsc& second)
{
    Bmsc out;
    out.processes = first.processes;
    for (const ProcessId& p : second.processes) {
        if (std::find(out.processes.begin(), out.processes.end(), p) == out.processes.end()) {
            out.processes.push_back(p);
        }
    }
    out.segments = first.segments + second.segments;
    out.messages = first.messages;
    for (Message m : second.messages) {
        m.segment += first.segments;
        out.messages.push_back(std::move(m));
    }
    out.order = first.order;
    const std::size_t shift = first.event_count();
    for (const auto& [p, events] : second.order) {
        auto& target = out.order[p];
        for (EventId e : events) {
            target.push_back(e + shift);
        }
    }
    for (const ProcessId& p : out.processes) {
        out.order[p];
    }

    auto violations = validate_bmsc(out);
    if (!violations.empty()) {
        std::string detail = "composition is not a valid bMSC:";
        for (const auto& v : violations) {
            detail += ' ';
            detail += v.detail;
            detail += ';';
        }
        throw InvalidBmsc(detail);
    }
    return out;
}

std::set<Word> linearizations(const Bmsc& b, std::size_t cap)
{
    if (b.event_count() > cap) {
        throw SizeError("bMSC has " + std::to_string(b.event_count()) + " events, cap is " + std::to_string(cap));
    }
    const auto succ = base_successors(b);
    if (!topological(succ)) {
        throw InvalidBmsc("visual order has a cycle");
    }
    std::vector<std::size_t> indegree(succ.size(), 0);
    for (const auto& out : succ) {
        for (EventId t : out) {
            ++indegree[t];
        }
    }

    std::set<Word> words;
    Word current;
    std::vector<bool> done(succ.size(), false);
    std::function<void()> extend = [&] {
        if (current.size() == succ.size()) {
            words.insert(current);
            return;
        }
        for (EventId e = 0; e < succ.size(); ++e) {
            if (done[e] || indegree[e] != 0) {
                continue;
            }
            done[e] = true;
            for (EventId t : succ[e]) {
                --indegree[t];
            }
            current.push_back(b.action_of(e));
            extend();
            current.pop_back();
            for (EventId t : succ[e]) {
                ++indegree[t];
            }
            done[e] = false;
        }
    };
    extend();
    return words;
}

std::map<ProcessId, Word> canonical_form(const Bmsc& b)
{
    std::map<ProcessId, Word> out;
    for (const ProcessId& p : b.active_processes()) {
        out[p] = projection(b, p);
    }
    return out;
}

bool isomorphic(const Bmsc& a, const Bmsc& b)
{
    return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// MsgGraph

NodeIndex MsgGraph::add_node(std::string node_name, Bmsc label)
{
    nodes.push_back(std::move(node_name));
    labels.push_back(std::move(label));
    successors.emplace_back();
    return nodes.size() - 1;
}

void MsgGraph::add_edge(NodeIndex from, NodeIndex to)
{
    auto& out = successors.at(from);
    auto it = std::lower_bound(out.begin(), out.end(), to);
    if (it == out.end() || *it != to) {
        out.insert(it, to);
    }
}

bool MsgGraph::has_edge(NodeIndex from, NodeIndex to) const
{
    const auto& out = successors.at(from);
    return std::binary_search(out.begin(), out.end(), to);
}

std::optional<NodeIndex> MsgGraph::find(std::string_view node_name) const
{
    for (NodeIndex i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == node_name) {
            return i;
        }
    }
    return std::nullopt;
}

NodeIndex MsgGraph::index_of(std::string_view node_name) const
{
    if (auto i = find(node_name)) {
        return *i;
    }
    throw Error("unknown node " + std::string(node_name));
}

std::vector<ProcessId> MsgGraph::processes() const
{
    std::set<ProcessId> all;
    for (const Bmsc& b : labels) {
        all.insert(b.processes.begin(), b.processes.end());
        for (const Message& m : b.messages) {
            all.insert(m.sender);
            all.insert(m.receiver);
        }
    }
    return {all.begin(), all.end()};
}

bool MsgGraph::is_path(const Path& path) const
{
    if (path.empty()) {
        return false;
    }
    for (NodeIndex n : path) {
        if (n >= size()) {
            return false;
        }
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!has_edge(path[i], path[i + 1])) {
            return false;
        }
    }
    return true;
}

bool MsgGraph::is_run(const Path& path) const
{
    return is_path(path) && path.front() == initial && path.back() == terminal;
}

std::string MsgGraph::render(const Path& path) const
{
    std::string out = "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += path[i] < size() ? nodes[path[i]] : "?";
    }
    out += ']';
    return out;
}

std::vector<GraphViolation> validate_graph(const MsgGraph& g)
{
    std::vector<GraphViolation> out;
    if (g.nodes.empty() || g.initial >= g.size() || g.terminal >= g.size()) {
        out.push_back({"initial or terminal node is missing"});
        return out;
    }
    std::set<std::string> names;
    for (const std::string& n : g.nodes) {
        if (!names.insert(n).second) {
            out.push_back({"duplicate node " + n});
        }
    }
    for (NodeIndex n = 0; n < g.size(); ++n) {
        if (g.has_edge(n, g.initial)) {
            out.push_back({"edge " + g.nodes[n] + " -> " + g.nodes[g.initial] + " enters the initial node"});
        }
    }
    if (!g.successors[g.terminal].empty()) {
        out.push_back({"terminal node " + g.nodes[g.terminal] + " has outgoing edges"});
    }

    std::vector<bool> forward(g.size(), false);
    std::deque<NodeIndex> work{g.initial};
    forward[g.initial] = true;
    while (!work.empty()) {
        NodeIndex n = work.front();
        work.pop_front();
        for (NodeIndex t : g.successors[n]) {
            if (!forward[t]) {
                forward[t] = true;
                work.push_back(t);
            }
        }
    }
    std::vector<std::vector<NodeIndex>> preds(g.size());
    for (NodeIndex n = 0; n < g.size(); ++n) {
        for (NodeIndex t : g.successors[n]) {
            preds[t].push_back(n);
        }
    }
    std::vector<bool> backward(g.size(), false);
    work = {g.terminal};
    backward[g.terminal] = true;
    while (!work.empty()) {
        NodeIndex n = work.front();
        work.pop_front();
        for (NodeIndex t : preds[n]) {
            if (!backward[t]) {
                backward[t] = true;
                work.push_back(t);
            }
        }
    }
    for (NodeIndex n = 0; n < g.size(); ++n) {
        if (!forward[n]) {
            out.push_back({"node " + g.nodes[n] + " is unreachable from the initial node"});
        }
        if (!backward[n]) {
            out.push_back({"node " + g.nodes[n] + " cannot reach the terminal node"});
        }
        for (const auto& v : validate_bmsc(g.labels[n])) {
            out.push_back({"node " + g.nodes[n] + ": " + v.detail});
        }
    }
    return out;
}

Bmsc compose_path(const MsgGraph& g, const Path& path)
{
    if (!g.is_path(path)) {
        throw Error("not a path: " + g.render(path));
    }
    Bmsc out = g.labels[path.front()];
    for (Message& m : out.messages) {
        m.segment = 0;
    }
    out.segments = 1;
    for (std::size_t i = 1; i < path.size(); ++i) {
        Bmsc next = g.labels[path[i]];
        for (Message& m : next.messages) {
            m.segment = 0;
        }
        next.segments = 1;
        out = compose(out, next);
    }
    return out;
}

}  // namespace msgsynth
