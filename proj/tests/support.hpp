#pragma once

// Fixture loading, random instance generators and brute-force oracles
// shared by the unit tests and the acceptance suite. The oracles work
// from the definitions directly and avoid the library's algorithms.

#include "msgsynth/choice.hpp"
#include "msgsynth/core.hpp"
#include "msgsynth/io.hpp"
#include "msgsynth/realization.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing {

using namespace msgsynth;

inline Specification load(const std::string& name)
{
    return load_spec(std::string(MSGSYNTH_DATA_DIR) + "/" + name + ".msg");
}

inline MsgGraph graph(const std::string& name) { return load(name).graph; }

inline const std::vector<std::string>& controllable_fixtures()
{
    static const std::vector<std::string> names{"cross", "empty", "local", "relay"};
    return names;
}

inline Action act(EventKind kind, const std::string& p, const std::string& q, const std::string& m)
{
    return {kind, ProcessId(p), ProcessId(q), MessageLabel(m)};
}
inline Action snd(const std::string& p, const std::string& q, const std::string& m)
{
    return act(EventKind::send, p, q, m);
}
inline Action rcv(const std::string& p, const std::string& q, const std::string& m)
{
    return act(EventKind::receive, p, q, m);
}

inline std::vector<ProcessId> pids(std::initializer_list<const char*> names)
{
    std::vector<ProcessId> out;
    for (const char* n : names) {
        out.emplace_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Oracles

/// Strict order by Floyd-Warshall over the generating pairs.
inline std::vector<std::vector<bool>> closure_oracle(const Bmsc& b)
{
    const std::size_t n = b.event_count();
    std::vector<std::vector<bool>> less(n, std::vector<bool>(n, false));
    for (const auto& [p, events] : b.order) {
        for (std::size_t i = 0; i + 1 < events.size(); ++i) {
            less[events[i]][events[i + 1]] = true;
        }
    }
    for (std::size_t m = 0; m < b.messages.size(); ++m) {
        less[2 * m][2 * m + 1] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (less[i][k] && less[k][j]) {
                    less[i][j] = true;
                }
            }
        }
    }
    return less;
}

/// All permutations of the events that respect the closure.
inline std::set<Word> linearizations_oracle(const Bmsc& b)
{
    const auto less = closure_oracle(b);
    std::vector<EventId> perm(b.event_count());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        perm[i] = i;
    }
    std::set<Word> out;
    do {
        bool ok = true;
        for (std::size_t i = 0; i < perm.size() && ok; ++i) {
            for (std::size_t j = i + 1; j < perm.size() && ok; ++j) {
                ok = !less[perm[j]][perm[i]];
            }
        }
        if (ok) {
            Word w;
            for (EventId e : perm) {
                w.push_back(b.action_of(e));
            }
            out.insert(w);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

/// Processes owning an event with no predecessor in the closure.
inline std::set<ProcessId> initiators_oracle(const Bmsc& b)
{
    const auto less = closure_oracle(b);
    std::set<ProcessId> out;
    for (EventId e = 0; e < b.event_count(); ++e) {
        bool minimal = true;
        for (EventId f = 0; f < b.event_count(); ++f) {
            minimal = minimal && !less[f][e];
        }
        if (minimal) {
            out.insert(b.process_of(e));
        }
    }
    return out;
}

/// Sends with a strictly later event on every target process.
inline std::vector<EventId> resolving_oracle(const Bmsc& b, const std::set<ProcessId>& targets)
{
    const auto less = closure_oracle(b);
    std::vector<EventId> out;
    for (std::size_t m = 0; m < b.messages.size(); ++m) {
        const EventId e = 2 * m;
        bool all = true;
        for (const ProcessId& p : targets) {
            bool seen = false;
            for (EventId f = 0; f < b.event_count(); ++f) {
                seen = seen || (less[e][f] && b.process_of(f) == p);
            }
            all = all && seen;
        }
        if (all) {
            out.push_back(e);
        }
    }
    return out;
}

/// Paths starting at any of `starts` with at most max_len nodes.
inline void for_each_path(const MsgGraph& g, const std::vector<NodeIndex>& starts, std::size_t max_len,
                          const std::function<void(const Path&)>& visit)
{
    std::function<void(Path&)> rec = [&](Path& p) {
        visit(p);
        if (p.size() == max_len) {
            return;
        }
        for (NodeIndex t : g.successors[p.back()]) {
            p.push_back(t);
            rec(p);
            p.pop_back();
        }
    };
    for (NodeIndex s : starts) {
        Path p{s};
        rec(p);
    }
}

/// Union of initiators of all composed paths leaving s, up to max_len nodes.
inline std::set<ProcessId> triggers_oracle(const MsgGraph& g, NodeIndex s, std::size_t max_len)
{
    std::set<ProcessId> out;
    for_each_path(g, g.successors[s], max_len, [&](const Path& p) {
        for (const ProcessId& q : initiators_oracle(compose_path(g, p))) {
            out.insert(q);
        }
    });
    return out;
}

/// Definition-level check of both controllability conditions over all paths
/// up to max_len nodes; exhaustive on acyclic graphs.
inline bool controllable_oracle(const MsgGraph& g, NodeIndex u, std::size_t max_len)
{
    const std::set<ProcessId> targets = triggers_oracle(g, u, max_len);
    bool ok = true;
    for_each_path(g, {g.initial}, max_len, [&](const Path& p) {
        if (ok && p.back() == u && resolving_oracle(compose_path(g, p), targets).empty()) {
            ok = false;
        }
    });
    for_each_path(g, g.successors[u], max_len, [&](const Path& p) {
        if (ok && p.back() == u && resolving_oracle(compose_path(g, p), targets).empty()) {
            ok = false;
        }
    });
    return ok;
}

/// Runs visiting every node at most `visits` times.
inline std::vector<Path> runs_oracle(const MsgGraph& g, std::size_t visits)
{
    std::vector<Path> out;
    std::vector<std::size_t> count(g.size(), 0);
    Path p{g.initial};
    count[g.initial] = 1;
    std::function<void()> rec = [&] {
        if (p.back() == g.terminal) {
            out.push_back(p);
            return;
        }
        for (NodeIndex t : g.successors[p.back()]) {
            if (count[t] < visits) {
                ++count[t];
                p.push_back(t);
                rec();
                p.pop_back();
                --count[t];
            }
        }
    };
    rec();
    return out;
}

/// Whether `path` ends in a terminating node and no proper prefix does.
inline bool is_prediction_path_oracle(const MsgGraph& g, const Classification& cls, const Path& path)
{
    auto terminates = [&](std::size_t len) {
        const NodeIndex last = path[len - 1];
        if (last == g.terminal || cls.is_local(last)) {
            return true;
        }
        if (cls.is_controllable(last)) {
            return std::count(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(len), last) >= 2;
        }
        return false;
    };
    for (std::size_t len = 1; len < path.size(); ++len) {
        if (terminates(len)) {
            return false;
        }
    }
    return terminates(path.size());
}

/// Every split of run into the initial path followed by prediction paths.
inline std::vector<std::vector<Path>> partitions_oracle(const MsgGraph& g, const Classification& cls,
                                                        const Path& init, const Path& run)
{
    std::vector<std::vector<Path>> out;
    if (run.size() < init.size() || !std::equal(init.begin(), init.end(), run.begin())) {
        return out;
    }
    std::vector<Path> pieces{init};
    std::function<void(std::size_t)> rec = [&](std::size_t at) {
        if (at == run.size()) {
            out.push_back(pieces);
            return;
        }
        for (std::size_t end = at + 1; end <= run.size(); ++end) {
            Path piece(run.begin() + static_cast<std::ptrdiff_t>(at), run.begin() + static_cast<std::ptrdiff_t>(end));
            if (is_prediction_path_oracle(g, cls, piece)) {
                pieces.push_back(piece);
                rec(end);
                pieces.pop_back();
            }
        }
    };
    rec(init.size());
    return out;
}

// ---------------------------------------------------------------------------
// Generators

/// A random FIFO execution over the given processes with `messages` sends.
inline Bmsc random_bmsc(std::mt19937_64& rng, const std::vector<ProcessId>& processes, std::size_t messages,
                        const std::string& prefix = "m", std::size_t labels = 2)
{
    std::vector<Message> decl;
    std::map<std::pair<std::size_t, std::size_t>, std::deque<std::size_t>> channels;
    std::map<ProcessId, std::vector<EventId>> order;
    std::size_t sent = 0;
    std::size_t received = 0;
    const std::size_t n = processes.size();
    while (received < messages) {
        const bool can_send = sent < messages && n >= 2;
        std::vector<std::pair<std::size_t, std::size_t>> pending;
        for (const auto& [c, q] : channels) {
            if (!q.empty()) {
                pending.push_back(c);
            }
        }
        if (can_send && (pending.empty() || rng() % 2 == 0)) {
            const std::size_t from = rng() % n;
            std::size_t to = rng() % (n - 1);
            if (to >= from) {
                ++to;
            }
            const std::string label = "l" + std::to_string(rng() % labels);
            decl.push_back({prefix + std::to_string(sent), processes[from], processes[to], MessageLabel(label), 0});
            order[processes[from]].push_back(send_of(sent));
            channels[{from, to}].push_back(sent);
            ++sent;
        } else {
            const auto c = pending[rng() % pending.size()];
            const std::size_t m = channels[c].front();
            channels[c].pop_front();
            order[processes[c.second]].push_back(receive_of(m));
            ++received;
        }
    }
    Bmsc b = make_bmsc(processes, decl);
    for (const ProcessId& p : processes) {
        b.order[p] = order[p];
    }
    return b;
}

struct RandomGraphOptions {
    std::size_t min_nodes = 3;
    std::size_t max_nodes = 7;
    std::size_t processes = 3;
    std::size_t max_messages = 2;
    bool cycles = false;
};

/// Random valid graph with nodes 0..n-1, initial 0 and terminal n-1.
inline MsgGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& o)
{
    static const char* names[] = {"p", "q", "r", "t"};
    std::vector<ProcessId> processes;
    for (std::size_t i = 0; i < o.processes; ++i) {
        processes.emplace_back(names[i]);
    }
    const std::size_t n = o.min_nodes + rng() % (o.max_nodes - o.min_nodes + 1);
    MsgGraph g;
    g.name = "random";
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t messages = (i == 0 || i + 1 == n) ? rng() % 2 : rng() % (o.max_messages + 1);
        g.add_node("n" + std::to_string(i), random_bmsc(rng, processes, messages, "m", 2));
    }
    g.initial = 0;
    g.terminal = n - 1;
    for (std::size_t i = 1; i < n; ++i) {
        g.add_edge(rng() % i, i);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (g.successors[i].empty()) {
            g.add_edge(i, i + 1 + rng() % (n - 1 - i));
        }
    }
    const std::size_t extra = rng() % n;
    for (std::size_t k = 0; k < extra; ++k) {
        const std::size_t a = rng() % (n - 1);
        const std::size_t b = a + 1 + rng() % (n - 1 - a);
        if (!g.has_edge(a, b)) {
            g.add_edge(a, b);
        }
    }
    if (o.cycles && n > 2) {
        const std::size_t back = rng() % 3;
        for (std::size_t k = 0; k < back; ++k) {
            const std::size_t a = 1 + rng() % (n - 2);
            const std::size_t b = 1 + rng() % a;
            if (!g.has_edge(a, b)) {
                g.add_edge(a, b);
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Fault injection

/// Redirects the first transition of a synthesized machine that lands in a
/// state expecting some next prediction to the sibling state expecting a
/// different one. Returns false when no such transition exists.
inline bool inject_agreement_fault(Cfm& cfm)
{
    for (ProcessMachine& m : cfm.machines) {
        for (Transition& t : m.transitions) {
            const LocalState& target = m.local[t.to];
            if (!target.next) {
                continue;
            }
            for (StateId s = 0; s < m.state_count(); ++s) {
                const LocalState& other = m.local[s];
                if (other.mode == target.mode && other.current == target.current &&
                    other.position == target.position && other.next && other.next != target.next) {
                    t.to = s;
                    cfm.finalize();
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace testing
