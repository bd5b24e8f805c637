#include "msgsynth/runtime.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace msgsynth {

std::size_t ConfigurationHash::operator()(const Configuration& c) const
{
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (StateId s : c.states) {
        mix(s);
    }
    for (const auto& ch : c.channels) {
        mix(ch.size() + 0x51ed27);
        for (PayloadId p : ch) {
            mix(p);
        }
    }
    return h;
}

Configuration initial_configuration(const Cfm& cfm)
{
    Configuration c;
    for (const ProcessMachine& m : cfm.machines) {
        c.states.push_back(m.initial);
    }
    c.channels.assign(cfm.channel_count(), {});
    return c;
}

bool channels_empty(const Configuration& c)
{
    return std::all_of(c.channels.begin(), c.channels.end(), [](const auto& ch) { return ch.empty(); });
}

bool is_accepting(const Cfm& cfm, const Configuration& c)
{
    for (std::size_t i = 0; i < cfm.machines.size(); ++i) {
        if (!cfm.machines[i].accepting[c.states[i]]) {
            return false;
        }
    }
    return channels_empty(c);
}

const Transition& transition_of(const Cfm& cfm, const Move& move)
{
    return cfm.machines.at(move.machine).transitions.at(move.transition);
}

std::vector<Move> enabled(const Cfm& cfm, const Configuration& c)
{
    std::vector<Move> out;
    for (std::size_t i = 0; i < cfm.machines.size(); ++i) {
        const ProcessMachine& m = cfm.machines[i];
        for (std::uint32_t t : m.outgoing[c.states[i]]) {
            const Transition& tr = m.transitions[t];
            if (tr.action.kind == EventKind::receive) {
                const auto& ch = c.channels[tr.channel];
                if (ch.empty() || ch.front() != tr.payload) {
                    continue;
                }
            }
            out.push_back({i, t});
        }
    }
    return out;
}

Configuration step(const Cfm& cfm, const Configuration& c, const Move& move)
{
    if (move.machine >= cfm.machines.size() || move.transition >= cfm.machines[move.machine].transitions.size()) {
        throw Error("move does not exist");
    }
    const Transition& tr = transition_of(cfm, move);
    if (tr.from != c.states[move.machine]) {
        throw Error("move is not enabled: machine is in another state");
    }
    Configuration out = c;
    auto& ch = out.channels[tr.channel];
    if (tr.action.kind == EventKind::send) {
        ch.push_back(tr.payload);
    } else {
        if (ch.empty() || ch.front() != tr.payload) {
            throw Error("move is not enabled: channel head does not match");
        }
        ch.erase(ch.begin());
    }
    out.states[move.machine] = tr.to;
    return out;
}

ExplorationResult explore(const Cfm& cfm, const ExploreBounds& bounds)
{
    if (bounds.channel_depth == 0 || bounds.max_configurations == 0) {
        throw Error("exploration bounds must be positive");
    }
    ExplorationResult out;
    std::unordered_map<Configuration, std::size_t, ConfigurationHash> ids;
    std::deque<std::size_t> work;
    std::vector<bool> on_boundary;

    auto intern = [&](Configuration c) -> std::optional<std::size_t> {
        auto it = ids.find(c);
        if (it != ids.end()) {
            return it->second;
        }
        if (out.configurations.size() >= bounds.max_configurations) {
            out.budget_exhausted = true;
            return std::nullopt;
        }
        const std::size_t id = out.configurations.size();
        ids.emplace(c, id);
        out.configurations.push_back(std::move(c));
        on_boundary.push_back(false);
        work.push_back(id);
        return id;
    };

    intern(initial_configuration(cfm));
    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop_front();
        const Configuration c = out.configurations[id];
        if (is_accepting(cfm, c)) {
            out.accepting.push_back(id);
        }
        for (const Move& move : enabled(cfm, c)) {
            const Transition& tr = transition_of(cfm, move);
            if (tr.action.kind == EventKind::send && c.channels[tr.channel].size() >= bounds.channel_depth) {
                on_boundary[id] = true;
                continue;
            }
            auto target = intern(step(cfm, c, move));
            if (!target) {
                on_boundary[id] = true;
                continue;
            }
            out.edges.push_back({id, *target, move});
        }
    }
    for (std::size_t i = 0; i < on_boundary.size(); ++i) {
        if (on_boundary[i]) {
            out.boundary.push_back(i);
        }
    }

    std::vector<std::vector<std::size_t>> preds(out.configurations.size());
    for (const auto& e : out.edges) {
        preds[e.to].push_back(e.from);
    }
    std::vector<bool> live(out.configurations.size(), false);
    std::deque<std::size_t> back(out.accepting.begin(), out.accepting.end());
    for (std::size_t a : out.accepting) {
        live[a] = true;
    }
    while (!back.empty()) {
        const std::size_t id = back.front();
        back.pop_front();
        for (std::size_t p : preds[id]) {
            if (!live[p]) {
                live[p] = true;
                back.push_back(p);
            }
        }
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
        if (!live[i]) {
            out.deadlocks.push_back(i);
        }
    }
    return out;
}

WordSet accepted_words(const Cfm& cfm, std::size_t max_length, std::size_t budget)
{
    WordSet out;
    std::unordered_map<Configuration, std::uint32_t, ConfigurationHash> ids;
    std::vector<Configuration> configs;
    std::map<Action, std::uint16_t> action_ids;
    std::vector<Action> actions;

    auto config_id = [&](Configuration c) {
        auto [it, inserted] = ids.emplace(std::move(c), static_cast<std::uint32_t>(configs.size()));
        if (inserted) {
            configs.push_back(it->first);
        }
        return it->second;
    };
    auto action_id = [&](const Action& a) {
        auto [it, inserted] = action_ids.emplace(a, static_cast<std::uint16_t>(actions.size()));
        if (inserted) {
            actions.push_back(a);
        }
        return it->second;
    };

    using Item = std::pair<std::uint32_t, std::vector<std::uint16_t>>;
    std::set<Item> frontier{{config_id(initial_configuration(cfm)), {}}};
    std::size_t visited = 0;
    std::set<std::vector<std::uint16_t>> accepted;
    for (std::size_t length = 0; length <= max_length && !frontier.empty(); ++length) {
        std::set<Item> next;
        for (const auto& [id, word] : frontier) {
            if (++visited > budget) {
                out.truncated = true;
                break;
            }
            const Configuration c = configs[id];
            if (is_accepting(cfm, c)) {
                accepted.insert(word);
            }
            if (length == max_length) {
                continue;
            }
            for (const Move& move : enabled(cfm, c)) {
                auto extended = word;
                extended.push_back(action_id(transition_of(cfm, move).action));
                next.emplace(config_id(step(cfm, c, move)), std::move(extended));
            }
        }
        if (out.truncated) {
            break;
        }
        frontier = std::move(next);
    }
    for (const auto& w : accepted) {
        Word word;
        for (std::uint16_t a : w) {
            word.push_back(actions[a]);
        }
        out.words.insert(std::move(word));
    }
    return out;
}

Trace simulate(const Cfm& cfm, std::uint64_t seed, std::size_t max_steps)
{
    std::mt19937_64 rng(seed);
    Trace trace;
    Configuration c = initial_configuration(cfm);
    while (true) {
        const auto moves = enabled(cfm, c);
        if (moves.empty()) {
            break;
        }
        if (trace.steps.size() >= max_steps) {
            trace.truncated = true;
            break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
        const Move move = moves[pick(rng)];
        const Transition& tr = transition_of(cfm, move);
        trace.steps.push_back({move, tr.action, tr.payload});
        c = step(cfm, c, move);
    }
    trace.accepting = is_accepting(cfm, c);
    trace.final = std::move(c);
    return trace;
}

std::string render_trace(const Cfm& cfm, const Trace& trace, bool channels)
{
    std::ostringstream out;
    Configuration c = initial_configuration(cfm);
    for (const TraceStep& s : trace.steps) {
        out << s.action.str() << '\n';
        if (!channels) {
            continue;
        }
        c = step(cfm, c, s.move);
        for (std::size_t i = 0; i < cfm.processes.size(); ++i) {
            for (std::size_t j = 0; j < cfm.processes.size(); ++j) {
                const auto& ch = c.channels[cfm.channel(i, j)];
                if (ch.empty()) {
                    continue;
                }
                out << "  " << cfm.processes[i].str() << "->" << cfm.processes[j].str() << ":";
                for (PayloadId p : ch) {
                    out << ' ' << cfm.describe(p);
                }
                out << '\n';
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

Cfm projection_cfm(const Bmsc& b)
{
    Cfm cfm;
    cfm.processes = b.processes;
    for (const ProcessId& p : b.active_processes()) {
        if (std::find(cfm.processes.begin(), cfm.processes.end(), p) == cfm.processes.end()) {
            cfm.processes.push_back(p);
        }
    }
    for (const ProcessId& p : cfm.processes) {
        ProcessMachine m;
        m.process = p;
        const Word word = projection(b, p);
        for (std::size_t i = 0; i <= word.size(); ++i) {
            m.add_state(p.str() + "@" + std::to_string(i), i == word.size());
        }
        for (std::size_t i = 0; i < word.size(); ++i) {
            const PayloadId payload = cfm.intern({word[i].label, std::nullopt, std::nullopt});
            m.transitions.push_back(
                {static_cast<StateId>(i), word[i], payload, static_cast<StateId>(i + 1), 0});
        }
        cfm.machines.push_back(std::move(m));
    }
    cfm.finalize();
    return cfm;
}

Cfm naive_projection_cfm(const MsgGraph& g)
{
    Cfm cfm;
    cfm.processes = g.processes();
    for (const ProcessId& p : cfm.processes) {
        ProcessMachine m;
        m.process = p;
        std::vector<Word> proj;
        for (const Bmsc& b : g.labels) {
            proj.push_back(projection(b, p));
        }

        std::map<std::pair<NodeIndex, std::size_t>, StateId> entry;
        std::deque<std::pair<NodeIndex, std::size_t>> work;
        const StateId final_state = m.add_state(p.str() + "@final", true);
        auto entry_of = [&](NodeIndex v, std::size_t i) {
            auto [it, inserted] = entry.emplace(std::pair{v, i}, 0);
            if (inserted) {
                it->second = m.add_state(p.str() + "@" + g.nodes[v] + "." + std::to_string(i), false);
                work.emplace_back(v, i);
            }
            return it->second;
        };
        // States reachable by silently finishing node v.
        auto after = [&](NodeIndex v) {
            std::set<StateId> out;
            std::vector<bool> seen(g.size(), false);
            std::function<void(NodeIndex)> walk = [&](NodeIndex u) {
                if (u == g.terminal) {
                    out.insert(final_state);
                }
                for (NodeIndex w : g.successors[u]) {
                    if (!proj[w].empty()) {
                        out.insert(entry_of(w, 0));
                    } else if (!seen[w]) {
                        seen[w] = true;
                        walk(w);
                    }
                }
            };
            walk(v);
            return out;
        };

        const std::set<StateId> start = proj[g.initial].empty() ? after(g.initial)
                                                                : std::set<StateId>{entry_of(g.initial, 0)};
        std::map<StateId, std::vector<std::pair<Action, StateId>>> moves;
        while (!work.empty()) {
            const auto [v, i] = work.front();
            work.pop_front();
            const StateId from = entry.at({v, i});
            const Action a = proj[v][i];
            std::set<StateId> targets = i + 1 < proj[v].size() ? std::set<StateId>{entry_of(v, i + 1)} : after(v);
            for (StateId t : targets) {
                moves[from].emplace_back(a, t);
            }
        }

        StateId initial = 0;
        if (start.size() == 1) {
            initial = *start.begin();
        } else {
            initial = m.add_state(p.str() + "@init", start.contains(final_state));
            for (StateId s : start) {
                for (const auto& [a, t] : moves[s]) {
                    moves[initial].emplace_back(a, t);
                }
            }
        }
        m.initial = initial;
        for (const auto& [from, list] : moves) {
            for (const auto& [a, t] : list) {
                const PayloadId payload = cfm.intern({a.label, std::nullopt, std::nullopt});
                m.transitions.push_back({from, a, payload, t, 0});
            }
        }
        cfm.machines.push_back(std::move(m));
    }
    cfm.finalize();
    return cfm;
}

}  // namespace msgsynth
