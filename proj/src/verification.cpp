#include "msgsynth/verification.hpp"

#include "msgsynth/realization.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>

namespace msgsynth {

namespace {

using ChannelKey = std::pair<ProcessId, ProcessId>;

ChannelKey channel_of(const Action& a)
{
    return a.kind == EventKind::send ? ChannelKey{a.process, a.peer} : ChannelKey{a.peer, a.process};
}

// Index of the first position breaking well-formedness, or w.size().
std::size_t first_unmatched_receive(const Word& w)
{
    std::map<ChannelKey, std::deque<MessageLabel>> channels;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto& ch = channels[channel_of(w[i])];
        if (w[i].kind == EventKind::send) {
            ch.push_back(w[i].label);
        } else {
            if (ch.empty() || ch.front() != w[i].label) {
                return i;
            }
            ch.pop_front();
        }
    }
    return w.size();
}

}  // namespace

bool well_formed(const Word& w)
{
    return first_unmatched_receive(w) == w.size();
}

bool complete(const Word& w)
{
    std::map<ChannelKey, std::pair<std::vector<MessageLabel>, std::vector<MessageLabel>>> channels;
    for (const Action& a : w) {
        auto& [sends, receives] = channels[channel_of(a)];
        (a.kind == EventKind::send ? sends : receives).push_back(a.label);
    }
    return std::all_of(channels.begin(), channels.end(),
                       [](const auto& entry) { return entry.second.first == entry.second.second; });
}

Bmsc word_to_bmsc(const Word& w)
{
    if (const std::size_t bad = first_unmatched_receive(w); bad != w.size()) {
        throw Error("word is not well-formed: receive at position " + std::to_string(bad) + " (" + w[bad].str() +
                    ") has no matching send");
    }
    Bmsc b;
    std::set<ProcessId> processes;
    std::map<ChannelKey, std::deque<std::size_t>> pending;
    std::vector<std::size_t> sent_at;
    std::vector<bool> received;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Action& a = w[i];
        processes.insert(a.process);
        processes.insert(a.peer);
        if (a.kind == EventKind::send) {
            const std::size_t m = b.messages.size();
            b.messages.push_back({"m" + std::to_string(m), a.process, a.peer, a.label, 0});
            b.order[a.process].push_back(send_of(m));
            pending[channel_of(a)].push_back(m);
            sent_at.push_back(i);
            received.push_back(false);
        } else {
            auto& ch = pending[channel_of(a)];
            const std::size_t m = ch.front();
            ch.pop_front();
            b.order[a.process].push_back(receive_of(m));
            received[m] = true;
        }
    }
    for (std::size_t m = 0; m < received.size(); ++m) {
        if (!received[m]) {
            throw Error("word is not complete: send at position " + std::to_string(sent_at[m]) + " (" +
                        w[sent_at[m]].str() + ") is never received");
        }
    }
    b.processes.assign(processes.begin(), processes.end());
    for (const ProcessId& p : b.processes) {
        b.order[p];
    }
    return b;
}

BoundedLanguage bounded_msg_language(const MsgGraph& g, std::size_t visits, std::size_t event_cap)
{
    if (visits == 0 || event_cap == 0) {
        throw Error("language bounds must be positive");
    }
    BoundedLanguage out;
    std::vector<std::size_t> count(g.size(), 0);
    Path run{g.initial};
    count[g.initial] = 1;
    std::function<void()> extend = [&] {
        const NodeIndex last = run.back();
        if (last == g.terminal) {
            ++out.runs;
            const Bmsc b = compose_path(g, run);
            if (b.event_count() > event_cap) {
                ++out.skipped_runs;
            } else {
                out.max_events = std::max(out.max_events, b.event_count());
                auto words = linearizations(b, event_cap);
                out.words.insert(words.begin(), words.end());
            }
        }
        for (NodeIndex t : g.successors[last]) {
            if (count[t] >= visits) {
                continue;
            }
            ++count[t];
            run.push_back(t);
            extend();
            run.pop_back();
            --count[t];
        }
    };
    extend();
    return out;
}

bool msg_accepts(const MsgGraph& g, const Word& w)
{
    if (!well_formed(w) || !complete(w)) {
        return false;
    }
    const std::vector<ProcessId> processes = g.processes();
    std::vector<Word> target(processes.size());
    for (const Action& a : w) {
        auto it = std::lower_bound(processes.begin(), processes.end(), a.process);
        if (it == processes.end() || *it != a.process) {
            return false;
        }
        target[static_cast<std::size_t>(it - processes.begin())].push_back(a);
    }

    // Projections are enough: a FIFO chart is fixed by its per-process words.
    std::vector<std::vector<Word>> node_words(g.size());
    for (NodeIndex v = 0; v < g.size(); ++v) {
        for (const ProcessId& p : processes) {
            node_words[v].push_back(projection(g.labels[v], p));
        }
    }
    using State = std::pair<NodeIndex, std::vector<std::size_t>>;
    auto consume = [&](NodeIndex v, std::vector<std::size_t> pos) -> std::optional<State> {
        for (std::size_t i = 0; i < processes.size(); ++i) {
            const Word& part = node_words[v][i];
            if (pos[i] + part.size() > target[i].size() ||
                !std::equal(part.begin(), part.end(), target[i].begin() + static_cast<std::ptrdiff_t>(pos[i]))) {
                return std::nullopt;
            }
            pos[i] += part.size();
        }
        return State{v, std::move(pos)};
    };

    std::set<State> seen;
    std::deque<State> work;
    if (auto s = consume(g.initial, std::vector<std::size_t>(processes.size(), 0))) {
        seen.insert(*s);
        work.push_back(*s);
    }
    while (!work.empty()) {
        const State s = work.front();
        work.pop_front();
        if (s.first == g.terminal) {
            bool done = true;
            for (std::size_t i = 0; i < processes.size(); ++i) {
                done = done && s.second[i] == target[i].size();
            }
            if (done) {
                return true;
            }
        }
        for (NodeIndex t : g.successors[s.first]) {
            if (auto next = consume(t, s.second); next && seen.insert(*next).second) {
                work.push_back(*next);
            }
        }
    }
    return false;
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::equal_at_bound: return "equal-at-bound";
    case Verdict::mismatch: return "mismatch";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

EquivalenceReport check_equivalence(const MsgGraph& g, const Cfm& cfm, const EquivalenceBounds& bounds)
{
    EquivalenceReport report;
    report.bounds = bounds;

    const BoundedLanguage lang = bounded_msg_language(g, bounds.visits, bounds.event_cap);
    report.msg_words = lang.words.size();
    report.skipped_runs = lang.skipped_runs;
    report.word_length_bound = lang.max_events;

    const WordSet words = accepted_words(cfm, report.word_length_bound, bounds.word_budget);
    report.cfm_words = words.words.size();
    report.cfm_truncated = words.truncated;
    std::set_difference(lang.words.begin(), lang.words.end(), words.words.begin(), words.words.end(),
                        std::inserter(report.missing_in_cfm, report.missing_in_cfm.end()));
    for (const Word& w : words.words) {
        if (lang.words.contains(w)) {
            continue;
        }
        if (msg_accepts(g, w)) {
            ++report.beyond_visit_bound;
        } else {
            report.extra_in_cfm.insert(w);
        }
    }

    const ExplorationResult exploration = explore(cfm, {bounds.channel_depth, bounds.max_configurations});
    report.configurations = exploration.configurations.size();
    report.deadlocks = exploration.deadlocks.size();
    report.exploration_exact = exploration.exact();

    // Skipped runs have more events than the word-length bound, so they
    // cannot contribute words to either side of the comparison.
    const bool missing = !report.missing_in_cfm.empty() && !report.cfm_truncated;
    const bool deadlock = report.deadlocks > 0 && report.exploration_exact;
    if (!report.extra_in_cfm.empty() || missing || deadlock) {
        report.verdict = Verdict::mismatch;
    } else if (report.cfm_truncated || !report.exploration_exact ||
               !report.missing_in_cfm.empty() || report.deadlocks > 0) {
        report.verdict = Verdict::inconclusive;
    } else {
        report.verdict = Verdict::equal_at_bound;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Monitors

namespace {

const Realization& realization_of(const Cfm& cfm)
{
    if (!cfm.realization) {
        throw Error("monitor needs a synthesized CFM");
    }
    for (const ProcessMachine& m : cfm.machines) {
        if (m.local.size() != m.state_count()) {
            throw Error("machine " + m.process.str() + " has no algorithm states");
        }
    }
    return *cfm.realization;
}

}  // namespace

namespace {

// A configuration plus the partition index of the prediction every active
// process executes, and of the prediction every queued message belongs to.
// Indices are shifted so that the smallest one is zero.
struct Tagged {
    Configuration config;
    std::vector<std::uint32_t> instance;
    std::vector<std::vector<std::uint32_t>> tags;

    auto operator<=>(const Tagged&) const = default;
};

bool active(const Cfm& cfm, const Configuration& c, std::size_t i)
{
    return cfm.machines[i].local[c.states[i]].mode != Mode::polling;
}

void normalize(const Cfm& cfm, Tagged& t)
{
    std::uint32_t low = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t i = 0; i < t.instance.size(); ++i) {
        if (active(cfm, t.config, i)) {
            low = std::min(low, t.instance[i]);
        } else {
            t.instance[i] = 0;
        }
    }
    for (const auto& ch : t.tags) {
        for (std::uint32_t x : ch) {
            low = std::min(low, x);
        }
    }
    if (low == std::numeric_limits<std::uint32_t>::max() || low == 0) {
        return;
    }
    for (std::size_t i = 0; i < t.instance.size(); ++i) {
        if (active(cfm, t.config, i)) {
            t.instance[i] -= low;
        }
    }
    for (auto& ch : t.tags) {
        for (std::uint32_t& x : ch) {
            x -= low;
        }
    }
}

}  // namespace

AgreementReport monitor_agreement(const Cfm& cfm, const ExploreBounds& bounds)
{
    const Realization& r = realization_of(cfm);
    AgreementReport report;

    Tagged start{initial_configuration(cfm), {}, std::vector<std::vector<std::uint32_t>>(cfm.channel_count())};
    for (const ProcessMachine& m : cfm.machines) {
        start.instance.push_back(m.initial_started);
    }
    normalize(cfm, start);

    std::map<Tagged, std::size_t> seen;
    std::deque<const Tagged*> work;
    auto visit = [&](Tagged t) {
        if (seen.size() >= bounds.max_configurations && !seen.contains(t)) {
            report.exact = false;
            return;
        }
        auto [it, inserted] = seen.emplace(std::move(t), seen.size());
        if (inserted) {
            work.push_back(&it->first);
        }
    };
    visit(std::move(start));

    while (!work.empty()) {
        const Tagged& t = *work.front();
        work.pop_front();
        const std::size_t id = seen.at(t);
        for (std::size_t i = 0; i < cfm.machines.size(); ++i) {
            if (!active(cfm, t.config, i)) {
                continue;
            }
            const LocalState& a = cfm.machines[i].local[t.config.states[i]];
            for (std::size_t j = i + 1; j < cfm.machines.size(); ++j) {
                if (!active(cfm, t.config, j) || t.instance[i] != t.instance[j]) {
                    continue;
                }
                const LocalState& b = cfm.machines[j].local[t.config.states[j]];
                const std::string pi = cfm.processes[i].str();
                const std::string pj = cfm.processes[j].str();
                if (a.current != b.current) {
                    report.violations.push_back({id, pi + " executes " + r.describe(*a.current) + " but " + pj +
                                                         " executes " + r.describe(*b.current)});
                } else if (a.next && b.next && a.next != b.next) {
                    report.violations.push_back({id, pi + " expects " + r.describe(*a.next) + " but " + pj +
                                                         " expects " + r.describe(*b.next) + " after " +
                                                         r.describe(*a.current)});
                }
            }
        }
        for (const Move& move : enabled(cfm, t.config)) {
            const Transition& tr = transition_of(cfm, move);
            if (tr.action.kind == EventKind::send && t.config.channels[tr.channel].size() >= bounds.channel_depth) {
                report.exact = false;
                continue;
            }
            Tagged next{step(cfm, t.config, move), t.instance, t.tags};
            std::uint32_t base = t.instance[move.machine];
            if (tr.action.kind == EventKind::send) {
                next.tags[tr.channel].push_back(base);
            } else {
                const std::uint32_t tag = next.tags[tr.channel].front();
                next.tags[tr.channel].erase(next.tags[tr.channel].begin());
                if (tr.adopts) {
                    base = tag;
                }
            }
            next.instance[move.machine] = base + tr.started;
            normalize(cfm, next);
            visit(std::move(next));
        }
    }
    report.states = seen.size();
    return report;
}

std::vector<MonitorViolation> monitor_polling(const Cfm& cfm, const ExplorationResult& exploration)
{
    const Realization& r = realization_of(cfm);
    std::vector<MonitorViolation> out;
    for (const auto& edge : exploration.edges) {
        const ProcessMachine& m = cfm.machines[edge.move.machine];
        const ProcessId& p = m.process;
        const Transition& t = m.transitions[edge.move.transition];
        const LocalState& src = m.local[t.from];
        const LocalState& dst = m.local[t.to];
        const Payload& payload = cfm.payloads[t.payload];

        std::optional<PredictionId> current;
        std::optional<PredictionId> next;
        std::size_t position = 0;
        if (src.mode == Mode::executing) {
            current = src.current;
            position = src.position + 1;
            next = t.action.kind == EventKind::send ? payload.next : (src.next ? src.next : payload.next);
        } else if (src.mode == Mode::polling) {
            current = payload.current;
            position = 1;
            next = payload.next;
        }
        if (!current || position != r.queue(*current, p).size()) {
            continue;
        }

        const NodeIndex node = r.prediction(*current).path.last();
        const bool member = r.triggers(node).contains(p);
        const bool polls = dst.mode == Mode::polling;
        std::string problem;
        if (!member && !polls) {
            problem = "keeps executing although not in triggers";
        } else if (member && polls) {
            // Only an idle follow-up prediction lets a trigger process poll.
            bool idle = false;
            if (r.classification().is_controllable(node)) {
                idle = next && r.queue(*next, p).empty();
            } else if (r.classification().is_local(node)) {
                for (PredictionId g : r.guesses(node)) {
                    idle = idle || r.queue(g, p).empty();
                }
            }
            if (!idle) {
                problem = "polls although in triggers";
            }
        }
        if (!problem.empty()) {
            out.push_back({edge.from, p.str() + " " + problem + " of " + r.graph().nodes[node] + " after " +
                                          r.describe(*current)});
        }
    }
    return out;
}

std::vector<MonitorViolation> monitor_promotion(const Cfm& cfm, const ExplorationResult& exploration)
{
    std::vector<MonitorViolation> out;
    for (std::size_t c = 0; c < exploration.configurations.size(); ++c) {
        const Configuration& config = exploration.configurations[c];
        for (const UnsafePromotion& u : cfm.unsafe_promotions) {
            if (config.states[u.machine] != u.state) {
                continue;
            }
            if (u.delivered) {
                const auto& ch = config.channels[cfm.channel(*u.sender, u.machine)];
                if (ch.empty() || ch.front() != *u.delivered) {
                    continue;
                }
            }
            out.push_back({c, cfm.processes[u.machine].str() + " would promote an empty next prediction"});
        }
    }
    return out;
}

bool projection_realizes_chart(const Bmsc& b, std::size_t cap)
{
    const std::set<Word> expected = linearizations(b, cap);
    const WordSet words = accepted_words(projection_cfm(b), b.event_count());
    return !words.truncated && words.words == expected;
}

}  // namespace msgsynth
