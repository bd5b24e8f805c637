#include "msgsynth/realization.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace msgsynth {

Realization::Realization(MsgGraph g) : graph_(std::move(g))
{
    classification_ = classify(graph_);
    paths_ = prediction_paths(graph_, classification_);
    processes_ = graph_.processes();
    for (NodeIndex n = 0; n < graph_.size(); ++n) {
        triggers_.push_back(msgsynth::triggers(graph_, n));
    }

    for (std::size_t i = 0; i < paths_.size(); ++i) {
        const PredictionPath& path = paths_[i];
        composed_.push_back(compose_path(graph_, path.nodes));
        const Bmsc& b = composed_.back();
        for (const ProcessId& p : processes_) {
            auto& q = queues_[{i, p}];
            for (EventId e : b.events_on(p)) {
                const Message& m = b.messages[message_of(e)];
                q.push_back({b.action_of(e), {m.segment, m.id}});
            }
        }

        const NodeIndex last = path.last();
        std::vector<std::optional<ControlEvent>> controls;
        if (classification_.is_controllable(last)) {
            for (EventId e : resolving_events(b, triggers_[last])) {
                const Message& m = b.messages[message_of(e)];
                controls.emplace_back(ControlEvent{m.segment, m.id});
            }
            if (controls.empty()) {
                throw Error("prediction path " + graph_.render(path.nodes) +
                            " ends in a controllable node but has no resolving event");
            }
        } else {
            controls.emplace_back(std::nullopt);
        }
        for (auto& control : controls) {
            const auto id = static_cast<PredictionId>(predictions_.size());
            predictions_.push_back({path, std::move(control)});
            path_of_.push_back(i);
            index_.emplace(predictions_.back(), id);
            if (path.kind == PathKind::initial) {
                initial_.push_back(id);
            }
        }
    }

    for (NodeIndex u = 0; u < graph_.size(); ++u) {
        if (!classification_.is_local(u) && !classification_.is_controllable(u)) {
            continue;
        }
        auto& out = guesses_[u];
        for (PredictionId id = 0; id < predictions_.size(); ++id) {
            const PredictionPath& path = predictions_[id].path;
            if (path.kind != PathKind::initial && graph_.has_edge(u, path.first())) {
                out.push_back(id);
            }
        }
    }
}

std::optional<PredictionId> Realization::find(const Prediction& p) const
{
    auto it = index_.find(p);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const std::vector<PredictionId>& Realization::guesses(NodeIndex u) const
{
    auto it = guesses_.find(u);
    if (it == guesses_.end()) {
        throw Error("no predictions are guessed at node " + (u < graph_.size() ? graph_.nodes[u] : std::to_string(u)));
    }
    return it->second;
}

const Bmsc& Realization::composed(PredictionId id) const
{
    return composed_.at(path_of_.at(id));
}

const std::vector<QueuedEvent>& Realization::queue(PredictionId id, const ProcessId& p) const
{
    static const std::vector<QueuedEvent> none;
    auto it = queues_.find({path_of_.at(id), p});
    return it == queues_.end() ? none : it->second;
}

std::string Realization::describe(PredictionId id) const
{
    const Prediction& p = prediction(id);
    std::string out = "(" + graph_.render(p.path.nodes) + ", ";
    if (p.control) {
        out += "!" + p.control->message + "@" + std::to_string(p.control->segment);
    } else {
        out += "⊥";
    }
    return out + ")";
}

std::string Realization::describe(const LocalState& s) const
{
    std::string out = to_string(s.mode);
    if (s.mode == Mode::polling) {
        return out;
    }
    out += ' ';
    out += s.current ? describe(*s.current) : "⊥";
    out += " next ";
    out += s.next ? describe(*s.next) : "⊥";
    out += " at " + std::to_string(s.position);
    return out;
}

std::vector<Prediction> enumerate_predictions(const MsgGraph& g)
{
    return Realization(g).predictions();
}

std::vector<Prediction> initial_prediction_set(const MsgGraph& g)
{
    const Realization r(g);
    std::vector<Prediction> out;
    for (PredictionId id : r.initial_predictions()) {
        out.push_back(r.prediction(id));
    }
    return out;
}

std::vector<Prediction> guess_predictions(const MsgGraph& g, NodeIndex u)
{
    const Realization r(g);
    std::vector<Prediction> out;
    for (PredictionId id : r.guesses(u)) {
        out.push_back(r.prediction(id));
    }
    if (out.empty()) {
        throw Error("no prediction can follow node " + g.nodes.at(u));
    }
    return out;
}

// ---------------------------------------------------------------------------

Settled settle(const Realization& r, const ProcessId& p, const LocalState& s)
{
    Settled out;
    std::map<LocalState, std::uint32_t> stable;
    std::set<LocalState> visited;
    std::deque<std::pair<LocalState, std::uint32_t>> work{{s, 0}};

    auto keep = [&](const LocalState& state, std::uint32_t started) {
        auto [it, inserted] = stable.emplace(state, started);
        if (!inserted) {
            it->second = std::min(it->second, started);
        }
    };
    while (!work.empty()) {
        const auto [state, started] = work.front();
        work.pop_front();
        if (state.mode == Mode::polling || state.position < r.queue(*state.current, p).size()) {
            keep(state, started);
            continue;
        }
        if (!visited.insert(state).second) {
            continue;
        }
        const NodeIndex node = r.prediction(*state.current).path.last();
        const bool leads = r.triggers(node).contains(p);
        const Classification& cls = r.classification();
        if (leads && cls.is_controllable(node)) {
            if (!state.next) {
                out.promotion_failure = true;
                continue;
            }
            work.push_back({{Mode::executing, state.next, std::nullopt, 0}, started + 1});
        } else if (leads && cls.is_local(node)) {
            for (PredictionId g : r.guesses(node)) {
                work.push_back({{Mode::executing, g, std::nullopt, 0}, started + 1});
            }
        } else {
            keep({Mode::polling, std::nullopt, std::nullopt, 0}, started);
        }
    }
    for (const auto& [state, started] : stable) {
        out.states.push_back(state);
        out.started.push_back(started);
    }
    return out;
}

Settled start_states(const Realization& r, const ProcessId& p, PredictionId initial)
{
    return settle(r, p, {Mode::executing, initial, std::nullopt, 0});
}

StepOutcome local_step(const Realization& r, const ProcessId& p, const LocalState& s, const Stimulus& stimulus)
{
    StepOutcome out;
    auto advance = [&](const Action& action, const Payload& payload, const LocalState& pending, bool adopts = false) {
        const Settled settled = settle(r, p, pending);
        out.promotion_failure = out.promotion_failure || settled.promotion_failure;
        for (std::size_t i = 0; i < settled.states.size(); ++i) {
            out.moves.push_back({action, payload, settled.states[i], settled.started[i], adopts});
        }
    };

    if (s.mode == Mode::polling) {
        const auto* deliver = std::get_if<Deliver>(&stimulus);
        if (deliver == nullptr || !deliver->payload.current) {
            return out;
        }
        const auto& queue = r.queue(*deliver->payload.current, p);
        if (queue.empty()) {
            return out;
        }
        const Action& head = queue.front().action;
        if (head.kind != EventKind::receive || head.peer != deliver->from || head.label != deliver->payload.label) {
            return out;
        }
        advance(head, deliver->payload, {Mode::executing, deliver->payload.current, deliver->payload.next, 1}, true);
        return out;
    }
    if (s.mode != Mode::executing || !s.current) {
        return out;
    }

    const auto& queue = r.queue(*s.current, p);
    if (s.position >= queue.size()) {
        return out;
    }
    const QueuedEvent& head = queue[s.position];

    if (std::holds_alternative<Emit>(stimulus)) {
        if (head.action.kind != EventKind::send) {
            return out;
        }
        const Prediction& current = r.prediction(*s.current);
        std::vector<std::optional<PredictionId>> nexts;
        if (current.control && *current.control == head.identity) {
            for (PredictionId g : r.guesses(current.path.last())) {
                nexts.emplace_back(g);
            }
        } else {
            nexts.push_back(s.next);
        }
        for (const auto& next : nexts) {
            advance(head.action, {head.action.label, s.current, next},
                    {Mode::executing, s.current, next, s.position + 1});
        }
        return out;
    }

    const Deliver& deliver = std::get<Deliver>(stimulus);
    if (head.action.kind != EventKind::receive || head.action.peer != deliver.from ||
        head.action.label != deliver.payload.label) {
        return out;
    }
    const std::optional<PredictionId> next = s.next ? s.next : deliver.payload.next;
    advance(head.action, deliver.payload, {Mode::executing, s.current, next, s.position + 1});
    return out;
}

// ---------------------------------------------------------------------------

namespace {

using Inbox = std::set<std::pair<std::size_t, PayloadId>>;

class MachineBuilder {
public:
    MachineBuilder(const Realization& r, Cfm& cfm, std::size_t index, const Inbox& inbox)
        : r_(r), cfm_(cfm), index_(index), p_(cfm.processes[index]), inbox_(inbox)
    {
        machine_.process = p_;
    }

    ProcessMachine build(PredictionId initial)
    {
        Settled start = start_states(r_, p_, initial);
        if (start.promotion_failure) {
            cfm_.unsafe_promotions.push_back({index_, 0, std::nullopt, std::nullopt});
        }
        if (start.states.size() == 1) {
            machine_.initial = state_of(start.states.front());
            machine_.initial_started = start.started.front();
        } else {
            const LocalState synthetic{Mode::initial, initial, std::nullopt, 0};
            bool accepting = std::any_of(start.states.begin(), start.states.end(),
                                         [](const LocalState& s) { return s.mode == Mode::polling; });
            machine_.initial = machine_.add_state(r_.describe(synthetic), accepting);
            machine_.local.push_back(synthetic);
            for (std::size_t i = 0; i < start.states.size(); ++i) {
                expand(machine_.initial, start.states[i], start.started[i]);
            }
        }
        while (!work_.empty()) {
            const StateId id = work_.front();
            work_.pop_front();
            const LocalState s = machine_.local[id];
            expand(id, s);
        }
        return std::move(machine_);
    }

private:
    StateId state_of(const LocalState& s)
    {
        auto [it, inserted] = ids_.emplace(s, static_cast<StateId>(machine_.state_count()));
        if (inserted) {
            machine_.add_state(r_.describe(s), s.mode == Mode::polling);
            machine_.local.push_back(s);
            work_.push_back(it->second);
        }
        return it->second;
    }

    void record(StateId source, const StepOutcome& outcome, std::optional<std::size_t> sender,
                std::optional<PayloadId> delivered, std::uint32_t offset)
    {
        if (outcome.promotion_failure) {
            cfm_.unsafe_promotions.push_back({index_, source, sender, delivered});
        }
        for (const LocalMove& move : outcome.moves) {
            const PayloadId payload = cfm_.intern(move.payload);
            const StateId target = state_of(move.target);
            machine_.transitions.push_back(
                {source, move.action, payload, target, 0, move.adopts ? move.started : move.started + offset, move.adopts});
        }
    }

    void expand(StateId source, const LocalState& s, std::uint32_t offset = 0)
    {
        if (s.mode == Mode::executing) {
            const QueuedEvent& head = r_.queue(*s.current, p_).at(s.position);
            if (head.action.kind == EventKind::send) {
                record(source, local_step(r_, p_, s, Emit{}), std::nullopt, std::nullopt, offset);
                return;
            }
        }
        for (const auto& [sender, payload] : inbox_) {
            const Payload copy = cfm_.payloads[payload];
            record(source, local_step(r_, p_, s, Deliver{cfm_.processes[sender], copy}), sender, payload, offset);
        }
    }

    const Realization& r_;
    Cfm& cfm_;
    std::size_t index_;
    ProcessId p_;
    const Inbox& inbox_;
    ProcessMachine machine_;
    std::map<LocalState, StateId> ids_;
    std::deque<StateId> work_;
};

}  // namespace

Cfm synthesize_cfm(const MsgGraph& g, const SynthesisOptions& options)
{
    auto r = std::make_shared<const Realization>(g);
    if (options.initial_choice >= r->initial_predictions().size()) {
        throw Error("initial prediction choice out of range");
    }
    const PredictionId initial = r->initial_predictions()[options.initial_choice];

    Cfm cfm;
    cfm.processes = r->processes();
    cfm.realization = r;
    std::vector<Inbox> inboxes(cfm.processes.size());

    // Close the receive alphabets: rebuild every machine until no machine
    // can send a payload its receiver has not been built against.
    bool changed = true;
    while (changed) {
        changed = false;
        cfm.machines.clear();
        cfm.unsafe_promotions.clear();
        for (std::size_t i = 0; i < cfm.processes.size(); ++i) {
            cfm.machines.push_back(MachineBuilder(*r, cfm, i, inboxes[i]).build(initial));
        }
        for (std::size_t i = 0; i < cfm.machines.size(); ++i) {
            for (const Transition& t : cfm.machines[i].transitions) {
                if (t.action.kind == EventKind::send) {
                    changed |= inboxes[cfm.index_of(t.action.peer)].insert({i, t.payload}).second;
                }
            }
        }
    }
    cfm.finalize();
    return cfm;
}

}  // namespace msgsynth
