#pragma once

// Synthesis of a deadlock-free CFM for a controllable-choice MSG by
// piggybacking bounded predictions of the future run on every message.

#include "msgsynth/cfm.hpp"
#include "msgsynth/choice.hpp"
#include "msgsynth/core.hpp"

#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace msgsynth {

/// Identity of a send inside a composed chart: segment (path position)
/// plus message id of the node's chart.
struct ControlEvent {
    std::size_t segment = 0;
    std::string message;

    auto operator<=>(const ControlEvent&) const = default;
    bool operator==(const ControlEvent&) const = default;
};

struct Prediction {
    PredictionPath path;
    std::optional<ControlEvent> control;

    bool operator==(const Prediction& o) const { return path.nodes == o.path.nodes && control == o.control; }
    auto operator<=>(const Prediction& o) const
    {
        if (auto c = path.nodes <=> o.path.nodes; c != 0) {
            return c;
        }
        return control <=> o.control;
    }
};

struct QueuedEvent {
    Action action;
    ControlEvent identity;
};

/// Precomputed synthesis context: classification, triggers sets, every
/// prediction with its composed chart and per-process event queues.
class Realization {
public:
    /// Throws ClassError when g is not a controllable-choice MSG.
    explicit Realization(MsgGraph g);

    const MsgGraph& graph() const { return graph_; }
    const Classification& classification() const { return classification_; }
    const std::vector<ProcessId>& processes() const { return processes_; }
    const ProcessSet& triggers(NodeIndex n) const { return triggers_.at(n); }
    const std::vector<PredictionPath>& paths() const { return paths_; }

    const std::vector<Prediction>& predictions() const { return predictions_; }
    const Prediction& prediction(PredictionId id) const { return predictions_.at(id); }
    std::optional<PredictionId> find(const Prediction& p) const;

    const std::vector<PredictionId>& initial_predictions() const { return initial_; }
    /// Predictions whose path starts at a successor of u. Throws Error when
    /// u is neither local- nor controllable-choice.
    const std::vector<PredictionId>& guesses(NodeIndex u) const;

    const Bmsc& composed(PredictionId id) const;
    const std::vector<QueuedEvent>& queue(PredictionId id, const ProcessId& p) const;

    std::string describe(PredictionId id) const;
    std::string describe(const LocalState& s) const;

private:
    MsgGraph graph_;
    Classification classification_;
    std::vector<ProcessId> processes_;
    std::vector<ProcessSet> triggers_;
    std::vector<PredictionPath> paths_;
    std::vector<Bmsc> composed_;
    std::map<std::pair<std::size_t, ProcessId>, std::vector<QueuedEvent>> queues_;
    std::vector<Prediction> predictions_;
    std::vector<std::size_t> path_of_;
    std::map<Prediction, PredictionId> index_;
    std::vector<PredictionId> initial_;
    std::map<NodeIndex, std::vector<PredictionId>> guesses_;
};

std::vector<Prediction> enumerate_predictions(const MsgGraph& g);
std::vector<Prediction> initial_prediction_set(const MsgGraph& g);
std::vector<Prediction> guess_predictions(const MsgGraph& g, NodeIndex u);

// ---------------------------------------------------------------------------
// Per-process semantics

struct Emit {};

struct Deliver {
    ProcessId from;
    Payload payload;
};

using Stimulus = std::variant<Emit, Deliver>;

struct Settled {
    std::vector<LocalState> states;
    // Number of predictions begun on the way to each state.
    std::vector<std::uint32_t> started;
    bool promotion_failure = false;
};

/// Runs the end-of-queue continuation (promote, lead a local choice, or
/// poll) until every branch has a nonempty queue or is polling.
Settled settle(const Realization& r, const ProcessId& p, const LocalState& s);

/// Stable states a process may start in under a given initial prediction.
Settled start_states(const Realization& r, const ProcessId& p, PredictionId initial);

struct LocalMove {
    Action action;
    Payload payload;
    LocalState target;
    std::uint32_t started = 0;
    // The move wakes a polling process into the payload's prediction.
    bool adopts = false;
};

struct StepOutcome {
    std::vector<LocalMove> moves;
    bool promotion_failure = false;
};

/// One send or receive of process p from a stable state, followed by
/// settling. An empty move list means the stimulus is blocked.
StepOutcome local_step(const Realization& r, const ProcessId& p, const LocalState& s, const Stimulus& stimulus);

struct SynthesisOptions {
    // Which element of the initial prediction set all processes share.
    std::size_t initial_choice = 0;
};

/// Explicit per-process machines closed over every payload some machine
/// can send. Throws ClassError for non-controllable graphs.
Cfm synthesize_cfm(const MsgGraph& g, const SynthesisOptions& options = {});

}  // namespace msgsynth
