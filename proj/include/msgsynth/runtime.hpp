#pragma once

// Operational semantics of CFMs over FIFO channels: configurations, the
// interleaving step relation, bounded exploration, accepted words and
// seeded simulation.

#include "msgsynth/cfm.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace msgsynth {

struct Configuration {
    std::vector<StateId> states;
    // channels[sender * n + receiver], head at front.
    std::vector<std::vector<PayloadId>> channels;

    bool operator==(const Configuration&) const = default;
    auto operator<=>(const Configuration&) const = default;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const;
};

/// A transition of one machine, addressed by machine and transition index.
struct Move {
    std::size_t machine = 0;
    std::uint32_t transition = 0;

    auto operator<=>(const Move&) const = default;
};

Configuration initial_configuration(const Cfm& cfm);
bool is_accepting(const Cfm& cfm, const Configuration& c);
bool channels_empty(const Configuration& c);

std::vector<Move> enabled(const Cfm& cfm, const Configuration& c);

/// Throws Error when the move is not enabled in c.
Configuration step(const Cfm& cfm, const Configuration& c, const Move& move);

const Transition& transition_of(const Cfm& cfm, const Move& move);

struct ExploreBounds {
    std::size_t channel_depth = 4;
    std::size_t max_configurations = 200000;
};

struct ExplorationResult {
    struct Edge {
        std::size_t from = 0;
        std::size_t to = 0;
        Move move;
    };

    std::vector<Configuration> configurations;
    std::vector<Edge> edges;
    std::vector<std::size_t> accepting;
    // Configurations with at least one successor pruned by a bound.
    std::vector<std::size_t> boundary;
    // Configurations with no path to an accepting one in the explored graph.
    std::vector<std::size_t> deadlocks;
    bool budget_exhausted = false;

    bool exact() const { return boundary.empty() && !budget_exhausted; }
};

/// Breadth-first closure of `step` from the initial configuration.
ExplorationResult explore(const Cfm& cfm, const ExploreBounds& bounds = {});

struct WordSet {
    std::set<Word> words;
    bool truncated = false;
};

/// Annotation-free labels of all accepting executions with at most
/// max_length actions. `budget` caps the number of (configuration, prefix)
/// pairs visited.
WordSet accepted_words(const Cfm& cfm, std::size_t max_length, std::size_t budget = 2000000);

struct TraceStep {
    Move move;
    Action action;
    PayloadId payload = 0;
};

struct Trace {
    std::vector<TraceStep> steps;
    Configuration final;
    bool accepting = false;
    bool truncated = false;
};

/// One pseudorandom resolution of all nondeterminism, reproducible per seed.
/// Runs until no move is enabled or max_steps is reached.
Trace simulate(const Cfm& cfm, std::uint64_t seed, std::size_t max_steps);

/// One action per line; with `channels` set, each line is followed by the
/// nonempty channel contents after the step.
std::string render_trace(const Cfm& cfm, const Trace& trace, bool channels = false);

/// One single-word machine per process accepting its projection of b.
Cfm projection_cfm(const Bmsc& b);

/// Per-process projection of the whole graph without any control data:
/// every process follows the graph on its own.
Cfm naive_projection_cfm(const MsgGraph& g);

}  // namespace msgsynth
