#pragma once

// Choice-node analysis: triggers sets, resolving events, local and
// controllable choice, prediction paths and run partitioning.

#include "msgsynth/core.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace msgsynth {

/// Raised when an operation needs a controllable-choice MSG and gets a
/// graph with uncontrollable choice nodes.
class ClassError : public Error {
public:
    ClassError(const std::string& what, std::vector<std::string> offending)
        : Error(what), offending_nodes(std::move(offending))
    {
    }
    std::vector<std::string> offending_nodes;
};

using ProcessSet = std::set<ProcessId>;

std::string to_string(const ProcessSet& s);

/// Processes owning a minimal event of the visual order.
ProcessSet initiating_processes(const Bmsc& b);

/// Processes able to initiate the communication on some path leaving s.
ProcessSet triggers(const MsgGraph& g, NodeIndex s);

/// Send events e such that every process in `targets` has an event
/// strictly after e.
std::vector<EventId> resolving_events(const Bmsc& b, const ProcessSet& targets);

/// Throws Error when u is not a choice node.
bool is_local_choice(const MsgGraph& g, NodeIndex u);

struct ControllabilityVerdict {
    enum class Failure { none, path_from_initial, cycle };

    bool controllable = false;
    Failure failure = Failure::none;
    // An unresolved path when controllable is false.
    std::optional<Path> counterexample;
};

/// Exact decision of the controllable-choice conditions for choice node u.
/// Throws Error when u is not a choice node.
ControllabilityVerdict is_controllable_choice(const MsgGraph& g, NodeIndex u);

enum class NodeClass { local_choice, controllable_choice, uncontrollable };
enum class MsgClass { local_choice, controllable_choice, neither };

const char* to_string(NodeClass c);
const char* to_string(MsgClass c);

struct Classification {
    std::map<NodeIndex, NodeClass> choice_nodes;
    std::map<NodeIndex, ControllabilityVerdict> verdicts;
    MsgClass overall = MsgClass::local_choice;

    bool is_local(NodeIndex n) const;
    bool is_controllable(NodeIndex n) const;
    std::vector<NodeIndex> offending() const;
};

Classification classify(const MsgGraph& g);

enum class PathKind { initial, local_terminated, controllable_revisit, terminal_terminated };

const char* to_string(PathKind k);

struct PredictionPath {
    Path nodes;
    PathKind kind = PathKind::initial;

    NodeIndex first() const { return nodes.front(); }
    NodeIndex last() const { return nodes.back(); }

    bool operator==(const PredictionPath& o) const { return nodes == o.nodes && kind == o.kind; }
    auto operator<=>(const PredictionPath& o) const { return nodes <=> o.nodes; }
};

/// Longest common prefix of all runs: follows unique successors from the
/// initial node up to the first choice node or the terminal node.
PredictionPath initial_path(const MsgGraph& g);

/// Which terminating condition the last node of `path` satisfies, if any.
std::optional<PathKind> terminating_kind(const MsgGraph& g, const Classification& cls, const Path& path);

/// All prediction paths reachable from the initial path, sorted by node
/// sequence. Throws ClassError for non-controllable graphs.
std::vector<PredictionPath> prediction_paths(const MsgGraph& g, const Classification& cls);
std::vector<PredictionPath> prediction_paths(const MsgGraph& g);

/// Splits a run into the initial path followed by prediction paths.
std::vector<PredictionPath> partition_run(const MsgGraph& g, const Classification& cls, const Path& run);
std::vector<PredictionPath> partition_run(const MsgGraph& g, const Path& run);

}  // namespace msgsynth
