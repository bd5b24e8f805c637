#pragma once

// Basic message sequence charts, message sequence graphs, weak sequential
// composition, projections and linearizations.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msgsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a bMSC violates one of its structural invariants.
class InvalidBmsc : public Error {
public:
    using Error::Error;
};

/// Raised when an enumeration would exceed its configured size cap.
class SizeError : public Error {
public:
    using Error::Error;
};

template <class Tag>
class Name {
public:
    Name() = default;
    explicit Name(std::string value) : value_(std::move(value)) {}

    const std::string& str() const { return value_; }
    bool empty() const { return value_.empty(); }

    auto operator<=>(const Name&) const = default;
    bool operator==(const Name&) const = default;

private:
    std::string value_;
};

using ProcessId = Name<struct ProcessTag>;
using MessageLabel = Name<struct LabelTag>;

enum class EventKind : std::uint8_t { send, receive };

/// Events are numbered from their message: 2*m is the send of message m,
/// 2*m+1 its receive. The pairing is therefore a bijection by construction.
using EventId = std::size_t;

inline constexpr EventId send_of(std::size_t message) { return 2 * message; }
inline constexpr EventId receive_of(std::size_t message) { return 2 * message + 1; }
inline constexpr std::size_t message_of(EventId e) { return e / 2; }
inline constexpr EventKind kind_of(EventId e) { return e % 2 == 0 ? EventKind::send : EventKind::receive; }

struct Message {
    std::string id;
    ProcessId sender;
    ProcessId receiver;
    MessageLabel label;
    // Index of the chart this message came from inside a composition.
    std::size_t segment = 0;
};

/// One letter of the action alphabet: p!q(m) or p?q(m).
struct Action {
    EventKind kind = EventKind::send;
    ProcessId process;
    ProcessId peer;
    MessageLabel label;

    auto operator<=>(const Action&) const = default;
    bool operator==(const Action&) const = default;

    std::string str() const;
};

using Word = std::vector<Action>;

std::string to_string(const Word& w);

struct Bmsc {
    std::vector<ProcessId> processes;
    std::vector<Message> messages;
    std::map<ProcessId, std::vector<EventId>> order;
    std::size_t segments = 1;

    std::size_t event_count() const { return 2 * messages.size(); }
    bool empty() const { return messages.empty(); }

    ProcessId process_of(EventId e) const;
    Action action_of(EventId e) const;
    const std::vector<EventId>& events_on(const ProcessId& p) const;

    /// Processes that own at least one event, sorted.
    std::vector<ProcessId> active_processes() const;

    std::optional<std::size_t> find_message(std::size_t segment, std::string_view id) const;

    /// Short human-readable rendering of an event, e.g. "!a" or "?b@2".
    std::string describe(EventId e) const;
};

/// Builds a bMSC from message declarations, ordering each process's events
/// by declaration order.
Bmsc make_bmsc(std::vector<ProcessId> processes, std::vector<Message> messages);

enum class BmscViolationKind { pairing, self_message, fifo, cycle };

struct BmscViolation {
    BmscViolationKind kind;
    std::string detail;
};

std::vector<BmscViolation> validate_bmsc(const Bmsc& b);

/// Strict visual order of a bMSC as a dense reachability matrix.
class VisualOrder {
public:
    VisualOrder() = default;
    explicit VisualOrder(std::size_t n) : n_(n), less_(n, std::vector<bool>(n, false)) {}

    std::size_t size() const { return n_; }
    bool operator()(EventId a, EventId b) const { return less_[a][b]; }
    void set(EventId a, EventId b) { less_[a][b] = true; }

    std::vector<std::pair<EventId, EventId>> pairs() const;
    std::vector<EventId> minimal() const;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<bool>> less_;
};

/// Throws InvalidBmsc when the generating relation has a cycle.
VisualOrder visual_order(const Bmsc& b);

/// Events of p in process order, written as actions. Unknown processes
/// yield an empty sequence.
Word projection(const Bmsc& b, const ProcessId& p);

/// Weak sequential composition. Messages of `second` have their segment
/// index shifted past those of `first`.
Bmsc compose(const Bmsc& first, const Bmsc& second);

inline constexpr std::size_t default_linearization_cap = 12;

std::set<Word> linearizations(const Bmsc& b, std::size_t cap = default_linearization_cap);

/// Per-process projections of the active processes. Two FIFO bMSCs are
/// isomorphic iff their canonical forms are equal.
std::map<ProcessId, Word> canonical_form(const Bmsc& b);

bool isomorphic(const Bmsc& a, const Bmsc& b);

// ---------------------------------------------------------------------------
// Message sequence graphs

using NodeIndex = std::size_t;
using Path = std::vector<NodeIndex>;

struct MsgGraph {
    std::string name;
    std::vector<std::string> nodes;
    std::vector<Bmsc> labels;
    std::vector<std::vector<NodeIndex>> successors;
    NodeIndex initial = 0;
    NodeIndex terminal = 0;

    std::size_t size() const { return nodes.size(); }

    NodeIndex add_node(std::string node_name, Bmsc label);
    void add_edge(NodeIndex from, NodeIndex to);
    bool has_edge(NodeIndex from, NodeIndex to) const;
    bool is_choice(NodeIndex n) const { return successors[n].size() >= 2; }

    std::optional<NodeIndex> find(std::string_view node_name) const;
    /// Throws Error for unknown names.
    NodeIndex index_of(std::string_view node_name) const;

    /// Union of the declared processes of all node labels, sorted.
    std::vector<ProcessId> processes() const;

    bool is_path(const Path& path) const;
    bool is_run(const Path& path) const;
    std::string render(const Path& path) const;
};

struct GraphViolation {
    std::string detail;
};

std::vector<GraphViolation> validate_graph(const MsgGraph& g);

/// Left fold of compose over the node labels; message segments equal path
/// positions. Throws Error for non-paths.
Bmsc compose_path(const MsgGraph& g, const Path& path);

}  // namespace msgsynth
