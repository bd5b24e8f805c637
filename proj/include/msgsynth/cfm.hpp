#pragma once

// Communicating finite-state machines: one explicit automaton per process,
// with message payloads interned in a table shared by all machines.

#include "msgsynth/core.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace msgsynth {

class Realization;

using PredictionId = std::uint32_t;
using StateId = std::uint32_t;
using PayloadId = std::uint32_t;

enum class Mode : std::uint8_t { initial, executing, polling };

const char* to_string(Mode m);

/// Control state of a synthesized process. `position` indexes the event
/// queue of the current prediction projected on the process.
struct LocalState {
    Mode mode = Mode::polling;
    std::optional<PredictionId> current;
    std::optional<PredictionId> next;
    std::uint32_t position = 0;

    auto operator<=>(const LocalState&) const = default;
    bool operator==(const LocalState&) const = default;
};

/// A message label plus the predictions piggybacked on it. Hand-built
/// machines leave both predictions empty.
struct Payload {
    MessageLabel label;
    std::optional<PredictionId> current;
    std::optional<PredictionId> next;

    auto operator<=>(const Payload&) const = default;
    bool operator==(const Payload&) const = default;
};

struct Transition {
    StateId from = 0;
    Action action;
    PayloadId payload = 0;
    StateId to = 0;
    // Index of the channel the transition writes or reads; set by Cfm::finalize.
    std::uint32_t channel = 0;
    // Synthesized machines only: predictions begun by the move, and whether
    // it wakes a polling process into the received payload's prediction.
    std::uint32_t started = 0;
    bool adopts = false;
};

struct ProcessMachine {
    ProcessId process;
    StateId initial = 0;
    std::vector<bool> accepting;
    std::vector<std::string> names;
    std::vector<Transition> transitions;
    // Algorithm state of each automaton state; empty for hand-built machines.
    std::vector<LocalState> local;
    // Predictions begun before the initial state is reached.
    std::uint32_t initial_started = 0;
    std::vector<std::vector<std::uint32_t>> outgoing;

    std::size_t state_count() const { return accepting.size(); }
    StateId add_state(std::string name, bool is_accepting);
};

/// A state whose stimulus would have required promoting an empty next
/// prediction. Synthesis leaves such moves out.
struct UnsafePromotion {
    std::size_t machine = 0;
    StateId state = 0;
    // Sender and payload of the delivery that triggered it; empty for a send.
    std::optional<std::size_t> sender;
    std::optional<PayloadId> delivered;
};

struct Cfm {
    std::vector<ProcessId> processes;
    std::vector<ProcessMachine> machines;
    std::vector<Payload> payloads;
    std::shared_ptr<const Realization> realization;
    std::vector<UnsafePromotion> unsafe_promotions;

    std::size_t index_of(const ProcessId& p) const;
    std::size_t channel_count() const { return processes.size() * processes.size(); }
    std::size_t channel(std::size_t sender, std::size_t receiver) const { return sender * processes.size() + receiver; }

    PayloadId intern(const Payload& p);
    std::string describe(PayloadId id) const;

    /// Rebuilds outgoing lists and channel indices. Call after editing
    /// machines or transitions by hand.
    void finalize();
};

}  // namespace msgsynth
