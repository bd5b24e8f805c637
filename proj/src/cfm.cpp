#include "msgsynth/cfm.hpp"

#include "msgsynth/realization.hpp"

#include <algorithm>

namespace msgsynth {

const char* to_string(Mode m)
{
    switch (m) {
    case Mode::initial: return "initial";
    case Mode::executing: return "executing";
    case Mode::polling: return "polling";
    }
    return "?";
}

StateId ProcessMachine::add_state(std::string name, bool is_accepting)
{
    names.push_back(std::move(name));
    accepting.push_back(is_accepting);
    return static_cast<StateId>(accepting.size() - 1);
}

std::size_t Cfm::index_of(const ProcessId& p) const
{
    auto it = std::find(processes.begin(), processes.end(), p);
    if (it == processes.end()) {
        throw Error("unknown process " + p.str());
    }
    return static_cast<std::size_t>(it - processes.begin());
}

PayloadId Cfm::intern(const Payload& p)
{
    auto it = std::find(payloads.begin(), payloads.end(), p);
    if (it != payloads.end()) {
        return static_cast<PayloadId>(it - payloads.begin());
    }
    payloads.push_back(p);
    return static_cast<PayloadId>(payloads.size() - 1);
}

std::string Cfm::describe(PayloadId id) const
{
    const Payload& p = payloads.at(id);
    if (!p.current && !p.next) {
        return p.label.str();
    }
    auto prediction = [&](const std::optional<PredictionId>& x) -> std::string {
        if (!x) {
            return "⊥";
        }
        return realization ? realization->describe(*x) : "#" + std::to_string(*x);
    };
    return p.label.str() + "<" + prediction(p.current) + "; " + prediction(p.next) + ">";
}

void Cfm::finalize()
{
    for (ProcessMachine& m : machines) {
        const std::size_t self = index_of(m.process);
        m.outgoing.assign(m.state_count(), {});
        for (std::uint32_t i = 0; i < m.transitions.size(); ++i) {
            Transition& t = m.transitions[i];
            const std::size_t peer = index_of(t.action.peer);
            t.channel = static_cast<std::uint32_t>(t.action.kind == EventKind::send ? channel(self, peer)
                                                                                     : channel(peer, self));
            m.outgoing.at(t.from).push_back(i);
        }
    }
}

}  // namespace msgsynth
