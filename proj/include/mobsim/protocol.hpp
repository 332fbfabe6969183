#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mobsim/core.hpp"

namespace mobsim {

// Messages consumed by one transition, keyed by sender. A sender that sent
// nothing is simply absent; there is no null payload.
using ReceivedMessages = std::map<ProcessorId, Bytes>;

// What one round of a protocol does: the state after the round, the messages
// to send this round (receiver -> payload, absence = no message), and an
// output once the protocol is done.
struct TransitionResult {
    Bytes state;
    std::map<ProcessorId, Bytes> outbox;
    std::optional<Bytes> output;

    std::uint64_t digest() const;
    bool operator==(const TransitionResult&) const = default;
};

// A deterministic round-based protocol, given as a transition function over
// opaque state and payload bytes plus a fixed halting round. The transition
// at round r consumes the messages received in round r-1 (round 1 consumes
// the processor's own input, keyed by its id) and produces the round-r sends.
// After round `rounds` the result must carry an output.
struct ProtocolSpec {
    std::string name;
    std::uint32_t rounds = 1;  // halting round R, >= 1
    bool uses_coin = false;

    // input value -> pre-round-1 state
    std::function<Bytes(const Bytes& input)> init;

    // (M_{r-1}, state, r, coin) -> round-r actions. `coin` is engaged only
    // when uses_coin is set; deterministic protocols receive nullopt.
    std::function<TransitionResult(const ReceivedMessages& received, const Bytes& state,
                                   std::uint32_t round, std::optional<int> coin)>
        transition;
};

// Evaluates one protocol step. Transitions must be pure; when
// `check_determinism` is set the step is evaluated twice and the two results
// compared bit for bit, turning a nondeterministic transition into a
// ProtocolPanic instead of a silent divergence between replicas.
TransitionResult step_protocol(const ProtocolSpec& spec, const ReceivedMessages& received,
                               const Bytes& state, std::uint32_t round, std::optional<int> coin,
                               bool check_determinism = false);

// A protocol message in its addressed, round-tagged form. The tag is the
// round the message was sent in; it is consumed by round tag+1 transitions.
struct RoundMessage {
    std::uint32_t round = 0;
    ProcessorId sender = 0;
    ProcessorId receiver = 0;
    Bytes payload;
};

// Addresses a transition result's outbox as round-r messages from `sender`.
std::vector<RoundMessage> materialize_outbox(const TransitionResult& result, ProcessorId sender,
                                             std::uint32_t round);

}  // namespace mobsim
