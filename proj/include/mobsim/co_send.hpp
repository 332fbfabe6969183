#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mobsim/wire.hpp"

namespace mobsim {

struct DuplicateInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (round, sender) pairs whose messages this processor already processed.
using ProcessedSet = std::set<std::pair<std::uint32_t, ProcessorId>>;

struct AcceptEvent {
    std::uint32_t round = 0;
    ProcessorId sender = 0;
    BroadcastValue value;
};

struct CoSendDiagnostics {
    std::uint64_t duplicate_inits = 0;
    std::uint64_t duplicate_echoes = 0;
    std::uint64_t malformed = 0;
    std::uint64_t undersized_claims = 0;
};

// One (round, sender) broadcast instance as seen by one processor.
//
// Echo ladder: a direct init from the sender triggers this processor's
// single m1; n-t m1 echoes for one value, or t+1 m2 echoes (the skip path),
// trigger its single m2; 2t+1 m2 echoes make the value an accept candidate.
// Round-1 candidates are accepted on the spot. Later rounds carry id sets
// and gate on causality: every claimed predecessor (round-1, q) must already
// be processed, otherwise the instance parks in a causal wait that may never
// clear (a faulty sender claiming a message nobody sent blocks its own
// machine everywhere). Claims smaller than n-t are rejected outright.
class CoSendInstance {
public:
    CoSendInstance(const SystemConfig& cfg, std::uint32_t round, ProcessorId sender)
        : cfg_(cfg), round_(round), sender_(sender) {}

    struct Actions {
        std::vector<CoMsg> broadcasts;  // to be sent to all n processors
        std::optional<AcceptEvent> accept;
    };

    // Sender-side invocation: emits the init fan-out and immediately
    // self-accepts (subject to the same causal gate, which a live sender's
    // own broadcast always clears at once).
    Actions invoke(const BroadcastValue& v, const ProcessedSet& processed,
                   CoSendDiagnostics& diag);

    // init/m1/m2 from the wire. src is the authenticated transport origin.
    Actions on_message(ProcessorId src, const CoMsg& msg, const ProcessedSet& processed,
                       CoSendDiagnostics& diag);

    // Re-check a parked causal wait after the processed set grew.
    Actions on_processed_grown(const ProcessedSet& processed);

    std::uint32_t round() const { return round_; }
    ProcessorId sender() const { return sender_; }
    bool accepted() const { return accepted_.has_value(); }
    const std::optional<BroadcastValue>& accepted_value() const { return accepted_; }
    bool waiting() const { return pending_.has_value(); }
    bool rejected() const { return rejected_; }

private:
    Actions candidate_(const BroadcastValue& v, const ProcessedSet& processed,
                       CoSendDiagnostics& diag);
    AcceptEvent accept_now_(BroadcastValue v);

    SystemConfig cfg_;
    std::uint32_t round_;
    ProcessorId sender_;

    bool invoked_ = false;
    bool init_seen_ = false;
    bool m1_sent_ = false;
    bool m2_sent_ = false;
    std::map<BroadcastValue, std::set<ProcessorId>> m1_tally_;
    std::map<BroadcastValue, std::set<ProcessorId>> m2_tally_;

    bool rejected_ = false;
    std::optional<BroadcastValue> pending_;  // candidate parked on the causal gate
    std::optional<BroadcastValue> accepted_;
};

}  // namespace mobsim
