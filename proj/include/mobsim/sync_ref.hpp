#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mobsim/coin.hpp"
#include "mobsim/protocol.hpp"

namespace mobsim {

struct InvalidRun : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A synchronous-model run description: per-processor inputs as installed by
// the adversary (up to t of them altered from the originals), plus the
// per-round message-removal pattern. drops[r] lists (sender, receiver) pairs
// whose round-r message is removed; round-r messages are the ones consumed
// by round r+1 transitions, so only rounds 1..R-1 matter.
struct MobRun {
    std::vector<Bytes> original_inputs;  // [i-1] for processor i
    std::vector<Bytes> inputs;           // installed (possibly altered) inputs
    std::map<std::uint32_t, std::set<std::pair<ProcessorId, ProcessorId>>> drops;

    std::vector<ProcessorId> altered_set() const;  // where inputs differ
};

// Model-limit validation. MOBtt: per round, the dropped messages' sender
// projection has at most t members, and at most t inputs are altered. MAOBt:
// per round, no receiver loses more than t incoming messages (alterations
// bounded by t as well). Throws InvalidRun naming the violated limit.
void validate_mob_run(const MobRun& run, const SystemConfig& cfg, Mode mode,
                      std::uint32_t rounds);

struct SyncExecution {
    // records[i-1][r-1]: processor i's state/outbox/output after round r
    std::vector<std::vector<TransitionResult>> records;
    std::vector<Bytes> outputs;  // [i-1]

    std::uint64_t digest_of(ProcessorId i, std::uint32_t round) const {
        return records[i - 1][round - 1].digest();
    }
};

// Lock-step execution of the protocol under the given run: in round r every
// processor applies the transition to the round-(r-1) messages that survived
// the drops. This is the oracle the asynchronous engine is checked against;
// it shares only the ProtocolSpec with the engine, none of the round logic.
SyncExecution execute_sync(const ProtocolSpec& spec, const SystemConfig& cfg, const MobRun& run,
                           const CoinProvider* coin = nullptr);

}  // namespace mobsim
