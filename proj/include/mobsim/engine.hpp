#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mobsim/co_send.hpp"
#include "mobsim/coin.hpp"
#include "mobsim/common_core.hpp"
#include "mobsim/net.hpp"
#include "mobsim/protocol.hpp"

namespace mobsim {

// A required replica snapshot is absent. The broadcast layer's causal and
// per-sender continuity gates make this unreachable; hitting it is an
// engine bug, never a tolerated condition.
struct MissingSnapshot : std::logic_error {
    using std::logic_error::logic_error;
};

// One replicated protocol machine as tracked by one processor.
struct ReplicaTrack {
    Bytes input;
    std::vector<TransitionResult> rounds;  // [r-1] = state after round r
};

// One simulated processor: runs the broadcast layer, replays every
// processor's protocol machine from accepted claims, and drives its own
// round loop (quorum wait, gather exchange in MOBtt/randomized modes, next
// broadcast) until its own machine halts. It keeps echoing and processing
// for everyone else after that.
class ProcessorEngine {
public:
    using SubmitFn = std::function<void(ProcessorId dst, TransportMsg msg)>;

    ProcessorEngine(const SystemConfig& cfg, Mode mode, const ProtocolSpec& spec, ProcessorId me,
                    Bytes input, const CoinProvider* coin, SubmitFn submit, TraceLog* trace);

    void start();  // broadcast the input via co_send(1, me)
    void on_envelope(const Envelope& env);

    bool has_output() const { return output_.has_value(); }
    const Bytes& output() const { return *output_; }

    // post-run inspection
    const std::map<std::pair<std::uint32_t, ProcessorId>, BroadcastValue>& accepted() const {
        return accepted_log_;
    }
    const std::map<ProcessorId, ReplicaTrack>& replicas() const { return replicas_; }
    const std::map<std::uint32_t, std::set<ProcessorId>>& accept_sets() const { return accept_; }
    const std::map<std::uint32_t, CoreExchange>& core_rounds() const { return core_; }
    const CoSendDiagnostics& diagnostics() const { return diag_; }
    std::uint32_t current_round() const { return round_; }

private:
    enum class Phase { Wait, CoreWait, Halted };

    CoSendInstance& instance_(std::uint32_t round, ProcessorId sender);
    CoreExchange& core_round_(std::uint32_t round);

    void pump_();
    bool drain_unprocessed_();
    void process_claim_(std::uint32_t round, ProcessorId sender, const BroadcastValue& value);
    bool resolve_waits_();
    bool main_task_step_();
    void advance_round_(std::vector<ProcessorId> ids);
    bool handle_co_actions_(CoSendInstance::Actions&& actions);
    bool handle_cc_actions_(CoreExchange::Actions&& actions);
    std::optional<int> draw_coin_(std::uint32_t round, ProcessorId replica);
    void emit_(TraceEvent e);

    SystemConfig cfg_;
    Mode mode_;
    const ProtocolSpec* spec_;
    ProcessorId me_;
    Bytes input_;
    const CoinProvider* coin_;
    SubmitFn submit_;
    TraceLog* trace_;

    std::map<std::pair<std::uint32_t, ProcessorId>, CoSendInstance> instances_;
    std::map<std::pair<std::uint32_t, ProcessorId>, BroadcastValue> unprocessed_;  // M
    std::map<std::pair<std::uint32_t, ProcessorId>, BroadcastValue> accepted_log_;
    ProcessedSet processed_;  // M-bar
    std::map<std::uint32_t, std::set<ProcessorId>> accept_;
    std::map<ProcessorId, ReplicaTrack> replicas_;
    std::map<std::uint32_t, CoreExchange> core_;
    CoSendDiagnostics diag_;

    std::uint32_t round_ = 1;
    Phase phase_ = Phase::Wait;
    std::optional<Bytes> output_;
};

// Everything one finished simulation leaves behind.
struct RunResult {
    SystemConfig cfg;
    Mode mode = Mode::MOBtt;
    std::uint32_t rounds = 0;
    std::set<ProcessorId> byzantine;

    TraceLog trace;
    bool quiescent = false;  // pending pool drained within budget
    bool complete = false;   // every correct processor produced an output
    std::uint64_t picks = 0;
    std::uint64_t submissions = 0;
    std::uint64_t max_delivered_age = 0;
    std::uint64_t peak_pool = 0;
    std::uint64_t fairness_bound = 0;

    std::vector<std::optional<Bytes>> outputs;  // [i-1]
    CoSendDiagnostics diagnostics;              // aggregated over processors

    // per-processor snapshots for property tests
    std::vector<std::map<std::pair<std::uint32_t, ProcessorId>, BroadcastValue>> accepted;
    std::vector<std::map<ProcessorId, std::vector<std::uint64_t>>> replica_digests;

    struct CoreRecord {
        std::vector<ProcessorId> input_set, step2_set, output_set;
        std::set<ProcessorId> step1_unlockers;
        bool returned = false;
    };
    std::vector<std::map<std::uint32_t, CoreRecord>> core_records;

    bool is_correct(ProcessorId p) const { return byzantine.count(p) == 0; }

    // Outputs of the correct processors; throws NonQuiescent when the run
    // did not finish (an empty or truncated run has no outputs to extract).
    std::map<ProcessorId, Bytes> correct_outputs() const;

    // digest table: (replica, round) -> digest, using any correct processor's
    // recording (they are cross-checked for agreement elsewhere)
    std::map<std::pair<ProcessorId, std::uint32_t>, std::uint64_t> digest_table() const;
};

// Single-threaded deterministic run of n engines over the adversarial
// network. Independent runs are safe to execute in parallel.
RunResult simulate(const SystemConfig& cfg, Mode mode, const ProtocolSpec& spec,
                   const std::vector<Bytes>& inputs, const AdversarySpec& adversary,
                   const Schedule& schedule, const CoinProvider* coin = nullptr);

}  // namespace mobsim
