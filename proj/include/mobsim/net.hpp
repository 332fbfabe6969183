#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <unordered_map>

#include "mobsim/trace.hpp"

namespace mobsim {

// A point-to-point message in flight. src is stamped by the simulator when
// the owning engine submits, so a faulty processor can rewrite or drop its
// own traffic but never forge someone else's origin.
struct Envelope {
    std::uint64_t seq = 0;
    ProcessorId src = 0;
    ProcessorId dst = 0;
    TransportMsg payload;
    std::uint64_t submitted_at_pick = 0;
};

enum class StrategyKind : std::uint8_t {
    Honest,
    Silent,         // drops every outbound envelope
    CrashAfterK,    // first k sends pass, the rest are dropped
    Equivocator,    // conflicting round-1 init payloads to disjoint receiver halves
    FakeAcceptSet,  // suppress own round-k broadcast; the engine's self-accept
                    // then claims a message nobody can ever causally satisfy
    Custom,         // scripted rewrite, the escape hatch for hand-written attacks
};

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

struct Strategy {
    StrategyKind kind = StrategyKind::Honest;
    std::uint64_t crash_after = 8;      // CrashAfterK
    std::uint32_t suppress_round = 2;   // FakeAcceptSet
    // Custom: outbound envelope -> replacement (dst, payload) list
    std::function<std::vector<std::pair<ProcessorId, TransportMsg>>(const Envelope&)> script;
};

enum class BiasKind : std::uint8_t { Uniform, Lifo, DelayProcessor };

struct SchedulerBias {
    BiasKind kind = BiasKind::Uniform;
    ProcessorId victim = 0;  // DelayProcessor
};

struct AdversarySpec {
    std::map<ProcessorId, Strategy> byzantine;  // |byzantine| <= t
    SchedulerBias bias;
};

struct Schedule {
    std::uint64_t seed = 1;
    std::uint64_t fairness_bound = 0;  // 0 -> 64 n^2
    std::uint64_t max_picks = 0;       // 0 -> unbounded; harness sets a budget
};

// Deterministic seed-driven asynchronous network. Envelopes sit in a pending
// pool; deliver_next removes one chosen by seeded weighted choice, except
// that once the oldest pending envelope's age reaches the fairness bound,
// picks drain oldest-first until no aged envelope remains. One delivery per
// pick means a burst of b simultaneous submissions can stretch a delivery to
// age D + b; the guaranteed ceiling is fairness_bound + peak_pool.
class Network {
public:
    Network(const SystemConfig& cfg, const AdversarySpec& adversary, const Schedule& schedule,
            TraceLog* trace);

    // Runs the submitting processor's strategy (if faulty) and pools the
    // survivors. Returns the number of envelopes actually pooled.
    std::size_t submit(ProcessorId src, ProcessorId dst, TransportMsg payload);

    std::optional<Envelope> deliver_next();
    bool quiescent() const { return pool_.empty(); }

    std::uint64_t picks() const { return picks_; }
    std::uint64_t submissions() const { return next_seq_; }
    std::uint64_t max_delivered_age() const { return max_delivered_age_; }
    std::uint64_t peak_pool() const { return peak_pool_; }
    std::uint64_t fairness_bound() const { return fairness_bound_; }
    bool is_byzantine(ProcessorId p) const { return adversary_.byzantine.count(p) != 0; }

private:
    std::vector<std::pair<ProcessorId, TransportMsg>> apply_strategy_(ProcessorId src,
                                                                      const Envelope& env);
    void pool_push_(Envelope env);
    Envelope pool_take_(std::size_t idx);
    std::size_t biased_pick_();

    SystemConfig cfg_;
    AdversarySpec adversary_;
    std::uint64_t fairness_bound_;
    TraceLog* trace_;

    std::mt19937_64 rng_;
    std::vector<Envelope> pool_;
    std::unordered_map<std::uint64_t, std::size_t> index_of_;  // seq -> pool index
    std::deque<std::uint64_t> fifo_;                           // seqs in submit order
    std::uint64_t next_seq_ = 0;
    std::uint64_t picks_ = 0;
    std::uint64_t max_delivered_age_ = 0;
    std::uint64_t peak_pool_ = 0;
    std::map<ProcessorId, std::uint64_t> sends_done_;  // CrashAfterK bookkeeping
};

}  // namespace mobsim
