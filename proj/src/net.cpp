#include "mobsim/net.hpp"

namespace mobsim {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Honest: return "honest";
        case StrategyKind::Silent: return "silent";
        case StrategyKind::CrashAfterK: return "crash-after-k";
        case StrategyKind::Equivocator: return "equivocator";
        case StrategyKind::FakeAcceptSet: return "fake-accept-set";
        case StrategyKind::Custom: return "custom";
    }
    return "?";
}

StrategyKind strategy_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(StrategyKind::Custom); ++k)
        if (name == strategy_name(static_cast<StrategyKind>(k)))
            return static_cast<StrategyKind>(k);
    throw ConfigError("unknown adversary strategy: " + name);
}

Network::Network(const SystemConfig& cfg, const AdversarySpec& adversary,
                 const Schedule& schedule, TraceLog* trace)
    : cfg_(cfg),
      adversary_(adversary),
      fairness_bound_(schedule.fairness_bound ? schedule.fairness_bound
                                              : 64ull * cfg.n * cfg.n),
      trace_(trace),
      rng_(schedule.seed) {
    if (adversary_.byzantine.size() > cfg.t)
        throw ConfigError("adversary controls " + std::to_string(adversary_.byzantine.size()) +
                          " processors, more than t=" + std::to_string(cfg.t));
    for (const auto& [p, s] : adversary_.byzantine) {
        if (p < 1 || p > cfg.n) throw ConfigError("byzantine id outside 1..n");
        if (s.kind == StrategyKind::Custom && !s.script)
            throw ConfigError("custom strategy without a script");
    }
}

namespace {

// The conflicting payload an equivocator hands to the second receiver half.
BroadcastValue equivocation_variant(const BroadcastValue& v) {
    BroadcastValue out = v;
    if (out.payload.empty())
        out.payload.push_back(0x01);
    else
        out.payload[0] ^= 0x01;
    return out;
}

}  // namespace

std::vector<std::pair<ProcessorId, TransportMsg>> Network::apply_strategy_(ProcessorId src,
                                                                           const Envelope& env) {
    const auto it = adversary_.byzantine.find(src);
    if (it == adversary_.byzantine.end()) return {{env.dst, env.payload}};
    const Strategy& strat = it->second;

    switch (strat.kind) {
        case StrategyKind::Honest:
            return {{env.dst, env.payload}};
        case StrategyKind::Silent:
            return {};
        case StrategyKind::CrashAfterK: {
            if (sends_done_[src]++ < strat.crash_after) return {{env.dst, env.payload}};
            return {};
        }
        case StrategyKind::Equivocator: {
            // conflicting round-1 values to disjoint receiver sets; the forged
            // one goes to a full quorum so it can actually win acceptance
            const auto* co = std::get_if<CoMsg>(&env.payload);
            if (co && co->kind == CoKind::Init && co->sender == src && co->round == 1 &&
                env.dst <= cfg_.quorum()) {
                CoMsg forged = *co;
                forged.value = equivocation_variant(co->value);
                return {{env.dst, TransportMsg{forged}}};
            }
            return {{env.dst, env.payload}};
        }
        case StrategyKind::FakeAcceptSet: {
            const auto* co = std::get_if<CoMsg>(&env.payload);
            if (co && co->kind == CoKind::Init && co->sender == src &&
                co->round == strat.suppress_round)
                return {};
            return {{env.dst, env.payload}};
        }
        case StrategyKind::Custom:
            return strat.script(env);
    }
    return {{env.dst, env.payload}};
}

void Network::pool_push_(Envelope env) {
    index_of_[env.seq] = pool_.size();
    fifo_.push_back(env.seq);
    pool_.push_back(std::move(env));
    peak_pool_ = std::max<std::uint64_t>(peak_pool_, pool_.size());
}

Envelope Network::pool_take_(std::size_t idx) {
    Envelope out = std::move(pool_[idx]);
    index_of_.erase(out.seq);
    if (idx + 1 != pool_.size()) {
        pool_[idx] = std::move(pool_.back());
        index_of_[pool_[idx].seq] = idx;
    }
    pool_.pop_back();
    return out;
}

std::size_t Network::submit(ProcessorId src, ProcessorId dst, TransportMsg payload) {
    if (src < 1 || src > cfg_.n || dst < 1 || dst > cfg_.n)
        throw std::runtime_error("submit outside 1..n");

    Envelope intent;
    intent.src = src;
    intent.dst = dst;
    intent.payload = std::move(payload);

    std::size_t pooled = 0;
    for (auto& [out_dst, out_payload] : apply_strategy_(src, intent)) {
        Envelope env;
        env.seq = next_seq_++;
        env.src = src;  // origin survives any rewrite
        env.dst = out_dst;
        env.payload = std::move(out_payload);
        env.submitted_at_pick = picks_;
        if (trace_) {
            TraceEvent e;
            e.kind = EventKind::Submit;
            e.seq = env.seq;
            e.at_pick = picks_;
            e.src = env.src;
            e.dst = env.dst;
            e.wire = env.payload;
            trace_->push_back(std::move(e));
        }
        pool_push_(std::move(env));
        ++pooled;
    }
    return pooled;
}

std::size_t Network::biased_pick_() {
    if (adversary_.bias.kind == BiasKind::Uniform) return rng_() % pool_.size();

    std::vector<std::uint64_t> cumulative(pool_.size());
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        std::uint64_t w = 1;
        const Envelope& env = pool_[i];
        if (adversary_.bias.kind == BiasKind::Lifo) {
            // strongly prefer fresh envelopes; old ones leave via the
            // fairness bound
            const std::uint64_t age = picks_ - env.submitted_at_pick;
            w = age < 16 ? (16 - age) * (16 - age) : 1;
        } else {  // DelayProcessor
            const ProcessorId victim = adversary_.bias.victim;
            w = (env.src == victim || env.dst == victim) ? 1 : 64;
        }
        total += w;
        cumulative[i] = total;
    }
    const std::uint64_t pickw = rng_() % total;
    std::size_t lo = 0, hi = pool_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] <= pickw)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

std::optional<Envelope> Network::deliver_next() {
    if (pool_.empty()) return std::nullopt;
    ++picks_;

    // fairness: force out the oldest envelope that hit the bound
    std::optional<std::size_t> forced;
    while (!fifo_.empty()) {
        const auto it = index_of_.find(fifo_.front());
        if (it == index_of_.end()) {
            fifo_.pop_front();  // already delivered
            continue;
        }
        if (picks_ - pool_[it->second].submitted_at_pick >= fairness_bound_) {
            forced = it->second;
            fifo_.pop_front();
        }
        break;
    }

    const std::size_t idx = forced ? *forced : biased_pick_();
    Envelope env = pool_take_(idx);
    max_delivered_age_ = std::max(max_delivered_age_, picks_ - env.submitted_at_pick);

    if (trace_) {
        TraceEvent e;
        e.kind = EventKind::Deliver;
        e.seq = env.seq;
        e.at_pick = picks_;
        e.src = env.src;
        e.dst = env.dst;
        e.wire = env.payload;
        trace_->push_back(std::move(e));
    }
    return env;
}

}  // namespace mobsim
