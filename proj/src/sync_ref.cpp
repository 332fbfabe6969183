#include "mobsim/sync_ref.hpp"

namespace mobsim {

std::vector<ProcessorId> MobRun::altered_set() const {
    std::vector<ProcessorId> out;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (i >= original_inputs.size() || inputs[i] != original_inputs[i])
            out.push_back(static_cast<ProcessorId>(i + 1));
    return out;
}

void validate_mob_run(const MobRun& run, const SystemConfig& cfg, Mode mode,
                      std::uint32_t rounds) {
    if (run.inputs.size() != cfg.n)
        throw InvalidRun("run has " + std::to_string(run.inputs.size()) + " inputs for n=" +
                         std::to_string(cfg.n));
    const auto altered = run.altered_set();
    if (altered.size() > cfg.t)
        throw InvalidRun("input alterations exceed f=t: " + std::to_string(altered.size()) +
                         " > " + std::to_string(cfg.t));

    for (const auto& [r, pairs] : run.drops) {
        if (r < 1 || r >= rounds)
            throw InvalidRun("drops declared for round " + std::to_string(r) +
                             " outside [1, R-1]");
        std::set<ProcessorId> senders;
        std::map<ProcessorId, std::uint32_t> incoming;
        for (const auto& [from, to] : pairs) {
            if (from < 1 || from > cfg.n || to < 1 || to > cfg.n)
                throw InvalidRun("drop names a processor outside 1..n");
            senders.insert(from);
            ++incoming[to];
        }
        if (mode == Mode::MAOBt) {
            for (const auto& [to, count] : incoming)
                if (count > cfg.t)
                    throw InvalidRun("round " + std::to_string(r) + ": receiver " +
                                     std::to_string(to) + " loses " + std::to_string(count) +
                                     " incoming messages > t=" + std::to_string(cfg.t));
        } else {
            if (senders.size() > cfg.t)
                throw InvalidRun("round " + std::to_string(r) + ": dropped-sender set has " +
                                 std::to_string(senders.size()) + " members > m=t=" +
                                 std::to_string(cfg.t));
        }
    }
}

SyncExecution execute_sync(const ProtocolSpec& spec, const SystemConfig& cfg, const MobRun& run,
                           const CoinProvider* coin) {
    if (run.inputs.size() != cfg.n) throw InvalidRun("input count does not match n");
    if (spec.uses_coin && coin == nullptr)
        throw ProviderUnavailable(spec.name + " uses a coin but no provider was given");

    SyncExecution ex;
    ex.records.assign(cfg.n, {});
    ex.outputs.assign(cfg.n, {});

    std::vector<Bytes> state(cfg.n);
    for (ProcessorId i = 1; i <= cfg.n; ++i) state[i - 1] = spec.init(run.inputs[i - 1]);

    static const std::set<std::pair<ProcessorId, ProcessorId>> kNoDrops;
    for (std::uint32_t r = 1; r <= spec.rounds; ++r) {
        const auto it = run.drops.find(r - 1);
        const auto& dropped = it == run.drops.end() ? kNoDrops : it->second;
        for (ProcessorId i = 1; i <= cfg.n; ++i) {
            ReceivedMessages received;
            if (r == 1) {
                received[i] = run.inputs[i - 1];
            } else {
                for (ProcessorId j = 1; j <= cfg.n; ++j) {
                    if (dropped.count({j, i})) continue;
                    const auto& outbox = ex.records[j - 1][r - 2].outbox;
                    if (auto m = outbox.find(i); m != outbox.end()) received[j] = m->second;
                }
            }
            std::optional<int> c;
            if (spec.uses_coin) c = coin->coin(r, i);
            ex.records[i - 1].push_back(step_protocol(spec, received, state[i - 1], r, c));
            state[i - 1] = ex.records[i - 1].back().state;
        }
    }

    for (ProcessorId i = 1; i <= cfg.n; ++i) {
        const auto& last = ex.records[i - 1].back();
        if (!last.output) throw ProtocolPanic(spec.name + ": no output after final round");
        ex.outputs[i - 1] = *last.output;
    }
    return ex;
}

}  // namespace mobsim
