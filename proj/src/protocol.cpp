#include "mobsim/protocol.hpp"

namespace mobsim {

std::uint64_t TransitionResult::digest() const {
    Digest d;
    d.feed_u64(state.size());
    d.feed(state);
    d.feed_u64(outbox.size());
    for (const auto& [dst, payload] : outbox) {
        d.feed_u64(dst);
        d.feed_u64(payload.size());
        d.feed(payload);
    }
    d.feed_u64(output.has_value() ? 1 : 0);
    if (output) {
        d.feed_u64(output->size());
        d.feed(*output);
    }
    return d.value();
}

TransitionResult step_protocol(const ProtocolSpec& spec, const ReceivedMessages& received,
                               const Bytes& state, std::uint32_t round, std::optional<int> coin,
                               bool check_determinism) {
    if (!spec.transition) throw ProtocolPanic(spec.name + ": no transition function");
    if (round < 1 || round > spec.rounds)
        throw ProtocolPanic(spec.name + ": step at round " + std::to_string(round) +
                            " outside [1, " + std::to_string(spec.rounds) + "]");
    TransitionResult out;
    try {
        out = spec.transition(received, state, round, coin);
    } catch (const ProtocolPanic&) {
        throw;
    } catch (const std::exception& e) {
        throw ProtocolPanic(spec.name + ": transition failed at round " + std::to_string(round) +
                            ": " + e.what());
    }
    if (round == spec.rounds && !out.output)
        throw ProtocolPanic(spec.name + ": no output at halting round");
    if (check_determinism) {
        TransitionResult again = spec.transition(received, state, round, coin);
        if (!(again == out))
            throw ProtocolPanic(spec.name + ": transition is not deterministic at round " +
                                std::to_string(round));
    }
    return out;
}

std::vector<RoundMessage> materialize_outbox(const TransitionResult& result, ProcessorId sender,
                                             std::uint32_t round) {
    std::vector<RoundMessage> out;
    out.reserve(result.outbox.size());
    for (const auto& [receiver, payload] : result.outbox)
        out.push_back(RoundMessage{round, sender, receiver, payload});
    return out;
}

}  // namespace mobsim
