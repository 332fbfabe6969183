#include "mobsim/co_send.hpp"

namespace mobsim {

AcceptEvent CoSendInstance::accept_now_(BroadcastValue v) {
    accepted_ = v;  // taken by value: v may alias pending_, which dies here
    pending_.reset();
    return AcceptEvent{round_, sender_, std::move(v)};
}

CoSendInstance::Actions CoSendInstance::candidate_(const BroadcastValue& v,
                                                   const ProcessedSet& processed,
                                                   CoSendDiagnostics& diag) {
    Actions out;
    if (accepted_ || pending_ || rejected_) return out;  // one candidate per instance

    if (round_ == 1) {
        if (v.is_ids) {  // round-1 values are opaque payloads, never id sets
            rejected_ = true;
            ++diag.malformed;
            return out;
        }
        out.accept = accept_now_(v);
        return out;
    }

    if (!v.is_ids || v.ids.size() < cfg_.quorum()) {
        // a claim below n-t can only come from a faulty sender; never let it
        // into the causal wait
        rejected_ = true;
        ++diag.undersized_claims;
        return out;
    }
    bool all_processed = true;
    for (ProcessorId q : v.ids)
        if (!processed.count({round_ - 1, q})) {
            all_processed = false;
            break;
        }
    if (all_processed) {
        out.accept = accept_now_(v);
    } else {
        pending_ = v;
    }
    return out;
}

CoSendInstance::Actions CoSendInstance::invoke(const BroadcastValue& v,
                                               const ProcessedSet& processed,
                                               CoSendDiagnostics& diag) {
    if (invoked_)
        throw DuplicateInstance("co_send(" + std::to_string(round_) + ", " +
                                std::to_string(sender_) + ") invoked twice");
    invoked_ = true;
    Actions out;
    out.broadcasts.push_back(CoMsg{CoKind::Init, round_, sender_, v});
    Actions cand = candidate_(v, processed, diag);
    out.accept = cand.accept;
    return out;
}

CoSendInstance::Actions CoSendInstance::on_message(ProcessorId src, const CoMsg& msg,
                                                   const ProcessedSet& processed,
                                                   CoSendDiagnostics& diag) {
    Actions out;
    switch (msg.kind) {
        case CoKind::Init: {
            if (src != sender_) {  // only the sender itself can open its instance
                ++diag.malformed;
                return out;
            }
            if (init_seen_) {
                ++diag.duplicate_inits;
                return out;
            }
            init_seen_ = true;
            if (!m1_sent_) {
                m1_sent_ = true;
                out.broadcasts.push_back(CoMsg{CoKind::M1, round_, sender_, msg.value});
            }
            return out;
        }
        case CoKind::M1: {
            if (!m1_tally_[msg.value].insert(src).second) {
                ++diag.duplicate_echoes;
                return out;
            }
            if (!m2_sent_ && m1_tally_[msg.value].size() >= cfg_.echo_threshold()) {
                m2_sent_ = true;
                out.broadcasts.push_back(CoMsg{CoKind::M2, round_, sender_, msg.value});
            }
            return out;
        }
        case CoKind::M2: {
            if (!m2_tally_[msg.value].insert(src).second) {
                ++diag.duplicate_echoes;
                return out;
            }
            const std::size_t votes = m2_tally_[msg.value].size();
            if (!m2_sent_ && votes >= cfg_.vote_threshold()) {
                // t+1 m2 echoes prove a correct processor vouched; join in
                // even without ever reaching the m1 threshold
                m2_sent_ = true;
                out.broadcasts.push_back(CoMsg{CoKind::M2, round_, sender_, msg.value});
            }
            if (votes >= cfg_.accept_threshold()) {
                Actions cand = candidate_(msg.value, processed, diag);
                out.accept = cand.accept;
            }
            return out;
        }
    }
    return out;
}

CoSendInstance::Actions CoSendInstance::on_processed_grown(const ProcessedSet& processed) {
    Actions out;
    if (!pending_) return out;
    for (ProcessorId q : pending_->ids)
        if (!processed.count({round_ - 1, q})) return out;
    out.accept = accept_now_(*pending_);
    return out;
}

}  // namespace mobsim
