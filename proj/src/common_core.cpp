#include "mobsim/common_core.hpp"

#include <algorithm>

namespace mobsim {

namespace {

std::vector<ProcessorId> snapshot(const std::set<ProcessorId>& s) {
    return std::vector<ProcessorId>(s.begin(), s.end());
}

bool subset_of(const std::vector<ProcessorId>& sub, const std::set<ProcessorId>& super) {
    for (ProcessorId q : sub)
        if (!super.count(q)) return false;
    return true;
}

}  // namespace

std::set<ProcessorId> CoreExchange::eligible_(
    const std::map<ProcessorId, std::vector<ProcessorId>>& recv,
    const std::set<ProcessorId>& accept_view) const {
    std::set<ProcessorId> out;
    for (const auto& [sender, ids] : recv)
        if (subset_of(ids, accept_view)) out.insert(sender);
    return out;
}

CoreExchange::Actions CoreExchange::invoke(const std::set<ProcessorId>& accept_view) {
    Actions out;
    if (step_ != 0) return out;
    step_ = 1;
    input_set_ = snapshot(accept_view);
    out.broadcasts.push_back(CcMsg{round_, 1, input_set_});
    // peers' sets may already be on file (asynchrony), so evaluate right away
    Actions more = progress_(accept_view);
    out.broadcasts.insert(out.broadcasts.end(), more.broadcasts.begin(), more.broadcasts.end());
    out.returned = more.returned;
    return out;
}

CoreExchange::Actions CoreExchange::on_message(ProcessorId src, const CcMsg& msg,
                                               const std::set<ProcessorId>& accept_view,
                                               std::uint64_t& duplicates) {
    auto& recv = msg.step == 1 ? recv1_ : recv2_;
    if (!recv.emplace(src, msg.ids).second) ++duplicates;  // one set per sender per step
    return progress_(accept_view);
}

CoreExchange::Actions CoreExchange::on_accept_grown(const std::set<ProcessorId>& accept_view) {
    return progress_(accept_view);
}

CoreExchange::Actions CoreExchange::progress_(const std::set<ProcessorId>& accept_view) {
    Actions out;
    if (step_ == 1) {
        auto ok = eligible_(recv1_, accept_view);
        if (ok.size() >= cfg_.quorum()) {
            step1_unlockers_ = std::move(ok);
            step_ = 2;
            step2_set_ = snapshot(accept_view);
            out.broadcasts.push_back(CcMsg{round_, 2, step2_set_});
        }
    }
    if (step_ == 2) {
        auto ok = eligible_(recv2_, accept_view);
        if (ok.size() >= cfg_.quorum()) {
            step2_unlockers_ = std::move(ok);
            step_ = 3;
            output_set_ = snapshot(accept_view);
            out.returned = output_set_;
        }
    }
    return out;
}

}  // namespace mobsim
