#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mobsim/wire.hpp"

namespace mobsim {

// The two-step gather run before each broadcast in MOBtt mode. Step 1 sends
// the live accept set and waits for n-t peers' sets to be subsets of it;
// step 2 repeats with the (grown) set; the returned snapshot then shares at
// least n-t members with every other correct processor's return. The accept
// set only grows, so eligibility is monotone: early sets are retained and
// re-checked, never discarded.
class CoreExchange {
public:
    CoreExchange(const SystemConfig& cfg, std::uint32_t round) : cfg_(cfg), round_(round) {}

    struct Actions {
        std::vector<CcMsg> broadcasts;
        std::optional<std::vector<ProcessorId>> returned;  // the converged set
    };

    // Start the exchange with the current accept-set view.
    Actions invoke(const std::set<ProcessorId>& accept_view);

    // Record a peer's step set (first one per sender and step counts) and
    // re-evaluate the waits.
    Actions on_message(ProcessorId src, const CcMsg& msg, const std::set<ProcessorId>& accept_view,
                       std::uint64_t& duplicates);

    // Re-evaluate after the accept set grew.
    Actions on_accept_grown(const std::set<ProcessorId>& accept_view);

    bool invoked() const { return step_ >= 1; }
    bool returned() const { return step_ == 3; }

    // Exchange record for post-run property checks.
    const std::vector<ProcessorId>& input_set() const { return input_set_; }
    const std::vector<ProcessorId>& step2_set() const { return step2_set_; }
    const std::vector<ProcessorId>& output_set() const { return output_set_; }
    const std::set<ProcessorId>& step1_unlockers() const { return step1_unlockers_; }
    const std::map<ProcessorId, std::vector<ProcessorId>>& received(int step) const {
        return step == 1 ? recv1_ : recv2_;
    }

private:
    Actions progress_(const std::set<ProcessorId>& accept_view);
    std::set<ProcessorId> eligible_(const std::map<ProcessorId, std::vector<ProcessorId>>& recv,
                                    const std::set<ProcessorId>& accept_view) const;

    SystemConfig cfg_;
    std::uint32_t round_;
    int step_ = 0;  // 0 idle, 1 waiting step-1, 2 waiting step-2, 3 returned

    std::map<ProcessorId, std::vector<ProcessorId>> recv1_, recv2_;
    std::vector<ProcessorId> input_set_, step2_set_, output_set_;
    std::set<ProcessorId> step1_unlockers_, step2_unlockers_;
};

}  // namespace mobsim
