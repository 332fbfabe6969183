#pragma once

#include <memory>
#include <string>

#include "mobsim/core.hpp"

namespace mobsim {

struct ProviderUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Source of the shared coin: one bit per (round, processor) key, with the
// guarantee that every correct processor obtains the same bit for the same
// key. The engine draws lazily at replica-step time; keying by (round,
// processor) makes the draw independent of processing order.
class CoinProvider {
public:
    virtual ~CoinProvider() = default;
    virtual int coin(std::uint32_t round, ProcessorId replica) const = 0;
    virtual std::string name() const = 0;
};

// Trusted dealer outside the adversary's reach: bits derived from a master
// seed, exactly unbiased and common by construction. An AMPC-backed provider
// would implement the same interface; none ships here.
class IdealDealerCoin final : public CoinProvider {
public:
    explicit IdealDealerCoin(std::uint64_t seed) : seed_(seed) {}

    int coin(std::uint32_t round, ProcessorId replica) const override {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(round) << 32) | static_cast<std::uint64_t>(replica);
        return static_cast<int>(splitmix64(seed_ ^ splitmix64(key)) & 1u);
    }

    std::string name() const override { return "ideal-dealer"; }

private:
    std::uint64_t seed_;
};

}  // namespace mobsim
