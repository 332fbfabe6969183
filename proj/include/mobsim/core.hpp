#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobsim {

// Processors are numbered 1..n. 0 is never a valid id.
using ProcessorId = std::uint32_t;

// Opaque payload bytes. The simulation core never looks inside protocol
// payloads; protocols bring their own encode/decode.
using Bytes = std::vector<std::uint8_t>;

// Execution model the harness targets. The deterministic modes differ in
// whether the engine converges accept sets before broadcasting them;
// Randomized additionally threads a shared coin into every replica step.
enum class Mode { MAOBt, MOBtt, Randomized };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct SystemConfig {
    std::uint32_t n = 0;  // processor count
    std::uint32_t t = 0;  // fault bound

    std::uint32_t quorum() const { return n - t; }          // n-t
    std::uint32_t echo_threshold() const { return n - t; }  // m1 -> m2
    std::uint32_t vote_threshold() const { return t + 1; }  // m2 amplification
    std::uint32_t accept_threshold() const { return 2 * t + 1; }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resilience bound violated (n <= 3t, or n <= 4t for randomized mode).
struct ResilienceViolation : ConfigError {
    using ConfigError::ConfigError;
};

// The user-supplied transition function signalled failure. Propagated as a
// run abort, never swallowed.
struct ProtocolPanic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scheduler budget exhausted before every correct processor produced an
// output.
struct NonQuiescent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunAborted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n > 3t for the deterministic modes, n > 4t for Randomized. Throws
// ResilienceViolation naming the violated inequality.
void validate_config(const SystemConfig& cfg, Mode mode);

// FNV-1a over arbitrary byte runs; the stable digest used for replica-state
// comparison and whole-trace hashes.
struct Digest {
    std::uint64_t state = 0xcbf29ce484222325ull;

    void feed(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 0x100000001b3ull;
        }
    }
    void feed(const Bytes& b) { feed(b.data(), b.size()); }
    void feed_u64(std::uint64_t v) {
        std::uint8_t buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
        feed(buf, 8);
    }
    std::uint64_t value() const { return state; }
};

std::string to_hex(const Bytes& b);
Bytes from_hex(const std::string& s);
std::string u64_hex(std::uint64_t v);

// SplitMix64. Used to derive per-key values (dealer coins, sub-seeds) from a
// master seed; portable across platforms unlike <random> distributions.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mobsim
