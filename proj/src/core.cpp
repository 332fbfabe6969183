#include "mobsim/core.hpp"

namespace mobsim {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::MAOBt: return "maobt";
        case Mode::MOBtt: return "mobtt";
        case Mode::Randomized: return "randomized";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "maobt") return Mode::MAOBt;
    if (name == "mobtt") return Mode::MOBtt;
    if (name == "randomized") return Mode::Randomized;
    throw ConfigError("unknown mode: " + name + " (expected maobt|mobtt|randomized)");
}

void validate_config(const SystemConfig& cfg, Mode mode) {
    if (cfg.n < 1) throw ConfigError("n must be >= 1");
    if (mode == Mode::Randomized) {
        if (cfg.n <= 4 * cfg.t)
            throw ResilienceViolation("randomized mode requires n > 4t (got n=" +
                                      std::to_string(cfg.n) + ", t=" + std::to_string(cfg.t) + ")");
    } else {
        if (cfg.n <= 3 * cfg.t)
            throw ResilienceViolation("deterministic modes require n > 3t (got n=" +
                                      std::to_string(cfg.n) + ", t=" + std::to_string(cfg.t) + ")");
    }
}

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(const Bytes& b) {
    std::string out;
    out.reserve(b.size() * 2);
    for (std::uint8_t c : b) {
        out.push_back(kHexDigits[c >> 4]);
        out.push_back(kHexDigits[c & 0xf]);
    }
    return out;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw std::runtime_error("hex string has odd length");
    Bytes out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        int hi = hex_val(s[i]), lo = hex_val(s[i + 1]);
        if (hi < 0 || lo < 0) throw std::runtime_error("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return out;
}

std::string u64_hex(std::uint64_t v) {
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHexDigits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace mobsim
