#include "mobsim/protocols.hpp"

#include <algorithm>
#include <cstring>

namespace mobsim {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const Bytes& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw std::runtime_error("truncated encoding");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
}

// ---- flooding ----

using Knowledge = std::vector<std::pair<ProcessorId, Bytes>>;

Bytes encode_knowledge(const Knowledge& k) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(k.size()));
    for (const auto& [origin, payload] : k) {
        put_u32(out, origin);
        put_u32(out, static_cast<std::uint32_t>(payload.size()));
        out.insert(out.end(), payload.begin(), payload.end());
    }
    return out;
}

Knowledge decode_knowledge(const Bytes& in) {
    Knowledge k;
    try {
        std::size_t pos = 0;
        const std::uint32_t count = get_u32(in, pos);
        for (std::uint32_t i = 0; i < count; ++i) {
            ProcessorId origin = get_u32(in, pos);
            std::uint32_t len = get_u32(in, pos);
            if (pos + len > in.size()) throw std::runtime_error("truncated item");
            Bytes payload(in.begin() + static_cast<long>(pos), in.begin() + static_cast<long>(pos + len));
            pos += len;
            k.emplace_back(origin, std::move(payload));
        }
    } catch (const std::exception&) {
        k.clear();  // garbage from a faulty peer contributes nothing
    }
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

// ---- approximate agreement ----

Bytes encode_double(double v) {
    Bytes out(8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits >> (8 * i));
    return out;
}

double decode_double(const Bytes& in) {
    if (in.size() != 8) return 0.0;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[static_cast<std::size_t>(i)]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    if (!(v == v) || v > 1e300 || v < -1e300) return 0.0;  // NaN / inf
    return v;
}

}  // namespace

std::vector<std::pair<ProcessorId, Bytes>> flooding_knowledge(const Bytes& encoded) {
    return decode_knowledge(encoded);
}

ProtocolSpec make_flooding_spec(const SystemConfig& cfg, std::uint32_t rounds) {
    if (rounds < 1) throw ConfigError("flooding: rounds must be >= 1");
    ProtocolSpec spec;
    spec.name = "flooding";
    spec.rounds = rounds;
    spec.init = [](const Bytes&) { return Bytes{}; };
    const std::uint32_t n = cfg.n;
    spec.transition = [n, rounds](const ReceivedMessages& received, const Bytes& state,
                                  std::uint32_t round, std::optional<int>) {
        Knowledge know = decode_knowledge(state);
        for (const auto& [from, payload] : received) {
            if (round == 1)
                know.emplace_back(from, payload);  // round-0 "message" is the raw input
            else {
                Knowledge theirs = decode_knowledge(payload);
                know.insert(know.end(), theirs.begin(), theirs.end());
            }
        }
        std::sort(know.begin(), know.end());
        know.erase(std::unique(know.begin(), know.end()), know.end());

        TransitionResult out;
        out.state = encode_knowledge(know);
        for (ProcessorId q = 1; q <= n; ++q) out.outbox[q] = out.state;
        if (round == rounds) out.output = out.state;
        return out;
    };
    return spec;
}

Bytes approx_input(double v) { return encode_double(v); }
double approx_value(const Bytes& payload) { return decode_double(payload); }

ProtocolSpec make_approx_agreement_spec(const SystemConfig& cfg, std::uint32_t rounds) {
    if (rounds < 1) throw ConfigError("approx-agreement: rounds must be >= 1");
    ProtocolSpec spec;
    spec.name = "approx-agreement";
    spec.rounds = rounds;
    spec.init = [](const Bytes&) { return Bytes{}; };
    const std::uint32_t n = cfg.n;
    const std::uint32_t t = cfg.t;
    spec.transition = [n, t, rounds](const ReceivedMessages& received, const Bytes& state,
                                     std::uint32_t round, std::optional<int>) {
        double value = decode_double(state);
        if (round == 1) {
            if (!received.empty()) value = decode_double(received.begin()->second);
        } else {
            std::vector<double> vals;
            vals.reserve(received.size());
            for (const auto& [from, payload] : received) vals.push_back(decode_double(payload));
            std::sort(vals.begin(), vals.end());
            if (vals.size() > 2 * t) {
                // drop the t lowest and t highest, move to the midpoint of
                // what's left
                const double lo = vals[t];
                const double hi = vals[vals.size() - 1 - t];
                value = (lo + hi) / 2.0;
            }
        }
        TransitionResult out;
        out.state = encode_double(value);
        for (ProcessorId q = 1; q <= n; ++q) out.outbox[q] = out.state;
        if (round == rounds) out.output = out.state;
        return out;
    };
    return spec;
}

// ---- ben-or style binary consensus ----

namespace {

constexpr std::uint8_t kNoProposal = 0xff;

struct BenOrState {
    std::uint8_t est = 0;
    std::uint8_t decided = 0;
    std::uint8_t value = 0;
};

Bytes encode_benor(const BenOrState& s) { return Bytes{s.est, s.decided, s.value}; }

BenOrState decode_benor(const Bytes& in) {
    BenOrState s;
    if (in.size() == 3) {
        s.est = in[0] & 1;
        s.decided = in[1] & 1;
        s.value = in[2] & 1;
    }
    return s;
}

int decode_bit(const Bytes& in) { return in.empty() ? 0 : (in[0] & 1); }

}  // namespace

Bytes benor_input(int bit) { return Bytes{static_cast<std::uint8_t>(bit & 1)}; }

std::pair<bool, int> benor_output(const Bytes& payload) {
    BenOrState s = decode_benor(payload);
    return {s.decided != 0, s.decided ? s.value : s.est};
}

ProtocolSpec make_ben_or_spec(const SystemConfig& cfg, std::uint32_t rounds) {
    if (rounds < 3 || rounds % 2 == 0)
        throw ConfigError("ben-or: rounds must be odd and >= 3 (report/propose phases)");
    ProtocolSpec spec;
    spec.name = "ben-or";
    spec.rounds = rounds;
    spec.uses_coin = true;
    spec.init = [](const Bytes&) { return encode_benor(BenOrState{}); };
    const std::uint32_t n = cfg.n;
    const std::uint32_t t = cfg.t;
    spec.transition = [n, t, rounds](const ReceivedMessages& received, const Bytes& state,
                                     std::uint32_t round, std::optional<int> coin) {
        BenOrState s = decode_benor(state);
        Bytes send;  // this round's broadcast payload

        if (round == 1) {
            if (!received.empty()) s.est = static_cast<std::uint8_t>(decode_bit(received.begin()->second));
            send = Bytes{s.est};
        } else if (round % 2 == 0) {
            // propose round: received are est reports
            std::uint32_t count[2] = {0, 0};
            for (const auto& [from, payload] : received) ++count[decode_bit(payload)];
            std::uint8_t proposal = kNoProposal;
            for (int v = 0; v < 2; ++v)
                if (count[v] >= n - 2 * t) proposal = static_cast<std::uint8_t>(v);
            if (s.decided) proposal = s.value;  // a decided processor keeps pushing its value
            send = Bytes{proposal};
        } else {
            // adopt round: received are proposals
            std::uint32_t count[2] = {0, 0};
            for (const auto& [from, payload] : received) {
                if (payload.empty() || payload[0] == kNoProposal) continue;
                ++count[payload[0] & 1];
            }
            if (!s.decided) {
                const int major = count[1] > count[0] ? 1 : 0;
                if (count[major] >= n - 2 * t) {
                    s.est = s.value = static_cast<std::uint8_t>(major);
                    s.decided = 1;
                } else if (count[0] + count[1] > 0) {
                    s.est = static_cast<std::uint8_t>(major);
                } else {
                    s.est = static_cast<std::uint8_t>(coin.value_or(0) & 1);
                }
            }
            send = Bytes{s.decided ? s.value : s.est};
        }

        TransitionResult out;
        out.state = encode_benor(s);
        for (ProcessorId q = 1; q <= n; ++q) out.outbox[q] = send;
        if (round == rounds) out.output = out.state;
        return out;
    };
    return spec;
}

// ---- registry ----

bool is_known_protocol(const std::string& name) {
    return name == "flooding" || name == "approx-agreement" || name == "ben-or";
}

ProtocolSpec make_protocol(const std::string& name, const SystemConfig& cfg, std::uint32_t rounds) {
    if (name == "flooding") return make_flooding_spec(cfg, rounds);
    if (name == "approx-agreement") return make_approx_agreement_spec(cfg, rounds);
    if (name == "ben-or") return make_ben_or_spec(cfg, rounds);
    throw ConfigError("unknown protocol: " + name);
}

std::vector<Bytes> default_inputs(const std::string& name, const SystemConfig& cfg) {
    std::vector<Bytes> inputs;
    for (ProcessorId p = 1; p <= cfg.n; ++p) {
        if (name == "flooding") {
            std::string s = "v" + std::to_string(p);
            inputs.emplace_back(s.begin(), s.end());
        } else if (name == "approx-agreement") {
            inputs.push_back(approx_input(p % 2 == 0 ? 1.0 : 0.0));
        } else if (name == "ben-or") {
            inputs.push_back(benor_input(static_cast<int>(p % 2)));
        } else {
            throw ConfigError("unknown protocol: " + name);
        }
    }
    return inputs;
}

}  // namespace mobsim
