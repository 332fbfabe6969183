#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mobsim/core.hpp"

namespace mobsim {

// The value carried by one broadcast instance: round 1 carries an opaque
// input payload, every later round carries a set of processor ids. Nothing
// else ever travels on the wire after round 1.
struct BroadcastValue {
    // exactly one of the two is meaningful; `ids` is kept sorted + unique
    bool is_ids = false;
    Bytes payload;
    std::vector<ProcessorId> ids;

    static BroadcastValue value(Bytes b) { return BroadcastValue{false, std::move(b), {}}; }
    static BroadcastValue id_set(std::vector<ProcessorId> s);

    bool contains(ProcessorId p) const;
    auto operator<=>(const BroadcastValue&) const = default;
};

enum class CoKind : std::uint8_t { Init, M1, M2 };
const char* co_kind_name(CoKind k);

// One broadcast-protocol message for instance (round, sender).
struct CoMsg {
    CoKind kind = CoKind::Init;
    std::uint32_t round = 0;
    ProcessorId sender = 0;  // the instance's sender, not the transport src
    BroadcastValue value;
};

// One gather-exchange message: (round, step, id set).
struct CcMsg {
    std::uint32_t round = 0;
    std::uint8_t step = 1;  // 1 or 2
    std::vector<ProcessorId> ids;
};

// A transport payload is a well-formed protocol message or raw bytes (what a
// scripted faulty sender may emit; receivers drop these and count them).
using TransportMsg = std::variant<CoMsg, CcMsg, Bytes>;

// Canonical wire form: compact JSON, keys sorted, payload bytes lower-case
// hex. Byte-exact by construction, so adversary scripts can splice malformed
// variants and traces hash reproducibly. Schema in docs/trace-format.md.
std::string encode_wire(const TransportMsg& msg);
TransportMsg decode_wire(const std::string& text);  // unparseable -> Bytes

}  // namespace mobsim
