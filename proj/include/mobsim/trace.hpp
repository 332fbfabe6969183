#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mobsim/wire.hpp"

namespace mobsim {

// Everything a run emits, one event per line. submit/deliver describe the
// transport; accept/sm-*/round-advance/output/coin describe what each
// processor's engine did with it. Schema in docs/trace-format.md.
enum class EventKind : std::uint8_t {
    Submit,        // envelope entered the pending pool
    Deliver,       // envelope handed to its destination
    Accept,        // broadcast instance (r, s) accepted value v at processor p
    SmStart,       // replica s initialized with an input at processor p
    SmStep,        // replica s advanced to round r at processor p (digest)
    RoundAdvance,  // processor p broadcast its round-r accept set
    Output,        // processor p produced its protocol output
    Coin,          // processor p drew the shared coin for (replica, round)
};

const char* event_kind_name(EventKind k);

struct TraceEvent {
    EventKind kind{};

    // submit / deliver
    std::uint64_t seq = 0;      // global envelope number
    std::uint64_t at_pick = 0;  // scheduler pick count when the event fired
    ProcessorId src = 0;
    ProcessorId dst = 0;
    TransportMsg wire;

    // engine events; `p` is the processor the event happened at
    ProcessorId p = 0;
    std::uint32_t round = 0;
    ProcessorId replica = 0;        // accept/sm events: the instance's sender
    BroadcastValue value;           // accept: accepted value
    Bytes payload;                  // sm-start input / output bytes
    std::uint64_t digest = 0;       // sm-step replica digest
    std::vector<ProcessorId> ids;   // round-advance broadcast set
    int coin = -1;                  // coin bit

    std::string to_json_line() const;
    static TraceEvent from_json_line(const std::string& line);
};

using TraceLog = std::vector<TraceEvent>;

// FNV-1a over the canonical content of every event, covering exactly the
// fields the JSON lines carry (so a file round trip preserves it). This is
// the replay-determinism witness.
std::uint64_t trace_hash(const TraceLog& log);

// Criterion for value-free transport: after round 1, wire payloads may carry
// only processor-id sets and broadcast-protocol tags. Returns the offending
// event index, or -1 if clean.
long scan_for_value_leaks(const TraceLog& log);

}  // namespace mobsim
