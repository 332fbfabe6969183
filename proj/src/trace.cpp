#include "mobsim/trace.hpp"

#include <json.hpp>

namespace mobsim {

using nlohmann::json;

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Submit: return "submit";
        case EventKind::Deliver: return "deliver";
        case EventKind::Accept: return "accept";
        case EventKind::SmStart: return "sm-start";
        case EventKind::SmStep: return "sm-step";
        case EventKind::RoundAdvance: return "round-advance";
        case EventKind::Output: return "output";
        case EventKind::Coin: return "coin";
    }
    return "?";
}

static EventKind kind_from_name(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(EventKind::Coin); ++k)
        if (s == event_kind_name(static_cast<EventKind>(k))) return static_cast<EventKind>(k);
    throw std::runtime_error("unknown trace event kind: " + s);
}

static json value_json(const BroadcastValue& v) {
    json j;
    if (v.is_ids)
        j["ids"] = v.ids;
    else
        j["hex"] = to_hex(v.payload);
    return j;
}

static BroadcastValue value_from(const json& j) {
    if (j.contains("ids")) return BroadcastValue::id_set(j.at("ids").get<std::vector<ProcessorId>>());
    return BroadcastValue::value(from_hex(j.at("hex").get<std::string>()));
}

std::string TraceEvent::to_json_line() const {
    json j;
    j["ev"] = event_kind_name(kind);
    switch (kind) {
        case EventKind::Submit:
        case EventKind::Deliver:
            j["seq"] = seq;
            j["pick"] = at_pick;
            j["src"] = src;
            j["dst"] = dst;
            j["wire"] = json::parse(encode_wire(wire));
            break;
        case EventKind::Accept:
            j["p"] = p;
            j["r"] = round;
            j["s"] = replica;
            j["v"] = value_json(value);
            break;
        case EventKind::SmStart:
            j["p"] = p;
            j["sm"] = replica;
            j["input"] = to_hex(payload);
            break;
        case EventKind::SmStep:
            j["p"] = p;
            j["sm"] = replica;
            j["r"] = round;
            j["digest"] = u64_hex(digest);
            break;
        case EventKind::RoundAdvance:
            j["p"] = p;
            j["r"] = round;
            j["ids"] = ids;
            break;
        case EventKind::Output:
            j["p"] = p;
            j["out"] = to_hex(payload);
            break;
        case EventKind::Coin:
            j["p"] = p;
            j["sm"] = replica;
            j["r"] = round;
            j["bit"] = coin;
            break;
    }
    return j.dump();
}

TraceEvent TraceEvent::from_json_line(const std::string& line) {
    json j = json::parse(line);
    TraceEvent e;
    e.kind = kind_from_name(j.at("ev").get<std::string>());
    switch (e.kind) {
        case EventKind::Submit:
        case EventKind::Deliver:
            e.seq = j.at("seq").get<std::uint64_t>();
            e.at_pick = j.at("pick").get<std::uint64_t>();
            e.src = j.at("src").get<ProcessorId>();
            e.dst = j.at("dst").get<ProcessorId>();
            e.wire = decode_wire(j.at("wire").dump());
            break;
        case EventKind::Accept:
            e.p = j.at("p").get<ProcessorId>();
            e.round = j.at("r").get<std::uint32_t>();
            e.replica = j.at("s").get<ProcessorId>();
            e.value = value_from(j.at("v"));
            break;
        case EventKind::SmStart:
            e.p = j.at("p").get<ProcessorId>();
            e.replica = j.at("sm").get<ProcessorId>();
            e.payload = from_hex(j.at("input").get<std::string>());
            break;
        case EventKind::SmStep:
            e.p = j.at("p").get<ProcessorId>();
            e.replica = j.at("sm").get<ProcessorId>();
            e.round = j.at("r").get<std::uint32_t>();
            e.digest = std::stoull(j.at("digest").get<std::string>(), nullptr, 16);
            break;
        case EventKind::RoundAdvance:
            e.p = j.at("p").get<ProcessorId>();
            e.round = j.at("r").get<std::uint32_t>();
            e.ids = j.at("ids").get<std::vector<ProcessorId>>();
            break;
        case EventKind::Output:
            e.p = j.at("p").get<ProcessorId>();
            e.payload = from_hex(j.at("out").get<std::string>());
            break;
        case EventKind::Coin:
            e.p = j.at("p").get<ProcessorId>();
            e.replica = j.at("sm").get<ProcessorId>();
            e.round = j.at("r").get<std::uint32_t>();
            e.coin = j.at("bit").get<int>();
            break;
    }
    return e;
}

namespace {

void feed_value(Digest& d, const BroadcastValue& v) {
    d.feed_u64(v.is_ids ? 1 : 0);
    if (v.is_ids) {
        d.feed_u64(v.ids.size());
        for (ProcessorId q : v.ids) d.feed_u64(q);
    } else {
        d.feed_u64(v.payload.size());
        d.feed(v.payload);
    }
}

void feed_wire(Digest& d, const TransportMsg& msg) {
    if (const auto* co = std::get_if<CoMsg>(&msg)) {
        d.feed_u64(1);
        d.feed_u64(static_cast<std::uint64_t>(co->kind));
        d.feed_u64(co->round);
        d.feed_u64(co->sender);
        feed_value(d, co->value);
    } else if (const auto* cc = std::get_if<CcMsg>(&msg)) {
        d.feed_u64(2);
        d.feed_u64(cc->round);
        d.feed_u64(cc->step);
        d.feed_u64(cc->ids.size());
        for (ProcessorId q : cc->ids) d.feed_u64(q);
    } else {
        const auto& raw = std::get<Bytes>(msg);
        d.feed_u64(3);
        d.feed_u64(raw.size());
        d.feed(raw);
    }
}

}  // namespace

std::uint64_t trace_hash(const TraceLog& log) {
    // structural hash over the canonical event content; every field the JSON
    // line carries is fed, so file round trips preserve the hash
    Digest d;
    for (const auto& e : log) {
        d.feed_u64(static_cast<std::uint64_t>(e.kind));
        switch (e.kind) {
            case EventKind::Submit:
            case EventKind::Deliver:
                d.feed_u64(e.seq);
                d.feed_u64(e.at_pick);
                d.feed_u64(e.src);
                d.feed_u64(e.dst);
                feed_wire(d, e.wire);
                break;
            case EventKind::Accept:
                d.feed_u64(e.p);
                d.feed_u64(e.round);
                d.feed_u64(e.replica);
                feed_value(d, e.value);
                break;
            case EventKind::SmStart:
                d.feed_u64(e.p);
                d.feed_u64(e.replica);
                d.feed_u64(e.payload.size());
                d.feed(e.payload);
                break;
            case EventKind::SmStep:
                d.feed_u64(e.p);
                d.feed_u64(e.replica);
                d.feed_u64(e.round);
                d.feed_u64(e.digest);
                break;
            case EventKind::RoundAdvance:
                d.feed_u64(e.p);
                d.feed_u64(e.round);
                d.feed_u64(e.ids.size());
                for (ProcessorId q : e.ids) d.feed_u64(q);
                break;
            case EventKind::Output:
                d.feed_u64(e.p);
                d.feed_u64(e.payload.size());
                d.feed(e.payload);
                break;
            case EventKind::Coin:
                d.feed_u64(e.p);
                d.feed_u64(e.replica);
                d.feed_u64(e.round);
                d.feed_u64(static_cast<std::uint64_t>(e.coin));
                break;
        }
    }
    return d.value();
}

long scan_for_value_leaks(const TraceLog& log) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& e = log[i];
        if (e.kind != EventKind::Submit && e.kind != EventKind::Deliver) continue;
        if (const auto* co = std::get_if<CoMsg>(&e.wire)) {
            if (co->round > 1 && !co->value.is_ids) return static_cast<long>(i);
        } else if (std::holds_alternative<Bytes>(e.wire)) {
            return static_cast<long>(i);
        }
        // CcMsg carries id sets only, by construction
    }
    return -1;
}

}  // namespace mobsim
