#include "mobsim/wire.hpp"

#include <algorithm>

#include <json.hpp>

namespace mobsim {

using nlohmann::json;

BroadcastValue BroadcastValue::id_set(std::vector<ProcessorId> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return BroadcastValue{true, {}, std::move(s)};
}

bool BroadcastValue::contains(ProcessorId p) const {
    return is_ids && std::binary_search(ids.begin(), ids.end(), p);
}

const char* co_kind_name(CoKind k) {
    switch (k) {
        case CoKind::Init: return "init";
        case CoKind::M1: return "m1";
        case CoKind::M2: return "m2";
    }
    return "?";
}

static json value_to_json(const BroadcastValue& v) {
    json j;
    if (v.is_ids)
        j["ids"] = v.ids;
    else
        j["hex"] = to_hex(v.payload);
    return j;
}

static BroadcastValue value_from_json(const json& j) {
    if (j.contains("ids")) return BroadcastValue::id_set(j.at("ids").get<std::vector<ProcessorId>>());
    return BroadcastValue::value(from_hex(j.at("hex").get<std::string>()));
}

std::string encode_wire(const TransportMsg& msg) {
    json j;
    if (const auto* co = std::get_if<CoMsg>(&msg)) {
        j["t"] = "co";
        j["k"] = co_kind_name(co->kind);
        j["r"] = co->round;
        j["s"] = co->sender;
        j["v"] = value_to_json(co->value);
    } else if (const auto* cc = std::get_if<CcMsg>(&msg)) {
        j["t"] = "cc";
        j["r"] = cc->round;
        j["step"] = cc->step;
        j["ids"] = cc->ids;
    } else {
        j["t"] = "raw";
        j["hex"] = to_hex(std::get<Bytes>(msg));
    }
    return j.dump();  // nlohmann objects keep keys sorted
}

TransportMsg decode_wire(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    try {
        if (!j.is_object()) throw std::runtime_error("not an object");
        const std::string t = j.at("t").get<std::string>();
        if (t == "co") {
            CoMsg co;
            const std::string k = j.at("k").get<std::string>();
            if (k == "init")
                co.kind = CoKind::Init;
            else if (k == "m1")
                co.kind = CoKind::M1;
            else if (k == "m2")
                co.kind = CoKind::M2;
            else
                throw std::runtime_error("bad co kind");
            co.round = j.at("r").get<std::uint32_t>();
            co.sender = j.at("s").get<ProcessorId>();
            co.value = value_from_json(j.at("v"));
            if (co.round < 1) throw std::runtime_error("bad round");
            return co;
        }
        if (t == "cc") {
            CcMsg cc;
            cc.round = j.at("r").get<std::uint32_t>();
            cc.step = j.at("step").get<std::uint8_t>();
            cc.ids = j.at("ids").get<std::vector<ProcessorId>>();
            std::sort(cc.ids.begin(), cc.ids.end());
            cc.ids.erase(std::unique(cc.ids.begin(), cc.ids.end()), cc.ids.end());
            if (cc.round < 1 || (cc.step != 1 && cc.step != 2)) throw std::runtime_error("bad cc");
            return cc;
        }
        if (t == "raw") return from_hex(j.at("hex").get<std::string>());
        throw std::runtime_error("bad tag");
    } catch (const std::exception&) {
        return Bytes(text.begin(), text.end());
    }
}

}  // namespace mobsim
