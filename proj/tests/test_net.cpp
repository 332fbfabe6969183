#include <doctest.h>

#include "mobsim/net.hpp"

using namespace mobsim;

namespace {

const SystemConfig kN4{4, 1};

TransportMsg init_msg(std::uint32_t r, ProcessorId s, BroadcastValue v) {
    return CoMsg{CoKind::Init, r, s, std::move(v)};
}

std::vector<Envelope> drain(Network& net) {
    std::vector<Envelope> out;
    while (auto env = net.deliver_next()) out.push_back(*env);
    return out;
}

}  // namespace

TEST_CASE("submissions from a correct source grow the pool by one") {
    Network net(kN4, {}, Schedule{1}, nullptr);
    CHECK(net.submit(1, 2, init_msg(1, 1, BroadcastValue::value({7}))) == 1);
    CHECK(net.submissions() == 1);
    CHECK(!net.quiescent());
}

TEST_CASE("a silent processor's traffic never enters the pool") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::Silent;
    Network net(kN4, adv, Schedule{1}, nullptr);
    CHECK(net.submit(4, 2, init_msg(1, 4, BroadcastValue::value({7}))) == 0);
    CHECK(net.quiescent());
    CHECK(net.submit(1, 2, init_msg(1, 1, BroadcastValue::value({7}))) == 1);
}

TEST_CASE("crash-after-k passes exactly k envelopes") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::CrashAfterK;
    adv.byzantine[4].crash_after = 3;
    Network net(kN4, adv, Schedule{1}, nullptr);
    std::size_t pooled = 0;
    for (int i = 0; i < 8; ++i)
        pooled += net.submit(4, static_cast<ProcessorId>(1 + i % 4),
                             init_msg(1, 4, BroadcastValue::value({7})));
    CHECK(pooled == 3);
}

TEST_CASE("the equivocator forges round-1 inits for the quorum-sized half") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::Equivocator;
    Network net(kN4, adv, Schedule{1}, nullptr);
    for (ProcessorId dst = 1; dst <= 4; ++dst)
        net.submit(4, dst, init_msg(1, 4, BroadcastValue::value({7})));
    auto envs = drain(net);
    REQUIRE(envs.size() == 4);
    for (const auto& env : envs) {
        CHECK(env.src == 4);  // origin survives the rewrite
        const auto& co = std::get<CoMsg>(env.payload);
        if (env.dst <= kN4.quorum())
            CHECK(co.value == BroadcastValue::value({7 ^ 1}));
        else
            CHECK(co.value == BroadcastValue::value({7}));
    }
}

TEST_CASE("the equivocator leaves later rounds and echoes alone") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::Equivocator;
    Network net(kN4, adv, Schedule{1}, nullptr);
    const auto claim = BroadcastValue::id_set({1, 2, 3, 4});
    net.submit(4, 1, init_msg(2, 4, claim));
    net.submit(4, 1, TransportMsg{CoMsg{CoKind::M1, 1, 2, BroadcastValue::value({9})}});
    auto envs = drain(net);
    REQUIRE(envs.size() == 2);
    for (const auto& env : envs) {
        const auto& co = std::get<CoMsg>(env.payload);
        if (co.kind == CoKind::Init) CHECK(co.value == claim);
        if (co.kind == CoKind::M1) CHECK(co.value == BroadcastValue::value({9}));
    }
}

TEST_CASE("fake-accept-set suppresses exactly the configured round's init") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::FakeAcceptSet;
    adv.byzantine[4].suppress_round = 2;
    Network net(kN4, adv, Schedule{1}, nullptr);
    CHECK(net.submit(4, 1, init_msg(1, 4, BroadcastValue::value({7}))) == 1);
    CHECK(net.submit(4, 1, init_msg(2, 4, BroadcastValue::id_set({1, 2, 4}))) == 0);
    CHECK(net.submit(4, 1, init_msg(3, 4, BroadcastValue::id_set({1, 2, 4}))) == 1);
    CHECK(net.submit(4, 1, TransportMsg{CoMsg{CoKind::M1, 2, 1, BroadcastValue::value({9})}}) == 1);
}

TEST_CASE("an empty pool is quiescent") {
    Network net(kN4, {}, Schedule{1}, nullptr);
    CHECK(!net.deliver_next().has_value());
    CHECK(net.quiescent());
}

TEST_CASE("identical seeds give identical delivery orders") {
    for (std::uint64_t seed : {1ull, 42ull, 977ull}) {
        std::vector<std::uint64_t> first, second;
        for (auto* order : {&first, &second}) {
            Network net(kN4, {}, Schedule{seed}, nullptr);
            for (int i = 0; i < 40; ++i)
                net.submit(static_cast<ProcessorId>(1 + i % 4),
                           static_cast<ProcessorId>(1 + (i + 1) % 4),
                           init_msg(1, static_cast<ProcessorId>(1 + i % 4),
                                    BroadcastValue::value({static_cast<std::uint8_t>(i)})));
            for (auto env = net.deliver_next(); env; env = net.deliver_next())
                order->push_back(env->seq);
        }
        CHECK(first == second);
    }
}

TEST_CASE("an envelope that ages to the fairness bound is forced out") {
    Schedule sched;
    sched.seed = 7;
    sched.fairness_bound = 5;
    Network net(kN4, {}, sched, nullptr);
    net.submit(1, 2, init_msg(1, 1, BroadcastValue::value({1})));
    // keep feeding fresh envelopes; the old one must still leave within 5 picks
    std::uint64_t delivered_first_at = 0;
    for (int round = 0; round < 12; ++round) {
        net.submit(2, 3, init_msg(1, 2, BroadcastValue::value({static_cast<std::uint8_t>(round)})));
        auto env = net.deliver_next();
        REQUIRE(env.has_value());
        if (env->seq == 0) delivered_first_at = net.picks();
    }
    CHECK(delivered_first_at > 0);
    CHECK(delivered_first_at <= 6);  // submitted at pick 0, bound 5, forced by pick 5+1
    CHECK(net.max_delivered_age() <= 6);
}

TEST_CASE("more byzantine entries than t are rejected") {
    AdversarySpec adv;
    adv.byzantine[3].kind = StrategyKind::Silent;
    adv.byzantine[4].kind = StrategyKind::Silent;
    CHECK_THROWS_AS(Network(kN4, adv, Schedule{1}, nullptr), ConfigError);
}

TEST_CASE("custom scripts rewrite freely but cannot forge the origin") {
    AdversarySpec adv;
    adv.byzantine[4].kind = StrategyKind::Custom;
    adv.byzantine[4].script = [](const Envelope& env) {
        // duplicate every envelope and stamp a bogus payload on the copy
        std::vector<std::pair<ProcessorId, TransportMsg>> out;
        out.emplace_back(env.dst, env.payload);
        out.emplace_back(env.dst, TransportMsg{Bytes{0xde, 0xad}});
        return out;
    };
    Network net(kN4, adv, Schedule{1}, nullptr);
    CHECK(net.submit(4, 1, init_msg(1, 4, BroadcastValue::value({7}))) == 2);
    auto envs = drain(net);
    for (const auto& env : envs) CHECK(env.src == 4);
}
