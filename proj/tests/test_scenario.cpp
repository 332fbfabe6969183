#include <doctest.h>

#include "mobsim/protocols.hpp"
#include "mobsim/scenario.hpp"

using namespace mobsim;

TEST_CASE("every bundled scenario validates and runs clean") {
    for (const auto& name : bundled_scenario_names()) {
        ScenarioConfig cfg = bundled_scenario(name);
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("scenario configs survive a json round trip") {
    ScenarioConfig cfg = bundled_scenario("approx-n4");
    cfg.bias.kind = BiasKind::DelayProcessor;
    cfg.bias.victim = 2;
    cfg.seed = 99;
    ScenarioConfig back = ScenarioConfig::from_json(cfg.to_json());
    CHECK(back.net.n == cfg.net.n);
    CHECK(back.protocol == cfg.protocol);
    CHECK(back.inputs == cfg.inputs);
    CHECK(back.byzantine.size() == 1);
    CHECK(back.byzantine.at(4).kind == StrategyKind::Equivocator);
    CHECK(back.bias.kind == BiasKind::DelayProcessor);
    CHECK(back.bias.victim == 2);
    CHECK(back.seed == 99);
    // both sides run to the identical trace
    CHECK(run_scenario(cfg).trace_hash == run_scenario(back).trace_hash);
}

TEST_CASE("friendly input literals parse per protocol") {
    auto j = nlohmann::json::parse(R"({"n":4,"t":1,"protocol":"approx-agreement",
                                       "rounds":10,"inputs":[0,0,1,1]})");
    ScenarioConfig cfg = ScenarioConfig::from_json(j);
    REQUIRE(cfg.inputs.size() == 4);
    CHECK(approx_value(cfg.inputs[2]) == 1.0);
}

TEST_CASE("adversarial scheduler biases still verify end to end") {
    for (BiasKind kind : {BiasKind::Lifo, BiasKind::DelayProcessor}) {
        ScenarioConfig cfg = bundled_scenario("fault-free-n7");
        cfg.bias.kind = kind;
        cfg.bias.victim = 3;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            cfg.seed = seed;
            ScenarioOutcome outcome = run_scenario(cfg);
            INFO("bias ", static_cast<int>(kind), " seed ", seed, ": ",
                 outcome.verdict.first_failure());
            CHECK(outcome.exit_code == 0);
        }
    }
}

TEST_CASE("a single-processor system degenerates cleanly") {
    ScenarioConfig cfg;
    cfg.net = {1, 0};
    cfg.protocol = "flooding";
    cfg.rounds = 2;
    ScenarioOutcome outcome = run_scenario(cfg);
    CHECK(outcome.exit_code == 0);
    REQUIRE(outcome.run.outputs[0].has_value());
    CHECK(flooding_knowledge(*outcome.run.outputs[0]).size() == 1);
}

TEST_CASE("the equivocator's conflicting inits are visible on the wire") {
    ScenarioConfig cfg = bundled_scenario("equivocator-n4");
    ScenarioOutcome outcome = run_scenario(cfg);
    std::set<Bytes> init_values;
    for (const auto& e : outcome.run.trace) {
        if (e.kind != EventKind::Submit) continue;
        if (const auto* co = std::get_if<CoMsg>(&e.wire))
            if (co->kind == CoKind::Init && co->round == 1 && co->sender == 4)
                init_values.insert(co->value.payload);
    }
    CHECK(init_values.size() == 2);
}

TEST_CASE("batch aggregation reports per-seed failures") {
    ScenarioConfig cfg = bundled_scenario("fault-free-n4");
    BatchReport ok = run_batch(cfg, 1, 20, 1);
    CHECK(ok.passed == 20);
    CHECK(ok.exit_code == 0);

    cfg.max_picks = 15;  // nothing can finish in 15 picks
    BatchReport starved = run_batch(cfg, 1, 5, 1);
    CHECK(starved.passed == 0);
    CHECK(starved.exit_code == 4);
    CHECK(starved.to_json().at("failures").size() == 5);
}

TEST_CASE("serial and parallel batches produce identical hashes") {
    ScenarioConfig cfg = bundled_scenario("equivocator-n4");
    BatchReport serial = run_batch(cfg, 1, 24, 1);
    BatchReport parallel = run_batch(cfg, 1, 24, 2);
    REQUIRE(serial.seeds.size() == parallel.seeds.size());
    for (std::size_t i = 0; i < serial.seeds.size(); ++i) {
        CHECK(serial.seeds[i].seed == parallel.seeds[i].seed);
        CHECK(serial.seeds[i].trace_hash == parallel.seeds[i].trace_hash);
        CHECK(serial.seeds[i].exit_code == parallel.seeds[i].exit_code);
    }
}
