#include <doctest.h>

#include "mobsim/checker.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/protocols.hpp"
#include "mobsim/scenario.hpp"

using namespace mobsim;

namespace {

ScenarioConfig flooding_n4() {
    ScenarioConfig cfg;
    cfg.net = {4, 1};
    cfg.mode = Mode::MOBtt;
    cfg.protocol = "flooding";
    cfg.rounds = 3;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("fault-free run completes, agrees, and replays synchronously") {
    auto outcome = run_scenario(flooding_n4());
    CHECK(outcome.run.quiescent);
    CHECK(outcome.run.complete);
    CHECK(outcome.exit_code == 0);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());

    // fault-free: zero input alterations in the extracted run
    auto cfg = flooding_n4();
    MobRun run = extract_run(cfg.run_info(), outcome.run.trace);
    CHECK(run.altered_set().empty());

    // every processor outputs, and every processor heard at least n-t inputs
    for (ProcessorId p = 1; p <= 4; ++p) {
        REQUIRE(outcome.run.outputs[p - 1].has_value());
        CHECK(flooding_knowledge(*outcome.run.outputs[p - 1]).size() >= 3);
    }
}

TEST_CASE("silent adversary: correct processors advance on n-t and output") {
    auto cfg = flooding_n4();
    cfg.byzantine[4].kind = StrategyKind::Silent;
    auto outcome = run_scenario(cfg);
    CHECK(outcome.run.quiescent);
    CHECK(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());

    // p4's input never escapes: nobody accepted its round-1 broadcast
    for (ProcessorId p = 1; p <= 3; ++p)
        CHECK(outcome.run.accepted[p - 1].count({1, 4}) == 0);
    MobRun run = extract_run(cfg.run_info(), outcome.run.trace);
    CHECK(run.inputs[3] == Bytes{});  // distinguished absent input
}

TEST_CASE("fake-accept-set blocks the faulty machine at every correct processor") {
    auto cfg = flooding_n4();
    cfg.byzantine[4].kind = StrategyKind::FakeAcceptSet;  // suppresses round 2
    auto outcome = run_scenario(cfg);
    CHECK(outcome.run.quiescent);
    CHECK(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());

    for (ProcessorId p = 1; p <= 3; ++p) {
        // replica 4 started (round-1 input accepted) and froze there
        const auto& digests = outcome.run.replica_digests[p - 1];
        REQUIRE(digests.count(4));
        CHECK(digests.at(4).size() == 1);
        // the poisoned claim is never accepted: round 2 was suppressed, and
        // round 3 waits on it forever
        CHECK(outcome.run.accepted[p - 1].count({2, 4}) == 0);
        CHECK(outcome.run.accepted[p - 1].count({3, 4}) == 0);
    }
}

TEST_CASE("equivocator: one forged value wins everywhere and maps to an altered input") {
    auto cfg = flooding_n4();
    cfg.byzantine[4].kind = StrategyKind::Equivocator;
    auto outcome = run_scenario(cfg);
    CHECK(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());

    const Bytes original = cfg.materialized_inputs()[3];
    Bytes forged = original;
    forged[0] ^= 1;
    for (ProcessorId p = 1; p <= 3; ++p) {
        auto it = outcome.run.accepted[p - 1].find({1, 4});
        REQUIRE(it != outcome.run.accepted[p - 1].end());
        CHECK(it->second.payload == forged);
    }
    MobRun run = extract_run(cfg.run_info(), outcome.run.trace);
    CHECK(run.altered_set() == std::vector<ProcessorId>{4});
}

TEST_CASE("MAOBt mode runs without the gather exchange and still replays") {
    auto cfg = flooding_n4();
    cfg.mode = Mode::MAOBt;
    cfg.byzantine[4].kind = StrategyKind::CrashAfterK;
    cfg.byzantine[4].crash_after = 10;
    auto outcome = run_scenario(cfg);
    CHECK(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());
    // no gather traffic in this mode
    for (const auto& e : outcome.run.trace)
        if (e.kind == EventKind::Submit) CHECK(!std::holds_alternative<CcMsg>(e.wire));
}

TEST_CASE("value-free transport after round 1") {
    for (const char* name : {"fault-free-n4", "equivocator-n4", "fault-free-n7"}) {
        auto outcome = run_scenario(bundled_scenario(name));
        CHECK(scan_for_value_leaks(outcome.run.trace) == -1);
    }
}

TEST_CASE("same seed reproduces the trace hash, different seeds diverge") {
    auto cfg = flooding_n4();
    cfg.seed = 77;
    auto a = run_scenario(cfg);
    auto b = run_scenario(cfg);
    CHECK(trace_hash(a.run.trace) == trace_hash(b.run.trace));
    cfg.seed = 78;
    auto c = run_scenario(cfg);
    CHECK(trace_hash(a.run.trace) != trace_hash(c.run.trace));
}

TEST_CASE("delivered ages respect the fairness ceiling") {
    auto cfg = flooding_n4();
    cfg.fairness_bound = 40;
    auto outcome = run_scenario(cfg);
    CHECK(outcome.run.complete);
    // one delivery per pick: simultaneous bursts stretch the bound by at
    // most the backlog, which the pool peak caps
    CHECK(outcome.run.max_delivered_age <= 40 + outcome.run.peak_pool);

    // at the default bound the slack never matters at this scale
    cfg.fairness_bound = 0;
    auto relaxed = run_scenario(cfg);
    CHECK(relaxed.run.max_delivered_age <= relaxed.run.fairness_bound);
}

TEST_CASE("an exhausted budget is reported as non-quiescent") {
    auto cfg = flooding_n4();
    cfg.max_picks = 20;
    auto outcome = run_scenario(cfg);
    CHECK(!outcome.run.quiescent);
    CHECK(outcome.exit_code == 4);
    CHECK_THROWS_AS(outcome.run.correct_outputs(), NonQuiescent);
}

TEST_CASE("an empty run has no outputs to extract") {
    RunResult empty;
    empty.cfg = {4, 1};
    CHECK_THROWS_AS(empty.correct_outputs(), NonQuiescent);
    CHECK_THROWS_AS(empty.digest_table(), NonQuiescent);
}

TEST_CASE("replica digests agree pairwise across correct processors") {
    auto cfg = flooding_n4();
    cfg.byzantine[4].kind = StrategyKind::Equivocator;
    auto outcome = run_scenario(cfg);
    REQUIRE(outcome.run.complete);
    auto table = outcome.run.digest_table();
    for (ProcessorId p = 1; p <= 3; ++p)
        for (const auto& [replica, digests] : outcome.run.replica_digests[p - 1])
            for (std::size_t r = 0; r < digests.size(); ++r)
                CHECK(digests[r] == table.at({replica, static_cast<std::uint32_t>(r + 1)}));
}

TEST_CASE("approx agreement over the engine lands in the input envelope") {
    ScenarioConfig cfg;
    cfg.net = {4, 1};
    cfg.protocol = "approx-agreement";
    cfg.rounds = 10;
    cfg.inputs = {approx_input(0.0), approx_input(0.0), approx_input(1.0), approx_input(1.0)};
    cfg.byzantine[4].kind = StrategyKind::Equivocator;
    cfg.seed = 5;
    auto outcome = run_scenario(cfg);
    REQUIRE(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());
    double lo = 2.0, hi = -1.0;
    for (ProcessorId p = 1; p <= 3; ++p) {
        const double v = approx_value(*outcome.run.outputs[p - 1]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(hi - lo <= 0.01);
}

TEST_CASE("randomized mode: ben-or decides, coins agree, replay matches") {
    ScenarioConfig cfg;
    cfg.net = {5, 1};
    cfg.mode = Mode::Randomized;
    cfg.protocol = "ben-or";
    cfg.rounds = 25;
    cfg.seed = 3;
    auto outcome = run_scenario(cfg);
    REQUIRE(outcome.run.complete);
    INFO(outcome.verdict.first_failure());
    CHECK(outcome.verdict.pass());
    std::optional<int> agreed;
    for (ProcessorId p = 1; p <= 5; ++p) {
        auto [decided, value] = benor_output(*outcome.run.outputs[p - 1]);
        CHECK(decided);
        if (!agreed) agreed = value;
        CHECK(value == *agreed);
    }
}

TEST_CASE("a coin protocol outside randomized mode is a config error") {
    ScenarioConfig cfg;
    cfg.net = {5, 1};
    cfg.mode = Mode::MOBtt;
    cfg.protocol = "ben-or";
    cfg.rounds = 25;
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}
