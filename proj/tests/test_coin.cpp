#include <doctest.h>

#include <cmath>

#include "mobsim/coin.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/protocols.hpp"

using namespace mobsim;

TEST_CASE("dealer bias stays under 2% over 10k draws") {
    IdealDealerCoin dealer(20260810);
    std::uint64_t ones = 0, draws = 0;
    for (std::uint32_t r = 1; r <= 200; ++r)
        for (ProcessorId p = 1; p <= 50; ++p) {
            ones += static_cast<std::uint64_t>(dealer.coin(r, p));
            ++draws;
        }
    REQUIRE(draws >= 10000);
    const double mean = static_cast<double>(ones) / static_cast<double>(draws);
    CHECK(std::abs(mean - 0.5) < 0.02);
}

TEST_CASE("bits for distinct keys are independent (chi-square, p > 0.01)") {
    IdealDealerCoin dealer(424242);
    // 10k pairs of distinct keys; 2x2 contingency of (first bit, second bit)
    double table[2][2] = {{0, 0}, {0, 0}};
    std::uint64_t pairs = 0;
    for (std::uint32_t r = 1; r <= 100 && pairs < 10000; ++r)
        for (ProcessorId p = 1; p + 1 <= 100 && pairs < 10000; ++p) {
            const int a = dealer.coin(r, p);
            const int b = dealer.coin(r, p + 1);
            table[a][b] += 1.0;
            ++pairs;
        }
    const double n = static_cast<double>(pairs);
    const double row[2] = {table[0][0] + table[0][1], table[1][0] + table[1][1]};
    const double col[2] = {table[0][0] + table[1][0], table[0][1] + table[1][1]};
    double chi2 = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double expect = row[a] * col[b] / n;
            chi2 += (table[a][b] - expect) * (table[a][b] - expect) / expect;
        }
    CHECK(chi2 < 6.635);  // df=1 critical value at p=0.01
}

TEST_CASE("a coin-using spec without a provider cannot start") {
    SystemConfig cfg{5, 1};
    auto spec = make_ben_or_spec(cfg, 3);
    std::vector<Bytes> inputs;
    for (int i = 0; i < 5; ++i) inputs.push_back(benor_input(0));
    CHECK_THROWS_AS(simulate(cfg, Mode::Randomized, spec, inputs, {}, Schedule{1}, nullptr),
                    ProviderUnavailable);
}

TEST_CASE("materialized messages carry the sending round's tag") {
    SystemConfig cfg{4, 1};
    auto spec = make_flooding_spec(cfg, 3);
    auto r1 = step_protocol(spec, {{2, Bytes{7}}}, {}, 1, std::nullopt);
    // a state produced at round 1 emits only round-2 messages
    auto msgs = materialize_outbox(step_protocol(spec, {}, r1.state, 2, std::nullopt), 2, 2);
    REQUIRE(msgs.size() == 4);
    for (const auto& m : msgs) {
        CHECK(m.round == 2);
        CHECK(m.sender == 2);
    }
}
