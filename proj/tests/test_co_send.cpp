#include <doctest.h>

#include "mobsim/co_send.hpp"

using namespace mobsim;

namespace {

const SystemConfig kN4{4, 1};  // quorum 3, vote 2, accept 3

BroadcastValue val(std::uint8_t b) { return BroadcastValue::value(Bytes{b}); }

CoMsg msg(CoKind kind, std::uint32_t r, ProcessorId s, BroadcastValue v) {
    return CoMsg{kind, r, s, std::move(v)};
}

}  // namespace

TEST_CASE("invoke broadcasts the init and self-accepts round-1 values") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 1);
    auto actions = inst.invoke(val(7), processed, diag);
    REQUIRE(actions.broadcasts.size() == 1);
    CHECK(actions.broadcasts[0].kind == CoKind::Init);
    REQUIRE(actions.accept.has_value());
    CHECK(actions.accept->round == 1);
    CHECK(actions.accept->sender == 1);
    CHECK(actions.accept->value == val(7));
    CHECK(inst.accepted());
}

TEST_CASE("re-invocation is a duplicate instance") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 1);
    inst.invoke(val(7), processed, diag);
    CHECK_THROWS_AS(inst.invoke(val(8), processed, diag), DuplicateInstance);
}

TEST_CASE("a direct init triggers exactly one m1 echo") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 2);

    // only the sender itself may open the instance
    auto forged = inst.on_message(3, msg(CoKind::Init, 1, 2, val(9)), processed, diag);
    CHECK(forged.broadcasts.empty());
    CHECK(diag.malformed == 1);

    auto first = inst.on_message(2, msg(CoKind::Init, 1, 2, val(9)), processed, diag);
    REQUIRE(first.broadcasts.size() == 1);
    CHECK(first.broadcasts[0].kind == CoKind::M1);
    CHECK(first.broadcasts[0].value == val(9));

    auto second = inst.on_message(2, msg(CoKind::Init, 1, 2, val(8)), processed, diag);
    CHECK(second.broadcasts.empty());
    CHECK(diag.duplicate_inits == 1);
}

TEST_CASE("n-t m1 echoes for one value trigger the m2") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 2);
    CHECK(inst.on_message(1, msg(CoKind::M1, 1, 2, val(9)), processed, diag).broadcasts.empty());
    CHECK(inst.on_message(2, msg(CoKind::M1, 1, 2, val(9)), processed, diag).broadcasts.empty());
    // a conflicting echo does not help the tally for 9
    CHECK(inst.on_message(3, msg(CoKind::M1, 1, 2, val(5)), processed, diag).broadcasts.empty());
    auto third = inst.on_message(4, msg(CoKind::M1, 1, 2, val(9)), processed, diag);
    REQUIRE(third.broadcasts.size() == 1);
    CHECK(third.broadcasts[0].kind == CoKind::M2);
    CHECK(third.broadcasts[0].value == val(9));
    // threshold crossings fire once
    CHECK(inst.on_message(3, msg(CoKind::M1, 1, 2, val(9)), processed, diag).broadcasts.empty());
}

TEST_CASE("t+1 m2 echoes trigger our m2 without any m1") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 2);
    CHECK(inst.on_message(1, msg(CoKind::M2, 1, 2, val(9)), processed, diag).broadcasts.empty());
    auto second = inst.on_message(3, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    REQUIRE(second.broadcasts.size() == 1);
    CHECK(second.broadcasts[0].kind == CoKind::M2);
}

TEST_CASE("2t+1 m2 echoes accept a round-1 value immediately") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 2);
    inst.on_message(1, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    inst.on_message(3, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    auto third = inst.on_message(4, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    REQUIRE(third.accept.has_value());
    CHECK(third.accept->value == val(9));
    CHECK(inst.accepted());
}

TEST_CASE("duplicate echoes from one source are counted and ignored") {
    CoSendDiagnostics diag;
    ProcessedSet processed;
    CoSendInstance inst(kN4, 1, 2);
    inst.on_message(1, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    inst.on_message(1, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    inst.on_message(1, msg(CoKind::M2, 1, 2, val(9)), processed, diag);
    CHECK(diag.duplicate_echoes == 2);
    CHECK(!inst.accepted());  // still one distinct voter
}

TEST_CASE("later rounds gate acceptance on processed predecessors") {
    CoSendDiagnostics diag;
    ProcessedSet processed{{1, 1}, {1, 2}};
    CoSendInstance inst(kN4, 2, 3);
    const auto claim = BroadcastValue::id_set({1, 2, 3});
    inst.on_message(1, msg(CoKind::M2, 2, 3, claim), processed, diag);
    inst.on_message(2, msg(CoKind::M2, 2, 3, claim), processed, diag);
    auto third = inst.on_message(4, msg(CoKind::M2, 2, 3, claim), processed, diag);
    CHECK(!third.accept.has_value());  // (1,3) not processed yet
    CHECK(inst.waiting());

    CHECK(!inst.on_processed_grown(processed).accept.has_value());
    processed.insert({1, 3});
    auto resolved = inst.on_processed_grown(processed);
    REQUIRE(resolved.accept.has_value());
    CHECK(resolved.accept->value == claim);
}

TEST_CASE("claims below n-t are rejected before the causal wait") {
    CoSendDiagnostics diag;
    ProcessedSet processed{{1, 1}, {1, 2}, {1, 3}, {1, 4}};
    CoSendInstance inst(kN4, 2, 3);
    const auto small = BroadcastValue::id_set({1, 2});
    inst.on_message(1, msg(CoKind::M2, 2, 3, small), processed, diag);
    inst.on_message(2, msg(CoKind::M2, 2, 3, small), processed, diag);
    auto third = inst.on_message(4, msg(CoKind::M2, 2, 3, small), processed, diag);
    CHECK(!third.accept.has_value());
    CHECK(inst.rejected());
    CHECK(!inst.waiting());
    CHECK(diag.undersized_claims == 1);
}

TEST_CASE("a faulty sender claiming a silent processor blocks forever") {
    CoSendDiagnostics diag;
    ProcessedSet processed{{1, 1}, {1, 2}, {1, 3}};  // (1,4) never processed
    CoSendInstance inst(kN4, 2, 4);
    const auto claim = BroadcastValue::id_set({1, 2, 4});
    inst.on_message(1, msg(CoKind::M2, 2, 4, claim), processed, diag);
    inst.on_message(2, msg(CoKind::M2, 2, 4, claim), processed, diag);
    inst.on_message(3, msg(CoKind::M2, 2, 4, claim), processed, diag);
    CHECK(inst.waiting());
    CHECK(!inst.on_processed_grown(processed).accept.has_value());
    CHECK(inst.waiting());
}
