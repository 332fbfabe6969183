#include "mobsim/checker.hpp"

#include <algorithm>

#include "mobsim/coin.hpp"
#include "mobsim/protocols.hpp"

namespace mobsim {

namespace {

using InstanceKey = std::pair<std::uint32_t, ProcessorId>;  // (round, sender)

// One pass over the trace, indexed for the individual checks. Engine-side
// events from faulty processors are untrusted and dropped here; transport
// events are kept for everyone.
struct TraceIndex {
    // per correct processor, accepts in trace order
    std::map<ProcessorId, std::vector<const TraceEvent*>> accepts;
    std::map<ProcessorId, std::map<InstanceKey, BroadcastValue>> accepted_map;
    // (replica, round) -> correct processor -> digest; stepped uses the same
    // (replica, round) keying
    std::map<std::pair<ProcessorId, std::uint32_t>, std::map<ProcessorId, std::uint64_t>> digests;
    std::set<std::pair<ProcessorId, std::uint32_t>> stepped;
    std::map<ProcessorId, std::map<std::uint32_t, std::vector<ProcessorId>>> round_advance;
    std::map<ProcessorId, std::map<std::uint32_t, std::vector<ProcessorId>>> cc_sent[2];
    std::map<ProcessorId, Bytes> outputs;
    std::map<InstanceKey, std::map<ProcessorId, int>> coins;  // (replica, round) -> p -> bit
    std::map<std::uint64_t, const TraceEvent*> submit_by_seq;

    static TraceIndex build(const RunInfo& info, const TraceLog& trace) {
        TraceIndex ix;
        for (const auto& e : trace) {
            if (e.kind == EventKind::Submit) {
                ix.submit_by_seq.emplace(e.seq, &e);
                if (info.is_correct(e.src)) {
                    if (const auto* cc = std::get_if<CcMsg>(&e.wire))
                        ix.cc_sent[cc->step - 1][e.src].emplace(cc->round, cc->ids);
                }
                continue;
            }
            if (e.kind == EventKind::Deliver) continue;
            if (!info.is_correct(e.p)) continue;
            switch (e.kind) {
                case EventKind::Accept:
                    ix.accepts[e.p].push_back(&e);
                    ix.accepted_map[e.p].emplace(InstanceKey{e.round, e.replica}, e.value);
                    break;
                case EventKind::SmStep:
                    ix.digests[{e.replica, e.round}].emplace(e.p, e.digest);
                    ix.stepped.insert({e.replica, e.round});
                    break;
                case EventKind::RoundAdvance:
                    ix.round_advance[e.p].emplace(e.round, e.ids);
                    break;
                case EventKind::Output:
                    ix.outputs.emplace(e.p, e.payload);
                    break;
                case EventKind::Coin:
                    ix.coins[{e.replica, e.round}].emplace(e.p, e.coin);
                    break;
                default:
                    break;
            }
        }
        return ix;
    }

    std::vector<ProcessorId> correct(const RunInfo& info) const {
        std::vector<ProcessorId> out;
        for (ProcessorId p = 1; p <= info.cfg.n; ++p)
            if (info.is_correct(p)) out.push_back(p);
        return out;
    }
};

std::string key_str(InstanceKey k) {
    return "(r=" + std::to_string(k.first) + ", s=" + std::to_string(k.second) + ")";
}

CheckResult check_outputs_present(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"outputs-present", true, ""};
    for (ProcessorId p : ix.correct(info))
        if (!ix.outputs.count(p)) {
            c.pass = false;
            c.detail = "correct processor " + std::to_string(p) + " produced no output";
            break;
        }
    return c;
}

// CO1: every correct processor accepts a correct sender's broadcasts as the
// full consecutive sequence 1..R, in send order, with identical values.
CheckResult check_co1(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"co1-sender-order", true, ""};
    for (ProcessorId s : ix.correct(info)) {
        std::map<std::uint32_t, BroadcastValue> reference;
        for (ProcessorId p : ix.correct(info)) {
            std::uint32_t expected = 1;
            auto it = ix.accepts.find(p);
            if (it == ix.accepts.end()) {
                c = {"co1-sender-order", false, "no accepts at " + std::to_string(p)};
                return c;
            }
            for (const TraceEvent* e : it->second) {
                if (e->replica != s) continue;
                if (e->round != expected) {
                    c.pass = false;
                    c.detail = "processor " + std::to_string(p) + " accepted " +
                               key_str({e->round, s}) + " out of order (expected round " +
                               std::to_string(expected) + ")";
                    return c;
                }
                auto [ref, inserted] = reference.emplace(e->round, e->value);
                if (!inserted && !(ref->second == e->value)) {
                    c.pass = false;
                    c.detail = "processor " + std::to_string(p) + " accepted a different value " +
                               key_str({e->round, s});
                    return c;
                }
                ++expected;
            }
            if (expected != info.rounds + 1) {
                c.pass = false;
                c.detail = "processor " + std::to_string(p) + " accepted only " +
                           std::to_string(expected - 1) + "/" + std::to_string(info.rounds) +
                           " broadcasts of sender " + std::to_string(s);
                return c;
            }
        }
    }
    return c;
}

// CO2: accepting (r, s, v) implies every (r-1, q) for q in v was accepted
// earlier at the same processor.
CheckResult check_co2(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"co2-causality", true, ""};
    for (ProcessorId p : ix.correct(info)) {
        std::set<InstanceKey> seen;
        auto it = ix.accepts.find(p);
        if (it == ix.accepts.end()) continue;
        for (const TraceEvent* e : it->second) {
            if (e->round > 1) {
                if (!e->value.is_ids) {
                    c.pass = false;
                    c.detail = "processor " + std::to_string(p) + " accepted a non-id-set value " +
                               key_str({e->round, e->replica});
                    return c;
                }
                for (ProcessorId q : e->value.ids)
                    if (!seen.count({e->round - 1, q})) {
                        c.pass = false;
                        c.detail = "processor " + std::to_string(p) + " accepted " +
                                   key_str({e->round, e->replica}) + " before " +
                                   key_str({e->round - 1, q});
                        return c;
                    }
            }
            seen.insert({e->round, e->replica});
        }
    }
    return c;
}

// CO3 at quiescence: correct processors' accepted maps agree everywhere.
// A blocked instance is blocked for all, an accepted one accepted by all
// with the same value.
CheckResult check_co3(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"co3-quiescent-agreement", true, ""};
    const auto correct = ix.correct(info);
    if (correct.empty()) return c;
    const auto& ref = ix.accepted_map.count(correct[0])
                          ? ix.accepted_map.at(correct[0])
                          : std::map<InstanceKey, BroadcastValue>{};
    for (ProcessorId p : correct) {
        const auto& mine = ix.accepted_map.count(p) ? ix.accepted_map.at(p)
                                                    : std::map<InstanceKey, BroadcastValue>{};
        if (mine.size() != ref.size()) {
            c.pass = false;
            c.detail = "accepted domains differ between " + std::to_string(correct[0]) + " and " +
                       std::to_string(p);
            return c;
        }
        for (const auto& [key, value] : mine) {
            auto r = ref.find(key);
            if (r == ref.end() || !(r->second == value)) {
                c.pass = false;
                c.detail = "accepted maps diverge at " + key_str(key);
                return c;
            }
        }
    }
    return c;
}

CheckResult check_no_equivocation(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"no-equivocation", true, ""};
    std::map<InstanceKey, BroadcastValue> seen;
    for (ProcessorId p : ix.correct(info)) {
        auto it = ix.accepted_map.find(p);
        if (it == ix.accepted_map.end()) continue;
        for (const auto& [key, value] : it->second) {
            auto [ref, inserted] = seen.emplace(key, value);
            if (!inserted && !(ref->second == value)) {
                c.pass = false;
                c.detail = "two correct processors accepted different values for " + key_str(key);
                return c;
            }
        }
    }
    return c;
}

CheckResult check_replica_agreement(const RunInfo& info, const TraceIndex& ix) {
    (void)info;
    CheckResult c{"replica-agreement", true, ""};
    for (const auto& [key, by_p] : ix.digests) {
        std::optional<std::uint64_t> ref;
        for (const auto& [p, d] : by_p) {
            if (!ref) ref = d;
            if (*ref != d) {
                c.pass = false;
                c.detail = "replica " + std::to_string(key.first) + " round " +
                           std::to_string(key.second) + " digests differ";
                return c;
            }
        }
    }
    return c;
}

CheckResult check_value_free(const TraceLog& trace) {
    CheckResult c{"value-free-transport", true, ""};
    const long leak = scan_for_value_leaks(trace);
    if (leak >= 0) {
        c.pass = false;
        c.detail = "protocol value on the wire at event " + std::to_string(leak);
    }
    return c;
}

CheckResult check_authentication(const TraceLog& trace) {
    CheckResult c{"authentication", true, ""};
    std::map<std::uint64_t, std::pair<ProcessorId, ProcessorId>> submitted;
    for (const auto& e : trace) {
        if (e.kind == EventKind::Submit) submitted[e.seq] = {e.src, e.dst};
        if (e.kind != EventKind::Deliver) continue;
        auto it = submitted.find(e.seq);
        if (it == submitted.end() || it->second != std::make_pair(e.src, e.dst)) {
            c.pass = false;
            c.detail = "delivered envelope " + std::to_string(e.seq) +
                       " does not match its submission";
            return c;
        }
    }
    return c;
}

// One delivery per pick: a burst of b simultaneous submissions can push a
// delivery b picks past the bound, so the guaranteed ceiling is the bound
// plus the peak number pending.
CheckResult check_fairness(const RunInfo& info, const TraceLog& trace) {
    CheckResult c{"fairness-bound", true, ""};
    if (info.fairness_bound == 0) return c;
    std::uint64_t pending = 0, peak = 0;
    for (const auto& e : trace) {
        if (e.kind == EventKind::Submit) peak = std::max(peak, ++pending);
        if (e.kind == EventKind::Deliver) --pending;
    }
    std::map<std::uint64_t, std::uint64_t> submit_pick;
    for (const auto& e : trace) {
        if (e.kind == EventKind::Submit) submit_pick[e.seq] = e.at_pick;
        if (e.kind != EventKind::Deliver) continue;
        const std::uint64_t age = e.at_pick - submit_pick[e.seq];
        if (age > info.fairness_bound + peak) {
            c.pass = false;
            c.detail = "envelope " + std::to_string(e.seq) + " waited " + std::to_string(age) +
                       " picks, ceiling is " + std::to_string(info.fairness_bound + peak);
            return c;
        }
    }
    return c;
}

void check_core(const RunInfo& info, const TraceIndex& ix, VerdictReport& report) {
    CheckResult term{"core-termination", true, ""};
    CheckResult validity{"core-validity", true, ""};
    CheckResult common{"core-commonality", true, ""};
    CheckResult pigeon{"core-pigeonhole", true, ""};
    const auto correct = ix.correct(info);

    for (std::uint32_t r = 1; r + 1 <= info.rounds && term.pass && validity.pass && common.pass &&
                              pigeon.pass;
         ++r) {
        // termination + validity: every correct processor returned a set
        // containing what it started from
        std::vector<ProcessorId> common_set;
        bool first = true;
        for (ProcessorId p : correct) {
            const auto adv = ix.round_advance.count(p) ? ix.round_advance.at(p) :
                             std::map<std::uint32_t, std::vector<ProcessorId>>{};
            auto out = adv.find(r);
            if (out == adv.end()) {
                term = {"core-termination", false,
                        "processor " + std::to_string(p) + " never returned for round " +
                            std::to_string(r)};
                break;
            }
            const auto sent1 = ix.cc_sent[0].count(p) ? ix.cc_sent[0].at(p) :
                               std::map<std::uint32_t, std::vector<ProcessorId>>{};
            auto in = sent1.find(r);
            if (in == sent1.end()) {
                term = {"core-termination", false,
                        "processor " + std::to_string(p) + " never entered round " +
                            std::to_string(r)};
                break;
            }
            if (!std::includes(out->second.begin(), out->second.end(), in->second.begin(),
                               in->second.end())) {
                validity = {"core-validity", false,
                            "output of processor " + std::to_string(p) + " at round " +
                                std::to_string(r) + " misses part of its input set"};
                break;
            }
            if (first) {
                common_set = out->second;
                first = false;
            } else {
                std::vector<ProcessorId> merged;
                std::set_intersection(common_set.begin(), common_set.end(), out->second.begin(),
                                      out->second.end(), std::back_inserter(merged));
                common_set = std::move(merged);
            }
        }
        if (!term.pass || !validity.pass) break;
        if (common_set.size() < info.cfg.quorum()) {
            common = {"core-commonality", false,
                      "round " + std::to_string(r) + " common core has " +
                          std::to_string(common_set.size()) + " members, need " +
                          std::to_string(info.cfg.quorum())};
            break;
        }

        // pigeonhole witness: some correct step-1 set is contained in at
        // least t+1 correct processors' step-2 sets
        bool witness = false;
        for (ProcessorId j : correct) {
            const auto& sent1 = ix.cc_sent[0].at(j);
            auto sj = sent1.find(r);
            if (sj == sent1.end()) continue;
            std::uint32_t rows = 0;
            for (ProcessorId i : correct) {
                const auto& sent2 = ix.cc_sent[1].count(i) ? ix.cc_sent[1].at(i) :
                                    std::map<std::uint32_t, std::vector<ProcessorId>>{};
                auto si = sent2.find(r);
                if (si == sent2.end()) continue;
                if (std::includes(si->second.begin(), si->second.end(), sj->second.begin(),
                                  sj->second.end()))
                    ++rows;
            }
            if (rows >= info.cfg.t + 1) {
                witness = true;
                break;
            }
        }
        if (!witness)
            pigeon = {"core-pigeonhole", false,
                      "no witness step-1 set at round " + std::to_string(r)};
    }

    report.checks.push_back(term);
    report.checks.push_back(validity);
    report.checks.push_back(common);
    report.checks.push_back(pigeon);
}

CheckResult check_coins(const RunInfo& info, const TraceIndex& ix) {
    CheckResult c{"coin-agreement", true, ""};
    IdealDealerCoin dealer(info.coin_seed);
    for (const auto& [key, by_p] : ix.coins) {
        const int expected = dealer.coin(key.second, key.first);
        for (const auto& [p, bit] : by_p)
            if (bit != expected) {
                c.pass = false;
                c.detail = "coin for replica " + std::to_string(key.first) + " round " +
                           std::to_string(key.second) + " disagrees at processor " +
                           std::to_string(p);
                return c;
            }
    }
    return c;
}

}  // namespace

MobRun extract_run(const RunInfo& info, const TraceLog& trace) {
    const TraceIndex ix = TraceIndex::build(info, trace);

    // merged accepted claims over correct processors (agreement is checked
    // separately; the first recording wins here)
    std::map<InstanceKey, BroadcastValue> claims;
    for (const auto& [p, accepted] : ix.accepted_map)
        for (const auto& [key, value] : accepted) claims.emplace(key, value);

    MobRun run;
    run.original_inputs = info.inputs;
    run.inputs.assign(info.cfg.n, Bytes{});
    for (ProcessorId s = 1; s <= info.cfg.n; ++s) {
        auto it = claims.find({1, s});
        if (it == claims.end()) continue;  // never accepted: distinguished absent input
        if (it->second.is_ids)
            throw ExtractionFailure("round-1 claim of " + std::to_string(s) + " is an id set");
        run.inputs[s - 1] = it->second.payload;
    }

    for (std::uint32_t r = 1; r + 1 <= info.rounds; ++r) {
        for (ProcessorId s = 1; s <= info.cfg.n; ++s) {
            // a replica that never advanced past r constrains nothing
            if (!ix.stepped.count({s, r + 1})) continue;
            auto it = claims.find({r + 1, s});
            if (it == claims.end() || !it->second.is_ids)
                throw ExtractionFailure("processed claim without an accepted id set " +
                                        key_str({r + 1, s}));
            const auto& pi = it->second.ids;
            if (pi.size() < info.cfg.quorum())
                throw ExtractionFailure("broadcast accept set below n-t at " +
                                        key_str({r + 1, s}));
            for (ProcessorId q = 1; q <= info.cfg.n; ++q)
                if (!std::binary_search(pi.begin(), pi.end(), q)) run.drops[r].insert({q, s});
        }
    }
    return run;
}

VerdictReport verify_run(const RunInfo& info, const TraceLog& trace) {
    const TraceIndex ix = TraceIndex::build(info, trace);
    VerdictReport report;

    report.checks.push_back(check_outputs_present(info, ix));
    report.checks.push_back(check_co1(info, ix));
    report.checks.push_back(check_co2(info, ix));
    report.checks.push_back(check_co3(info, ix));
    report.checks.push_back(check_no_equivocation(info, ix));
    report.checks.push_back(check_replica_agreement(info, ix));
    report.checks.push_back(check_value_free(trace));
    report.checks.push_back(check_authentication(trace));
    report.checks.push_back(check_fairness(info, trace));

    if (info.mode != Mode::MAOBt) check_core(info, ix, report);
    if (info.mode == Mode::Randomized) report.checks.push_back(check_coins(info, ix));

    // extraction validity + synchronous replay
    CheckResult extraction{"extraction-valid", true, ""};
    CheckResult replay{"replay-equivalence", true, ""};
    try {
        const MobRun run = extract_run(info, trace);
        validate_mob_run(run, info.cfg, info.mode == Mode::MAOBt ? Mode::MAOBt : Mode::MOBtt,
                         info.rounds);

        const ProtocolSpec spec = make_protocol(info.protocol, info.cfg, info.rounds);
        std::optional<IdealDealerCoin> dealer;
        if (spec.uses_coin) dealer.emplace(info.coin_seed);
        const SyncExecution sync =
            execute_sync(spec, info.cfg, run, dealer ? &*dealer : nullptr);

        for (ProcessorId p = 1; p <= info.cfg.n && replay.pass; ++p) {
            if (!info.is_correct(p)) continue;
            auto out = ix.outputs.find(p);
            if (out != ix.outputs.end() && out->second != sync.outputs[p - 1])
                replay = {"replay-equivalence", false,
                          "output of processor " + std::to_string(p) +
                              " differs from the synchronous replay"};
        }
        for (const auto& [key, by_p] : ix.digests) {
            if (!replay.pass) break;
            const auto& [replica, round] = key;
            for (const auto& [p, d] : by_p)
                if (d != sync.digest_of(replica, round)) {
                    replay = {"replay-equivalence", false,
                              "replica " + std::to_string(replica) + " round " +
                                  std::to_string(round) + " diverges from the replay at " +
                                  std::to_string(p)};
                    break;
                }
        }
    } catch (const std::exception& e) {
        extraction = {"extraction-valid", false, e.what()};
        replay = {"replay-equivalence", false, "skipped: extraction failed"};
    }
    report.checks.push_back(extraction);
    report.checks.push_back(replay);
    return report;
}

bool corrupt_one_digest(TraceLog& trace) {
    for (auto& e : trace)
        if (e.kind == EventKind::SmStep) {
            e.digest ^= 0x1;
            return true;
        }
    return false;
}

}  // namespace mobsim
