#include "mobsim/engine.hpp"

namespace mobsim {

ProcessorEngine::ProcessorEngine(const SystemConfig& cfg, Mode mode, const ProtocolSpec& spec,
                                 ProcessorId me, Bytes input, const CoinProvider* coin,
                                 SubmitFn submit, TraceLog* trace)
    : cfg_(cfg),
      mode_(mode),
      spec_(&spec),
      me_(me),
      input_(std::move(input)),
      coin_(coin),
      submit_(std::move(submit)),
      trace_(trace) {
    if (spec.uses_coin && coin_ == nullptr)
        throw ProviderUnavailable(spec.name + " needs a coin provider");
}

CoSendInstance& ProcessorEngine::instance_(std::uint32_t round, ProcessorId sender) {
    auto key = std::make_pair(round, sender);
    auto it = instances_.find(key);
    if (it == instances_.end())
        it = instances_.emplace(key, CoSendInstance(cfg_, round, sender)).first;
    return it->second;
}

CoreExchange& ProcessorEngine::core_round_(std::uint32_t round) {
    auto it = core_.find(round);
    if (it == core_.end()) it = core_.emplace(round, CoreExchange(cfg_, round)).first;
    return it->second;
}

void ProcessorEngine::emit_(TraceEvent e) {
    if (trace_) trace_->push_back(std::move(e));
}

void ProcessorEngine::start() {
    handle_co_actions_(
        instance_(1, me_).invoke(BroadcastValue::value(input_), processed_, diag_));
    pump_();
}

void ProcessorEngine::on_envelope(const Envelope& env) {
    if (const auto* co = std::get_if<CoMsg>(&env.payload)) {
        if (co->round < 1 || co->round > spec_->rounds) {
            ++diag_.malformed;  // rounds beyond the halting round touch no replica
        } else {
            handle_co_actions_(
                instance_(co->round, co->sender).on_message(env.src, *co, processed_, diag_));
        }
    } else if (const auto* cc = std::get_if<CcMsg>(&env.payload)) {
        if (mode_ == Mode::MAOBt || cc->round < 1 || cc->round >= spec_->rounds) {
            ++diag_.malformed;
        } else {
            handle_cc_actions_(
                core_round_(cc->round).on_message(env.src, *cc, accept_[cc->round],
                                                  diag_.duplicate_echoes));
        }
    } else {
        ++diag_.malformed;
    }
    pump_();
}

bool ProcessorEngine::handle_co_actions_(CoSendInstance::Actions&& actions) {
    bool progressed = false;
    for (const CoMsg& msg : actions.broadcasts)
        for (ProcessorId dst = 1; dst <= cfg_.n; ++dst) submit_(dst, TransportMsg{msg});
    if (actions.accept) {
        const AcceptEvent& ev = *actions.accept;
        TraceEvent e;
        e.kind = EventKind::Accept;
        e.p = me_;
        e.round = ev.round;
        e.replica = ev.sender;
        e.value = ev.value;
        emit_(std::move(e));
        accepted_log_[{ev.round, ev.sender}] = ev.value;
        unprocessed_[{ev.round, ev.sender}] = ev.value;
        progressed = true;
    }
    return progressed;
}

bool ProcessorEngine::handle_cc_actions_(CoreExchange::Actions&& actions) {
    for (const CcMsg& msg : actions.broadcasts)
        for (ProcessorId dst = 1; dst <= cfg_.n; ++dst) submit_(dst, TransportMsg{msg});
    if (actions.returned && phase_ == Phase::CoreWait) {
        phase_ = Phase::Wait;
        advance_round_(*actions.returned);
        return true;
    }
    return false;
}

std::optional<int> ProcessorEngine::draw_coin_(std::uint32_t round, ProcessorId replica) {
    if (!spec_->uses_coin) return std::nullopt;
    const int bit = coin_->coin(round, replica);
    TraceEvent e;
    e.kind = EventKind::Coin;
    e.p = me_;
    e.replica = replica;
    e.round = round;
    e.coin = bit;
    emit_(std::move(e));
    return bit;
}

void ProcessorEngine::process_claim_(std::uint32_t round, ProcessorId sender,
                                     const BroadcastValue& value) {
    if (round == 1) {
        ReplicaTrack track;
        track.input = value.payload;
        TraceEvent e;
        e.kind = EventKind::SmStart;
        e.p = me_;
        e.replica = sender;
        e.payload = track.input;
        emit_(std::move(e));

        const ReceivedMessages own_input{{sender, track.input}};
        track.rounds.push_back(step_protocol(*spec_, own_input, spec_->init(track.input), 1,
                                             draw_coin_(1, sender)));
        replicas_[sender] = std::move(track);
    } else {
        // the messages the claimant should have received in round-1: what
        // each claimed peer's machine sent it in the previous round
        ReceivedMessages received;
        for (ProcessorId q : value.ids) {
            auto it = replicas_.find(q);
            if (it == replicas_.end() || it->second.rounds.size() < round - 1)
                throw MissingSnapshot("replica " + std::to_string(q) + " missing round " +
                                      std::to_string(round - 1));
            const auto& outbox = it->second.rounds[round - 2].outbox;
            if (auto m = outbox.find(sender); m != outbox.end()) received[q] = m->second;
        }
        auto self = replicas_.find(sender);
        if (self == replicas_.end() || self->second.rounds.size() != round - 1)
            throw MissingSnapshot("replica " + std::to_string(sender) +
                                  " not at round " + std::to_string(round - 1));
        self->second.rounds.push_back(step_protocol(*spec_, received,
                                                    self->second.rounds.back().state, round,
                                                    draw_coin_(round, sender)));
    }

    TraceEvent e;
    e.kind = EventKind::SmStep;
    e.p = me_;
    e.replica = sender;
    e.round = round;
    e.digest = replicas_.at(sender).rounds[round - 1].digest();
    emit_(std::move(e));

    processed_.insert({round, sender});
    accept_[round].insert(sender);
}

bool ProcessorEngine::drain_unprocessed_() {
    bool progressed = false;
    bool advanced = true;
    while (advanced) {
        advanced = false;
        for (auto it = unprocessed_.begin(); it != unprocessed_.end();) {
            const auto [round, sender] = it->first;
            // claims advance each sender's machine one round at a time;
            // a claim arriving ahead of its predecessor parks here
            if (round > 1 && !processed_.count({round - 1, sender})) {
                ++it;
                continue;
            }
            process_claim_(round, sender, it->second);
            it = unprocessed_.erase(it);
            advanced = true;
            progressed = true;
        }
    }
    return progressed;
}

bool ProcessorEngine::resolve_waits_() {
    bool progressed = false;
    for (auto& [key, inst] : instances_) {
        if (!inst.waiting()) continue;
        progressed |= handle_co_actions_(inst.on_processed_grown(processed_));
    }
    return progressed;
}

void ProcessorEngine::advance_round_(std::vector<ProcessorId> ids) {
    TraceEvent e;
    e.kind = EventKind::RoundAdvance;
    e.p = me_;
    e.round = round_;
    e.ids = ids;
    emit_(std::move(e));

    const std::uint32_t next = round_ + 1;
    ++round_;
    handle_co_actions_(
        instance_(next, me_).invoke(BroadcastValue::id_set(std::move(ids)), processed_, diag_));
}

bool ProcessorEngine::main_task_step_() {
    if (phase_ == Phase::Halted) return false;

    if (phase_ == Phase::CoreWait)
        return handle_cc_actions_(core_round_(round_).on_accept_grown(accept_[round_]));

    // Phase::Wait
    const auto& mine = accept_[round_];
    if (mine.size() < cfg_.quorum() || !mine.count(me_)) return false;

    if (round_ == spec_->rounds) {
        const auto& track = replicas_.at(me_);
        if (track.rounds.size() != spec_->rounds || !track.rounds.back().output)
            throw MissingSnapshot("own machine incomplete at halting round");
        output_ = *track.rounds.back().output;
        TraceEvent e;
        e.kind = EventKind::Output;
        e.p = me_;
        e.payload = *output_;
        emit_(std::move(e));
        phase_ = Phase::Halted;
        return true;
    }

    if (mode_ == Mode::MAOBt) {
        advance_round_({mine.begin(), mine.end()});
        return true;
    }
    phase_ = Phase::CoreWait;
    handle_cc_actions_(core_round_(round_).invoke(mine));
    return true;
}

void ProcessorEngine::pump_() {
    bool progressed = true;
    while (progressed) {
        progressed = false;
        progressed |= drain_unprocessed_();
        progressed |= resolve_waits_();
        progressed |= main_task_step_();
    }
}

std::map<ProcessorId, Bytes> RunResult::correct_outputs() const {
    if (!quiescent || !complete)
        throw NonQuiescent("run not quiescent: no outputs to extract");
    std::map<ProcessorId, Bytes> out;
    for (ProcessorId p = 1; p <= cfg.n; ++p)
        if (is_correct(p)) out[p] = *outputs[p - 1];
    return out;
}

std::map<std::pair<ProcessorId, std::uint32_t>, std::uint64_t> RunResult::digest_table() const {
    if (!quiescent || !complete)
        throw NonQuiescent("run not quiescent: no digests to extract");
    std::map<std::pair<ProcessorId, std::uint32_t>, std::uint64_t> table;
    for (ProcessorId p = 1; p <= cfg.n; ++p) {
        if (!is_correct(p)) continue;
        for (const auto& [replica, digests] : replica_digests[p - 1])
            for (std::size_t r = 0; r < digests.size(); ++r)
                table.emplace(std::make_pair(replica, static_cast<std::uint32_t>(r + 1)),
                              digests[r]);
    }
    return table;
}

RunResult simulate(const SystemConfig& cfg, Mode mode, const ProtocolSpec& spec,
                   const std::vector<Bytes>& inputs, const AdversarySpec& adversary,
                   const Schedule& schedule, const CoinProvider* coin) {
    validate_config(cfg, mode);
    if (inputs.size() != cfg.n)
        throw ConfigError("need exactly n=" + std::to_string(cfg.n) + " inputs, got " +
                          std::to_string(inputs.size()));
    if (spec.uses_coin && mode != Mode::Randomized)
        throw ConfigError(spec.name + " uses a coin and requires the randomized mode");

    RunResult result;
    result.cfg = cfg;
    result.mode = mode;
    result.rounds = spec.rounds;
    for (const auto& [p, s] : adversary.byzantine) result.byzantine.insert(p);

    Network net(cfg, adversary, schedule, &result.trace);

    std::vector<ProcessorEngine> engines;
    engines.reserve(cfg.n);
    for (ProcessorId p = 1; p <= cfg.n; ++p)
        engines.emplace_back(cfg, mode, spec, p, inputs[p - 1], coin,
                             [&net, p](ProcessorId dst, TransportMsg msg) {
                                 net.submit(p, dst, std::move(msg));
                             },
                             &result.trace);
    for (auto& e : engines) e.start();

    // generous ceiling over the bounded per-instance echo traffic; only an
    // engine bug or a flooding custom script can reach it
    const std::uint64_t budget =
        schedule.max_picks
            ? schedule.max_picks
            : 1024 + 8ull * cfg.n * cfg.n * cfg.n * (spec.rounds + 2) +
                  32ull * cfg.n * cfg.n * (spec.rounds + 2);

    bool exhausted = false;
    while (auto env = net.deliver_next()) {
        engines[env->dst - 1].on_envelope(*env);
        if (net.picks() >= budget) {
            exhausted = true;
            break;
        }
    }

    result.quiescent = !exhausted && net.quiescent();
    result.picks = net.picks();
    result.submissions = net.submissions();
    result.max_delivered_age = net.max_delivered_age();
    result.peak_pool = net.peak_pool();
    result.fairness_bound = net.fairness_bound();

    result.complete = true;
    for (ProcessorId p = 1; p <= cfg.n; ++p) {
        const auto& eng = engines[p - 1];
        result.outputs.push_back(eng.has_output() ? std::optional<Bytes>(eng.output())
                                                  : std::nullopt);
        if (result.is_correct(p) && !eng.has_output()) result.complete = false;

        result.accepted.push_back(eng.accepted());
        std::map<ProcessorId, std::vector<std::uint64_t>> digests;
        for (const auto& [replica, track] : eng.replicas()) {
            auto& d = digests[replica];
            for (const auto& tr : track.rounds) d.push_back(tr.digest());
        }
        result.replica_digests.push_back(std::move(digests));

        std::map<std::uint32_t, RunResult::CoreRecord> records;
        for (const auto& [r, ex] : eng.core_rounds()) {
            RunResult::CoreRecord rec;
            rec.input_set = ex.input_set();
            rec.step2_set = ex.step2_set();
            rec.output_set = ex.output_set();
            rec.step1_unlockers = ex.step1_unlockers();
            rec.returned = ex.returned();
            records.emplace(r, std::move(rec));
        }
        result.core_records.push_back(std::move(records));

        result.diagnostics.duplicate_inits += eng.diagnostics().duplicate_inits;
        result.diagnostics.duplicate_echoes += eng.diagnostics().duplicate_echoes;
        result.diagnostics.malformed += eng.diagnostics().malformed;
        result.diagnostics.undersized_claims += eng.diagnostics().undersized_claims;
    }
    return result;
}

}  // namespace mobsim
