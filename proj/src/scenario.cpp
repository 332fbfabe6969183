#include "mobsim/scenario.hpp"

#include <fstream>

#include "mobsim/protocols.hpp"

#ifdef MOBSIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace mobsim {

using nlohmann::json;

void ScenarioConfig::validate() const {
    validate_config(net, mode);
    if (!is_known_protocol(protocol)) throw ConfigError("unknown protocol: " + protocol);
    if (byzantine.size() > net.t)
        throw ConfigError("byzantine list has " + std::to_string(byzantine.size()) +
                          " entries, more than t=" + std::to_string(net.t));
    for (const auto& [p, s] : byzantine)
        if (p < 1 || p > net.n) throw ConfigError("byzantine id outside 1..n");
    if (!inputs.empty() && inputs.size() != net.n)
        throw ConfigError("inputs must have exactly n entries");

    const ProtocolSpec spec = make_protocol(protocol, net, rounds);
    if (spec.uses_coin && mode != Mode::Randomized)
        throw ConfigError(protocol + " draws coins and needs mode=randomized (n > 4t)");
    if (!spec.uses_coin && mode == Mode::Randomized)
        throw ConfigError("randomized mode expects a coin-using protocol");
}

std::vector<Bytes> ScenarioConfig::materialized_inputs() const {
    return inputs.empty() ? default_inputs(protocol, net) : inputs;
}

RunInfo ScenarioConfig::run_info() const {
    RunInfo info;
    info.cfg = net;
    info.mode = mode;
    info.protocol = protocol;
    info.rounds = rounds;
    info.inputs = materialized_inputs();
    for (const auto& [p, s] : byzantine) info.byzantine.insert(p);
    info.coin_seed = effective_coin_seed();
    info.fairness_bound = fairness_bound ? fairness_bound : 64ull * net.n * net.n;
    return info;
}

AdversarySpec ScenarioConfig::adversary() const {
    AdversarySpec adv;
    adv.byzantine = byzantine;
    adv.bias = bias;
    return adv;
}

json ScenarioConfig::to_json() const {
    json j;
    j["name"] = name;
    j["n"] = net.n;
    j["t"] = net.t;
    j["mode"] = mode_name(mode);
    j["protocol"] = protocol;
    j["rounds"] = rounds;
    j["epsilon"] = epsilon;
    json in = json::array();
    for (const auto& b : inputs) in.push_back(to_hex(b));
    j["inputs_hex"] = in;
    json byz = json::object();
    for (const auto& [p, s] : byzantine) {
        if (s.kind == StrategyKind::Custom)
            throw ConfigError("custom strategies are code, not configuration");
        json e;
        e["strategy"] = strategy_name(s.kind);
        if (s.kind == StrategyKind::CrashAfterK) e["crash_after"] = s.crash_after;
        if (s.kind == StrategyKind::FakeAcceptSet) e["suppress_round"] = s.suppress_round;
        byz[std::to_string(p)] = e;
    }
    j["byzantine"] = byz;
    switch (bias.kind) {
        case BiasKind::Uniform: j["bias"] = "uniform"; break;
        case BiasKind::Lifo: j["bias"] = "lifo"; break;
        case BiasKind::DelayProcessor:
            j["bias"] = "delay-processor";
            j["bias_victim"] = bias.victim;
            break;
    }
    j["seed"] = seed;
    j["fairness_bound"] = fairness_bound;
    j["max_picks"] = max_picks;
    j["coin_seed"] = coin_seed;
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
    ScenarioConfig cfg;
    cfg.name = j.value("name", std::string("custom"));
    cfg.net.n = j.at("n").get<std::uint32_t>();
    cfg.net.t = j.at("t").get<std::uint32_t>();
    cfg.mode = mode_from_name(j.value("mode", std::string("mobtt")));
    cfg.protocol = j.value("protocol", std::string("flooding"));
    cfg.rounds = j.value("rounds", 3u);
    cfg.epsilon = j.value("epsilon", 0.01);
    if (j.contains("inputs_hex"))
        for (const auto& s : j.at("inputs_hex")) cfg.inputs.push_back(from_hex(s.get<std::string>()));
    else if (j.contains("inputs")) {
        // friendly literals: numbers for approx/ben-or, strings for flooding
        for (const auto& v : j.at("inputs")) {
            if (cfg.protocol == "approx-agreement")
                cfg.inputs.push_back(approx_input(v.get<double>()));
            else if (cfg.protocol == "ben-or")
                cfg.inputs.push_back(benor_input(v.get<int>()));
            else if (v.is_string()) {
                const std::string s = v.get<std::string>();
                cfg.inputs.emplace_back(s.begin(), s.end());
            } else {
                const std::string s = v.dump();
                cfg.inputs.emplace_back(s.begin(), s.end());
            }
        }
    }
    if (j.contains("byzantine"))
        for (const auto& [key, e] : j.at("byzantine").items()) {
            Strategy s;
            s.kind = strategy_from_name(e.at("strategy").get<std::string>());
            if (s.kind == StrategyKind::Custom)
                throw ConfigError("custom strategies cannot be loaded from configuration");
            s.crash_after = e.value("crash_after", s.crash_after);
            s.suppress_round = e.value("suppress_round", s.suppress_round);
            cfg.byzantine[static_cast<ProcessorId>(std::stoul(key))] = s;
        }
    const std::string bias = j.value("bias", std::string("uniform"));
    if (bias == "uniform")
        cfg.bias.kind = BiasKind::Uniform;
    else if (bias == "lifo")
        cfg.bias.kind = BiasKind::Lifo;
    else if (bias == "delay-processor") {
        cfg.bias.kind = BiasKind::DelayProcessor;
        cfg.bias.victim = j.value("bias_victim", 0u);
    } else
        throw ConfigError("unknown scheduler bias: " + bias);
    cfg.seed = j.value("seed", 1ull);
    cfg.fairness_bound = j.value("fairness_bound", 0ull);
    cfg.max_picks = j.value("max_picks", 0ull);
    cfg.coin_seed = j.value("coin_seed", 0ull);
    return cfg;
}

std::vector<std::string> bundled_scenario_names() {
    return {"fault-free-n4", "silent-n4",     "crash-n4",      "equivocator-n4",
            "fake-accept-n4", "fault-free-n7", "equivocator-n7", "approx-n4",
            "benor-n5"};
}

ScenarioConfig bundled_scenario(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    if (name == "fault-free-n4") {
        // defaults
    } else if (name == "silent-n4") {
        cfg.byzantine[4].kind = StrategyKind::Silent;
    } else if (name == "crash-n4") {
        cfg.byzantine[4].kind = StrategyKind::CrashAfterK;
        cfg.byzantine[4].crash_after = 16;
    } else if (name == "equivocator-n4") {
        cfg.byzantine[4].kind = StrategyKind::Equivocator;
    } else if (name == "fake-accept-n4") {
        cfg.byzantine[4].kind = StrategyKind::FakeAcceptSet;
    } else if (name == "fault-free-n7") {
        cfg.net = {7, 2};
    } else if (name == "equivocator-n7") {
        cfg.net = {7, 2};
        cfg.byzantine[6].kind = StrategyKind::Equivocator;
        cfg.byzantine[7].kind = StrategyKind::Silent;
    } else if (name == "approx-n4") {
        cfg.protocol = "approx-agreement";
        cfg.rounds = 10;
        cfg.inputs = {approx_input(0.0), approx_input(0.0), approx_input(1.0), approx_input(1.0)};
        cfg.byzantine[4].kind = StrategyKind::Equivocator;
    } else if (name == "benor-n5") {
        cfg.net = {5, 1};
        cfg.mode = Mode::Randomized;
        cfg.protocol = "ben-or";
        cfg.rounds = 25;
    } else {
        throw ConfigError("unknown bundled scenario: " + name);
    }
    return cfg;
}

namespace {

json output_display(const std::string& protocol, const Bytes& out) {
    json j;
    j["hex"] = to_hex(out);
    if (protocol == "approx-agreement") j["value"] = approx_value(out);
    if (protocol == "ben-or") {
        auto [decided, value] = benor_output(out);
        j["decided"] = decided;
        j["value"] = value;
    }
    if (protocol == "flooding") j["items"] = flooding_knowledge(out).size();
    return j;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const ProtocolSpec spec = make_protocol(cfg.protocol, cfg.net, cfg.rounds);
    std::optional<IdealDealerCoin> dealer;
    if (spec.uses_coin) dealer.emplace(cfg.effective_coin_seed());

    Schedule schedule{cfg.seed, cfg.fairness_bound, cfg.max_picks};

    ScenarioOutcome outcome;
    outcome.run = simulate(cfg.net, cfg.mode, spec, cfg.materialized_inputs(), cfg.adversary(),
                           schedule, dealer ? &*dealer : nullptr);
    outcome.trace_hash = trace_hash(outcome.run.trace);

    if (!outcome.run.quiescent || !outcome.run.complete) {
        outcome.exit_code = 4;
    } else {
        outcome.verdict = verify_run(cfg.run_info(), outcome.run.trace);
        outcome.exit_code = outcome.verdict.pass() ? 0 : 3;
    }

    json s;
    s["scenario"] = cfg.name;
    s["n"] = cfg.net.n;
    s["t"] = cfg.net.t;
    s["mode"] = mode_name(cfg.mode);
    s["protocol"] = cfg.protocol;
    s["rounds"] = cfg.rounds;
    s["seed"] = cfg.seed;
    s["quiescent"] = outcome.run.quiescent;
    s["complete"] = outcome.run.complete;
    s["events"] = outcome.run.trace.size();
    s["picks"] = outcome.run.picks;
    s["submissions"] = outcome.run.submissions;
    s["max_delivered_age"] = outcome.run.max_delivered_age;
    s["trace_hash"] = u64_hex(outcome.trace_hash);
    json outs = json::object();
    for (ProcessorId p = 1; p <= cfg.net.n; ++p)
        if (outcome.run.outputs[p - 1])
            outs[std::to_string(p)] = output_display(cfg.protocol, *outcome.run.outputs[p - 1]);
    s["outputs"] = outs;
    json checks = json::array();
    for (const auto& c : outcome.verdict.checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        if (!c.pass) e["detail"] = c.detail;
        checks.push_back(e);
    }
    s["verdict"] = json::object();
    s["verdict"]["pass"] = outcome.verdict.pass();
    s["verdict"]["checks"] = checks;
    s["exit_code"] = outcome.exit_code;
    outcome.summary = std::move(s);
    return outcome;
}

BatchReport run_batch(const ScenarioConfig& base, std::uint64_t seed_begin,
                      std::uint64_t seed_count, int jobs) {
    BatchReport report;
    report.seeds.assign(seed_count, SeedOutcome{});

    const auto run_one = [&](std::uint64_t k) {
        ScenarioConfig cfg = base;
        cfg.seed = seed_begin + k;
        SeedOutcome out;
        out.seed = cfg.seed;
        try {
            ScenarioOutcome res = run_scenario(cfg);
            out.exit_code = res.exit_code;
            out.trace_hash = res.trace_hash;
            if (res.exit_code == 3) out.first_failure = res.verdict.first_failure();
            if (res.exit_code == 4) out.first_failure = "non-quiescent";
        } catch (const std::exception& e) {
            out.exit_code = 2;
            out.first_failure = e.what();
        }
        report.seeds[k] = std::move(out);
    };

#ifdef MOBSIM_HAVE_OPENMP
    if (jobs != 1) {
        if (jobs > 1) omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
        for (long long k = 0; k < static_cast<long long>(seed_count); ++k)
            run_one(static_cast<std::uint64_t>(k));
    } else {
        for (std::uint64_t k = 0; k < seed_count; ++k) run_one(k);
    }
#else
    (void)jobs;
    for (std::uint64_t k = 0; k < seed_count; ++k) run_one(k);
#endif

    for (const auto& s : report.seeds) {
        if (s.exit_code == 0) ++report.passed;
        report.exit_code = std::max(report.exit_code, s.exit_code);
    }
    return report;
}

json BatchReport::to_json() const {
    json j;
    j["seeds"] = seeds.size();
    j["passed"] = passed;
    j["exit_code"] = exit_code;
    json failures = json::array();
    for (const auto& s : seeds)
        if (s.exit_code != 0) {
            json f;
            f["seed"] = s.seed;
            f["exit_code"] = s.exit_code;
            f["detail"] = s.first_failure;
            failures.push_back(f);
        }
    j["failures"] = failures;
    return j;
}

void write_trace_file(const std::string& path, const ScenarioConfig& cfg, const TraceLog& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    json header;
    header["mobsim_trace"] = 1;
    header["scenario"] = cfg.to_json();
    out << header.dump() << "\n";
    for (const auto& e : trace) out << e.to_json_line() << "\n";
}

std::pair<ScenarioConfig, TraceLog> read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
    json header = json::parse(line);
    if (!header.contains("mobsim_trace")) throw std::runtime_error("missing trace header");
    ScenarioConfig cfg = ScenarioConfig::from_json(header.at("scenario"));
    TraceLog trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        trace.push_back(TraceEvent::from_json_line(line));
    }
    return {std::move(cfg), std::move(trace)};
}

}  // namespace mobsim
