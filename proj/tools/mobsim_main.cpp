#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mobsim/scenario.hpp"

using namespace mobsim;
using nlohmann::json;

namespace {

ScenarioConfig load_config(const std::string& scenario, const std::string& config_path) {
    if (!scenario.empty() && !config_path.empty())
        throw ConfigError("give either --scenario or --config, not both");
    if (!scenario.empty()) return bundled_scenario(scenario);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file: " + config_path);
        return ScenarioConfig::from_json(json::parse(in));
    }
    return ScenarioConfig{};
}

struct Overrides {
    std::uint32_t n = 0, t = 0, rounds = 0;
    std::string mode, protocol;
    std::uint64_t seed = 0;
    std::vector<std::string> byzantine;  // id=strategy[,param]

    void apply(ScenarioConfig& cfg) const {
        if (n) cfg.net.n = n;
        if (t) cfg.net.t = t;
        if (rounds) cfg.rounds = rounds;
        if (!mode.empty()) cfg.mode = mode_from_name(mode);
        if (!protocol.empty()) cfg.protocol = protocol;
        if (seed) cfg.seed = seed;
        for (const auto& spec : byzantine) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos) throw ConfigError("expected id=strategy: " + spec);
            const ProcessorId p = static_cast<ProcessorId>(std::stoul(spec.substr(0, eq)));
            std::string rest = spec.substr(eq + 1);
            Strategy s;
            const auto comma = rest.find(',');
            std::string param;
            if (comma != std::string::npos) {
                param = rest.substr(comma + 1);
                rest = rest.substr(0, comma);
            }
            s.kind = strategy_from_name(rest);
            if (!param.empty()) {
                if (s.kind == StrategyKind::CrashAfterK) s.crash_after = std::stoull(param);
                if (s.kind == StrategyKind::FakeAcceptSet)
                    s.suppress_round = static_cast<std::uint32_t>(std::stoul(param));
            }
            cfg.byzantine[p] = s;
        }
    }
};

int cmd_run(const ScenarioConfig& cfg, const std::string& trace_path) {
    ScenarioOutcome outcome = run_scenario(cfg);
    if (!trace_path.empty()) write_trace_file(trace_path, cfg, outcome.run.trace);
    std::cout << outcome.summary.dump(2) << "\n";
    return outcome.exit_code;
}

int cmd_batch(const ScenarioConfig& cfg, std::uint64_t seed_begin, std::uint64_t seeds,
              int jobs) {
    BatchReport report = run_batch(cfg, seed_begin, seeds, jobs);
    std::cout << report.to_json().dump(2) << "\n";
    return report.exit_code;
}

int cmd_check(const std::string& trace_path) {
    auto [cfg, trace] = read_trace_file(trace_path);
    VerdictReport verdict = verify_run(cfg.run_info(), trace);
    json out;
    out["trace"] = trace_path;
    out["events"] = trace.size();
    out["trace_hash"] = u64_hex(trace_hash(trace));
    out["pass"] = verdict.pass();
    json checks = json::array();
    for (const auto& c : verdict.checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        if (!c.pass) e["detail"] = c.detail;
        checks.push_back(e);
    }
    out["checks"] = checks;
    std::cout << out.dump(2) << "\n";
    return verdict.pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobsim: adversarial-network simulator and synchronous-equivalence checker "
                 "for round-based protocols"};
    app.require_subcommand(1);

    std::string scenario, config_path, trace_path;
    Overrides ov;
    std::uint64_t seed_begin = 1, seeds = 100;
    int jobs = 1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "bundled scenario name");
        cmd->add_option("--config", config_path, "scenario config file (JSON)");
        cmd->add_option("--n", ov.n, "processor count");
        cmd->add_option("--t", ov.t, "fault bound");
        cmd->add_option("--mode", ov.mode, "maobt|mobtt|randomized");
        cmd->add_option("--protocol", ov.protocol, "flooding|approx-agreement|ben-or");
        cmd->add_option("--rounds", ov.rounds, "halting round R");
        cmd->add_option("--seed", ov.seed, "scheduler seed");
        cmd->add_option("--byzantine", ov.byzantine,
                        "id=strategy[,param], e.g. 4=silent or 4=crash-after-k,16");
    };

    auto* run = app.add_subcommand("run", "run one scenario, verify it, print a summary");
    add_common(run);
    run->add_option("--trace", trace_path, "write the JSON-lines trace here");

    auto* batch = app.add_subcommand("batch", "run a seed range and aggregate verdicts");
    add_common(batch);
    batch->add_option("--seed-begin", seed_begin, "first seed");
    batch->add_option("--seeds", seeds, "number of seeds");
    batch->add_option("--jobs", jobs, "worker threads (1 = serial reference)");

    auto* check = app.add_subcommand("check", "re-verify an existing trace file");
    std::string check_path;
    check->add_option("trace", check_path, "trace file")->required();

    auto* dump = app.add_subcommand("dump-config", "print the effective configuration");
    add_common(dump);

    auto* list = app.add_subcommand("list-scenarios", "list bundled scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(check)) return cmd_check(check_path);
        if (app.got_subcommand(list)) {
            for (const auto& name : bundled_scenario_names()) std::cout << name << "\n";
            return 0;
        }
        ScenarioConfig cfg = load_config(scenario, config_path);
        ov.apply(cfg);
        if (app.got_subcommand(dump)) {
            cfg.validate();
            json j = cfg.to_json();
            j["inputs_hex"] = json::array();
            for (const auto& b : cfg.materialized_inputs()) j["inputs_hex"].push_back(to_hex(b));
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (app.got_subcommand(run)) return cmd_run(cfg, trace_path);
        if (app.got_subcommand(batch)) return cmd_batch(cfg, seed_begin, seeds, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
