#pragma once

#include <json.hpp>

#include "mobsim/checker.hpp"
#include "mobsim/engine.hpp"

namespace mobsim {

// One reproducible experiment: model parameters, protocol, adversary, seed.
struct ScenarioConfig {
    std::string name = "custom";
    SystemConfig net{4, 1};
    Mode mode = Mode::MOBtt;
    std::string protocol = "flooding";
    std::uint32_t rounds = 3;
    double epsilon = 0.01;  // approx-agreement target, used by reports only
    std::vector<Bytes> inputs;  // empty -> protocol defaults
    std::map<ProcessorId, Strategy> byzantine;
    SchedulerBias bias;
    std::uint64_t seed = 1;
    std::uint64_t fairness_bound = 0;  // 0 -> 64 n^2
    std::uint64_t max_picks = 0;       // 0 -> derived budget
    std::uint64_t coin_seed = 0;       // 0 -> derived from seed

    void validate() const;
    std::vector<Bytes> materialized_inputs() const;
    std::uint64_t effective_coin_seed() const {
        return coin_seed ? coin_seed : splitmix64(seed ^ 0xc01uLL);
    }
    RunInfo run_info() const;
    AdversarySpec adversary() const;

    nlohmann::json to_json() const;  // Custom strategies are not serializable
    static ScenarioConfig from_json(const nlohmann::json& j);
};

// Bundled presets runnable by name from the CLI.
std::vector<std::string> bundled_scenario_names();
ScenarioConfig bundled_scenario(const std::string& name);

struct ScenarioOutcome {
    RunResult run;
    VerdictReport verdict;
    int exit_code = 0;  // 0 ok, 2 config, 3 verdict failure, 4 non-quiescent
    std::uint64_t trace_hash = 0;
    nlohmann::json summary;
};

ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

// Batch runner over a seed range. Each seed is an independent deterministic
// simulation; jobs != 1 runs the OpenMP kernel, jobs == 1 the serial
// reference loop (identical results either way, which tests assert).
struct SeedOutcome {
    std::uint64_t seed = 0;
    int exit_code = 0;
    std::uint64_t trace_hash = 0;
    std::string first_failure;
};

struct BatchReport {
    std::vector<SeedOutcome> seeds;
    std::uint64_t passed = 0;
    int exit_code = 0;  // worst seed outcome

    nlohmann::json to_json() const;
};

BatchReport run_batch(const ScenarioConfig& base, std::uint64_t seed_begin,
                      std::uint64_t seed_count, int jobs = 1);

// Trace files: a header line holding the scenario, then one event per line.
void write_trace_file(const std::string& path, const ScenarioConfig& cfg, const TraceLog& trace);
std::pair<ScenarioConfig, TraceLog> read_trace_file(const std::string& path);

}  // namespace mobsim
