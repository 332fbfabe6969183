#pragma once

#include <optional>
#include <set>
#include <string>

#include "mobsim/sync_ref.hpp"
#include "mobsim/trace.hpp"

namespace mobsim {

struct ExtractionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// What the checker needs to know about a run besides its trace; written into
// the trace-file header by the harness.
struct RunInfo {
    SystemConfig cfg;
    Mode mode = Mode::MOBtt;
    std::string protocol = "flooding";
    std::uint32_t rounds = 3;
    std::vector<Bytes> inputs;  // as configured, before any tampering
    std::set<ProcessorId> byzantine;
    std::uint64_t coin_seed = 0;
    std::uint64_t fairness_bound = 0;

    bool is_correct(ProcessorId p) const { return byzantine.count(p) == 0; }
};

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;  // first divergence / violation when failing
};

struct VerdictReport {
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string first_failure() const {
        for (const auto& c : checks)
            if (!c.pass) return c.name + ": " + c.detail;
        return "";
    }
    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Pulls the synchronous run out of a quiescent trace: accepted round-1
// values become the installed inputs (a processor whose input was never
// accepted anywhere gets the distinguished absent input and is dropped as a
// sender throughout, which its absence from every claim already encodes);
// a processor's processed round-(r+1) claim decides which round-r messages
// it received, everything outside the claim is a drop.
MobRun extract_run(const RunInfo& info, const TraceLog& trace);

// The full post-hoc verification battery for one trace: broadcast-order
// contracts, gather properties, replica agreement, value-free transport,
// model-validity of the extracted run, and the synchronous replay
// comparison. Which checks apply depends on info.mode.
VerdictReport verify_run(const RunInfo& info, const TraceLog& trace);

// Test helper: flip one replica digest (negative control for the checker).
bool corrupt_one_digest(TraceLog& trace);

}  // namespace mobsim
