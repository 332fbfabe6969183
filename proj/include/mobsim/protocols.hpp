#pragma once

#include <utility>
#include <vector>

#include "mobsim/protocol.hpp"

namespace mobsim {

// Full-information flooding: every round broadcast everything learned so
// far; output after R rounds is the accumulated (origin, payload) knowledge.
ProtocolSpec make_flooding_spec(const SystemConfig& cfg, std::uint32_t rounds);

// Decodes a flooding state/output back into its knowledge items.
std::vector<std::pair<ProcessorId, Bytes>> flooding_knowledge(const Bytes& encoded);

// Scalar approximate agreement: broadcast the current value each round; on a
// received multiset discard the t lowest and t highest and move to the
// midpoint of the remainder's extremes. epsilon is a run-level target, not a
// transition parameter: pick rounds >= ceil(log2(spread / epsilon)).
ProtocolSpec make_approx_agreement_spec(const SystemConfig& cfg, std::uint32_t rounds);

Bytes approx_input(double v);
double approx_value(const Bytes& payload);  // total: malformed bytes decode to 0.0

// Binary consensus in alternating report/propose rounds, breaking persistent
// splits with the shared per-(round, processor) coin. rounds must be odd so
// the run ends on an adopt round. Requires the randomized mode (n > 4t).
ProtocolSpec make_ben_or_spec(const SystemConfig& cfg, std::uint32_t rounds);

Bytes benor_input(int bit);
// decided flag + value from a ben-or output
std::pair<bool, int> benor_output(const Bytes& payload);

// Registry for CLI selection.
bool is_known_protocol(const std::string& name);
ProtocolSpec make_protocol(const std::string& name, const SystemConfig& cfg, std::uint32_t rounds);
std::vector<Bytes> default_inputs(const std::string& name, const SystemConfig& cfg);

}  // namespace mobsim
