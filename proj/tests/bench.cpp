// Throughput comparison of the serial batch loop against the OpenMP kernel.
// Both paths run the same deterministic per-seed simulations; the tool also
// cross-checks that their per-seed trace hashes agree.

#include <chrono>
#include <cstdio>
#include <string>

#include "mobsim/scenario.hpp"

#ifdef MOBSIM_HAVE_OPENMP
#include <omp.h>
#endif

using namespace mobsim;
using Clock = std::chrono::steady_clock;

namespace {

double timed_batch(const ScenarioConfig& cfg, std::uint64_t seeds, int jobs,
                   BatchReport& report) {
    const auto t0 = Clock::now();
    report = run_batch(cfg, 1, seeds, jobs);
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::uint64_t seeds = 64;
    std::string scenario = "equivocator-n7";
    if (argc > 1) scenario = argv[1];
    if (argc > 2) seeds = std::stoull(argv[2]);

    ScenarioConfig cfg = bundled_scenario(scenario);

#ifdef MOBSIM_HAVE_OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif

    std::printf("scenario=%s seeds=%llu threads=%d\n", scenario.c_str(),
                static_cast<unsigned long long>(seeds), threads);

    BatchReport serial, parallel;
    const double t_serial = timed_batch(cfg, seeds, 1, serial);
    const double t_parallel = timed_batch(cfg, seeds, 0, parallel);

    bool same = serial.seeds.size() == parallel.seeds.size();
    for (std::size_t i = 0; same && i < serial.seeds.size(); ++i)
        same = serial.seeds[i].trace_hash == parallel.seeds[i].trace_hash;

    std::printf("serial:   %8.3f s  (%7.2f runs/s)  passed %llu/%llu\n", t_serial,
                seeds / t_serial, static_cast<unsigned long long>(serial.passed),
                static_cast<unsigned long long>(seeds));
    std::printf("parallel: %8.3f s  (%7.2f runs/s)  passed %llu/%llu\n", t_parallel,
                seeds / t_parallel, static_cast<unsigned long long>(parallel.passed),
                static_cast<unsigned long long>(seeds));
    std::printf("speedup:  %.2fx  hashes %s\n", t_serial / t_parallel,
                same ? "identical" : "DIVERGED");
    return same ? 0 : 1;
}
